// Copyright 2026 The Polarsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "polar/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "polar/diffusion/ablation.hpp"
#include "polar/diffusion/checkpoint.hpp"
#include "polar/error.hpp"
#include "polar/io.hpp"
#include "polar/metrics.hpp"
#include "polar/mosaic.hpp"
#include "polar/pbrdf.hpp"
#include "polar/rng.hpp"
#include "polar/scene.hpp"

namespace polar::cli {

namespace {

namespace fs = std::filesystem;
namespace dm = polar::diffusion;

constexpr double kDegToRad = std::numbers::pi / 180.0;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

void echo_config(const CLI::App& sub, std::ostream& out) {
  out << "config.command=" << sub.get_name() << "\n";
  std::istringstream lines(sub.config_to_str(true, false));
  std::string line;
  while (std::getline(lines, line))
    if (!line.empty() && line[0] != '#' && line[0] != '[') out << "config." << line << "\n";
}

std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> v;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size()) throw PreconditionError(std::string(what) + ": bad number '" + part + "'");
    v.push_back(d);
  }
  if (expected && v.size() != expected)
    throw PreconditionError(std::string(what) + ": expected " + std::to_string(expected) + " comma-separated values");
  return v;
}

void print_range(std::ostream& out, const std::string& name, const Image& img, const Mask* mask = nullptr) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    lo = std::min(lo, img[i]);
    hi = std::max(hi, img[i]);
  }
  if (lo > hi) lo = hi = 0.0;
  out << name << "_min=" << format_metric(lo) << "\n" << name << "_max=" << format_metric(hi) << "\n";
}

void print_state_summary(std::ostream& out, const PolarStateMap& s) {
  print_range(out, "s0", s.s0);
  print_range(out, "dolp", s.dolp);
  print_range(out, "aolp_deg", [&] {
    Image deg = s.aolp;
    for (double& v : deg) v /= kDegToRad;
    return deg;
  }(), &s.valid);
  std::size_t valid = 0;
  for (auto v : s.valid) valid += v ? 1 : 0;
  out << "valid_fraction=" << format_metric(s.valid.size() ? static_cast<double>(valid) / s.valid.size() : 0.0)
      << "\n";
}

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
  std::string scene, out;
  bool per_channel = false;
  std::uint64_t seed = 0;
};

void cmd_decompose(const DecomposeArgs& a, Streams io) {
  const fs::path out = a.out.empty() ? fs::path(a.scene) : fs::path(a.out);
  scene::SceneMeta meta = scene::read_meta(a.scene);
  PolarizationStack stack = scene::read_stack(a.scene);
  if (stack.channels() == 3 && !a.per_channel) stack = to_grayscale(stack, meta.gray_weights);
  const PolarStateMap state = decompose_stack(stack);
  scene::write_maps(out, state);
  meta.seed = a.seed;
  scene::write_meta(out, meta);
  print_state_summary(io.out, state);
}

// --------------------------------------------------------------- synthesize

struct SynthesizeArgs {
  std::string scene, out;
  double angle = 0.0;
  bool stack = false;
  std::uint64_t seed = 0;
};

void cmd_synthesize(const SynthesizeArgs& a, bool has_angle, Streams io) {
  if (has_angle == a.stack) throw PreconditionError("synthesize: give exactly one of --angle or --stack");
  const fs::path out = a.out.empty() ? fs::path(a.scene) : fs::path(a.out);
  scene::SceneMeta meta = scene::read_meta(a.scene);
  const PolarStateMap state = scene::read_maps(a.scene);
  if (a.stack) {
    scene::write_stack(out, synthesize_stack(state));
    io.out << "wrote=I000.pfm,I045.pfm,I090.pfm,I135.pfm\n";
  } else {
    if (!std::isfinite(a.angle)) throw PreconditionError("synthesize: angle must be finite");
    double theta = std::fmod(a.angle, 180.0);
    if (theta < 0) theta += 180.0;
    if (theta == 180.0) theta = 0.0;
    if (theta != a.angle)
      io.err << "warning: analyzer angle " << a.angle << " deg normalized to " << theta << " deg\n";
    fs::create_directories(out);
    const std::string name = scene::angle_file_name(theta);
    io::write_pfm(out / name, malus_intensity(state, theta * kDegToRad));
    io.out << "angle_deg=" << theta << "\nwrote=" << name << "\n";
  }
  meta.seed = a.seed;
  scene::write_meta(out, meta);
}

// --------------------------------------------------------------------- crop

struct CropArgs {
  std::string scene, out;
  int size = 512;
  int count = 1;
  std::uint64_t seed = 0;
};

bool is_image_file(const fs::path& p) {
  const auto ext = p.extension().string();
  return ext == ".pfm" || ext == ".pgm" || ext == ".ppm";
}

void cmd_crop(const CropArgs& a, Streams io) {
  if (a.out.empty()) throw PreconditionError("crop: --out is required");
  if (!fs::is_directory(a.scene)) throw IoError("crop: scene directory " + a.scene + " not found");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.scene))
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("crop: no images in " + a.scene);

  struct Loaded {
    fs::path name;
    bool quantized;
    Image real;
    io::QuantizedImage q;
  };
  std::vector<Loaded> images;
  int w = -1, h = -1;
  for (const auto& f : files) {
    Loaded l{f.filename(), f.extension() != ".pfm", {}, {}};
    int fw, fh;
    if (l.quantized) {
      l.q = io::read_pnm(f);
      fw = l.q.width;
      fh = l.q.height;
    } else {
      l.real = io::read_pfm(f);
      fw = l.real.width();
      fh = l.real.height();
    }
    if (w < 0) {
      w = fw;
      h = fh;
    } else if (fw != w || fh != h) {
      throw StructuralError("crop: " + f.filename().string() + " differs in size from the other images");
    }
    images.push_back(std::move(l));
  }
  require(a.size > 0 && a.size % 2 == 0, "crop: --size must be positive and even");
  require(a.size <= std::min(w, h), "crop: --size " + std::to_string(a.size) + " exceeds the image size " +
                                        std::to_string(w) + "x" + std::to_string(h));
  require(a.count >= 1, "crop: --count must be at least 1");

  const int n = a.size;
  const bool identity = (n == w && n == h);
  const int count = identity ? 1 : a.count;
  if (identity && a.count != 1) io.err << "warning: crop size equals the image size; writing a single crop\n";
  const scene::SceneMeta meta = scene::read_meta(a.scene);

  SplitMix64 rng(stream_seed(a.seed, 0xC809));
  const std::uint64_t xs = static_cast<std::uint64_t>((w - n) / 2 + 1), ys = static_cast<std::uint64_t>((h - n) / 2 + 1);
  fs::create_directories(a.out);
  std::ofstream list(fs::path(a.out) / "crops.csv");
  list << "index,x,y\n";
  for (int k = 0; k < count; ++k) {
    const int x0 = 2 * static_cast<int>(rng() % xs), y0 = 2 * static_cast<int>(rng() % ys);
    char dirname[32];
    std::snprintf(dirname, sizeof dirname, "patch_%04d", k);
    const fs::path dir = fs::path(a.out) / dirname;
    fs::create_directories(dir);
    for (const auto& l : images) {
      if (l.quantized) {
        io::QuantizedImage c{n, n, l.q.channels, l.q.maxval, {}};
        c.samples.reserve(static_cast<std::size_t>(n) * n * c.channels);
        for (int y = 0; y < n; ++y)
          for (int x = 0; x < n; ++x)
            for (int ch = 0; ch < c.channels; ++ch)
              c.samples.push_back(l.q.samples[(static_cast<std::size_t>(y0 + y) * w + (x0 + x)) * c.channels + ch]);
        io::write_pnm(dir / l.name, c);
      } else {
        Image c(n, n, l.real.channels());
        for (int y = 0; y < n; ++y)
          for (int x = 0; x < n; ++x)
            for (int ch = 0; ch < c.channels(); ++ch) c.at(x, y, ch) = l.real.at(x0 + x, y0 + y, ch);
        io::write_pfm(dir / l.name, c);
      }
    }
    scene::write_meta(dir, meta);
    list << k << "," << x0 << "," << y0 << "\n";
    io.out << "crop=" << k << "," << x0 << "," << y0 << "\n";
  }
  io.out << "crop_count=" << count << "\n";
}

// ------------------------------------------------------------------- oracle

struct OracleArgs {
  std::string out, shape = "sphere", mode = "diffuse", layout = "maps";
  int size = 64;
  double radius = 0.8;
  std::string semi_axes;
  double rotation = 0.0;
  double eta = 1.5;
  double albedo = 0.8;
  std::string light = "0,0,1";
  double ambient = 0.0;
  std::uint64_t seed = 0;
};

void cmd_oracle(const OracleArgs& a, Streams io) {
  if (a.out.empty()) throw PreconditionError("oracle: --out is required");
  NormalMap normals;
  if (a.shape == "sphere") {
    normals = make_sphere(a.size, a.radius);
  } else if (a.shape == "ellipsoid") {
    require(a.size > 0, "oracle: --size must be positive");
    const auto axes = parse_list(a.semi_axes, 3, "--semi-axes");
    normals = make_ellipsoid(a.size, a.size, 0.0, 0.0, axes[0], axes[1], axes[2], a.rotation * kDegToRad);
  } else {
    throw PreconditionError("oracle: unknown shape '" + a.shape + "' (sphere or ellipsoid)");
  }
  Material material;
  material.eta = a.eta;
  material.albedo = a.albedo;
  if (a.mode == "diffuse")
    material.mode = ReflectionMode::kDiffuse;
  else if (a.mode == "specular")
    material.mode = ReflectionMode::kSpecular;
  else
    throw PreconditionError("oracle: unknown mode '" + a.mode + "' (diffuse or specular)");
  SceneLight light;
  const auto l = parse_list(a.light, 3, "--light");
  const double len = std::hypot(l[0], l[1], l[2]);
  require(len > 0.0, "oracle: --light must be non-zero");
  light.direction = {l[0] / len, l[1] / len, l[2] / len};
  light.ambient = a.ambient;

  const PolarStateMap state = render_polar(normals, material, light);
  if (a.layout == "maps")
    scene::write_maps(a.out, state);
  else if (a.layout == "stack")
    scene::write_stack(a.out, synthesize_stack(state));
  else
    throw PreconditionError("oracle: unknown layout '" + a.layout + "' (maps or stack)");
  io::write_pfm(fs::path(a.out) / "normals.pfm", normals.normals);
  scene::SceneMeta meta;
  meta.seed = a.seed;
  scene::write_meta(a.out, meta);
  print_state_summary(io.out, state);
}

// ------------------------------------------------------------ mosaic / demosaic

struct MosaicArgs {
  std::string scene, out, pattern = "90,45,135,0";
  double read_sigma = 0.0, shot_gain = 0.0;
  int bit_depth = 0;
  std::uint64_t seed = 0;
};

void cmd_mosaic(const MosaicArgs& a, Streams io) {
  if (a.out.empty()) throw PreconditionError("mosaic: --out is required");
  scene::SceneMeta meta = scene::read_meta(a.scene);
  const PolarizationStack stack = to_grayscale(scene::read_stack(a.scene), meta.gray_weights);
  const MosaicPattern pattern = MosaicPattern::parse(a.pattern);
  MosaicFrame frame = mosaic(stack, pattern);
  SensorNoiseModel noise;
  noise.read_sigma = a.read_sigma;
  noise.shot_gain = a.shot_gain;
  if (a.bit_depth) noise.bit_depth = a.bit_depth;
  noise.seed = a.seed;
  noise.validate();
  if (a.read_sigma > 0 || a.shot_gain > 0 || a.bit_depth) frame = apply_noise(frame, noise);
  scene::write_mosaic(a.out, frame);
  meta.pattern = pattern;
  meta.bitdepth = noise.bit_depth;
  meta.seed = a.seed;
  scene::write_meta(a.out, meta);
  io.out << "width=" << frame.width() << "\nheight=" << frame.height() << "\npattern=" << pattern.to_string() << "\n";
}

struct DemosaicArgs {
  std::string scene, out;
  std::uint64_t seed = 0;
};

void cmd_demosaic(const DemosaicArgs& a, Streams io) {
  if (a.out.empty()) throw PreconditionError("demosaic: --out is required");
  scene::SceneMeta meta = scene::read_meta(a.scene);
  const MosaicFrame frame = scene::read_mosaic(a.scene);
  scene::write_stack(a.out, demosaic(frame));
  meta.seed = a.seed;
  scene::write_meta(a.out, meta);
  io.out << "width=" << frame.width() << "\nheight=" << frame.height() << "\npattern=" << frame.pattern.to_string()
         << "\n";
}

// ------------------------------------------------------------------ metrics

struct MetricsArgs {
  std::string gt, est, csv;
  double peak = 0.0;
  std::uint64_t seed = 0;
};

void cmd_metrics(const MetricsArgs& a, Streams io) {
  const PolarStateMap gt = scene::load_state(a.gt), est = scene::load_state(a.est);
  const PolarizationStack gt_images = scene::load_images(a.gt), est_images = scene::load_images(a.est);
  SsimParams params;
  params.peak = a.peak > 0.0 ? a.peak : scene::read_meta(a.gt).peak;
  const MetricReport report = evaluate(gt, est, gt_images, est_images, params);
  io.out << report.to_key_value();
  if (!a.csv.empty()) {
    std::ofstream f(a.csv);
    f << MetricReport::csv_header() << "\n" << report.to_csv_row() << "\n";
    if (!f) throw IoError("cannot write " + a.csv);
  }
}

// -------------------------------------------------------------- train/sample

struct ModelArgs {
  int base_width = dm::Architecture{}.base_width;
  int mid_width = dm::Architecture{}.mid_width;
  int cond_width = dm::Architecture{}.cond_width;
  int timesteps = 200;
  double beta_start = 1e-4;
  double beta_end = 0.1;

  dm::Architecture arch(dm::TargetRepresentation rep) const {
    dm::Architecture a;
    a.target_channels = dm::channel_count(rep);
    a.base_width = base_width;
    a.mid_width = mid_width;
    a.cond_width = cond_width;
    return a;
  }
};

void add_model_options(CLI::App* sub, ModelArgs& m) {
  sub->add_option("--base-width", m.base_width, "Channels at full resolution")->capture_default_str();
  sub->add_option("--mid-width", m.mid_width, "Channels at half resolution")->capture_default_str();
  sub->add_option("--cond-width", m.cond_width, "Condition feature channels")->capture_default_str();
  sub->add_option("--timesteps", m.timesteps, "Diffusion steps T")->capture_default_str();
  sub->add_option("--beta-start", m.beta_start, "First noise variance")->capture_default_str();
  sub->add_option("--beta-end", m.beta_end, "Last noise variance")->capture_default_str();
}

struct TrainArgs {
  std::string representation = "encoded", out, loss_csv;
  int steps = 3000, batch = 32, patch = 16, train_count = 2000, log_every = 100;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  ModelArgs model;
};

void cmd_train(const TrainArgs& a, Streams io) {
  if (a.out.empty()) throw PreconditionError("train: --out is required");
  const auto rep = dm::parse_representation(a.representation);
  dm::DatasetConfig data;
  data.train_count = a.train_count;
  data.test_count = 0;
  data.patch_size = a.patch;
  data.seed = a.seed;
  dm::TrainingConfig cfg;
  cfg.learning_rate = a.lr;
  cfg.batch_size = a.batch;
  cfg.steps = a.steps;
  cfg.seed = a.seed;
  cfg.patch_size = a.patch;
  const auto schedule = dm::make_schedule(a.model.timesteps, a.model.beta_start, a.model.beta_end);
  const auto dataset = dm::make_oracle_dataset(data);
  const int every = std::max(1, a.log_every);
  const auto result = dm::train(dataset.train, cfg, rep, a.model.arch(rep), schedule, [&](int step, double loss) {
    if ((step + 1) % every == 0) io.out << "step=" << step + 1 << " loss=" << format_metric(loss) << "\n";
  });
  dm::save_checkpoint(a.out, dm::make_checkpoint(result.model, rep, schedule));
  if (!a.loss_csv.empty()) {
    std::ofstream f(a.loss_csv);
    f << "step,loss\n";
    for (std::size_t i = 0; i < result.loss_curve.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", result.loss_curve[i]);
      f << i + 1 << "," << buf << "\n";
    }
    if (!f) throw IoError("cannot write " + a.loss_csv);
  }
  io.out << "parameters=" << result.model.params().size() << "\n"
         << "initial_loss=" << format_metric(result.initial_window_loss()) << "\n"
         << "final_loss=" << format_metric(result.final_window_loss()) << "\n";
}

struct SampleArgs {
  std::string checkpoint, scene, out;
  std::uint64_t seed = 0;
};

void cmd_sample(const SampleArgs& a, Streams io) {
  if (a.out.empty()) throw PreconditionError("sample: --out is required");
  const dm::Checkpoint ckpt = dm::load_checkpoint(a.checkpoint);
  const dm::Model model = ckpt.model();
  PolarStateMap cond_state = scene::load_state(a.scene);
  if (cond_state.channels() != 1) throw StructuralError("sample: condition scene must be single-channel");
  if (cond_state.width() % 2 || cond_state.height() % 2)
    throw StructuralError("sample: condition width and height must be even");
  const std::vector<PolarStateMap> states{cond_state};
  const dm::Tensor cond = dm::make_conditions(states, ckpt.representation);
  const dm::Tensor z = dm::sample(model, cond, ckpt.schedule(), a.seed);
  const PolarStateMap est = dm::decode_representation(z, 0, ckpt.representation, cond_state.s0);
  scene::write_maps(a.out, est);
  scene::SceneMeta meta = scene::read_meta(a.scene);
  meta.seed = a.seed;
  scene::write_meta(a.out, meta);
  io.out << "representation=" << dm::to_string(ckpt.representation) << "\n";
  print_state_summary(io.out, est);
}

// ------------------------------------------------------------------- ablate

struct AblateArgs {
  std::string seeds = "1,2,3", csv;
  int steps = 1000, batch = 32, patch = 16, train_count = 2000, test_count = 32;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  ModelArgs model;
};

void cmd_ablate(const AblateArgs& a, Streams io) {
  dm::AblationConfig cfg;
  cfg.data.train_count = a.train_count;
  cfg.data.test_count = a.test_count;
  cfg.data.patch_size = a.patch;
  cfg.train.steps = a.steps;
  cfg.train.batch_size = a.batch;
  cfg.train.learning_rate = a.lr;
  cfg.train.patch_size = a.patch;
  cfg.arch = a.model.arch(dm::TargetRepresentation::kEncodedAolpDolp);
  cfg.schedule_steps = a.model.timesteps;
  cfg.beta_start = a.model.beta_start;
  cfg.beta_end = a.model.beta_end;
  cfg.seeds.clear();
  for (double s : parse_list(a.seeds, 0, "--seeds")) {
    require(s >= 0 && s == std::floor(s), "--seeds: seeds must be non-negative integers");
    cfg.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  const dm::AblationTable table = dm::run_ablation(cfg, [&](const std::string& line) { io.out << line << "\n"; });
  const std::string csv = table.to_csv();
  io.out << csv;
  io.out << "untrained_mange=" << format_metric(table.untrained.mange) << "\n";
  if (!a.csv.empty()) {
    std::ofstream f(a.csv);
    f << csv;
    if (!f) throw IoError("cannot write " + a.csv);
  }
}

// ---------------------------------------------------------------- visualize

struct VisualizeArgs {
  std::string scene, out;
  std::uint64_t seed = 0;
};

std::array<double, 3> hsv_to_rgb(double hue_deg, double s, double v) {
  const double c = v * s;
  const double hp = hue_deg / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = v - c;
  return {r + m, g + m, b + m};
}

void cmd_visualize(const VisualizeArgs& a, Streams io) {
  const fs::path out = a.out.empty() ? fs::path(a.scene) : fs::path(a.out);
  const PolarStateMap s = scene::read_maps(a.scene);
  if (s.channels() != 1) throw StructuralError("visualize: property maps must be single-channel");
  const int w = s.width(), h = s.height();
  Image aolp_rgb(w, h, 3), dolp_gray(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double hue = std::fmod(2.0 * s.aolp.at(x, y) / kDegToRad, 360.0);
      if (hue < 0) hue += 360.0;
      if (hue >= 360.0) hue -= 360.0;
      const auto rgb = hsv_to_rgb(hue, s.valid.at(x, y) ? 1.0 : 0.0, 1.0);
      for (int c = 0; c < 3; ++c) aolp_rgb.at(x, y, c) = std::clamp(rgb[c], 0.0, 1.0);
      dolp_gray.at(x, y) = std::clamp(s.dolp.at(x, y), 0.0, 1.0);
    }
  fs::create_directories(out);
  io::write_pnm(out / "aolp.ppm", io::quantize_image(aolp_rgb, 255));
  io::write_pnm(out / "dolp.pgm", io::quantize_image(dolp_gray, 255));
  io.out << "wrote=aolp.ppm,dolp.pgm\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Polarization imaging toolkit: decomposition, sensor simulation, oracle scenes, metrics and a toy "
               "conditional diffusion model."};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  auto seed_opt = [](CLI::App* sub, std::uint64_t& seed) {
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
  };

  DecomposeArgs dec;
  auto* s_dec = app.add_subcommand("decompose", "Angle images -> s0, aolp, dolp and validity maps");
  s_dec->add_option("scene", dec.scene, "Scene directory with I000/I045/I090/I135")->required();
  s_dec->add_option("--out", dec.out, "Output directory (default: the scene)");
  s_dec->add_flag("--per-channel", dec.per_channel, "Decompose colour channels separately");
  seed_opt(s_dec, dec.seed);

  SynthesizeArgs syn;
  auto* s_syn = app.add_subcommand("synthesize", "Property maps -> analyzer image(s)");
  s_syn->add_option("scene", syn.scene, "Scene directory with s0/aolp/dolp")->required();
  auto* angle_opt = s_syn->add_option("--angle", syn.angle, "Analyzer angle in degrees");
  s_syn->add_flag("--stack", syn.stack, "Write all four canonical angles");
  s_syn->add_option("--out", syn.out, "Output directory (default: the scene)");
  seed_opt(s_syn, syn.seed);

  CropArgs crop;
  auto* s_crop = app.add_subcommand("crop", "Random even-aligned square crops of every image in a scene");
  s_crop->add_option("scene", crop.scene, "Scene directory")->required();
  s_crop->add_option("--size", crop.size, "Crop size N (even)")->capture_default_str();
  s_crop->add_option("--count", crop.count, "Number of crops K")->capture_default_str();
  s_crop->add_option("--out", crop.out, "Output directory")->required();
  seed_opt(s_crop, crop.seed);

  OracleArgs ora;
  auto* s_ora = app.add_subcommand("oracle", "Render a synthetic shape with the polarimetric reflectance model");
  s_ora->add_option("--shape", ora.shape, "sphere or ellipsoid")->capture_default_str();
  s_ora->add_option("--size", ora.size, "Image size in pixels")->capture_default_str();
  s_ora->add_option("--radius", ora.radius, "Sphere radius as a fraction of half the size")->capture_default_str();
  s_ora->add_option("--semi-axes", ora.semi_axes, "Ellipsoid semi-axes a,b,c in pixels");
  s_ora->add_option("--rotation", ora.rotation, "Ellipsoid rotation in degrees")->capture_default_str();
  s_ora->add_option("--eta", ora.eta, "Refractive index")->capture_default_str();
  s_ora->add_option("--mode", ora.mode, "diffuse or specular")->capture_default_str();
  s_ora->add_option("--albedo", ora.albedo, "Diffuse albedo")->capture_default_str();
  s_ora->add_option("--light", ora.light, "Direction toward the light, x,y,z")->capture_default_str();
  s_ora->add_option("--ambient", ora.ambient, "Ambient term")->capture_default_str();
  s_ora->add_option("--layout", ora.layout, "maps or stack")->capture_default_str();
  s_ora->add_option("--out", ora.out, "Output directory")->required();
  seed_opt(s_ora, ora.seed);

  MosaicArgs mos;
  auto* s_mos = app.add_subcommand("mosaic", "Angle images -> division-of-focal-plane mosaic frame");
  s_mos->add_option("scene", mos.scene, "Scene directory with angle images")->required();
  s_mos->add_option("--pattern", mos.pattern, "Analyzer angles of the 2x2 cell, row-major")->capture_default_str();
  s_mos->add_option("--read-sigma", mos.read_sigma, "Gaussian read noise")->capture_default_str();
  s_mos->add_option("--shot-gain", mos.shot_gain, "Photons per unit intensity (0 disables)")->capture_default_str();
  s_mos->add_option("--bit-depth", mos.bit_depth, "8, 12 or 16 (0 disables)")->capture_default_str();
  s_mos->add_option("--out", mos.out, "Output directory")->required();
  seed_opt(s_mos, mos.seed);

  DemosaicArgs dem;
  auto* s_dem = app.add_subcommand("demosaic", "Mosaic frame -> bilinear angle images");
  s_dem->add_option("scene", dem.scene, "Scene directory with mosaic.pfm")->required();
  s_dem->add_option("--out", dem.out, "Output directory")->required();
  seed_opt(s_dem, dem.seed);

  MetricsArgs met;
  auto* s_met = app.add_subcommand("metrics", "Compare two scenes: PSNR, SSIM, MAngE, MAbsE");
  s_met->add_option("ground_truth", met.gt, "Reference scene")->required();
  s_met->add_option("estimate", met.est, "Estimated scene")->required();
  s_met->add_option("--csv", met.csv, "Also write a CSV report");
  s_met->add_option("--peak", met.peak, "PSNR/SSIM peak (default: reference meta.txt)");
  seed_opt(s_met, met.seed);

  TrainArgs tr;
  auto* s_tr = app.add_subcommand("train", "Train the toy diffusion model on oracle patches");
  s_tr->add_option("--representation", tr.representation, "encoded, raw or images4")->capture_default_str();
  s_tr->add_option("--steps", tr.steps, "Optimizer steps")->capture_default_str();
  s_tr->add_option("--batch", tr.batch, "Batch size")->capture_default_str();
  s_tr->add_option("--lr", tr.lr, "Learning rate")->capture_default_str();
  s_tr->add_option("--patch", tr.patch, "Patch size")->capture_default_str();
  s_tr->add_option("--train-count", tr.train_count, "Number of oracle patches")->capture_default_str();
  s_tr->add_option("--log-every", tr.log_every, "Print the loss every N steps")->capture_default_str();
  s_tr->add_option("--loss-csv", tr.loss_csv, "Write the loss curve as CSV");
  s_tr->add_option("--out", tr.out, "Checkpoint file")->required();
  add_model_options(s_tr, tr.model);
  seed_opt(s_tr, tr.seed);

  SampleArgs smp;
  auto* s_smp = app.add_subcommand("sample", "Sample polarization maps for a scene's intensity");
  s_smp->add_option("--checkpoint", smp.checkpoint, "Checkpoint file")->required();
  s_smp->add_option("scene", smp.scene, "Scene providing the grayscale condition")->required();
  s_smp->add_option("--out", smp.out, "Output directory")->required();
  seed_opt(s_smp, smp.seed);

  AblateArgs abl;
  auto* s_abl = app.add_subcommand("ablate", "Train and compare the three target representations");
  s_abl->add_option("--steps", abl.steps, "Optimizer steps per run")->capture_default_str();
  s_abl->add_option("--batch", abl.batch, "Batch size")->capture_default_str();
  s_abl->add_option("--lr", abl.lr, "Learning rate")->capture_default_str();
  s_abl->add_option("--patch", abl.patch, "Patch size")->capture_default_str();
  s_abl->add_option("--train-count", abl.train_count, "Training patches per seed")->capture_default_str();
  s_abl->add_option("--test-count", abl.test_count, "Test patches per seed")->capture_default_str();
  s_abl->add_option("--seeds", abl.seeds, "Comma-separated seeds")->capture_default_str();
  s_abl->add_option("--csv", abl.csv, "Also write the table as CSV");
  add_model_options(s_abl, abl.model);
  seed_opt(s_abl, abl.seed);

  VisualizeArgs vis;
  auto* s_vis = app.add_subcommand("visualize", "AoLP hue image and DoLP grayscale image");
  s_vis->add_option("scene", vis.scene, "Scene directory with property maps")->required();
  s_vis->add_option("--out", vis.out, "Output directory (default: the scene)");
  seed_opt(s_vis, vis.seed);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kPreconditionError;
  }

  Streams io{out, err};
  CLI::App* sub = app.get_subcommands().front();
  try {
    echo_config(*sub, out);
    if (sub == s_dec) cmd_decompose(dec, io);
    else if (sub == s_syn) cmd_synthesize(syn, angle_opt->count() > 0, io);
    else if (sub == s_crop) cmd_crop(crop, io);
    else if (sub == s_ora) cmd_oracle(ora, io);
    else if (sub == s_mos) cmd_mosaic(mos, io);
    else if (sub == s_dem) cmd_demosaic(dem, io);
    else if (sub == s_met) cmd_metrics(met, io);
    else if (sub == s_tr) cmd_train(tr, io);
    else if (sub == s_smp) cmd_sample(smp, io);
    else if (sub == s_abl) cmd_ablate(abl, io);
    else if (sub == s_vis) cmd_visualize(vis, io);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kPreconditionError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kOk;
}

}  // namespace polar::cli
