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
#include "polar/diffusion/ablation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "polar/error.hpp"
#include "polar/metrics.hpp"
#include "polar/rng.hpp"

namespace polar::diffusion {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;
constexpr double kWrapThreshold = 80.0 / kDeg;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

RepresentationScore median_score(const std::vector<RepresentationScore>& scores) {
  auto field = [&](double RepresentationScore::*m) {
    std::vector<double> v;
    for (const auto& s : scores) v.push_back(s.*m);
    return median(v);
  };
  RepresentationScore out;
  out.mange = field(&RepresentationScore::mange);
  out.mange_wrap = field(&RepresentationScore::mange_wrap);
  out.mange_interior = field(&RepresentationScore::mange_interior);
  out.mabse = field(&RepresentationScore::mabse);
  out.psnr = field(&RepresentationScore::psnr);
  out.ssim = field(&RepresentationScore::ssim);
  out.final_loss = field(&RepresentationScore::final_loss);
  out.pixels = scores.front().pixels;
  out.wrap_pixels = scores.front().wrap_pixels;
  return out;
}

std::string fmt(double v) { return format_metric(v); }

}  // namespace

RepresentationScore score_samples(const std::vector<PolarStateMap>& truth, const Tensor& samples,
                                  TargetRepresentation rep) {
  if (static_cast<int>(truth.size()) != samples.batch) throw StructuralError("score_samples: batch size mismatch");
  require(!truth.empty(), "score_samples: empty test set");
  CompensatedSum ang, ang_wrap, ang_inner, absd, psnr_sum, ssim_sum;
  std::size_t pixels = 0, wrap = 0;
  for (int b = 0; b < samples.batch; ++b) {
    const PolarStateMap& gt = truth[b];
    const PolarStateMap est = decode_representation(samples, b, rep, gt.s0);
    for (std::size_t i = 0; i < gt.s0.size(); ++i) {
      if (!gt.valid[i] || !est.valid[i]) continue;
      const double e = ang_e(gt.aolp[i], est.aolp[i]) * kDeg;
      ang.add(e);
      absd.add(std::abs(gt.dolp[i] - est.dolp[i]));
      ++pixels;
      if (std::abs(gt.aolp[i]) > kWrapThreshold) {
        ang_wrap.add(e);
        ++wrap;
      } else {
        ang_inner.add(e);
      }
    }
    const PolarizationStack gs = synthesize_stack(gt), es = synthesize_stack(est);
    double p = 0.0, s = 0.0;
    for (int k = 0; k < 4; ++k) {
      p += psnr(es.images[k], gs.images[k]);
      s += ssim(es.images[k], gs.images[k]);
    }
    psnr_sum.add(p / 4.0);
    ssim_sum.add(s / 4.0);
  }
  RepresentationScore out;
  out.pixels = pixels;
  out.wrap_pixels = wrap;
  const double n = static_cast<double>(samples.batch);
  out.psnr = psnr_sum.value() / n;
  out.ssim = ssim_sum.value() / n;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.mange = pixels ? ang.value() / static_cast<double>(pixels) : nan;
  out.mabse = pixels ? absd.value() / static_cast<double>(pixels) : nan;
  out.mange_wrap = wrap ? ang_wrap.value() / static_cast<double>(wrap) : nan;
  out.mange_interior = pixels > wrap ? ang_inner.value() / static_cast<double>(pixels - wrap) : nan;
  return out;
}

Tensor sample_dataset(const Model& model, const std::vector<PolarStateMap>& states, TargetRepresentation rep,
                      const NoiseSchedule& schedule, std::uint64_t seed, int chunk) {
  require(chunk >= 1, "sample_dataset: chunk must be positive");
  const Tensor cond = make_conditions(states, rep);
  Tensor out(model.architecture().target_channels, cond.batch, cond.height, cond.width);
  const int plane = cond.plane();
  for (int start = 0; start < cond.batch; start += chunk) {
    const int count = std::min(chunk, cond.batch - start);
    Tensor part(1, count, cond.height, cond.width);
    part.data = cond.data.middleCols(static_cast<Eigen::Index>(start) * plane, static_cast<Eigen::Index>(count) * plane);
    const Tensor z = sample(model, part, schedule, stream_seed(seed, static_cast<std::uint64_t>(start)));
    out.data.middleCols(static_cast<Eigen::Index>(start) * plane, static_cast<Eigen::Index>(count) * plane) = z.data;
  }
  return out;
}

void AblationConfig::validate() const {
  data.validate();
  train.validate();
  require(!seeds.empty(), "ablation: at least one seed required");
  require(data.test_count >= 1, "ablation: test_count must be positive");
  require(train.patch_size == data.patch_size, "ablation: training and dataset patch sizes differ");
  (void)make_schedule(schedule_steps, beta_start, beta_end);
}

std::string AblationConfig::echo() const {
  std::ostringstream o;
  o << "train_count=" << data.train_count << "\n"
    << "test_count=" << data.test_count << "\n"
    << "patch_size=" << data.patch_size << "\n"
    << "specular_fraction=" << data.specular_fraction << "\n"
    << "learning_rate=" << train.learning_rate << "\n"
    << "batch_size=" << train.batch_size << "\n"
    << "steps=" << train.steps << "\n"
    << "beta1=" << train.beta1 << "\n"
    << "beta2=" << train.beta2 << "\n"
    << "weight_decay=" << train.weight_decay << "\n"
    << "base_width=" << arch.base_width << "\n"
    << "mid_width=" << arch.mid_width << "\n"
    << "cond_width=" << arch.cond_width << "\n"
    << "time_dim=" << arch.time_dim << "\n"
    << "time_hidden=" << arch.time_hidden << "\n"
    << "schedule_steps=" << schedule_steps << "\n"
    << "beta_start=" << beta_start << "\n"
    << "beta_end=" << beta_end << "\n"
    << "seeds=";
  for (std::size_t i = 0; i < seeds.size(); ++i) o << (i ? "," : "") << seeds[i];
  o << "\n";
  return o.str();
}

const AblationRow& AblationTable::row(TargetRepresentation rep) const {
  for (const auto& r : rows)
    if (r.representation == rep) return r;
  throw PreconditionError("ablation table has no row for " + to_string(rep));
}

std::string AblationTable::csv_header() {
  return "representation,mange,mange_wrap,mange_interior,mabse,psnr,ssim,final_loss";
}

std::string AblationTable::to_csv() const {
  std::ostringstream o;
  o << csv_header() << "\n";
  for (const auto& r : rows) {
    const auto& m = r.median;
    o << to_string(r.representation) << "," << fmt(m.mange) << "," << fmt(m.mange_wrap) << ","
      << fmt(m.mange_interior) << "," << fmt(m.mabse) << "," << fmt(m.psnr) << "," << fmt(m.ssim) << ","
      << fmt(m.final_loss) << "\n";
  }
  return o.str();
}

AblationTable run_ablation(const AblationConfig& config, const AblationProgress& progress) {
  config.validate();
  const NoiseSchedule schedule = make_schedule(config.schedule_steps, config.beta_start, config.beta_end);
  AblationTable table;
  table.config_echo = config.echo();
  for (TargetRepresentation rep : kAllRepresentations) table.rows.push_back({rep, {}, {}});
  std::vector<RepresentationScore> untrained;

  for (std::uint64_t seed : config.seeds) {
    DatasetConfig data = config.data;
    data.seed = seed;
    const PatchDataset dataset = make_oracle_dataset(data);
    TrainingConfig train_cfg = config.train;
    train_cfg.seed = seed;

    Architecture base = config.arch;
    base.target_channels = channel_count(TargetRepresentation::kEncodedAolpDolp);
    const Model fresh(base, seed);
    untrained.push_back(score_samples(
        dataset.test, sample_dataset(fresh, dataset.test, TargetRepresentation::kEncodedAolpDolp, schedule, seed),
        TargetRepresentation::kEncodedAolpDolp));

    for (auto& row : table.rows) {
      const auto t0 = std::chrono::steady_clock::now();
      Architecture arch = config.arch;
      arch.target_channels = channel_count(row.representation);
      const TrainingResult trained = train(dataset.train, train_cfg, row.representation, arch, schedule);
      const Tensor samples = sample_dataset(trained.model, dataset.test, row.representation, schedule, seed);
      RepresentationScore score = score_samples(dataset.test, samples, row.representation);
      score.final_loss = trained.final_window_loss();
      row.per_seed.push_back(score);
      if (progress) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ostringstream msg;
        msg << "seed=" << seed << " representation=" << to_string(row.representation)
            << " mange=" << fmt(score.mange) << " mange_wrap=" << fmt(score.mange_wrap)
            << " final_loss=" << fmt(score.final_loss) << " seconds=" << fmt(secs);
        progress(msg.str());
      }
    }
  }
  for (auto& row : table.rows) row.median = median_score(row.per_seed);
  table.untrained = median_score(untrained);
  return table;
}

}  // namespace polar::diffusion
