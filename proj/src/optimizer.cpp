// Copyright 2026 The Beamlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "beamlab/optimizer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "beamlab/masking.hpp"
#include "beamlab/metrics.hpp"
#include "beamlab/parallel.hpp"
#include "beamlab/scm.hpp"

namespace beamlab {

namespace {

constexpr double kDivergenceLimit = 1e6;

void append_row_major(const Eigen::MatrixXd& m, Eigen::VectorXd* out,
                      Eigen::Index* cursor) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      (*out)((*cursor)++) = m(r, c);
    }
  }
}

void read_row_major(const Eigen::VectorXd& src, Eigen::MatrixXd* m,
                    Eigen::Index* cursor) {
  for (Eigen::Index r = 0; r < m->rows(); ++r) {
    for (Eigen::Index c = 0; c < m->cols(); ++c) {
      (*m)(r, c) = src((*cursor)++);
    }
  }
}

}  // namespace

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("moment parameters must lie in [0, 1)");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("optimizer eps must be positive");
  }
  if (!(grad_clip_norm > 0.0)) {
    throw std::invalid_argument("gradient clip norm must be positive");
  }
  if (max_epochs < 1) {
    throw std::invalid_argument("max_epochs must be >= 1");
  }
  if (early_stop_patience < 1 || lr_halve_patience < 1) {
    throw std::invalid_argument("patience values must be >= 1");
  }
  if (!(fd_step > 0.0)) {
    throw std::invalid_argument("fd_step must be positive");
  }
  if (!(diag_load_eps >= 0.0)) {
    throw std::invalid_argument("diagonal loading must be nonnegative");
  }
}

OptimizerConfig optimizer_config_from_json(const nlohmann::json& j) {
  OptimizerConfig config;
  config.learning_rate = j.value("learning_rate", config.learning_rate);
  config.beta1 = j.value("beta1", config.beta1);
  config.beta2 = j.value("beta2", config.beta2);
  config.eps = j.value("eps", config.eps);
  config.grad_clip_norm = j.value("grad_clip_norm", config.grad_clip_norm);
  config.max_epochs = j.value("max_epochs", config.max_epochs);
  config.early_stop_patience =
      j.value("early_stop_patience", config.early_stop_patience);
  config.lr_halve_patience =
      j.value("lr_halve_patience", config.lr_halve_patience);
  config.fd_step = j.value("fd_step", config.fd_step);
  if (j.contains("beamformer")) {
    config.beamformer =
        beamformer_kind_from_string(j.at("beamformer").get<std::string>());
  }
  config.seed = j.value("seed", config.seed);
  config.diag_load_eps = j.value("diag_load_eps", config.diag_load_eps);
  config.validate();
  return config;
}

void save_trace_csv(const TrainingTrace& trace, const std::string& path) {
  std::ofstream file(path, std::ios::trunc);
  if (!file) {
    throw std::runtime_error("cannot open trace file for writing: " + path);
  }
  file.precision(17);
  file << "epoch,train_loss,val_loss,macs,lr\n";
  for (std::size_t i = 0; i < trace.num_epochs(); ++i) {
    file << trace.epoch[i] << ',' << trace.train_loss[i] << ','
         << trace.val_loss[i] << ',' << trace.macs_analysis[i] << ','
         << trace.learning_rate[i] << '\n';
  }
  if (!file) {
    throw std::runtime_error("failed writing trace file: " + path);
  }
}

double pipeline_loss(const Filterbank& fb, const SceneRender& scene,
                     BeamformerKind beamformer, int reference,
                     double diag_load_eps) {
  const int num_mics = scene.mixture.num_channels();
  if (reference < 0 || reference >= num_mics) {
    throw std::invalid_argument("reference channel out of range");
  }

  const SpectrogramTensor mixture_spec = analyze(fb, scene.mixture);
  const SpectrogramTensor target_spec = analyze(
      fb, make_mono(scene.target_image.samples.row(reference).transpose(),
                    scene.target_image.sample_rate));
  const SpectrogramTensor interferer_spec = analyze(
      fb, make_mono(scene.interferer_image.samples.row(reference).transpose(),
                    scene.interferer_image.sample_rate));

  const Mask target_mask =
      oracle_wlm(target_spec.channels[0], interferer_spec.channels[0]);
  const Mask interferer_mask = complement(target_mask);

  const SpatialCovariance r_x = masked_average_scm(mixture_spec, target_mask);
  SpatialCovariance r_v = masked_average_scm(mixture_spec, interferer_mask);
  r_v = diagonal_load(r_v, diag_load_eps);

  const BeamformerWeights weights =
      beamformer_weights(beamformer, r_x, r_v, reference);
  const SpectrogramTensor enhanced_spec =
      apply_beamformer(weights, mixture_spec);
  const Eigen::VectorXd estimate = synthesize(fb, enhanced_spec);

  const Eigen::Index span = estimate.size();
  const Eigen::VectorXd target_ref =
      scene.target_image.samples.row(reference).head(span).transpose();

  // Edge frames are not COLA-complete; trim L samples per side when the
  // span is long enough to leave a meaningful interior.
  const Eigen::Index trim = fb.kernel_size;
  if (span > 2 * trim + 16) {
    return negated_si_sdr_loss_single(target_ref.segment(trim, span - 2 * trim),
                                      estimate.segment(trim, span - 2 * trim));
  }
  return negated_si_sdr_loss_single(target_ref, estimate);
}

Eigen::VectorXd get_free_parameters(const Filterbank& fb) {
  const long count = fb.free_parameter_count();
  if (count == 0) {
    throw std::invalid_argument("stft filterbank has no free parameters");
  }
  Eigen::VectorXd out(count);
  Eigen::Index cursor = 0;
  append_row_major(fb.analysis_real, &out, &cursor);
  if (fb.kind == FilterbankKind::kFree) {
    append_row_major(fb.analysis_imag, &out, &cursor);
  }
  append_row_major(fb.synthesis_real, &out, &cursor);
  if (fb.kind == FilterbankKind::kFree) {
    append_row_major(fb.synthesis_imag, &out, &cursor);
  }
  return out;
}

void set_free_parameters(Filterbank* fb, const Eigen::VectorXd& params) {
  const long count = fb->free_parameter_count();
  if (count == 0) {
    throw std::invalid_argument("stft filterbank has no free parameters");
  }
  if (params.size() != count) {
    throw std::invalid_argument("parameter vector has wrong length");
  }
  Eigen::Index cursor = 0;
  read_row_major(params, &fb->analysis_real, &cursor);
  if (fb->kind == FilterbankKind::kFree) {
    read_row_major(params, &fb->analysis_imag, &cursor);
  }
  read_row_major(params, &fb->synthesis_real, &cursor);
  if (fb->kind == FilterbankKind::kFree) {
    read_row_major(params, &fb->synthesis_imag, &cursor);
  }
  if (fb->kind == FilterbankKind::kAnalytic) {
    rederive_analytic_coupling(*fb);
  }
}

Eigen::VectorXd finite_difference_gradient(
    const Filterbank& fb,
    const std::function<double(const Filterbank&)>& loss_fn, double fd_step) {
  if (!(fd_step > 0.0)) {
    throw std::invalid_argument("fd_step must be positive");
  }
  const Eigen::VectorXd base = get_free_parameters(fb);
  const Eigen::Index count = base.size();
  Eigen::VectorXd grad(count);

  parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    const Eigen::Index idx = static_cast<Eigen::Index>(i);
    Filterbank probe = fb;
    Eigen::VectorXd shifted = base;

    shifted(idx) = base(idx) + fd_step;
    set_free_parameters(&probe, shifted);
    const double up = loss_fn(probe);

    shifted(idx) = base(idx) - fd_step;
    set_free_parameters(&probe, shifted);
    const double down = loss_fn(probe);

    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw std::runtime_error("non-finite loss at parameter index " +
                               std::to_string(idx));
    }
    grad(idx) = (up - down) / (2.0 * fd_step);
  });
  return grad;
}

double batch_pipeline_loss(const Filterbank& fb,
                           const std::vector<SceneRender>& scenes,
                           const std::vector<int>& references,
                           BeamformerKind beamformer, double diag_load_eps) {
  if (scenes.empty()) {
    throw std::invalid_argument("scene batch is empty");
  }
  if (scenes.size() != references.size()) {
    throw std::invalid_argument("one reference channel per scene required");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    sum += pipeline_loss(fb, scenes[i], beamformer, references[i],
                         diag_load_eps);
  }
  return sum / static_cast<double>(scenes.size());
}

Eigen::VectorXd finite_difference_gradient(
    const Filterbank& fb, const std::vector<SceneRender>& scenes,
    const std::vector<int>& references, const OptimizerConfig& config) {
  return finite_difference_gradient(
      fb,
      [&](const Filterbank& probe) {
        return batch_pipeline_loss(probe, scenes, references,
                                   config.beamformer, config.diag_load_eps);
      },
      config.fd_step);
}

Eigen::VectorXd clip_gradient(const Eigen::VectorXd& grad, double max_norm) {
  if (!(max_norm > 0.0)) {
    throw std::invalid_argument("gradient clip norm must be positive");
  }
  const double norm = grad.norm();
  if (norm <= max_norm) {
    return grad;
  }
  return grad * (max_norm / norm);
}

std::pair<Filterbank, TrainingTrace> train(const Filterbank& fb,
                                           const TrainingProblem& problem,
                                           const OptimizerConfig& config) {
  config.validate();
  if (!problem.train_loss || !problem.val_loss) {
    throw std::invalid_argument("training problem is missing loss callbacks");
  }
  if (problem.train_channel_counts.empty()) {
    throw std::invalid_argument(
        "training and validation scene sets must be non-empty");
  }
  if (fb.kind == FilterbankKind::kStft) {
    throw std::invalid_argument("stft filterbank has no free parameters");
  }
  Filterbank current = fb;
  current.validate();

  const Eigen::Index count = current.free_parameter_count();
  Eigen::VectorXd params = get_free_parameters(current);
  Eigen::VectorXd first_moment = Eigen::VectorXd::Zero(count);
  Eigen::VectorXd second_moment = Eigen::VectorXd::Zero(count);
  double lr = config.learning_rate;

  std::mt19937_64 rng(config.seed);

  TrainingTrace trace;
  double best_val = std::numeric_limits<double>::infinity();
  Filterbank best_fb = current;
  int epochs_since_best = 0;
  int epochs_since_halve = 0;

  auto check_divergence = [](double loss, const char* stage) {
    if (!std::isfinite(loss) || loss > kDivergenceLimit) {
      throw std::runtime_error(std::string("training diverged: ") + stage +
                               " loss exceeds 1e6");
    }
  };

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::vector<int> train_refs(problem.train_channel_counts.size());
    for (std::size_t i = 0; i < train_refs.size(); ++i) {
      std::uniform_int_distribution<int> dist(
          0, problem.train_channel_counts[i] - 1);
      train_refs[i] = dist(rng);
    }

    const double train_loss = problem.train_loss(current, train_refs);
    check_divergence(train_loss, "train");

    Eigen::VectorXd grad = finite_difference_gradient(
        current,
        [&](const Filterbank& probe) {
          return problem.train_loss(probe, train_refs);
        },
        config.fd_step);
    grad = clip_gradient(grad, config.grad_clip_norm);

    first_moment = config.beta1 * first_moment + (1.0 - config.beta1) * grad;
    second_moment = config.beta2 * second_moment +
                    (1.0 - config.beta2) * grad.cwiseProduct(grad);
    const double bias1 = 1.0 - std::pow(config.beta1, epoch);
    const double bias2 = 1.0 - std::pow(config.beta2, epoch);
    const Eigen::ArrayXd mean_hat = first_moment.array() / bias1;
    const Eigen::ArrayXd var_hat = second_moment.array() / bias2;
    params -= (lr * mean_hat / (var_hat.sqrt() + config.eps)).matrix();
    set_free_parameters(&current, params);
    current.validate();

    const double val_loss = problem.val_loss(current);
    check_divergence(val_loss, "validation");

    trace.epoch.push_back(epoch);
    trace.train_loss.push_back(train_loss);
    trace.val_loss.push_back(val_loss);
    trace.macs_analysis.push_back(macs(current, FilterSet::kAnalysis));
    trace.learning_rate.push_back(lr);

    if (val_loss < best_val) {
      best_val = val_loss;
      best_fb = current;
      epochs_since_best = 0;
      epochs_since_halve = 0;
    } else {
      ++epochs_since_best;
      ++epochs_since_halve;
    }
    if (epochs_since_halve >= config.lr_halve_patience) {
      lr *= 0.5;
      epochs_since_halve = 0;
    }
    if (epochs_since_best >= config.early_stop_patience) {
      break;
    }
  }
  return {best_fb, trace};
}

std::pair<Filterbank, TrainingTrace> train(
    const Filterbank& fb, const std::vector<SceneRender>& train_scenes,
    const std::vector<SceneRender>& val_scenes,
    const OptimizerConfig& config) {
  if (train_scenes.empty() || val_scenes.empty()) {
    throw std::invalid_argument(
        "training and validation scene sets must be non-empty");
  }
  TrainingProblem problem;
  problem.train_channel_counts.reserve(train_scenes.size());
  for (const SceneRender& scene : train_scenes) {
    problem.train_channel_counts.push_back(scene.mixture.num_channels());
  }
  problem.train_loss = [&](const Filterbank& probe,
                           const std::vector<int>& refs) {
    return batch_pipeline_loss(probe, train_scenes, refs, config.beamformer,
                               config.diag_load_eps);
  };
  const std::vector<int> val_refs(val_scenes.size(), 0);
  problem.val_loss = [&, val_refs](const Filterbank& probe) {
    return batch_pipeline_loss(probe, val_scenes, val_refs, config.beamformer,
                               config.diag_load_eps);
  };
  return train(fb, problem, config);
}

}  // namespace beamlab
