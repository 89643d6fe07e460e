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

#ifndef BEAMLAB_OPTIMIZER_HPP_
#define BEAMLAB_OPTIMIZER_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "beamlab/beamformer.hpp"
#include "beamlab/filterbank.hpp"
#include "beamlab/scene.hpp"

namespace beamlab {

struct OptimizerConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double grad_clip_norm = 5.0;
  int max_epochs = 100;
  int early_stop_patience = 10;
  int lr_halve_patience = 5;
  // Central-difference step; each gradient costs 2P loss evaluations for P
  // free parameters, so this optimizer is meant for small filterbanks.
  double fd_step = 1e-4;
  BeamformerKind beamformer = BeamformerKind::kMwf;
  std::uint64_t seed = 0;
  double diag_load_eps = 1e-6;

  void validate() const;
};

OptimizerConfig optimizer_config_from_json(const nlohmann::json& j);

struct TrainingTrace {
  std::vector<int> epoch;  // 1-based
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::vector<double> macs_analysis;
  std::vector<double> learning_rate;

  std::size_t num_epochs() const { return epoch.size(); }
};

// CSV with header "epoch,train_loss,val_loss,macs,lr".
void save_trace_csv(const TrainingTrace& trace, const std::string& path);

// Full oracle chain on one scene: analyze the mixture, build the oracle mask
// from the target and interferer images at the reference channel, estimate
// masked SCMs, diagonally load the interferer SCM, beamform, synthesize, and
// score with the smooth negated SI-SDR loss against the target image at the
// reference. Comparison is on the reconstructed span with L samples trimmed
// from each edge when the span allows it (filterbank edge frames are not
// COLA-complete).
double pipeline_loss(const Filterbank& fb, const SceneRender& scene,
                     BeamformerKind beamformer, int reference,
                     double diag_load_eps = 1e-6);

// Free parameter layout: free kind concatenates analysis_real,
// analysis_imag, synthesis_real, synthesis_imag, each flattened row-major
// (filter index outer, tap inner); analytic kind concatenates only the two
// real tap sets and re-derives the imaginary parts on assignment.
Eigen::VectorXd get_free_parameters(const Filterbank& fb);
void set_free_parameters(Filterbank* fb, const Eigen::VectorXd& params);

// Central differences of an arbitrary loss functional over the free
// parameters. Probes may run in parallel; a non-finite probe value raises an
// error naming the parameter index.
Eigen::VectorXd finite_difference_gradient(
    const Filterbank& fb,
    const std::function<double(const Filterbank&)>& loss_fn, double fd_step);

// Mean pipeline loss over a batch with one reference channel per scene.
double batch_pipeline_loss(const Filterbank& fb,
                           const std::vector<SceneRender>& scenes,
                           const std::vector<int>& references,
                           BeamformerKind beamformer, double diag_load_eps);

Eigen::VectorXd finite_difference_gradient(
    const Filterbank& fb, const std::vector<SceneRender>& scenes,
    const std::vector<int>& references, const OptimizerConfig& config);

// Rescales grad to L2 norm max_norm when it exceeds it; shorter gradients
// pass through unchanged.
Eigen::VectorXd clip_gradient(const Eigen::VectorXd& grad, double max_norm);

// The training loop against abstract loss callbacks. train_loss sees the
// per-epoch reference draw (one entry per training scene, drawn uniformly
// from [0, train_channel_counts[i])); val_loss is evaluated as-is.
struct TrainingProblem {
  std::function<double(const Filterbank&, const std::vector<int>& references)>
      train_loss;
  std::function<double(const Filterbank&)> val_loss;
  std::vector<int> train_channel_counts;
};

// Adam with bias correction and pre-update L2 gradient clipping, one
// full-batch step per epoch. LR halves after lr_halve_patience epochs
// without validation improvement; training stops after early_stop_patience
// such epochs or at max_epochs. Returns the best-validation filterbank.
std::pair<Filterbank, TrainingTrace> train(const Filterbank& fb,
                                           const TrainingProblem& problem,
                                           const OptimizerConfig& config);

// Scene-pipeline specialization: training reference channels are redrawn
// uniformly per scene each epoch from the config seed; validation always
// uses channel 0.
std::pair<Filterbank, TrainingTrace> train(
    const Filterbank& fb, const std::vector<SceneRender>& train_scenes,
    const std::vector<SceneRender>& val_scenes, const OptimizerConfig& config);

}  // namespace beamlab

#endif  // BEAMLAB_OPTIMIZER_HPP_
