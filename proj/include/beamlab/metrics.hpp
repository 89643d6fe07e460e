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

#ifndef BEAMLAB_METRICS_HPP_
#define BEAMLAB_METRICS_HPP_

#include <utility>
#include <vector>

#include "beamlab/signal.hpp"

namespace beamlab {

// Evaluation cap: anything cleaner than 1e-14 relative error reports +140 dB.
inline constexpr double kSiSdrCapDb = 140.0;

// Scale-invariant SDR in dB. The estimate is projected onto the reference,
// s = (<est, ref> / ||ref||^2) ref, and the value is 10 log10(||s||^2/||e||^2)
// with e = est - s, capped at +-140 dB at the degenerate ends.
double si_sdr(const VectorXd& reference, const VectorXd& estimate);

// si_sdr(target, estimate) - si_sdr(target, mixture_at_reference).
double si_sdr_improvement(const VectorXd& target, const VectorXd& mixture_ref_channel,
                          const VectorXd& estimate);

// Mean over the batch of the negated smooth SI-SDR: instead of capping, a
// 1e-14 ||s||^2 guard is added to the error energy so the loss stays finite
// and differentiable near perfect reconstruction.
double negated_si_sdr_loss(const std::vector<std::pair<VectorXd, VectorXd>>& batch);
double negated_si_sdr_loss_single(const VectorXd& reference, const VectorXd& estimate);

}  // namespace beamlab

#endif  // BEAMLAB_METRICS_HPP_
