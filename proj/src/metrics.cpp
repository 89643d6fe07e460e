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

#include "beamlab/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace beamlab {

namespace {

struct Projection {
  double signal_energy = 0.0;  // ||s||^2
  double error_energy = 0.0;   // ||e||^2
};

Projection project(const VectorXd& reference, const VectorXd& estimate) {
  if (reference.size() != estimate.size())
    throw std::invalid_argument("si_sdr inputs have mismatched lengths");
  if (reference.size() < 2) throw std::invalid_argument("si_sdr needs length >= 2");
  const double ref_energy = reference.squaredNorm();
  if (ref_energy <= 0.0) throw std::invalid_argument("si_sdr reference is all zero");

  const double alpha = estimate.dot(reference) / ref_energy;
  const VectorXd scaled = alpha * reference;
  Projection p;
  p.signal_energy = scaled.squaredNorm();
  p.error_energy = (estimate - scaled).squaredNorm();
  return p;
}

}  // namespace

double si_sdr(const VectorXd& reference, const VectorXd& estimate) {
  const Projection p = project(reference, estimate);
  if (p.error_energy < 1e-14 * p.signal_energy) return kSiSdrCapDb;
  if (p.signal_energy < 1e-14 * p.error_energy) return -kSiSdrCapDb;
  return 10.0 * std::log10(p.signal_energy / p.error_energy);
}

double si_sdr_improvement(const VectorXd& target, const VectorXd& mixture_ref_channel,
                          const VectorXd& estimate) {
  return si_sdr(target, estimate) - si_sdr(target, mixture_ref_channel);
}

double negated_si_sdr_loss_single(const VectorXd& reference, const VectorXd& estimate) {
  const Projection p = project(reference, estimate);
  return -10.0 * std::log10(p.signal_energy / (p.error_energy + 1e-14 * p.signal_energy));
}

double negated_si_sdr_loss(const std::vector<std::pair<VectorXd, VectorXd>>& batch) {
  if (batch.empty()) throw std::invalid_argument("loss batch is empty");
  double total = 0.0;
  for (const auto& [reference, estimate] : batch)
    total += negated_si_sdr_loss_single(reference, estimate);
  return total / static_cast<double>(batch.size());
}

}  // namespace beamlab
