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

#ifndef BEAMLAB_SCM_HPP_
#define BEAMLAB_SCM_HPP_

#include <vector>

#include "beamlab/signal.hpp"

namespace beamlab {

// Per-bin M x M spatial covariance matrices, one per frequency bin. Only the
// diagonal blocks are kept: inter-frequency interactions are dropped for all
// filterbank kinds, which keeps inversion at O(N M^3).
struct SpatialCovariance {
  std::vector<MatrixXcd> bins;  // N entries, each M x M

  long num_bins() const { return static_cast<long>(bins.size()); }
  long num_channels() const { return bins.empty() ? 0 : bins[0].rows(); }

  // Hermitian to 1e-12 and eigenvalues >= -1e-10 * trace, per bin.
  void validate() const;
};

// Frame-wise masked outer products R(n, k) = m(n, k) Y(., n, k) Y(., n, k)^H.
struct FramewiseScm {
  long num_bins = 0;
  long num_frames = 0;
  std::vector<MatrixXcd> slices;  // (n, k) at index n * num_frames + k

  const MatrixXcd& at(long n, long k) const { return slices[n * num_frames + k]; }
  MatrixXcd& at(long n, long k) { return slices[n * num_frames + k]; }
};

FramewiseScm framewise_scm(const SpectrogramTensor& y, const Mask& m);

// Arithmetic mean over frames followed by Hermitian symmetrization
// R <- (R + R^H) / 2.
SpatialCovariance average_scm(const FramewiseScm& framewise);

// Fused framewise + average, skipping the per-frame storage. Used on the
// training hot path; agrees with average_scm(framewise_scm(...)) to
// floating-point roundoff (unit-tested).
SpatialCovariance masked_average_scm(const SpectrogramTensor& y, const Mask& m);

// Per bin: R <- R + eps_rel * (trace(R) / M + 1e-12) * I.
SpatialCovariance diagonal_load(const SpatialCovariance& r, double eps_rel);

}  // namespace beamlab

#endif  // BEAMLAB_SCM_HPP_
