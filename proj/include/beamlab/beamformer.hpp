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

#ifndef BEAMLAB_BEAMFORMER_HPP_
#define BEAMLAB_BEAMFORMER_HPP_

#include <string>
#include <vector>

#include "beamlab/scm.hpp"
#include "beamlab/signal.hpp"

namespace beamlab {

enum class BeamformerKind { kMvdr, kMwf };

std::string to_string(BeamformerKind kind);
BeamformerKind beamformer_kind_from_string(const std::string& s);

// One complex weight vector per bin plus the reference channel it extracts.
// Bins where the weight rule degenerated carry the neutral pass-through
// selector and are listed in flagged_bins.
struct BeamformerWeights {
  MatrixXcd weights;  // N x M
  int reference = 0;  // channel index, 0-based
  std::vector<long> flagged_bins;
};

// Souden MVDR: w(n) = (R_v^-1 R_x u_ref) / tr(R_v^-1 R_x), computed as a
// per-bin linear solve. Bins with |trace| < 1e-12 M fall back to u_ref and
// are flagged. Throws naming the bin if R_v stays singular after loading.
BeamformerWeights mvdr_weights(const SpatialCovariance& r_x, const SpatialCovariance& r_v,
                               int reference);

// Multichannel Wiener filter: solve (R_x + R_v) w = R_x u_ref per bin.
BeamformerWeights mwf_weights(const SpatialCovariance& r_x, const SpatialCovariance& r_v,
                              int reference);

BeamformerWeights beamformer_weights(BeamformerKind kind, const SpatialCovariance& r_x,
                                     const SpatialCovariance& r_v, int reference);

// X(n, k) = w(n)^H Y(., n, k); the single-channel beamformed spectrogram.
SpectrogramTensor apply_beamformer(const BeamformerWeights& w, const SpectrogramTensor& y);

}  // namespace beamlab

#endif  // BEAMLAB_BEAMFORMER_HPP_
