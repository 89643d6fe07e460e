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

#ifndef BEAMLAB_MASKING_HPP_
#define BEAMLAB_MASKING_HPP_

#include <string>

#include "beamlab/signal.hpp"

namespace beamlab {

// Oracle Wiener-like mask from the reference-channel target and interferer
// spectrograms: m = |X|^2 / (|X|^2 + |V|^2), with 0/0 bins set to 0.5 so
// both masked covariances stay nonzero.
Mask oracle_wlm(const SpectrogramTensor& target_ref, const SpectrogramTensor& interferer_ref);
Mask oracle_wlm(const MatrixXcd& target_ref, const MatrixXcd& interferer_ref);

// Entrywise 1 - m. Involutive.
Mask complement(const Mask& m);

// Entrywise clip of arbitrary finite values into [0, 1]; the path every
// file-loaded mask takes.
Mask clamp_mask(const MatrixXd& values);

// Mask CSV: K rows (frames) x N columns (bins), values clamped on load.
void save_mask_csv(const Mask& m, const std::string& path);
Mask load_mask_csv(const std::string& path);

}  // namespace beamlab

#endif  // BEAMLAB_MASKING_HPP_
