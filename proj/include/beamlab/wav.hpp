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

#ifndef BEAMLAB_WAV_HPP_
#define BEAMLAB_WAV_HPP_

#include <string>

#include "beamlab/signal.hpp"

namespace beamlab {

// Reads PCM16 or 32-bit float WAV, mono or multichannel. PCM16 samples are
// scaled by 1/32768 into doubles; all processing stays in double after this.
MultichannelSignal read_wav(const std::string& path);

// Writes 32-bit float WAV. Deterministic byte-for-byte for equal inputs.
void write_wav(const MultichannelSignal& signal, const std::string& path);

}  // namespace beamlab

#endif  // BEAMLAB_WAV_HPP_
