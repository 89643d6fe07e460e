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

#ifndef BEAMLAB_FFT_HPP_
#define BEAMLAB_FFT_HPP_

#include "beamlab/signal.hpp"

namespace beamlab {

// Complex DFT of arbitrary length, backed by FFTW. Plans are cached per size
// behind a mutex; execution itself is thread safe on caller-owned buffers.
VectorXcd fft(const VectorXcd& x);

// Inverse DFT including the 1/n factor.
VectorXcd ifft(const VectorXcd& x);

}  // namespace beamlab

#endif  // BEAMLAB_FFT_HPP_
