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

#ifndef BEAMLAB_FILTERBANK_HPP_
#define BEAMLAB_FILTERBANK_HPP_

#include <string>
#include <vector>

#include "beamlab/signal.hpp"

namespace beamlab {

enum class FilterbankKind { kStft, kFree, kAnalytic };
enum class WindowKind { kRectangular, kSqrtHann };
enum class FilterSet { kAnalysis, kSynthesis };

std::string to_string(FilterbankKind kind);
std::string to_string(WindowKind window);
FilterbankKind filterbank_kind_from_string(const std::string& s);
WindowKind window_kind_from_string(const std::string& s);

// Paired complex analysis/synthesis filter sets. Each tap matrix is
// N filters x L taps. For the analytic kind the imaginary parts are always
// the discrete Hilbert transform of the real parts; they are rederived on
// construction and after every parameter update rather than stored as
// independent state.
struct Filterbank {
  FilterbankKind kind = FilterbankKind::kFree;
  WindowKind window = WindowKind::kSqrtHann;  // meaningful for kStft only
  int num_filters = 0;                        // N
  int kernel_size = 0;                        // L
  int hop = 0;                                // H
  MatrixXd analysis_real;                     // N x L
  MatrixXd analysis_imag;
  MatrixXd synthesis_real;
  MatrixXd synthesis_imag;

  MatrixXcd analysis() const { return analysis_real + cd(0, 1) * analysis_imag; }
  MatrixXcd synthesis() const { return synthesis_real + cd(0, 1) * synthesis_imag; }
  MatrixXcd filters(FilterSet which) const {
    return which == FilterSet::kAnalysis ? analysis() : synthesis();
  }

  // Number of independently adjustable real taps: 4NL for free, 2NL for
  // analytic (imaginary parts are derived), 0 for stft.
  long free_parameter_count() const;

  void validate() const;  // shape, finiteness and kind-specific invariants
};

// DFT-times-window filterbank. Analysis filter n is window(t) exp(-j2pi nt/N)
// and synthesis is the conjugate set divided by the normalization constant
// that makes analyze -> synthesize unity gain in the interior. Requires
// L = N and a window whose squared overlap at hop H is constant (COLA);
// otherwise throws "window not COLA at this hop".
Filterbank make_stft_filterbank(int num_filters, int kernel_size, int hop, WindowKind window);

// Fully unconstrained filterbank; all four tap matrices drawn i.i.d. uniform
// on [-1/sqrt(L), 1/sqrt(L)] from the seeded generator.
Filterbank make_free_filterbank(int num_filters, int kernel_size, int hop, uint64_t seed);

// Free real parts plus Hilbert-coupled imaginary parts. Draws exactly the
// analysis_real and synthesis_real matrices from the seed (in that order).
Filterbank make_analytic_filterbank(int num_filters, int kernel_size, int hop, uint64_t seed);

// Discrete Hilbert transform via the length-L DFT: positive bins scaled by
// -j, negative bins by +j, DC and (even L) Nyquist zeroed, then the real
// part of the inverse DFT. For h = cos this returns sin.
VectorXd hilbert_transform(const VectorXd& h);

// Recomputes both imaginary tap sets from the real ones. No-op intent for
// non-analytic kinds is not assumed; callers use it only on kAnalytic.
void rederive_analytic_coupling(Filterbank& fb);

// Y_m(n, k) = sum_t y_m(t + kH) phi_n(t), per channel. The filter enters
// without conjugation.
SpectrogramTensor analyze(const Filterbank& fb, const MultichannelSignal& x);

// x(t) = Re sum_k sum_n S(n, k) psi_n(t - kH) for a single-channel tensor.
VectorXd synthesize(const Filterbank& fb, const SpectrogramTensor& s);
VectorXd synthesize(const Filterbank& fb, const MatrixXcd& single_channel, int hop);

// Mean absolute cosine similarity over the N(N-1)/2 unique filter pairs,
// filters treated as complex L-vectors with the Hermitian inner product.
// Zero for any orthogonal set, one for identical filters.
double macs(const Filterbank& fb, FilterSet which);

struct FrequencyResponse {
  // Magnitude of the zero-padded DFT of each filter, N x (fft_size/2 + 1),
  // folded onto non-negative frequencies as max(|F(f)|, |F(-f)|) so that the
  // reported band does not depend on the phase-sign convention.
  MatrixXd magnitudes;
  std::vector<int> center_bin;  // argmax bin per filter
  std::vector<int> order;       // filter indices stably sorted by center bin
};

FrequencyResponse frequency_response(const Filterbank& fb, FilterSet which, int fft_size);

// JSON file format: kind, N, L, H, window (stft only) and four row-major tap
// arrays. Analytic files may omit the imaginary arrays; they are recomputed
// on load, as is any stft tap content.
void save_filterbank(const Filterbank& fb, const std::string& path);
Filterbank load_filterbank(const std::string& path);
std::string filterbank_to_json(const Filterbank& fb);
Filterbank filterbank_from_json(const std::string& text);

}  // namespace beamlab

#endif  // BEAMLAB_FILTERBANK_HPP_
