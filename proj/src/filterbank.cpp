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

#include "beamlab/filterbank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "beamlab/fft.hpp"

namespace beamlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kAnalyticTol = 1e-10;

void check_geometry(int num_filters, int kernel_size, int hop) {
  if (num_filters < 1) throw std::invalid_argument("filterbank needs N >= 1");
  if (kernel_size < 1) throw std::invalid_argument("filterbank needs L >= 1");
  if (hop < 1 || hop > kernel_size)
    throw std::invalid_argument("filterbank hop must satisfy 1 <= H <= L");
}

VectorXd make_window(WindowKind window, int length) {
  VectorXd w(length);
  switch (window) {
    case WindowKind::kRectangular:
      w.setOnes();
      break;
    case WindowKind::kSqrtHann:
      // Periodic form, so that the squared window overlap-adds exactly.
      for (int t = 0; t < length; ++t)
        w(t) = std::sqrt(0.5 - 0.5 * std::cos(2.0 * kPi * t / length));
      break;
  }
  return w;
}

// Constant value of sum_k w^2(t - kH) over t, or a throw if the overlap of
// the squared window has more than 1e-8 relative ripple.
double cola_constant(const VectorXd& window, int hop) {
  const int length = static_cast<int>(window.size());
  VectorXd sums = VectorXd::Zero(hop);
  for (int t = 0; t < length; ++t) sums(t % hop) += window(t) * window(t);
  const double mean = sums.mean();
  if (mean <= 0.0 || (sums.maxCoeff() - sums.minCoeff()) > 1e-8 * mean)
    throw std::invalid_argument("window not COLA at this hop");
  return mean;
}

}  // namespace

std::string to_string(FilterbankKind kind) {
  switch (kind) {
    case FilterbankKind::kStft: return "stft";
    case FilterbankKind::kFree: return "free";
    case FilterbankKind::kAnalytic: return "analytic";
  }
  return "free";
}

std::string to_string(WindowKind window) {
  return window == WindowKind::kRectangular ? "rectangular" : "sqrt_hann";
}

FilterbankKind filterbank_kind_from_string(const std::string& s) {
  if (s == "stft") return FilterbankKind::kStft;
  if (s == "free") return FilterbankKind::kFree;
  if (s == "analytic") return FilterbankKind::kAnalytic;
  throw std::invalid_argument("unknown filterbank kind '" + s + "'");
}

WindowKind window_kind_from_string(const std::string& s) {
  if (s == "rectangular") return WindowKind::kRectangular;
  if (s == "sqrt_hann") return WindowKind::kSqrtHann;
  throw std::invalid_argument("unknown window '" + s + "'");
}

long Filterbank::free_parameter_count() const {
  const long nl = static_cast<long>(num_filters) * kernel_size;
  switch (kind) {
    case FilterbankKind::kStft: return 0;
    case FilterbankKind::kFree: return 4 * nl;
    case FilterbankKind::kAnalytic: return 2 * nl;
  }
  return 0;
}

void Filterbank::validate() const {
  check_geometry(num_filters, kernel_size, hop);
  for (const MatrixXd* taps :
       {&analysis_real, &analysis_imag, &synthesis_real, &synthesis_imag}) {
    if (taps->rows() != num_filters || taps->cols() != kernel_size)
      throw std::invalid_argument("filterbank tap matrix has wrong shape");
    if (!taps->allFinite()) throw std::invalid_argument("filterbank taps must be finite");
  }
  if (kind == FilterbankKind::kStft && kernel_size != num_filters)
    throw std::invalid_argument("stft filterbank requires L = N");
  if (kind == FilterbankKind::kAnalytic) {
    for (auto [re, im] : {std::pair{&analysis_real, &analysis_imag},
                          std::pair{&synthesis_real, &synthesis_imag}}) {
      for (int n = 0; n < num_filters; ++n) {
        VectorXd expected = hilbert_transform(re->row(n).transpose());
        if ((im->row(n).transpose() - expected).cwiseAbs().maxCoeff() > kAnalyticTol)
          throw std::invalid_argument("analytic filterbank violates Hilbert coupling");
      }
    }
  }
}

Filterbank make_stft_filterbank(int num_filters, int kernel_size, int hop, WindowKind window) {
  check_geometry(num_filters, kernel_size, hop);
  if (kernel_size != num_filters)
    throw std::invalid_argument("stft filterbank requires L = N");

  const VectorXd w = make_window(window, kernel_size);
  // Unity round-trip gain: analyze followed by synthesize multiplies the
  // interior signal by N * cola_constant, so the synthesis taps absorb it.
  const double norm = static_cast<double>(num_filters) * cola_constant(w, hop);

  Filterbank fb;
  fb.kind = FilterbankKind::kStft;
  fb.window = window;
  fb.num_filters = num_filters;
  fb.kernel_size = kernel_size;
  fb.hop = hop;
  fb.analysis_real.resize(num_filters, kernel_size);
  fb.analysis_imag.resize(num_filters, kernel_size);
  fb.synthesis_real.resize(num_filters, kernel_size);
  fb.synthesis_imag.resize(num_filters, kernel_size);
  for (int n = 0; n < num_filters; ++n) {
    for (int t = 0; t < kernel_size; ++t) {
      const double phase = 2.0 * kPi * n * t / num_filters;
      fb.analysis_real(n, t) = w(t) * std::cos(phase);
      fb.analysis_imag(n, t) = -w(t) * std::sin(phase);
      fb.synthesis_real(n, t) = w(t) * std::cos(phase) / norm;
      fb.synthesis_imag(n, t) = w(t) * std::sin(phase) / norm;
    }
  }
  return fb;
}

Filterbank make_free_filterbank(int num_filters, int kernel_size, int hop, uint64_t seed) {
  check_geometry(num_filters, kernel_size, hop);
  std::mt19937_64 rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(kernel_size));
  std::uniform_real_distribution<double> dist(-scale, scale);

  Filterbank fb;
  fb.kind = FilterbankKind::kFree;
  fb.num_filters = num_filters;
  fb.kernel_size = kernel_size;
  fb.hop = hop;
  // Draw order: analysis_real, analysis_imag, synthesis_real, synthesis_imag,
  // each row-major. The analytic constructor relies on this order.
  for (MatrixXd* taps :
       {&fb.analysis_real, &fb.analysis_imag, &fb.synthesis_real, &fb.synthesis_imag}) {
    taps->resize(num_filters, kernel_size);
    for (int n = 0; n < num_filters; ++n)
      for (int t = 0; t < kernel_size; ++t) (*taps)(n, t) = dist(rng);
  }
  return fb;
}

VectorXd hilbert_transform(const VectorXd& h) {
  const long length = h.size();
  if (length < 2) throw std::invalid_argument("hilbert transform needs length >= 2");

  VectorXcd spectrum = fft(h.cast<cd>());
  VectorXcd quadrature(length);
  quadrature(0) = 0.0;  // DC has no quadrature
  for (long k = 1; k < length; ++k) {
    if (length % 2 == 0 && 2 * k == length)
      quadrature(k) = 0.0;  // Nyquist
    else if (2 * k < length)
      quadrature(k) = cd(0, -1) * spectrum(k);  // positive frequencies
    else
      quadrature(k) = cd(0, 1) * spectrum(k);  // negative frequencies
  }
  return ifft(quadrature).real();
}

void rederive_analytic_coupling(Filterbank& fb) {
  fb.analysis_imag.resize(fb.analysis_real.rows(), fb.analysis_real.cols());
  fb.synthesis_imag.resize(fb.synthesis_real.rows(), fb.synthesis_real.cols());
  for (int n = 0; n < fb.num_filters; ++n) {
    fb.analysis_imag.row(n) = hilbert_transform(fb.analysis_real.row(n).transpose()).transpose();
    fb.synthesis_imag.row(n) =
        hilbert_transform(fb.synthesis_real.row(n).transpose()).transpose();
  }
}

Filterbank make_analytic_filterbank(int num_filters, int kernel_size, int hop, uint64_t seed) {
  check_geometry(num_filters, kernel_size, hop);
  if (kernel_size < 2)
    throw std::invalid_argument("analytic filterbank needs L >= 2");
  std::mt19937_64 rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(kernel_size));
  std::uniform_real_distribution<double> dist(-scale, scale);

  Filterbank fb;
  fb.kind = FilterbankKind::kAnalytic;
  fb.num_filters = num_filters;
  fb.kernel_size = kernel_size;
  fb.hop = hop;
  for (MatrixXd* taps : {&fb.analysis_real, &fb.synthesis_real}) {
    taps->resize(num_filters, kernel_size);
    for (int n = 0; n < num_filters; ++n)
      for (int t = 0; t < kernel_size; ++t) (*taps)(n, t) = dist(rng);
  }
  rederive_analytic_coupling(fb);
  return fb;
}

SpectrogramTensor analyze(const Filterbank& fb, const MultichannelSignal& x) {
  if (x.num_samples() < fb.kernel_size)
    throw std::invalid_argument("signal shorter than one frame");
  SpectrogramTensor out;
  out.frame_hop = fb.hop;
  out.channels.reserve(x.num_channels());
  for (int m = 0; m < x.num_channels(); ++m) {
    const MatrixXd frames = frame_signal(x.channel(m), fb.kernel_size, fb.hop);
    MatrixXcd y(fb.num_filters, frames.cols());
    y.real() = fb.analysis_real * frames;
    y.imag() = fb.analysis_imag * frames;
    out.channels.push_back(std::move(y));
  }
  return out;
}

VectorXd synthesize(const Filterbank& fb, const MatrixXcd& single_channel, int hop) {
  if (single_channel.rows() != fb.num_filters)
    throw std::invalid_argument("spectrogram bin count does not match filterbank");
  if (hop != fb.hop)
    throw std::invalid_argument("spectrogram hop does not match filterbank");
  // Real part of the complex overlap-add; the imaginary residual is
  // discarded (masks are real and shared across parts), so only the real
  // frame contributions are formed.
  const MatrixXd frames = fb.synthesis_real.transpose() * single_channel.real() -
                          fb.synthesis_imag.transpose() * single_channel.imag();  // L x K
  return overlap_add(frames, fb.hop);
}

VectorXd synthesize(const Filterbank& fb, const SpectrogramTensor& s) {
  if (s.num_channels() != 1)
    throw std::invalid_argument("synthesize expects a single-channel spectrogram");
  return synthesize(fb, s.channels[0], s.frame_hop);
}

double macs(const Filterbank& fb, FilterSet which) {
  if (fb.num_filters < 2) throw std::invalid_argument("macs needs N >= 2");
  const MatrixXcd filters = fb.filters(which);
  const MatrixXcd gram = filters * filters.adjoint();
  const long n = filters.rows();
  double total = 0.0;
  for (long i = 0; i < n; ++i) {
    const double norm_i = std::sqrt(gram(i, i).real());
    if (norm_i <= 0.0) throw std::invalid_argument("degenerate filter");
    for (long j = i + 1; j < n; ++j) {
      const double norm_j = std::sqrt(gram(j, j).real());
      if (norm_j <= 0.0) throw std::invalid_argument("degenerate filter");
      total += std::abs(gram(i, j)) / (norm_i * norm_j);
    }
  }
  return total / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

FrequencyResponse frequency_response(const Filterbank& fb, FilterSet which, int fft_size) {
  if (fft_size < fb.kernel_size)
    throw std::invalid_argument("fft size must be at least the kernel size");
  const MatrixXcd filters = fb.filters(which);
  const int half = fft_size / 2;

  FrequencyResponse resp;
  resp.magnitudes.resize(fb.num_filters, half + 1);
  resp.center_bin.resize(fb.num_filters);
  for (int n = 0; n < fb.num_filters; ++n) {
    VectorXcd padded = VectorXcd::Zero(fft_size);
    padded.head(fb.kernel_size) = filters.row(n).transpose();
    const VectorXcd spectrum = fft(padded);
    // Fold the two-sided spectrum onto [0, fs/2] by keeping the larger of the
    // two mirrored magnitudes; a constant filter then peaks exactly at DC.
    for (int f = 0; f <= half; ++f) {
      const double pos = std::abs(spectrum(f));
      const double neg = (f == 0 || 2 * f == fft_size) ? 0.0 : std::abs(spectrum(fft_size - f));
      resp.magnitudes(n, f) = std::max(pos, neg);
    }
    int arg = 0;
    resp.magnitudes.row(n).maxCoeff(&arg);
    resp.center_bin[n] = arg;
  }
  resp.order.resize(fb.num_filters);
  std::iota(resp.order.begin(), resp.order.end(), 0);
  std::stable_sort(resp.order.begin(), resp.order.end(),
                   [&](int a, int b) { return resp.center_bin[a] < resp.center_bin[b]; });
  return resp;
}

namespace {

using nlohmann::json;

json taps_to_json(const MatrixXd& taps) {
  std::vector<double> flat(taps.size());
  for (long n = 0; n < taps.rows(); ++n)
    for (long t = 0; t < taps.cols(); ++t) flat[n * taps.cols() + t] = taps(n, t);
  return json(flat);
}

MatrixXd taps_from_json(const json& arr, int rows, int cols, const std::string& name) {
  if (!arr.is_array() || arr.size() != static_cast<size_t>(rows) * cols)
    throw std::invalid_argument("filterbank field '" + name + "' has wrong length");
  MatrixXd taps(rows, cols);
  for (int n = 0; n < rows; ++n)
    for (int t = 0; t < cols; ++t) taps(n, t) = arr.at(n * cols + t).get<double>();
  return taps;
}

}  // namespace

std::string filterbank_to_json(const Filterbank& fb) {
  json doc;
  doc["kind"] = to_string(fb.kind);
  doc["N"] = fb.num_filters;
  doc["L"] = fb.kernel_size;
  doc["H"] = fb.hop;
  if (fb.kind == FilterbankKind::kStft) doc["window"] = to_string(fb.window);
  doc["analysis_real"] = taps_to_json(fb.analysis_real);
  doc["synthesis_real"] = taps_to_json(fb.synthesis_real);
  if (fb.kind != FilterbankKind::kAnalytic) {
    doc["analysis_imag"] = taps_to_json(fb.analysis_imag);
    doc["synthesis_imag"] = taps_to_json(fb.synthesis_imag);
  }
  return doc.dump();
}

Filterbank filterbank_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("invalid filterbank JSON: ") + e.what());
  }
  for (const char* field : {"kind", "N", "L", "H"})
    if (!doc.contains(field))
      throw std::invalid_argument(std::string("filterbank JSON missing field '") + field + "'");

  const FilterbankKind kind = filterbank_kind_from_string(doc["kind"].get<std::string>());
  const int n = doc["N"].get<int>();
  const int l = doc["L"].get<int>();
  const int h = doc["H"].get<int>();
  check_geometry(n, l, h);

  if (kind == FilterbankKind::kStft) {
    if (!doc.contains("window"))
      throw std::invalid_argument("filterbank JSON missing field 'window'");
    Filterbank fb =
        make_stft_filterbank(n, l, h, window_kind_from_string(doc["window"].get<std::string>()));
    // Stored taps, when present, must agree with the construction.
    if (doc.contains("analysis_real")) {
      const MatrixXd stored = taps_from_json(doc["analysis_real"], n, l, "analysis_real");
      if ((stored - fb.analysis_real).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("stft taps inconsistent with parameters");
    }
    return fb;
  }

  Filterbank fb;
  fb.kind = kind;
  fb.num_filters = n;
  fb.kernel_size = l;
  fb.hop = h;
  for (const char* field : {"analysis_real", "synthesis_real"})
    if (!doc.contains(field))
      throw std::invalid_argument(std::string("filterbank JSON missing field '") + field + "'");
  fb.analysis_real = taps_from_json(doc["analysis_real"], n, l, "analysis_real");
  fb.synthesis_real = taps_from_json(doc["synthesis_real"], n, l, "synthesis_real");

  if (kind == FilterbankKind::kAnalytic) {
    rederive_analytic_coupling(fb);
  } else {
    for (const char* field : {"analysis_imag", "synthesis_imag"})
      if (!doc.contains(field))
        throw std::invalid_argument(std::string("filterbank JSON missing field '") + field + "'");
    fb.analysis_imag = taps_from_json(doc["analysis_imag"], n, l, "analysis_imag");
    fb.synthesis_imag = taps_from_json(doc["synthesis_imag"], n, l, "synthesis_imag");
  }
  fb.validate();
  return fb;
}

void save_filterbank(const Filterbank& fb, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write filterbank file '" + path + "'");
  out << filterbank_to_json(fb) << "\n";
  if (!out) throw std::runtime_error("failed writing filterbank file '" + path + "'");
}

Filterbank load_filterbank(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read filterbank file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return filterbank_from_json(text);
}

}  // namespace beamlab
