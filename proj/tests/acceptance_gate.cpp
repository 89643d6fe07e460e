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
//
// Acceptance gate: one self-contained check per release criterion, each
// printed as a single PASS/FAIL line. Closed-form quantities are recomputed
// here from scratch instead of trusting library helpers, so a regression in
// the library cannot silently re-derive its own expectation. Exit status is
// the number of failed criteria (0 on a clean gate).

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "beamlab/beamformer.hpp"
#include "beamlab/commands.hpp"
#include "beamlab/filterbank.hpp"
#include "beamlab/masking.hpp"
#include "beamlab/metrics.hpp"
#include "beamlab/optimizer.hpp"
#include "beamlab/scene.hpp"
#include "beamlab/scm.hpp"
#include "beamlab/signal.hpp"
#include "beamlab/wav.hpp"

namespace fs = std::filesystem;
using namespace beamlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

struct TempDir {
  fs::path root;
  explicit TempDir(const std::string& stem) {
    root = fs::temp_directory_path() / ("beamlab_gate_" + stem);
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(root, ec);
  }
  std::string path(const std::string& leaf) const { return (root / leaf).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return std::string(buf);
}

// Plain O(L^2) DFT, the independent reference for spectral checks.
VectorXcd dft(const VectorXcd& x) {
  const long n = x.size();
  VectorXcd out(n);
  for (long f = 0; f < n; ++f) {
    cd acc(0, 0);
    for (long t = 0; t < n; ++t) acc += x(t) * std::exp(cd(0, -2.0 * kPi * f * t / n));
    out(f) = acc;
  }
  return out;
}

using Verdict = std::pair<bool, std::string>;

// 1. STFT analysis/synthesis round trip reconstructs the interior of a
//    random one-second signal to at least 60 dB SI-SDR in under a second.
Verdict criterion_reconstruction() {
  Timer timer;
  const int fs_hz = 16000;
  const int length = 16000;
  const int kernel = 1024;
  const int hop = 512;
  const Filterbank fb = make_stft_filterbank(1024, kernel, hop, WindowKind::kSqrtHann);
  const VectorXd x = white_noise(length, 71);
  const SpectrogramTensor spec = analyze(fb, make_mono(x, fs_hz));
  const VectorXd est = synthesize(fb, spec);
  const long hi = std::min<long>(length, est.size()) - kernel;
  const VectorXd ref_seg = x.segment(kernel, hi - kernel);
  const VectorXd est_seg = est.segment(kernel, hi - kernel);
  const double sdr = si_sdr(ref_seg, est_seg);
  const double elapsed = timer.seconds();
  const bool ok = sdr >= 60.0 && elapsed < 1.0;
  return {ok, format("interior SI-SDR %.1f dB (need >= 60), %.2f s (need < 1)", sdr, elapsed)};
}

// 2. MACS anchors: a rectangular DFT basis is orthogonal to roundoff, and
//    the sqrt-Hann STFT at N = L = 1024 lands in [3e-4, 1e-2].
Verdict criterion_macs_anchors() {
  const Filterbank rect = make_stft_filterbank(1024, 1024, 512, WindowKind::kRectangular);
  const Filterbank hann = make_stft_filterbank(1024, 1024, 512, WindowKind::kSqrtHann);
  const double macs_rect = macs(rect, FilterSet::kAnalysis);
  const double macs_hann = macs(hann, FilterSet::kAnalysis);
  const bool ok = macs_rect <= 1e-12 && macs_hann >= 3e-4 && macs_hann <= 1e-2;
  return {ok, format("rectangular %.2e (need <= 1e-12), sqrt-Hann %.2e (need in [3e-4, 1e-2])",
                     macs_rect, macs_hann)};
}

// 3. MVDR with a rank-1 target SCM and identity noise passes the target at
//    the reference channel through untouched; weights match the closed form
//    w = d conj(d_r) / ||d||^2.
Verdict criterion_mvdr_distortionless() {
  const int channels = 4;
  const int bins = 6;
  const int frames = 40;
  const int reference = 1;
  std::mt19937_64 rng(83);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_cd = [&] { return cd(gauss(rng), gauss(rng)); };

  std::vector<VectorXcd> steering(bins);
  SpatialCovariance r_x, r_v;
  for (int n = 0; n < bins; ++n) {
    VectorXcd d(channels);
    for (int m = 0; m < channels; ++m) d(m) = random_cd();
    d /= d.norm();
    steering[n] = d;
    r_x.bins.push_back(d * d.adjoint());
    r_v.bins.push_back(MatrixXcd::Identity(channels, channels));
  }

  MatrixXcd source(bins, frames);
  for (int n = 0; n < bins; ++n)
    for (int k = 0; k < frames; ++k) source(n, k) = random_cd();

  SpectrogramTensor mixture;
  mixture.frame_hop = 8;
  for (int m = 0; m < channels; ++m) {
    MatrixXcd ch(bins, frames);
    for (int n = 0; n < bins; ++n) ch.row(n) = steering[n](m) * source.row(n);
    mixture.channels.push_back(ch);
  }

  const BeamformerWeights w = mvdr_weights(r_x, r_v, reference);
  const SpectrogramTensor out = apply_beamformer(w, mixture);

  double worst = 0.0;
  for (int n = 0; n < bins; ++n) {
    const VectorXcd closed_form = steering[n] * std::conj(steering[n](reference));
    const double w_err = (w.weights.row(n).transpose() - closed_form).norm() / closed_form.norm();
    const VectorXcd target_ref = steering[n](reference) * source.row(n).transpose();
    const VectorXcd got = out.channel(0).row(n).transpose();
    const double out_err = (got - target_ref).norm() / target_ref.norm();
    worst = std::max({worst, w_err, out_err});
  }
  const bool ok = worst <= 1e-8 && w.flagged_bins.empty();
  return {ok, format("max relative error %.2e (need <= 1e-8), %zu flagged bins", worst,
                     w.flagged_bins.size())};
}

// 4. MWF closed forms: scalar Wiener gain at M = 1, explicit 2x2 inverse at
//    M = 2.
Verdict criterion_mwf_closed_forms() {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> unif(0.1, 2.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_cd = [&] { return cd(gauss(rng), gauss(rng)); };

  double worst_scalar = 0.0;
  {
    SpatialCovariance r_x, r_v;
    std::vector<double> px, pv;
    for (int n = 0; n < 16; ++n) {
      px.push_back(unif(rng));
      pv.push_back(unif(rng));
      r_x.bins.push_back(MatrixXcd::Constant(1, 1, cd(px.back(), 0)));
      r_v.bins.push_back(MatrixXcd::Constant(1, 1, cd(pv.back(), 0)));
    }
    const BeamformerWeights w = mwf_weights(r_x, r_v, 0);
    for (int n = 0; n < 16; ++n)
      worst_scalar = std::max(worst_scalar, std::abs(w.weights(n, 0) - px[n] / (px[n] + pv[n])));
  }

  double worst_pair = 0.0;
  {
    const int reference = 1;
    SpatialCovariance r_x, r_v;
    for (int n = 0; n < 16; ++n) {
      MatrixXcd a(2, 2), b(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          a(i, j) = random_cd();
          b(i, j) = random_cd();
        }
      r_x.bins.push_back(a * a.adjoint());
      r_v.bins.push_back(b * b.adjoint());
    }
    const BeamformerWeights w = mwf_weights(r_x, r_v, reference);
    for (int n = 0; n < 16; ++n) {
      const MatrixXcd sum = r_x.bins[n] + r_v.bins[n];
      const cd det = sum(0, 0) * sum(1, 1) - sum(0, 1) * sum(1, 0);
      MatrixXcd inv(2, 2);
      inv << sum(1, 1), -sum(0, 1), -sum(1, 0), sum(0, 0);
      inv /= det;
      const VectorXcd expected = inv * r_x.bins[n].col(reference);
      worst_pair =
          std::max(worst_pair, (w.weights.row(n).transpose() - expected).norm() / expected.norm());
    }
  }
  const bool ok = worst_scalar <= 1e-12 && worst_pair <= 1e-10;
  return {ok, format("scalar error %.2e (need <= 1e-12), 2x2 error %.2e (need <= 1e-10)",
                     worst_scalar, worst_pair)};
}

// 5. Masked SCM estimates are Hermitian, numerically PSD, and a mask plus
//    its complement partitions the mixture SCM, across 100 random draws.
Verdict criterion_scm_properties() {
  const int channels = 3;
  const int bins = 8;
  const int frames = 20;
  std::mt19937_64 rng(29);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  double worst_herm = 0.0, worst_eig = 0.0, worst_part = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    SpectrogramTensor y;
    y.frame_hop = 4;
    for (int m = 0; m < channels; ++m) {
      MatrixXcd ch(bins, frames);
      for (int n = 0; n < bins; ++n)
        for (int k = 0; k < frames; ++k) ch(n, k) = cd(gauss(rng), gauss(rng));
      y.channels.push_back(ch);
    }
    Mask mask;
    mask.values = MatrixXd::NullaryExpr(bins, frames, [&] { return unif(rng); });
    Mask ones;
    ones.values = MatrixXd::Ones(bins, frames);

    const SpatialCovariance r_x = masked_average_scm(y, mask);
    const SpatialCovariance r_v = masked_average_scm(y, complement(mask));
    const SpatialCovariance r_mix = masked_average_scm(y, ones);
    for (int n = 0; n < bins; ++n) {
      for (const SpatialCovariance* r : {&r_x, &r_v}) {
        const MatrixXcd& bin = r->bins[n];
        worst_herm = std::max(worst_herm, (bin - bin.adjoint()).cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(bin);
        const double floor = -1e-10 * bin.real().trace();
        worst_eig = std::max(worst_eig, floor - eig.eigenvalues().minCoeff());
      }
      worst_part = std::max(
          worst_part, (r_x.bins[n] + r_v.bins[n] - r_mix.bins[n]).cwiseAbs().maxCoeff());
    }
  }
  const bool ok = worst_herm <= 1e-12 && worst_eig <= 0.0 && worst_part <= 1e-12;
  return {ok, format("hermitian %.2e, eigenvalue margin %.2e, partition %.2e (need <= 1e-12 / "
                     ">= floor / <= 1e-12)",
                     worst_herm, worst_eig, worst_part)};
}

// 6. Analytic filterbanks hold negative-frequency energy at roundoff and
//    their moduli move under a one-sample shift by at most 5% on an in-band
//    sinusoid.
Verdict criterion_analyticity() {
  double worst_neg = 0.0;
  {
    const Filterbank fb = make_analytic_filterbank(8, 64, 4, 5);
    const MatrixXcd filters = fb.analysis();
    for (int n = 0; n < fb.num_filters; ++n) {
      const VectorXcd spectrum = dft(filters.row(n).transpose());
      double total = 0.0, negative = 0.0;
      for (int f = 0; f < fb.kernel_size; ++f) {
        const double e = std::norm(spectrum(f));
        total += e;
        if (f > fb.kernel_size / 2) negative += e;
      }
      worst_neg = std::max(worst_neg, negative / total);
    }
  }

  const std::vector<double> freqs = {0.06, 0.14, 0.22, 0.31, 0.42};
  const int kernel = 64;
  Filterbank fb = make_analytic_filterbank(static_cast<int>(freqs.size()), kernel, 4, 5);
  for (int n = 0; n < fb.num_filters; ++n)
    for (int t = 0; t < kernel; ++t) {
      const double window = 0.5 - 0.5 * std::cos(2.0 * kPi * t / (kernel - 1));
      fb.analysis_real(n, t) = window * std::cos(2.0 * kPi * freqs[n] * t);
    }
  rederive_analytic_coupling(fb);

  double worst_shift = 0.0;
  const int length = 512;
  for (int n = 0; n < fb.num_filters; ++n) {
    VectorXd base(length);
    for (int t = 0; t < length; ++t) base(t) = std::cos(2.0 * kPi * freqs[n] * t + 0.7);
    const SpectrogramTensor a = analyze(fb, make_mono(base.head(length - 1), 8000));
    const SpectrogramTensor b = analyze(fb, make_mono(base.tail(length - 1), 8000));
    const long num_frames = a.channel(0).cols();
    for (long k = 4; k + 4 < num_frames; ++k) {
      const double ma = std::abs(a.channel(0)(n, k));
      const double mb = std::abs(b.channel(0)(n, k));
      worst_shift = std::max(worst_shift, std::abs(mb - ma) / ma);
    }
  }
  const bool ok = worst_neg <= 1e-10 && worst_shift <= 0.05;
  return {ok, format("negative-frequency energy %.2e (need <= 1e-10), shift modulus change "
                     "%.2f%% (need <= 5%%)",
                     worst_neg, 100.0 * worst_shift)};
}

// 7. End-to-end oracle enhancement on a six-microphone anechoic scene at
//    0 dB input improves SI-SDR by at least 10 dB through the file pipeline.
Verdict criterion_enhancement_floor() {
  Timer timer;
  TempDir dir("enhance");
  SceneSpec spec;
  spec.mic_positions = hearing_aid_geometry();
  spec.source_positions = {Eigen::Vector3d(1.0, 0.3, 0.0), Eigen::Vector3d(-0.8, -1.2, 0.1)};
  spec.sample_rate = 16000;
  spec.input_si_sdr_db = 0.0;
  spec.preroll_s = 0.1;
  const int length = 16000;
  const int preroll = 1600;
  const VectorXd dry_target = speech_shaped_noise(length, spec.sample_rate, 42);
  const VectorXd dry_interferer = white_noise(length + preroll + 8, 1042);
  const SceneRender scene = render_scene(spec, dry_target, dry_interferer);
  write_wav(scene.mixture, dir.path("mixture.wav"));
  write_wav(scene.target_image, dir.path("target.wav"));
  write_wav(scene.interferer_image, dir.path("interferer.wav"));

  EnhanceOptions options;
  options.stft_num_filters = 512;
  options.stft_kernel_size = 512;
  options.stft_hop = 256;
  options.beamformer = BeamformerKind::kMvdr;
  const EnhanceResult result = cmd_enhance(dir.path("mixture.wav"), dir.path("target.wav"),
                                           dir.path("interferer.wav"), options, dir.path("out"));
  const double elapsed = timer.seconds();
  const bool ok = result.si_sdri >= 10.0 && elapsed < 10.0;
  return {ok, format("SI-SDRi %.2f dB at %.2f dB input (need >= 10), %.2f s (need < 10)",
                     result.si_sdri, result.si_sdr_in, elapsed)};
}

// 8. Larger kernels win on reverberant scenes: mean oracle-MVDR SI-SDRi at
//    kernel 1024 beats kernel 128 by at least 1 dB over 16 scenes.
Verdict criterion_kernel_trend() {
  Timer timer;
  TempDir dir("sweep");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> jitter(-1.5, 1.5);
  for (int i = 0; i < 16; ++i) {
    SceneSpec spec;
    spec.mic_positions = hearing_aid_geometry();
    spec.source_positions = {Eigen::Vector3d(1.0 + 0.3 * jitter(rng), jitter(rng), 0.0),
                             Eigen::Vector3d(-1.0 + 0.3 * jitter(rng), jitter(rng), 0.0)};
    spec.sample_rate = 8000;
    spec.input_si_sdr_db = 0.0;
    spec.preroll_s = 0.1;
    ReverbSpec reverb;
    reverb.decay_time_s = 0.3;
    reverb.reflection_count = 40;
    reverb.seed = 100 + i;
    spec.reverb = reverb;
    const int length = 9600;
    const int preroll = 800;
    const VectorXd dry_target = speech_shaped_noise(length, spec.sample_rate, 2000 + i);
    const VectorXd dry_interferer =
        speech_shaped_noise(length + preroll + 8, spec.sample_rate, 3000 + i);
    const SceneRender scene = render_scene(spec, dry_target, dry_interferer);
    const std::string name = format("scene%02d", i);
    fs::create_directories(dir.root / name);
    write_wav(scene.target_image, dir.path(name + "/target.wav"));
    write_wav(scene.interferer_image, dir.path(name + "/interferer.wav"));
  }

  SweepOptions options;
  options.beamformer = BeamformerKind::kMvdr;
  cmd_sweep("kernel", {128, 1024}, dir.root.string(), options, dir.path("sweep.csv"));

  std::ifstream in(dir.path("sweep.csv"));
  std::string line;
  std::getline(in, line);  // header
  double mean_128 = 0.0, mean_1024 = 0.0;
  while (std::getline(in, line)) {
    int kernel = 0;
    double mean = 0.0;
    std::sscanf(line.c_str(), "%d,%lf", &kernel, &mean);
    (kernel == 128 ? mean_128 : mean_1024) = mean;
  }
  const double elapsed = timer.seconds();
  const bool ok = mean_1024 - mean_128 >= 1.0 && elapsed < 120.0;
  return {ok, format("kernel 1024 %.2f dB vs 128 %.2f dB, gap %.2f (need >= 1), %.0f s "
                     "(need < 120)",
                     mean_1024, mean_128, mean_1024 - mean_128, elapsed)};
}

// 9. Central differences through the synthesis-only chain agree with the
//    hand-derived analytic gradient of a linear functional of the output.
Verdict criterion_synthesis_gradient() {
  const int num_filters = 6;
  const int kernel = 8;
  const int hop = 4;
  const Filterbank fb = make_free_filterbank(num_filters, kernel, hop, 9);
  const VectorXd x = white_noise(160, 21);
  const SpectrogramTensor frozen = analyze(fb, make_mono(x, 8000));
  const long est_len = synthesize(fb, frozen).size();
  const VectorXd probe = white_noise(static_cast<int>(est_len), 22);

  const auto loss = [&](const Filterbank& candidate) {
    return probe.dot(synthesize(candidate, frozen));
  };
  const Eigen::VectorXd fd = finite_difference_gradient(fb, loss, 1e-5);

  // d est(t) / d sr(n, tau) accumulates Re S(n, k) wherever t = kH + tau;
  // the imaginary taps enter with -Im S(n, k). Analysis taps do not reach
  // the loss, so their gradient block is exactly zero.
  const long taps = static_cast<long>(num_filters) * kernel;
  Eigen::VectorXd analytic = Eigen::VectorXd::Zero(4 * taps);
  const MatrixXcd& s = frozen.channel(0);
  for (int n = 0; n < num_filters; ++n)
    for (int tau = 0; tau < kernel; ++tau) {
      double g_real = 0.0, g_imag = 0.0;
      for (long k = 0; k < s.cols(); ++k) {
        const double c = probe(k * hop + tau);
        g_real += s(n, k).real() * c;
        g_imag -= s(n, k).imag() * c;
      }
      analytic(2 * taps + n * kernel + tau) = g_real;
      analytic(3 * taps + n * kernel + tau) = g_imag;
    }

  const double rel = (fd - analytic).norm() / analytic.norm();
  const bool ok = rel <= 1e-4;
  return {ok, format("relative L2 error %.2e (need <= 1e-4)", rel)};
}

// 10. A 30-epoch toy training run on a free 16x16 filterbank lowers both the
//     validation loss and the analysis MACS relative to the untrained
//     initialization.
Verdict criterion_toy_training() {
  Timer timer;
  auto make_scenes = [](int count, std::uint64_t seed0) {
    std::vector<SceneRender> scenes;
    std::mt19937_64 rng(seed0);
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    for (int i = 0; i < count; ++i) {
      SceneSpec spec;
      spec.mic_positions = {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(0.1, 0, 0)};
      spec.source_positions = {Eigen::Vector3d(0.7 + jitter(rng), 0.3 + jitter(rng), 0.0),
                               Eigen::Vector3d(-0.6 + jitter(rng), 0.5 + jitter(rng), 0.0)};
      spec.sample_rate = 2000;
      spec.input_si_sdr_db = 0.0;
      spec.preroll_s = 0.05;
      const int length = 800;
      const int preroll = 100;
      const VectorXd dry_target = speech_shaped_noise(length, spec.sample_rate, seed0 + 17 * i);
      const VectorXd dry_interferer = white_noise(length + preroll + 8, seed0 + 17 * i + 9);
      scenes.push_back(render_scene(spec, dry_target, dry_interferer));
    }
    return scenes;
  };
  const std::vector<SceneRender> train_scenes = make_scenes(8, 500);
  const std::vector<SceneRender> val_scenes = make_scenes(4, 900);

  const Filterbank init = make_free_filterbank(16, 16, 8, 3);
  OptimizerConfig config;
  config.learning_rate = 1e-3;
  config.max_epochs = 30;
  config.early_stop_patience = 30;
  config.lr_halve_patience = 5;
  config.beamformer = BeamformerKind::kMwf;
  config.seed = 11;

  const std::vector<int> val_refs(val_scenes.size(), 0);
  const double init_val =
      batch_pipeline_loss(init, val_scenes, val_refs, config.beamformer, config.diag_load_eps);
  const double init_macs = macs(init, FilterSet::kAnalysis);
  const auto [trained, trace] = train(init, train_scenes, val_scenes, config);
  const double final_val =
      batch_pipeline_loss(trained, val_scenes, val_refs, config.beamformer, config.diag_load_eps);
  const double final_macs = macs(trained, FilterSet::kAnalysis);
  const double elapsed = timer.seconds();
  const bool ok = final_val <= init_val && final_macs <= init_macs && elapsed < 600.0;
  return {ok, format("val loss %.3f -> %.3f, MACS %.4f -> %.4f (both must not rise), %zu "
                     "epochs, %.0f s (need < 600)",
                     init_val, final_val, init_macs, final_macs, trace.num_epochs(), elapsed)};
}

// 11. SI-SDR identities: exact scale invariance under power-of-two gains,
//     the canonical half-energy pair at 0 dB, and the identity cap.
Verdict criterion_si_sdr_identities() {
  const VectorXd reference = white_noise(64, 3);
  const VectorXd estimate = white_noise(64, 4);
  const double base = si_sdr(reference, estimate);
  bool scale_exact = true;
  for (const double alpha : {0.25, 0.5, 2.0, 4.0, 1024.0}) {
    if (si_sdr(reference, alpha * estimate) != base) scale_exact = false;
  }

  VectorXd ref2(2), est2(2);
  ref2 << 1.0, 0.0;
  est2 << 1.0, 1.0;
  const double half = si_sdr(ref2, est2);
  const double cap = si_sdr(reference, reference);
  const bool ok = scale_exact && half == 0.0 && cap == kSiSdrCapDb;
  return {ok, format("scale invariance %s, [1,0]/[1,1] = %.1f dB (need 0), identity %.0f dB "
                     "(need %.0f)",
                     scale_exact ? "exact" : "BROKEN", half, cap, kSiSdrCapDb)};
}

// 12. Scene simulation and filterbank training are byte-for-byte
//     deterministic across repeated runs with the same seeds.
Verdict criterion_determinism() {
  TempDir dir("determinism");
  nlohmann::json scene;
  scene["mic_positions"] = {{0.0, 0.0, 0.0}, {0.1, 0.0, 0.0}};
  scene["source_positions"] = {{0.8, 0.3, 0.0}, {-0.6, 0.5, 0.0}};
  scene["sample_rate"] = 8000;
  scene["input_si_sdr_db"] = 1.0;
  scene["preroll_s"] = 0.05;
  scene["duration_s"] = 0.2;
  scene["seed"] = 7;
  scene["sources"] = {{"target", {{"kind", "speech"}}}, {"interferer", {{"kind", "white"}}}};
  {
    std::ofstream out(dir.path("scene.json"));
    out << scene.dump(2) << "\n";
  }

  cmd_simulate(dir.path("scene.json"), dir.path("sim_a"));
  cmd_simulate(dir.path("scene.json"), dir.path("sim_b"));
  bool simulate_same = true;
  for (const char* leaf : {"mixture.wav", "target.wav", "interferer.wav", "manifest.json"}) {
    const std::string a = slurp(dir.path(std::string("sim_a/") + leaf));
    if (a.empty() || a != slurp(dir.path(std::string("sim_b/") + leaf))) simulate_same = false;
  }

  scene["seed"] = 8;
  {
    std::ofstream out(dir.path("scene2.json"));
    out << scene.dump(2) << "\n";
  }
  cmd_simulate(dir.path("scene.json"), dir.path("scenes/train/s1"));
  cmd_simulate(dir.path("scene2.json"), dir.path("scenes/train/s2"));
  cmd_simulate(dir.path("scene.json"), dir.path("scenes/val/s1"));

  nlohmann::json config;
  config["filterbank"] = {{"kind", "free"}, {"num_filters", 8}, {"kernel_size", 8},
                          {"hop", 4},       {"seed", 3}};
  config["learning_rate"] = 2e-3;
  config["max_epochs"] = 2;
  config["beamformer"] = "mwf";
  config["seed"] = 1;
  {
    std::ofstream out(dir.path("config.json"));
    out << config.dump(2) << "\n";
  }
  cmd_optimize_fb(dir.path("config.json"), dir.path("scenes"), dir.path("fb_a.json"),
                  dir.path("trace_a.csv"));
  cmd_optimize_fb(dir.path("config.json"), dir.path("scenes"), dir.path("fb_b.json"),
                  dir.path("trace_b.csv"));
  const bool optimize_same = slurp(dir.path("fb_a.json")) == slurp(dir.path("fb_b.json")) &&
                             slurp(dir.path("trace_a.csv")) == slurp(dir.path("trace_b.csv")) &&
                             !slurp(dir.path("fb_a.json")).empty();
  const bool ok = simulate_same && optimize_same;
  return {ok, format("simulate %s, optimize %s (both byte-identical)",
                     simulate_same ? "identical" : "DIFFERS",
                     optimize_same ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {"perfect reconstruction", criterion_reconstruction},
      {"macs anchors", criterion_macs_anchors},
      {"mvdr distortionless response", criterion_mvdr_distortionless},
      {"mwf closed forms", criterion_mwf_closed_forms},
      {"scm properties", criterion_scm_properties},
      {"analyticity and shift tolerance", criterion_analyticity},
      {"oracle enhancement floor", criterion_enhancement_floor},
      {"kernel size trend", criterion_kernel_trend},
      {"synthesis gradient correctness", criterion_synthesis_gradient},
      {"toy learning run", criterion_toy_training},
      {"si-sdr identities", criterion_si_sdr_identities},
      {"determinism", criterion_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict verdict;
    try {
      verdict = criteria[i].run();
    } catch (const std::exception& e) {
      verdict = {false, std::string("exception: ") + e.what()};
    }
    if (!verdict.first) ++failures;
    std::printf("[%s] criterion %2zu: %s (%s)\n", verdict.first ? "PASS" : "FAIL", i + 1,
                criteria[i].name, verdict.second.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
