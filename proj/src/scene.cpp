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

#include "beamlab/scene.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "beamlab/wav.hpp"

namespace beamlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Positions closer than this are treated as coincident.
constexpr double kGeometryEps = 1e-9;

struct Echo {
  double delay_s;
  double gain;
  Eigen::Vector3d direction;
};

// One echo set per source; microphones share it and differ only in the
// plane-wave delay offset. Draw order per echo is fixed: delay, sign,
// three direction components.
std::vector<Echo> draw_echoes(const ReverbSpec& reverb, std::mt19937_64* rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Echo> echoes(static_cast<size_t>(reverb.reflection_count));
  for (Echo& e : echoes) {
    e.delay_s = (1.0 - unit(*rng)) * reverb.decay_time_s;  // (0, decay]
    const double sign = unit(*rng) < 0.5 ? -1.0 : 1.0;
    e.gain = sign * std::exp(-3.0 * e.delay_s * std::log(10.0) /
                             reverb.decay_time_s);
    Eigen::Vector3d d(gauss(*rng), gauss(*rng), gauss(*rng));
    while (d.norm() < kGeometryEps) {
      d = Eigen::Vector3d(gauss(*rng), gauss(*rng), gauss(*rng));
    }
    e.direction = d.normalized();
  }
  return echoes;
}

MultichannelSignal spatialize(const SceneSpec& spec,
                              const Eigen::VectorXd& dry,
                              const Eigen::Vector3d& source,
                              const std::vector<Echo>& echoes) {
  const int num_mics = spec.num_mics();
  MultichannelSignal out;
  out.sample_rate = spec.sample_rate;
  out.samples.resize(num_mics, dry.size());

  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  for (const auto& p : spec.mic_positions) {
    center += p;
  }
  center /= static_cast<double>(num_mics);

  const double fs = static_cast<double>(spec.sample_rate);
  for (int m = 0; m < num_mics; ++m) {
    const Eigen::Vector3d& mic = spec.mic_positions[static_cast<size_t>(m)];
    const double dist = (mic - source).norm();
    const double direct_delay = dist / spec.speed_of_sound * fs;
    const double direct_gain = 1.0 / std::max(dist, 0.1);
    Eigen::VectorXd row = direct_gain * fractional_delay(dry, direct_delay);
    for (const Echo& e : echoes) {
      const double offset_s =
          e.direction.dot(mic - center) / spec.speed_of_sound;
      const double delay = std::max(0.0, (e.delay_s + offset_s) * fs);
      row += e.gain * fractional_delay(dry, delay);
    }
    out.samples.row(m) = row.transpose();
  }
  return out;
}

const nlohmann::json& require_field(const nlohmann::json& j, const char* key,
                                    const char* owner) {
  if (!j.contains(key)) {
    throw std::runtime_error(std::string(owner) + " missing field: " + key);
  }
  return j.at(key);
}

Eigen::Vector3d parse_position(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw std::runtime_error("position must be a 3-element array");
  }
  return Eigen::Vector3d(j.at(0).get<double>(), j.at(1).get<double>(),
                         j.at(2).get<double>());
}

}  // namespace

void SceneSpec::validate() const {
  if (mic_positions.size() < 2) {
    throw std::invalid_argument("scene needs at least two microphones");
  }
  if (source_positions.size() != 2) {
    throw std::invalid_argument(
        "scene needs exactly two sources (target, interferer)");
  }
  std::vector<Eigen::Vector3d> all = mic_positions;
  all.insert(all.end(), source_positions.begin(), source_positions.end());
  for (const auto& p : all) {
    if (!p.allFinite()) {
      throw std::invalid_argument("scene positions must be finite");
    }
  }
  for (size_t i = 0; i < all.size(); ++i) {
    for (size_t j = i + 1; j < all.size(); ++j) {
      if ((all[i] - all[j]).norm() < kGeometryEps) {
        throw std::invalid_argument("scene geometry has coincident positions");
      }
    }
  }
  if (sample_rate < 1) {
    throw std::invalid_argument("scene sample rate must be positive");
  }
  if (!(speed_of_sound > 0.0)) {
    throw std::invalid_argument("speed of sound must be positive");
  }
  if (!std::isfinite(input_si_sdr_db)) {
    throw std::invalid_argument("input_si_sdr_db must be finite");
  }
  if (!(preroll_s >= 0.0)) {
    throw std::invalid_argument("preroll_s must be nonnegative");
  }
  if (reverb) {
    if (!(reverb->decay_time_s > 0.0)) {
      throw std::invalid_argument("reverb decay time must be positive");
    }
    if (reverb->reflection_count < 0) {
      throw std::invalid_argument("reverb reflection count must be >= 0");
    }
  }
}

Eigen::VectorXd fractional_delay(const Eigen::VectorXd& x, double delay) {
  const Eigen::Index length = x.size();
  if (!(delay >= 0.0)) {
    throw std::invalid_argument("delay must be nonnegative");
  }
  if (delay > static_cast<double>(length)) {
    throw std::invalid_argument("delay exceeds signal length");
  }

  const double whole = std::floor(delay);
  const Eigen::Index shift = static_cast<Eigen::Index>(whole);
  const double frac = delay - whole;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(length);

  if (frac < 1e-12) {
    for (Eigen::Index t = shift; t < length; ++t) {
      out(t) = x(t - shift);
    }
    return out;
  }

  // 64 taps at offsets -31..32; Hann window is zero only at |u| = 32,
  // outside the evaluated range. Normalized to unity DC gain.
  constexpr int kHalfWidth = 32;
  constexpr int kTaps = 2 * kHalfWidth;
  double kernel[kTaps];
  double kernel_sum = 0.0;
  for (int i = -kHalfWidth + 1; i <= kHalfWidth; ++i) {
    const double u = static_cast<double>(i) - frac;
    const double core = std::sin(kPi * u) / (kPi * u);  // u != 0 since frac>0
    const double window = 0.5 * (1.0 + std::cos(kPi * u / kHalfWidth));
    const double tap = core * window;
    kernel[i + kHalfWidth - 1] = tap;
    kernel_sum += tap;
  }
  for (double& tap : kernel) {
    tap /= kernel_sum;
  }

  for (Eigen::Index t = 0; t < length; ++t) {
    double acc = 0.0;
    for (int i = -kHalfWidth + 1; i <= kHalfWidth; ++i) {
      const Eigen::Index src = t - shift - static_cast<Eigen::Index>(i);
      if (src >= 0 && src < length) {
        acc += kernel[i + kHalfWidth - 1] * x(src);
      }
    }
    out(t) = acc;
  }
  return out;
}

SceneRender render_scene(const SceneSpec& spec,
                         const Eigen::VectorXd& dry_target,
                         const Eigen::VectorXd& dry_interferer) {
  spec.validate();
  const Eigen::Index length = dry_target.size();
  if (length < 1) {
    throw std::invalid_argument("dry target signal is empty");
  }
  const Eigen::Index preroll = static_cast<Eigen::Index>(
      std::llround(spec.preroll_s * spec.sample_rate));
  if (dry_interferer.size() < length + preroll) {
    throw std::invalid_argument(
        "dry interferer shorter than scene length plus preroll");
  }

  std::mt19937_64 rng(spec.reverb ? spec.reverb->seed : 0);
  std::vector<Echo> target_echoes;
  std::vector<Echo> interferer_echoes;
  if (spec.reverb) {
    target_echoes = draw_echoes(*spec.reverb, &rng);
    interferer_echoes = draw_echoes(*spec.reverb, &rng);
  }

  SceneRender out;
  out.target_image =
      spatialize(spec, dry_target, spec.source_positions[0], target_echoes);

  if (spec.interferer_free) {
    out.interferer_image.sample_rate = spec.sample_rate;
    out.interferer_image.samples =
        Eigen::MatrixXd::Zero(spec.num_mics(), length);
    out.mixture = out.target_image;
    return out;
  }

  const Eigen::VectorXd advanced = dry_interferer.segment(preroll, length);
  MultichannelSignal raw =
      spatialize(spec, advanced, spec.source_positions[1], interferer_echoes);

  // Closed-form gain g so that si_sdr(x + g v, x) at channel 0 equals the
  // configured value: with a = <v,x>/|x|^2 and c^2 = 10^(D/10) |v_perp|^2 /
  // |x|^2, g solves (1 + g a)^2 = c^2 g^2.
  const Eigen::VectorXd x = out.target_image.samples.row(0).transpose();
  const Eigen::VectorXd v = raw.samples.row(0).transpose();
  const double x_energy = x.squaredNorm();
  if (x_energy <= 0.0) {
    throw std::runtime_error("target image is silent at the reference channel");
  }
  const double a = x.dot(v) / x_energy;
  const double v_perp = v.squaredNorm() - a * a * x_energy;
  if (v_perp <= 0.0) {
    throw std::runtime_error(
        "interferer image collinear with target at the reference channel");
  }
  const double c_coef =
      std::sqrt(std::pow(10.0, spec.input_si_sdr_db / 10.0) * v_perp /
                x_energy);
  double gain = 1.0 / (c_coef - a);
  if (!std::isfinite(gain)) {
    gain = -1.0 / (c_coef + a);
  }
  if (!std::isfinite(gain)) {
    throw std::runtime_error("interferer scaling is degenerate");
  }

  out.interferer_image.sample_rate = spec.sample_rate;
  out.interferer_image.samples = gain * raw.samples;
  out.mixture.sample_rate = spec.sample_rate;
  out.mixture.samples = out.target_image.samples + out.interferer_image.samples;
  return out;
}

std::vector<Eigen::Vector3d> hearing_aid_geometry() {
  std::vector<Eigen::Vector3d> mics;
  mics.reserve(6);
  for (const double ear : {0.08, -0.08}) {
    for (const double along : {0.0076, 0.0, -0.0076}) {
      mics.emplace_back(along, ear, 0.0);
    }
  }
  return mics;
}

Eigen::VectorXd white_noise(int num_samples, std::uint64_t seed) {
  if (num_samples < 1) {
    throw std::invalid_argument("noise length must be positive");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd out(num_samples);
  for (int t = 0; t < num_samples; ++t) {
    out(t) = gauss(rng);
  }
  return out;
}

Eigen::VectorXd speech_shaped_noise(int num_samples, int sample_rate,
                                    std::uint64_t seed) {
  if (sample_rate < 1) {
    throw std::invalid_argument("sample rate must be positive");
  }
  Eigen::VectorXd out = white_noise(num_samples, seed);
  // One-pole lowpass, corner near 200 Hz: -6 dB/octave above the corner.
  const double pole = std::exp(-2.0 * kPi * 200.0 / sample_rate);
  double state = 0.0;
  for (int t = 0; t < num_samples; ++t) {
    state = pole * state + (1.0 - pole) * out(t);
    out(t) = state;
  }
  out.array() -= out.mean();
  const double rms = std::sqrt(out.squaredNorm() /
                               static_cast<double>(num_samples));
  if (rms > 0.0) {
    out /= rms;
  }
  return out;
}

Eigen::VectorXd multi_tone(int num_samples, int sample_rate,
                           const std::vector<double>& frequencies_hz) {
  if (num_samples < 1) {
    throw std::invalid_argument("tone length must be positive");
  }
  if (frequencies_hz.empty()) {
    throw std::invalid_argument("multi-tone needs at least one frequency");
  }
  for (const double f : frequencies_hz) {
    if (!(f > 0.0) || f >= 0.5 * sample_rate) {
      throw std::invalid_argument("tone frequency outside (0, Nyquist)");
    }
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(num_samples);
  for (size_t i = 0; i < frequencies_hz.size(); ++i) {
    const double phase = 2.0 * kPi * 0.61803398875 * static_cast<double>(i);
    const double omega = 2.0 * kPi * frequencies_hz[i] / sample_rate;
    for (int t = 0; t < num_samples; ++t) {
      out(t) += std::sin(omega * t + phase);
    }
  }
  const double rms = std::sqrt(out.squaredNorm() /
                               static_cast<double>(num_samples));
  if (rms > 0.0) {
    out /= rms;
  }
  return out;
}

Eigen::VectorXd generate_dry_source(const DrySourceSpec& spec,
                                    int sample_rate, int num_samples) {
  switch (spec.kind) {
    case DrySourceKind::kWhite:
      return white_noise(num_samples, spec.seed);
    case DrySourceKind::kSpeechShaped:
      return speech_shaped_noise(num_samples, sample_rate, spec.seed);
    case DrySourceKind::kMultiTone:
      return multi_tone(num_samples, sample_rate, spec.frequencies_hz);
    case DrySourceKind::kWav: {
      const MultichannelSignal wav = read_wav(spec.path);
      if (wav.num_channels() != 1) {
        throw std::runtime_error("dry source wav must be mono: " + spec.path);
      }
      if (wav.sample_rate != sample_rate) {
        throw std::runtime_error("dry source sample rate mismatch: " +
                                 spec.path);
      }
      if (wav.num_samples() < num_samples) {
        throw std::runtime_error("dry source wav shorter than scene needs: " +
                                 spec.path);
      }
      return wav.samples.row(0).head(num_samples).transpose();
    }
  }
  throw std::logic_error("unknown dry source kind");
}

SceneSpec scene_spec_from_json(const nlohmann::json& j) {
  SceneSpec spec;
  const nlohmann::json& mics = require_field(j, "mic_positions", "scene spec");
  if (mics.is_string() && mics.get<std::string>() == "hearing_aid") {
    spec.mic_positions = hearing_aid_geometry();
  } else if (mics.is_array()) {
    for (const auto& p : mics) {
      spec.mic_positions.push_back(parse_position(p));
    }
  } else {
    throw std::runtime_error(
        "mic_positions must be an array or \"hearing_aid\"");
  }

  for (const auto& p :
       require_field(j, "source_positions", "scene spec")) {
    spec.source_positions.push_back(parse_position(p));
  }

  spec.sample_rate =
      require_field(j, "sample_rate", "scene spec").get<int>();
  spec.interferer_free = j.value("interferer_free", false);
  if (spec.interferer_free) {
    spec.input_si_sdr_db = j.value("input_si_sdr_db", 0.0);
  } else {
    spec.input_si_sdr_db =
        require_field(j, "input_si_sdr_db", "scene spec").get<double>();
  }
  spec.speed_of_sound = j.value("speed_of_sound", 343.0);
  spec.preroll_s = j.value("preroll_s", 1.0);
  if (j.contains("reverb") && !j.at("reverb").is_null()) {
    const nlohmann::json& r = j.at("reverb");
    ReverbSpec reverb;
    reverb.decay_time_s =
        require_field(r, "decay_time_s", "reverb spec").get<double>();
    reverb.reflection_count =
        require_field(r, "reflection_count", "reverb spec").get<int>();
    reverb.seed = require_field(r, "seed", "reverb spec").get<std::uint64_t>();
    spec.reverb = reverb;
  }
  spec.validate();
  return spec;
}

nlohmann::json scene_spec_to_json(const SceneSpec& spec) {
  nlohmann::json j;
  nlohmann::json mics = nlohmann::json::array();
  for (const auto& p : spec.mic_positions) {
    mics.push_back({p.x(), p.y(), p.z()});
  }
  j["mic_positions"] = mics;
  nlohmann::json sources = nlohmann::json::array();
  for (const auto& p : spec.source_positions) {
    sources.push_back({p.x(), p.y(), p.z()});
  }
  j["source_positions"] = sources;
  j["speed_of_sound"] = spec.speed_of_sound;
  j["sample_rate"] = spec.sample_rate;
  j["input_si_sdr_db"] = spec.input_si_sdr_db;
  j["preroll_s"] = spec.preroll_s;
  j["interferer_free"] = spec.interferer_free;
  if (spec.reverb) {
    j["reverb"] = {{"decay_time_s", spec.reverb->decay_time_s},
                   {"reflection_count", spec.reverb->reflection_count},
                   {"seed", spec.reverb->seed}};
  }
  return j;
}

DrySourceSpec dry_source_from_json(const nlohmann::json& j) {
  DrySourceSpec spec;
  const std::string kind =
      require_field(j, "kind", "dry source spec").get<std::string>();
  if (kind == "white") {
    spec.kind = DrySourceKind::kWhite;
  } else if (kind == "speech") {
    spec.kind = DrySourceKind::kSpeechShaped;
  } else if (kind == "tones") {
    spec.kind = DrySourceKind::kMultiTone;
    spec.frequencies_hz = require_field(j, "frequencies_hz", "dry source spec")
                              .get<std::vector<double>>();
  } else if (kind == "wav") {
    spec.kind = DrySourceKind::kWav;
    spec.path = require_field(j, "path", "dry source spec").get<std::string>();
  } else {
    throw std::runtime_error("unknown dry source kind: " + kind);
  }
  spec.seed = j.value("seed", static_cast<std::uint64_t>(0));
  return spec;
}

}  // namespace beamlab
