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

#ifndef BEAMLAB_SCENE_HPP_
#define BEAMLAB_SCENE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "beamlab/signal.hpp"

namespace beamlab {

// Sparse stochastic reverberation: reflection_count plane-wave echoes with
// exponentially decaying gains, drawn once per source from the seeded
// generator and shared across microphones (per-mic delays only).
struct ReverbSpec {
  double decay_time_s = 0.3;
  int reflection_count = 0;
  std::uint64_t seed = 0;
};

struct SceneSpec {
  std::vector<Eigen::Vector3d> mic_positions;
  // Exactly two entries: target first, interferer second.
  std::vector<Eigen::Vector3d> source_positions;
  double speed_of_sound = 343.0;
  int sample_rate = 0;
  double input_si_sdr_db = 0.0;
  std::optional<ReverbSpec> reverb;
  double preroll_s = 1.0;
  // With the flag set the interferer image is all-zero and the mixture
  // equals the target image; input_si_sdr_db is ignored (an infinite input
  // SI-SDR cannot be requested through scaling).
  bool interferer_free = false;

  int num_mics() const { return static_cast<int>(mic_positions.size()); }
  void validate() const;
};

struct SceneRender {
  MultichannelSignal mixture;
  MultichannelSignal target_image;
  MultichannelSignal interferer_image;
};

// Delays x by a real number of samples >= 0 via 64-tap Hann-windowed sinc
// interpolation. Output has the input length; content shifted past the end
// is dropped. Integer delays are exact shifts.
Eigen::VectorXd fractional_delay(const Eigen::VectorXd& x, double delay);

// Spatializes both dry sources onto the array and mixes them so the mixture
// at reference channel 0 attains spec.input_si_sdr_db (within float fuzz of
// the closed-form scaling). The interferer is advanced by preroll_s, so its
// dry signal must be at least preroll longer than the target's.
SceneRender render_scene(const SceneSpec& spec,
                         const Eigen::VectorXd& dry_target,
                         const Eigen::VectorXd& dry_interferer);

// Six microphones: two collinear front/mid/rear triplets with 7.6 mm
// spacing, triplet centers 0.16 m apart, symmetric about the origin.
std::vector<Eigen::Vector3d> hearing_aid_geometry();

// Dry source material: built-in generators or a mono WAV file.
enum class DrySourceKind { kWhite, kSpeechShaped, kMultiTone, kWav };

struct DrySourceSpec {
  DrySourceKind kind = DrySourceKind::kWhite;
  std::uint64_t seed = 0;
  std::vector<double> frequencies_hz;  // kMultiTone only
  std::string path;                    // kWav only
};

Eigen::VectorXd white_noise(int num_samples, std::uint64_t seed);
// Unit-RMS noise with a -6 dB/octave rolloff (one-pole lowpass on white
// noise), a crude stand-in for the long-term speech spectrum.
Eigen::VectorXd speech_shaped_noise(int num_samples, int sample_rate,
                                    std::uint64_t seed);
Eigen::VectorXd multi_tone(int num_samples, int sample_rate,
                           const std::vector<double>& frequencies_hz);

// Produces exactly num_samples samples at sample_rate. WAV sources must be
// mono, match the rate, and be at least num_samples long (they are
// truncated, never padded).
Eigen::VectorXd generate_dry_source(const DrySourceSpec& spec,
                                    int sample_rate, int num_samples);

// JSON forms. Missing required fields raise errors naming the field.
// mic_positions accepts the string "hearing_aid" as a shortcut for
// hearing_aid_geometry().
SceneSpec scene_spec_from_json(const nlohmann::json& j);
nlohmann::json scene_spec_to_json(const SceneSpec& spec);
DrySourceSpec dry_source_from_json(const nlohmann::json& j);

}  // namespace beamlab

#endif  // BEAMLAB_SCENE_HPP_
