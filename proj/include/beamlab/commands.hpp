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

#ifndef BEAMLAB_COMMANDS_HPP_
#define BEAMLAB_COMMANDS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "beamlab/beamformer.hpp"
#include "beamlab/filterbank.hpp"
#include "beamlab/scene.hpp"

namespace beamlab {

// Command bodies shared by the CLI and the test suites. All of them throw on
// error; the CLI turns exceptions into single-line diagnostics.

// Renders the scene described by the JSON file (scene spec plus dry-source
// section) into mixture.wav, target.wav, interferer.wav and manifest.json
// under out_dir. Deterministic for a fixed file.
void cmd_simulate(const std::string& spec_path, const std::string& out_dir);

struct EnhanceOptions {
  std::string filterbank_path;  // when empty the stft_* fields apply
  int stft_num_filters = 1024;
  int stft_kernel_size = 1024;
  int stft_hop = 512;
  WindowKind stft_window = WindowKind::kSqrtHann;
  BeamformerKind beamformer = BeamformerKind::kMvdr;
  int reference = 0;  // 0-based
  double diag_load_eps = 1e-6;
  std::string mask_path;  // when empty the oracle mask is used
};

struct EnhanceResult {
  double si_sdr_in;
  double si_sdr_out;
  double si_sdri;
  std::vector<long> flagged_bins;
};

// Writes enhanced.wav and metrics.json under out_dir and returns the
// metrics. Input/output SI-SDR are measured on the valid span with
// kernel_size samples excluded at each edge.
EnhanceResult cmd_enhance(const std::string& mixture_path,
                          const std::string& target_path,
                          const std::string& interferer_path,
                          const EnhanceOptions& options,
                          const std::string& out_dir);

struct SweepOptions {
  BeamformerKind beamformer = BeamformerKind::kMvdr;
  FilterbankKind fb_kind = FilterbankKind::kStft;
  int base_size = 2048;    // oversampling axis: N = L = base_size
  int fixed_kernel = 256;  // num-filters axis kernel size
  int fixed_hop = 128;     // num-filters axis hop
  int reference = 0;
  double diag_load_eps = 1e-6;
  std::uint64_t seed = 0;  // tap init for free/analytic kinds
};

// axis is one of kernel | oversampling | num-filters. For every value the
// oracle pipeline runs on each scene under scene_dir (subdirectories with
// target.wav + interferer.wav); the CSV gets one "value,mean_si_sdri" row
// per value in the given order.
void cmd_sweep(const std::string& axis, const std::vector<int>& values,
               const std::string& scene_dir, const SweepOptions& options,
               const std::string& out_csv);

// Trains a filterbank on scene_dir/train vs scene_dir/val per the config
// JSON (optimizer fields plus a "filterbank" init section) and writes the
// learned filterbank JSON and the trace CSV. A non-empty resume_from loads
// the starting filterbank from file instead of the init section.
void cmd_optimize_fb(const std::string& config_path,
                     const std::string& scenes_dir,
                     const std::string& out_fb_path,
                     const std::string& trace_csv_path,
                     const std::string& resume_from = "");

// Writes the per-filter magnitude response (rows sorted by center
// frequency) to out_csv and returns the analysis MACS that the CLI prints.
double cmd_inspect_fb(const std::string& fb_path, int fft_size,
                      const std::string& out_csv);

// Loads every scene subdirectory (sorted by name) as image pairs; the
// mixture is re-summed in double precision so additivity is exact.
std::vector<SceneRender> load_scene_dir(const std::string& dir);
SceneRender load_scene_triple(const std::string& dir);

}  // namespace beamlab

#endif  // BEAMLAB_COMMANDS_HPP_
