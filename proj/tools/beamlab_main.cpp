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

#include <cstdio>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "beamlab/commands.hpp"

namespace {

// "N,L,H" or "N,L,H,window" into the enhance options.
void parse_stft_spec(const std::string& text, beamlab::EnhanceOptions* out) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    parts.push_back(item);
  }
  if (parts.size() != 3 && parts.size() != 4) {
    throw std::runtime_error("--stft expects N,L,H or N,L,H,window");
  }
  out->stft_num_filters = std::stoi(parts[0]);
  out->stft_kernel_size = std::stoi(parts[1]);
  out->stft_hop = std::stoi(parts[2]);
  if (parts.size() == 4) {
    out->stft_window = beamlab::window_kind_from_string(parts[3]);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"beamlab: mask-based beamforming in pluggable filterbanks"};
  app.require_subcommand(1);

  // simulate
  std::string sim_spec;
  std::string sim_out;
  CLI::App* simulate = app.add_subcommand("simulate", "render a scene to WAV");
  simulate->add_option("--spec", sim_spec, "scene spec JSON")->required();
  simulate->add_option("--out", sim_out, "output directory")->required();

  // enhance
  std::string enh_mixture;
  std::string enh_target;
  std::string enh_interferer;
  std::string enh_fb;
  std::string enh_stft;
  std::string enh_beamformer = "mvdr";
  int enh_ref = 1;  // 1-based on the command line
  double enh_diag_load = 1e-6;
  std::string enh_mask = "oracle";
  std::string enh_out;
  CLI::App* enhance =
      app.add_subcommand("enhance", "beamform a mixture with a mask");
  enhance->add_option("--mixture", enh_mixture, "mixture WAV")->required();
  enhance->add_option("--target", enh_target, "target image WAV")->required();
  enhance->add_option("--interferer", enh_interferer, "interferer image WAV")
      ->required();
  enhance->add_option("--fb", enh_fb, "filterbank JSON file");
  enhance->add_option("--stft", enh_stft, "stft params N,L,H[,window]");
  enhance->add_option("--beamformer", enh_beamformer, "mvdr or mwf");
  enhance->add_option("--ref", enh_ref, "reference channel, 1-based");
  enhance->add_option("--diag-load", enh_diag_load,
                      "relative diagonal loading for the interferer SCM");
  enhance->add_option("--mask", enh_mask, "oracle or a mask CSV path");
  enhance->add_option("--out", enh_out, "output directory")->required();

  // sweep
  std::string sweep_axis;
  std::vector<int> sweep_values;
  std::string sweep_scenes;
  std::string sweep_beamformer = "mvdr";
  std::string sweep_kind = "stft";
  int sweep_base_size = 2048;
  int sweep_fixed_kernel = 256;
  int sweep_fixed_hop = 128;
  int sweep_ref = 1;
  double sweep_diag_load = 1e-6;
  std::uint64_t sweep_seed = 0;
  std::string sweep_out;
  CLI::App* sweep =
      app.add_subcommand("sweep", "mean SI-SDRi across a parameter axis");
  sweep->add_option("--axis", sweep_axis, "kernel | oversampling | num-filters")
      ->required();
  sweep->add_option("--values", sweep_values, "axis values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--scenes", sweep_scenes, "scene directory")->required();
  sweep->add_option("--beamformer", sweep_beamformer, "mvdr or mwf");
  sweep->add_option("--fb-kind", sweep_kind, "stft | free | analytic");
  sweep->add_option("--base-size", sweep_base_size,
                    "N = L for the oversampling axis");
  sweep->add_option("--fixed-kernel", sweep_fixed_kernel,
                    "kernel size for the num-filters axis");
  sweep->add_option("--fixed-hop", sweep_fixed_hop,
                    "hop for the num-filters axis");
  sweep->add_option("--ref", sweep_ref, "reference channel, 1-based");
  sweep->add_option("--diag-load", sweep_diag_load, "relative diagonal loading");
  sweep->add_option("--seed", sweep_seed, "tap init seed for free/analytic");
  sweep->add_option("--out", sweep_out, "output CSV")->required();

  // optimize-fb
  std::string opt_config;
  std::string opt_scenes;
  std::string opt_out_fb;
  std::string opt_out_trace;
  std::string opt_resume;
  CLI::App* optimize =
      app.add_subcommand("optimize-fb", "train filterbank taps end-to-end");
  optimize->add_option("--config", opt_config, "optimizer config JSON")
      ->required();
  optimize->add_option("--scenes", opt_scenes,
                       "directory with train/ and val/ scene subdirectories")
      ->required();
  optimize->add_option("--out-fb", opt_out_fb, "output filterbank JSON")
      ->required();
  optimize->add_option("--out-trace", opt_out_trace, "output trace CSV")
      ->required();
  optimize->add_option("--resume-from", opt_resume,
                       "filterbank JSON to continue from");

  // inspect-fb
  std::string insp_fb;
  int insp_fft_size = 512;
  std::string insp_out;
  CLI::App* inspect =
      app.add_subcommand("inspect-fb", "frequency responses and MACS");
  inspect->add_option("--fb", insp_fb, "filterbank JSON file")->required();
  inspect->add_option("--fft-size", insp_fft_size, "DFT length for responses");
  inspect->add_option("--out", insp_out, "output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      beamlab::cmd_simulate(sim_spec, sim_out);
    } else if (enhance->parsed()) {
      beamlab::EnhanceOptions options;
      if (!enh_fb.empty() && !enh_stft.empty()) {
        throw std::runtime_error("--fb and --stft are mutually exclusive");
      }
      options.filterbank_path = enh_fb;
      if (!enh_stft.empty()) {
        parse_stft_spec(enh_stft, &options);
      }
      options.beamformer =
          beamlab::beamformer_kind_from_string(enh_beamformer);
      if (enh_ref < 1) {
        throw std::runtime_error("--ref is 1-based and must be >= 1");
      }
      options.reference = enh_ref - 1;
      options.diag_load_eps = enh_diag_load;
      options.mask_path = (enh_mask == "oracle") ? "" : enh_mask;
      const beamlab::EnhanceResult result = beamlab::cmd_enhance(
          enh_mixture, enh_target, enh_interferer, options, enh_out);
      std::printf("si_sdr_in=%.6f dB si_sdr_out=%.6f dB si_sdri=%.6f dB\n",
                  result.si_sdr_in, result.si_sdr_out, result.si_sdri);
    } else if (sweep->parsed()) {
      beamlab::SweepOptions options;
      options.beamformer =
          beamlab::beamformer_kind_from_string(sweep_beamformer);
      options.fb_kind = beamlab::filterbank_kind_from_string(sweep_kind);
      options.base_size = sweep_base_size;
      options.fixed_kernel = sweep_fixed_kernel;
      options.fixed_hop = sweep_fixed_hop;
      if (sweep_ref < 1) {
        throw std::runtime_error("--ref is 1-based and must be >= 1");
      }
      options.reference = sweep_ref - 1;
      options.diag_load_eps = sweep_diag_load;
      options.seed = sweep_seed;
      beamlab::cmd_sweep(sweep_axis, sweep_values, sweep_scenes, options,
                         sweep_out);
    } else if (optimize->parsed()) {
      beamlab::cmd_optimize_fb(opt_config, opt_scenes, opt_out_fb,
                               opt_out_trace, opt_resume);
    } else if (inspect->parsed()) {
      const double macs_value =
          beamlab::cmd_inspect_fb(insp_fb, insp_fft_size, insp_out);
      std::printf("analysis MACS: %.17g\n", macs_value);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
