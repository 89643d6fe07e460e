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

#include "beamlab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "beamlab/masking.hpp"
#include "beamlab/metrics.hpp"
#include "beamlab/optimizer.hpp"
#include "beamlab/scm.hpp"
#include "beamlab/wav.hpp"

namespace beamlab {

namespace {

namespace fs = std::filesystem;

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) {
    throw std::runtime_error("cannot open json file: " + path);
  }
  nlohmann::json j;
  file >> j;
  return j;
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream file(path, std::ios::trunc);
  if (!file) {
    throw std::runtime_error("cannot open json file for writing: " + path);
  }
  file << j.dump(2) << '\n';
  if (!file) {
    throw std::runtime_error("failed writing json file: " + path);
  }
}

struct EnhanceRun {
  Eigen::VectorXd estimate;  // full reconstructed span
  EnhanceResult metrics;
  int sample_rate;
};

// Shared oracle/file-mask enhancement body used by cmd_enhance and cmd_sweep.
EnhanceRun run_enhancement(const MultichannelSignal& mixture,
                           const MultichannelSignal& target,
                           const MultichannelSignal& interferer,
                           const Filterbank& fb, BeamformerKind beamformer,
                           int reference, double diag_load_eps,
                           const std::string& mask_path) {
  if (mixture.num_channels() != target.num_channels() ||
      mixture.num_channels() != interferer.num_channels()) {
    throw std::runtime_error("channel count mismatch between mixture and images");
  }
  if (mixture.num_samples() != target.num_samples() ||
      mixture.num_samples() != interferer.num_samples()) {
    throw std::runtime_error("length mismatch between mixture and images");
  }
  if (reference < 0 || reference >= mixture.num_channels()) {
    throw std::runtime_error("reference channel out of range");
  }

  const SpectrogramTensor mixture_spec = analyze(fb, mixture);

  Mask target_mask{Eigen::MatrixXd()};
  if (mask_path.empty()) {
    const SpectrogramTensor target_spec = analyze(
        fb, make_mono(target.samples.row(reference).transpose(),
                      target.sample_rate));
    const SpectrogramTensor interferer_spec = analyze(
        fb, make_mono(interferer.samples.row(reference).transpose(),
                      interferer.sample_rate));
    target_mask =
        oracle_wlm(target_spec.channels[0], interferer_spec.channels[0]);
  } else {
    target_mask = load_mask_csv(mask_path);
    if (target_mask.values.rows() != mixture_spec.channels[0].rows() ||
        target_mask.values.cols() != mixture_spec.channels[0].cols()) {
      throw std::runtime_error(
          "mask dimensions do not match the analyzed spectrogram");
    }
  }

  const SpatialCovariance r_x =
      masked_average_scm(mixture_spec, target_mask);
  SpatialCovariance r_v =
      masked_average_scm(mixture_spec, complement(target_mask));
  r_v = diagonal_load(r_v, diag_load_eps);

  const BeamformerWeights weights =
      beamformer_weights(beamformer, r_x, r_v, reference);
  const SpectrogramTensor enhanced_spec =
      apply_beamformer(weights, mixture_spec);

  EnhanceRun run;
  run.estimate = synthesize(fb, enhanced_spec);
  run.sample_rate = mixture.sample_rate;
  run.metrics.flagged_bins = weights.flagged_bins;

  // Edge frames lack full overlap; score on the trimmed valid span.
  const Eigen::Index span = run.estimate.size();
  Eigen::Index start = 0;
  Eigen::Index count = span;
  if (span > 2 * fb.kernel_size + 16) {
    start = fb.kernel_size;
    count = span - 2 * fb.kernel_size;
  }
  const Eigen::VectorXd target_seg =
      target.samples.row(reference).segment(start, count).transpose();
  const Eigen::VectorXd mixture_seg =
      mixture.samples.row(reference).segment(start, count).transpose();
  const Eigen::VectorXd estimate_seg = run.estimate.segment(start, count);

  run.metrics.si_sdr_in = si_sdr(target_seg, mixture_seg);
  run.metrics.si_sdr_out = si_sdr(target_seg, estimate_seg);
  run.metrics.si_sdri = run.metrics.si_sdr_out - run.metrics.si_sdr_in;
  return run;
}

Filterbank build_sweep_filterbank(FilterbankKind kind, int num_filters,
                                  int kernel_size, int hop,
                                  std::uint64_t seed) {
  switch (kind) {
    case FilterbankKind::kStft:
      return make_stft_filterbank(num_filters, kernel_size, hop,
                                  WindowKind::kSqrtHann);
    case FilterbankKind::kFree:
      return make_free_filterbank(num_filters, kernel_size, hop, seed);
    case FilterbankKind::kAnalytic:
      return make_analytic_filterbank(num_filters, kernel_size, hop, seed);
  }
  throw std::logic_error("unknown filterbank kind");
}

}  // namespace

void cmd_simulate(const std::string& spec_path, const std::string& out_dir) {
  const nlohmann::json j = read_json_file(spec_path);
  const SceneSpec spec = scene_spec_from_json(j);

  if (!j.contains("duration_s")) {
    throw std::runtime_error("scene spec missing field: duration_s");
  }
  const double duration_s = j.at("duration_s").get<double>();
  if (!(duration_s > 0.0)) {
    throw std::runtime_error("duration_s must be positive");
  }
  if (!j.contains("sources")) {
    throw std::runtime_error("scene spec missing field: sources");
  }
  const nlohmann::json& sources = j.at("sources");
  const std::uint64_t base_seed =
      j.value("seed", static_cast<std::uint64_t>(0));

  auto parse_source = [&](const char* name,
                          std::uint64_t default_seed) -> DrySourceSpec {
    if (!sources.contains(name)) {
      throw std::runtime_error(std::string("sources missing field: ") + name);
    }
    DrySourceSpec src = dry_source_from_json(sources.at(name));
    if (!sources.at(name).contains("seed")) {
      src.seed = default_seed;
    }
    return src;
  };
  const DrySourceSpec target_src = parse_source("target", base_seed);
  const DrySourceSpec interferer_src = parse_source("interferer", base_seed + 1);

  const int length =
      static_cast<int>(std::llround(duration_s * spec.sample_rate));
  const int preroll =
      static_cast<int>(std::llround(spec.preroll_s * spec.sample_rate));
  const Eigen::VectorXd dry_target =
      generate_dry_source(target_src, spec.sample_rate, length);
  const Eigen::VectorXd dry_interferer =
      generate_dry_source(interferer_src, spec.sample_rate, length + preroll);

  const SceneRender render = render_scene(spec, dry_target, dry_interferer);

  fs::create_directories(out_dir);
  write_wav(render.mixture, (fs::path(out_dir) / "mixture.wav").string());
  write_wav(render.target_image, (fs::path(out_dir) / "target.wav").string());
  write_wav(render.interferer_image,
            (fs::path(out_dir) / "interferer.wav").string());

  const Eigen::VectorXd target_ref =
      render.target_image.samples.row(0).transpose();
  const Eigen::VectorXd mixture_ref = render.mixture.samples.row(0).transpose();

  nlohmann::json manifest;
  manifest["seed"] = base_seed;
  manifest["achieved_input_si_sdr_db"] = si_sdr(target_ref, mixture_ref);
  manifest["sample_rate"] = spec.sample_rate;
  manifest["num_channels"] = spec.num_mics();
  manifest["num_samples"] = length;
  manifest["scene"] = scene_spec_to_json(spec);
  write_json_file(manifest, (fs::path(out_dir) / "manifest.json").string());
}

EnhanceResult cmd_enhance(const std::string& mixture_path,
                          const std::string& target_path,
                          const std::string& interferer_path,
                          const EnhanceOptions& options,
                          const std::string& out_dir) {
  const MultichannelSignal mixture = read_wav(mixture_path);
  const MultichannelSignal target = read_wav(target_path);
  const MultichannelSignal interferer = read_wav(interferer_path);

  Filterbank fb =
      options.filterbank_path.empty()
          ? make_stft_filterbank(options.stft_num_filters,
                                 options.stft_kernel_size, options.stft_hop,
                                 options.stft_window)
          : load_filterbank(options.filterbank_path);

  const EnhanceRun run = run_enhancement(
      mixture, target, interferer, fb, options.beamformer, options.reference,
      options.diag_load_eps, options.mask_path);

  fs::create_directories(out_dir);
  write_wav(make_mono(run.estimate, run.sample_rate),
            (fs::path(out_dir) / "enhanced.wav").string());

  nlohmann::json metrics;
  metrics["si_sdr_in"] = run.metrics.si_sdr_in;
  metrics["si_sdr_out"] = run.metrics.si_sdr_out;
  metrics["si_sdri"] = run.metrics.si_sdri;
  metrics["flagged_bins"] = run.metrics.flagged_bins;
  write_json_file(metrics, (fs::path(out_dir) / "metrics.json").string());
  return run.metrics;
}

std::vector<SceneRender> load_scene_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    throw std::runtime_error("scene directory does not exist: " + dir);
  }
  std::vector<std::string> subdirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) {
      subdirs.push_back(entry.path().string());
    }
  }
  std::sort(subdirs.begin(), subdirs.end());
  if (subdirs.empty()) {
    throw std::runtime_error("no scenes found in directory: " + dir);
  }
  std::vector<SceneRender> scenes;
  scenes.reserve(subdirs.size());
  for (const auto& sub : subdirs) {
    scenes.push_back(load_scene_triple(sub));
  }
  return scenes;
}

SceneRender load_scene_triple(const std::string& dir) {
  SceneRender scene;
  scene.target_image = read_wav((fs::path(dir) / "target.wav").string());
  scene.interferer_image =
      read_wav((fs::path(dir) / "interferer.wav").string());
  if (scene.target_image.num_channels() !=
          scene.interferer_image.num_channels() ||
      scene.target_image.num_samples() !=
          scene.interferer_image.num_samples() ||
      scene.target_image.sample_rate != scene.interferer_image.sample_rate) {
    throw std::runtime_error("scene images disagree in shape: " + dir);
  }
  scene.mixture.sample_rate = scene.target_image.sample_rate;
  scene.mixture.samples =
      scene.target_image.samples + scene.interferer_image.samples;
  return scene;
}

void cmd_sweep(const std::string& axis, const std::vector<int>& values,
               const std::string& scene_dir, const SweepOptions& options,
               const std::string& out_csv) {
  if (values.empty()) {
    throw std::runtime_error("sweep needs at least one value");
  }
  const std::vector<SceneRender> scenes = load_scene_dir(scene_dir);

  std::ofstream csv(out_csv, std::ios::trunc);
  if (!csv) {
    throw std::runtime_error("cannot open csv for writing: " + out_csv);
  }
  csv.precision(17);
  csv << "value,mean_si_sdri\n";

  for (const int value : values) {
    int num_filters = 0;
    int kernel_size = 0;
    int hop = 0;
    if (axis == "kernel") {
      if (value < 2 || value % 2 != 0) {
        throw std::runtime_error("kernel axis values must be even and >= 2");
      }
      num_filters = value;
      kernel_size = value;
      hop = value / 2;
    } else if (axis == "oversampling") {
      if (value < 1 || options.base_size % value != 0) {
        throw std::runtime_error(
            "oversampling factor must divide the base size");
      }
      num_filters = options.base_size;
      kernel_size = options.base_size;
      hop = options.base_size / value;
    } else if (axis == "num-filters") {
      if (value < 1) {
        throw std::runtime_error("num-filters values must be >= 1");
      }
      num_filters = value;
      kernel_size = options.fixed_kernel;
      hop = options.fixed_hop;
    } else {
      throw std::runtime_error("unknown sweep axis: " + axis);
    }

    const Filterbank fb = build_sweep_filterbank(
        options.fb_kind, num_filters, kernel_size, hop, options.seed);
    double sum = 0.0;
    for (const SceneRender& scene : scenes) {
      const EnhanceRun run = run_enhancement(
          scene.mixture, scene.target_image, scene.interferer_image, fb,
          options.beamformer, options.reference, options.diag_load_eps, "");
      sum += run.metrics.si_sdri;
    }
    csv << value << ',' << sum / static_cast<double>(scenes.size()) << '\n';
  }
  if (!csv) {
    throw std::runtime_error("failed writing csv: " + out_csv);
  }
}

void cmd_optimize_fb(const std::string& config_path,
                     const std::string& scenes_dir,
                     const std::string& out_fb_path,
                     const std::string& trace_csv_path,
                     const std::string& resume_from) {
  const nlohmann::json j = read_json_file(config_path);
  const OptimizerConfig config = optimizer_config_from_json(j);

  Filterbank fb;
  if (!resume_from.empty()) {
    fb = load_filterbank(resume_from);
  } else {
    if (!j.contains("filterbank")) {
      throw std::runtime_error("optimizer config missing field: filterbank");
    }
    const nlohmann::json& f = j.at("filterbank");
    auto field = [&](const char* key) -> const nlohmann::json& {
      if (!f.contains(key)) {
        throw std::runtime_error(
            std::string("filterbank section missing field: ") + key);
      }
      return f.at(key);
    };
    const FilterbankKind kind =
        filterbank_kind_from_string(field("kind").get<std::string>());
    fb = build_sweep_filterbank(
        kind, field("num_filters").get<int>(), field("kernel_size").get<int>(),
        field("hop").get<int>(),
        f.value("seed", static_cast<std::uint64_t>(0)));
  }

  const std::vector<SceneRender> train_scenes =
      load_scene_dir((fs::path(scenes_dir) / "train").string());
  const std::vector<SceneRender> val_scenes =
      load_scene_dir((fs::path(scenes_dir) / "val").string());

  auto [trained, trace] = train(fb, train_scenes, val_scenes, config);
  save_filterbank(trained, out_fb_path);
  save_trace_csv(trace, trace_csv_path);
}

double cmd_inspect_fb(const std::string& fb_path, int fft_size,
                      const std::string& out_csv) {
  const Filterbank fb = load_filterbank(fb_path);
  const FrequencyResponse response =
      frequency_response(fb, FilterSet::kAnalysis, fft_size);

  std::ofstream csv(out_csv, std::ios::trunc);
  if (!csv) {
    throw std::runtime_error("cannot open csv for writing: " + out_csv);
  }
  csv.precision(17);
  csv << "filter,center_bin";
  for (Eigen::Index b = 0; b < response.magnitudes.cols(); ++b) {
    csv << ",m" << b;
  }
  csv << '\n';
  for (const int n : response.order) {
    csv << n << ',' << response.center_bin[static_cast<size_t>(n)];
    for (Eigen::Index b = 0; b < response.magnitudes.cols(); ++b) {
      csv << ',' << response.magnitudes(n, b);
    }
    csv << '\n';
  }
  if (!csv) {
    throw std::runtime_error("failed writing csv: " + out_csv);
  }
  return macs(fb, FilterSet::kAnalysis);
}

}  // namespace beamlab
