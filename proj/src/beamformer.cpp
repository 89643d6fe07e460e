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

#include "beamlab/beamformer.hpp"

#include <stdexcept>

#include <Eigen/LU>

namespace beamlab {

namespace {

void check_pair(const SpatialCovariance& r_x, const SpatialCovariance& r_v, int reference) {
  if (r_x.num_bins() != r_v.num_bins() || r_x.num_channels() != r_v.num_channels())
    throw std::invalid_argument("covariance shapes do not match");
  if (r_x.num_bins() < 1) throw std::invalid_argument("covariance has no bins");
  if (reference < 0 || reference >= r_x.num_channels())
    throw std::invalid_argument("reference channel out of range");
}

}  // namespace

std::string to_string(BeamformerKind kind) {
  return kind == BeamformerKind::kMvdr ? "mvdr" : "mwf";
}

BeamformerKind beamformer_kind_from_string(const std::string& s) {
  if (s == "mvdr") return BeamformerKind::kMvdr;
  if (s == "mwf") return BeamformerKind::kMwf;
  throw std::invalid_argument("unknown beamformer '" + s + "'");
}

BeamformerWeights mvdr_weights(const SpatialCovariance& r_x, const SpatialCovariance& r_v,
                               int reference) {
  check_pair(r_x, r_v, reference);
  const long channels = r_x.num_channels();

  BeamformerWeights out;
  out.reference = reference;
  out.weights.resize(r_x.num_bins(), channels);
  for (long n = 0; n < r_x.num_bins(); ++n) {
    Eigen::FullPivLU<MatrixXcd> lu(r_v.bins[n]);
    if (!lu.isInvertible())
      throw std::runtime_error("interferer covariance singular at bin " + std::to_string(n));
    const MatrixXcd solved = lu.solve(r_x.bins[n]);  // R_v^-1 R_x
    const cd trace = solved.trace();
    if (std::abs(trace) < 1e-12 * static_cast<double>(channels)) {
      out.weights.row(n).setZero();
      out.weights(n, reference) = 1.0;
      out.flagged_bins.push_back(n);
    } else {
      out.weights.row(n) = (solved.col(reference) / trace).transpose();
    }
  }
  return out;
}

BeamformerWeights mwf_weights(const SpatialCovariance& r_x, const SpatialCovariance& r_v,
                              int reference) {
  check_pair(r_x, r_v, reference);

  BeamformerWeights out;
  out.reference = reference;
  out.weights.resize(r_x.num_bins(), r_x.num_channels());
  for (long n = 0; n < r_x.num_bins(); ++n) {
    Eigen::FullPivLU<MatrixXcd> lu(r_x.bins[n] + r_v.bins[n]);
    if (!lu.isInvertible())
      throw std::runtime_error("summed covariance singular at bin " + std::to_string(n));
    out.weights.row(n) = lu.solve(r_x.bins[n].col(reference)).transpose();
  }
  return out;
}

BeamformerWeights beamformer_weights(BeamformerKind kind, const SpatialCovariance& r_x,
                                     const SpatialCovariance& r_v, int reference) {
  return kind == BeamformerKind::kMvdr ? mvdr_weights(r_x, r_v, reference)
                                       : mwf_weights(r_x, r_v, reference);
}

SpectrogramTensor apply_beamformer(const BeamformerWeights& w, const SpectrogramTensor& y) {
  y.validate();
  if (w.weights.rows() != y.bin_count())
    throw std::invalid_argument("weight bin count does not match spectrogram");
  if (w.weights.cols() != y.num_channels())
    throw std::invalid_argument("weight channel count does not match spectrogram");

  MatrixXcd out = MatrixXcd::Zero(y.bin_count(), y.num_frames());
  for (int m = 0; m < y.num_channels(); ++m)
    out += w.weights.col(m).conjugate().asDiagonal() * y.channels[m];

  SpectrogramTensor result;
  result.frame_hop = y.frame_hop;
  result.channels.push_back(std::move(out));
  return result;
}

}  // namespace beamlab
