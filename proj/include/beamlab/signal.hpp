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

#ifndef BEAMLAB_SIGNAL_HPP_
#define BEAMLAB_SIGNAL_HPP_

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace beamlab {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cd = std::complex<double>;

// Time-domain signal at M microphones. One row per channel, all channels
// the same length. Sample rate is carried as metadata only; nothing in the
// library resamples.
struct MultichannelSignal {
  MatrixXd samples;  // M x T
  int sample_rate = 0;

  MultichannelSignal() = default;
  MultichannelSignal(MatrixXd s, int rate);

  int num_channels() const { return static_cast<int>(samples.rows()); }
  long num_samples() const { return samples.cols(); }
  VectorXd channel(int m) const { return samples.row(m).transpose(); }
};

MultichannelSignal make_mono(const VectorXd& x, int sample_rate);

// Complex time-frequency tensor, M channels x N bins x K frames, stored as
// one N x K matrix per channel.
struct SpectrogramTensor {
  std::vector<MatrixXcd> channels;  // each N x K
  int frame_hop = 0;

  int num_channels() const { return static_cast<int>(channels.size()); }
  long bin_count() const { return channels.empty() ? 0 : channels[0].rows(); }
  long num_frames() const { return channels.empty() ? 0 : channels[0].cols(); }
  const MatrixXcd& channel(int m) const { return channels.at(m); }

  void validate() const;  // throws on empty/ragged/non-finite content
};

// Real-valued mask, N bins x K frames, every entry in [0, 1].
struct Mask {
  MatrixXd values;  // N x K
};

// Cuts x into K = floor((T - L) / H) + 1 frames of length L at hop H.
// Frame k holds samples [kH, kH + L); trailing samples that do not fill a
// frame are dropped. Returned as an L x K matrix (one column per frame).
// Throws if T < L ("signal shorter than one frame") or if L, H are invalid.
MatrixXd frame_signal(const VectorXd& x, int window_length, int hop);

// Overlap-adds K frames (columns of an L x K matrix) at hop H into a signal
// of length (K - 1) * H + L: out(t) = sum_k frame_k(t - kH).
VectorXd overlap_add(const MatrixXd& frames, int hop);
VectorXcd overlap_add(const MatrixXcd& frames, int hop);

// Frame-list form; throws if the frames do not all share one length.
VectorXd overlap_add(const std::vector<VectorXd>& frames, int hop);

}  // namespace beamlab

#endif  // BEAMLAB_SIGNAL_HPP_
