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

#include "beamlab/signal.hpp"

#include <stdexcept>

namespace beamlab {

MultichannelSignal::MultichannelSignal(MatrixXd s, int rate)
    : samples(std::move(s)), sample_rate(rate) {
  if (samples.rows() < 1 || samples.cols() < 1)
    throw std::invalid_argument("signal must have at least one channel and one sample");
  if (sample_rate <= 0) throw std::invalid_argument("sample rate must be positive");
  if (!samples.allFinite()) throw std::invalid_argument("signal contains non-finite samples");
}

MultichannelSignal make_mono(const VectorXd& x, int sample_rate) {
  return MultichannelSignal(x.transpose(), sample_rate);
}

void SpectrogramTensor::validate() const {
  if (channels.empty()) throw std::invalid_argument("spectrogram has no channels");
  if (frame_hop < 1) throw std::invalid_argument("spectrogram hop must be >= 1");
  const long n = channels[0].rows();
  const long k = channels[0].cols();
  for (const auto& c : channels) {
    if (c.rows() != n || c.cols() != k)
      throw std::invalid_argument("spectrogram channels have inconsistent shapes");
    if (!c.allFinite()) throw std::invalid_argument("spectrogram contains non-finite values");
  }
}

MatrixXd frame_signal(const VectorXd& x, int window_length, int hop) {
  const long t_total = x.size();
  if (window_length < 1) throw std::invalid_argument("window length must be >= 1");
  if (hop < 1 || hop > window_length)
    throw std::invalid_argument("hop must satisfy 1 <= H <= L");
  if (t_total < window_length) throw std::invalid_argument("signal shorter than one frame");

  const long num_frames = (t_total - window_length) / hop + 1;
  MatrixXd frames(window_length, num_frames);
  for (long k = 0; k < num_frames; ++k)
    frames.col(k) = x.segment(k * hop, window_length);
  return frames;
}

namespace {

template <typename Mat, typename Vec>
Vec overlap_add_impl(const Mat& frames, int hop) {
  const long length = frames.rows();
  const long num_frames = frames.cols();
  if (num_frames < 1) throw std::invalid_argument("overlap_add needs at least one frame");
  if (hop < 1 || hop > length) throw std::invalid_argument("hop must satisfy 1 <= H <= L");

  Vec out = Vec::Zero((num_frames - 1) * hop + length);
  for (long k = 0; k < num_frames; ++k)
    out.segment(k * hop, length) += frames.col(k);
  return out;
}

}  // namespace

VectorXd overlap_add(const MatrixXd& frames, int hop) {
  return overlap_add_impl<MatrixXd, VectorXd>(frames, hop);
}

VectorXcd overlap_add(const MatrixXcd& frames, int hop) {
  return overlap_add_impl<MatrixXcd, VectorXcd>(frames, hop);
}

VectorXd overlap_add(const std::vector<VectorXd>& frames, int hop) {
  if (frames.empty()) throw std::invalid_argument("overlap_add needs at least one frame");
  const long length = frames[0].size();
  MatrixXd mat(length, static_cast<long>(frames.size()));
  for (size_t k = 0; k < frames.size(); ++k) {
    if (frames[k].size() != length)
      throw std::invalid_argument("inconsistent frame lengths");
    mat.col(static_cast<long>(k)) = frames[k];
  }
  return overlap_add(mat, hop);
}

}  // namespace beamlab
