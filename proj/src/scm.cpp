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

#include "beamlab/scm.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace beamlab {

namespace {

void check_mask_shape(const SpectrogramTensor& y, const Mask& m) {
  y.validate();
  if (m.values.rows() != y.bin_count() || m.values.cols() != y.num_frames())
    throw std::invalid_argument("mask shape does not match spectrogram");
}

// The M-vector across channels at one (bin, frame).
VectorXcd snapshot(const SpectrogramTensor& y, long n, long k) {
  VectorXcd v(y.num_channels());
  for (int m = 0; m < y.num_channels(); ++m) v(m) = y.channels[m](n, k);
  return v;
}

}  // namespace

void SpatialCovariance::validate() const {
  if (bins.empty()) throw std::invalid_argument("spatial covariance has no bins");
  const long m = bins[0].rows();
  for (size_t n = 0; n < bins.size(); ++n) {
    const MatrixXcd& r = bins[n];
    if (r.rows() != m || r.cols() != m)
      throw std::invalid_argument("spatial covariance bins have inconsistent shapes");
    if ((r - r.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("spatial covariance bin " + std::to_string(n) +
                                  " is not Hermitian");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(r, Eigen::EigenvaluesOnly);
    const double trace = r.trace().real();
    if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(trace, 0.0))
      throw std::invalid_argument("spatial covariance bin " + std::to_string(n) +
                                  " is not positive semidefinite");
  }
}

FramewiseScm framewise_scm(const SpectrogramTensor& y, const Mask& m) {
  check_mask_shape(y, m);
  FramewiseScm out;
  out.num_bins = y.bin_count();
  out.num_frames = y.num_frames();
  out.slices.reserve(out.num_bins * out.num_frames);
  for (long n = 0; n < out.num_bins; ++n) {
    for (long k = 0; k < out.num_frames; ++k) {
      const VectorXcd v = snapshot(y, n, k);
      out.slices.push_back(m.values(n, k) * (v * v.adjoint()));
    }
  }
  return out;
}

SpatialCovariance average_scm(const FramewiseScm& framewise) {
  if (framewise.num_bins < 1 || framewise.num_frames < 1)
    throw std::invalid_argument("average_scm needs at least one bin and frame");
  SpatialCovariance out;
  out.bins.reserve(framewise.num_bins);
  for (long n = 0; n < framewise.num_bins; ++n) {
    MatrixXcd sum = MatrixXcd::Zero(framewise.at(n, 0).rows(), framewise.at(n, 0).cols());
    for (long k = 0; k < framewise.num_frames; ++k) sum += framewise.at(n, k);
    sum /= static_cast<double>(framewise.num_frames);
    out.bins.push_back(0.5 * (sum + sum.adjoint().eval()));
  }
  return out;
}

SpatialCovariance masked_average_scm(const SpectrogramTensor& y, const Mask& m) {
  check_mask_shape(y, m);
  const long num_bins = y.bin_count();
  const long num_frames = y.num_frames();
  const int channels = y.num_channels();

  SpatialCovariance out;
  out.bins.reserve(num_bins);
  VectorXcd v(channels);
  for (long n = 0; n < num_bins; ++n) {
    MatrixXcd sum = MatrixXcd::Zero(channels, channels);
    for (long k = 0; k < num_frames; ++k) {
      for (int c = 0; c < channels; ++c) v(c) = y.channels[c](n, k);
      sum.selfadjointView<Eigen::Lower>().rankUpdate(v, m.values(n, k));
    }
    MatrixXcd full = MatrixXcd(sum.selfadjointView<Eigen::Lower>()) / static_cast<double>(num_frames);
    out.bins.push_back(0.5 * (full + full.adjoint().eval()));
  }
  return out;
}

SpatialCovariance diagonal_load(const SpatialCovariance& r, double eps_rel) {
  if (eps_rel < 0.0) throw std::invalid_argument("diagonal loading must be non-negative");
  SpatialCovariance out;
  out.bins.reserve(r.bins.size());
  const double floor_abs = 1e-12;
  for (const MatrixXcd& bin : r.bins) {
    const double m = static_cast<double>(bin.rows());
    const double load = eps_rel * (bin.trace().real() / m + floor_abs);
    out.bins.push_back(bin + load * MatrixXcd::Identity(bin.rows(), bin.cols()));
  }
  return out;
}

}  // namespace beamlab
