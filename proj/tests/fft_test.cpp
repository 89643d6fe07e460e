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

#include "beamlab/fft.hpp"

#include <cmath>
#include <random>

#include "doctest.h"

using namespace beamlab;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Direct O(n^2) DFT oracle.
VectorXcd dft_oracle(const VectorXcd& x) {
  const Eigen::Index n = x.size();
  VectorXcd out = VectorXcd::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index t = 0; t < n; ++t) {
      const double phase = -2.0 * kPi * static_cast<double>(k * t) / n;
      out(k) += x(t) * cd(std::cos(phase), std::sin(phase));
    }
  }
  return out;
}
}  // namespace

TEST_CASE("fft matches the direct DFT on random input") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const int n : {1, 2, 3, 8, 17, 64, 100}) {
    VectorXcd x(n);
    for (int t = 0; t < n; ++t) {
      x(t) = cd(gauss(rng), gauss(rng));
    }
    const VectorXcd got = fft(x);
    const VectorXcd want = dft_oracle(x);
    CHECK((got - want).norm() <= 1e-9 * std::max(1.0, want.norm()));
  }
}

TEST_CASE("ifft inverts fft") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXcd x(129);
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    x(t) = cd(gauss(rng), gauss(rng));
  }
  const VectorXcd back = ifft(fft(x));
  CHECK((back - x).norm() <= 1e-12 * x.norm());
}

TEST_CASE("fft of an impulse is flat") {
  VectorXcd x = VectorXcd::Zero(16);
  x(0) = 1.0;
  const VectorXcd spectrum = fft(x);
  for (Eigen::Index k = 0; k < spectrum.size(); ++k) {
    CHECK(std::abs(spectrum(k) - cd(1.0, 0.0)) <= 1e-12);
  }
}

TEST_CASE("fft input is not modified") {
  VectorXcd x(8);
  for (Eigen::Index t = 0; t < 8; ++t) {
    x(t) = cd(static_cast<double>(t), -static_cast<double>(t));
  }
  const VectorXcd copy = x;
  (void)fft(x);
  CHECK((x - copy).norm() == 0.0);
}

TEST_CASE("fft rejects empty input") {
  CHECK_THROWS_WITH(fft(VectorXcd()), "fft of empty vector");
}
