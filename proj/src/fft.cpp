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

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace beamlab {

namespace {

// fftw plan creation is not thread safe; execution with fftw_execute_dft on
// distinct arrays is. Plans are created FFTW_UNALIGNED so they accept any
// caller buffer.
class PlanCache {
 public:
  fftw_plan get(size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    // Planned out-of-place to match how it is executed below.
    std::vector<fftw_complex> din(n), dout(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), din.data(), dout.data(), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
    if (plan == nullptr) throw std::runtime_error("fftw plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

VectorXcd run(const VectorXcd& x, int sign) {
  if (x.size() == 0) throw std::invalid_argument("fft of empty vector");
  const size_t n = static_cast<size_t>(x.size());
  fftw_plan plan = plan_cache().get(n, sign);
  VectorXcd out(x.size());
  // fftw_complex and std::complex<double> share layout.
  auto* in_ptr = reinterpret_cast<fftw_complex*>(const_cast<cd*>(x.data()));
  auto* out_ptr = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(plan, in_ptr, out_ptr);
  return out;
}

}  // namespace

VectorXcd fft(const VectorXcd& x) { return run(x, FFTW_FORWARD); }

VectorXcd ifft(const VectorXcd& x) {
  VectorXcd out = run(x, FFTW_BACKWARD);
  out /= static_cast<double>(x.size());
  return out;
}

}  // namespace beamlab
