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

#include "beamlab/masking.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace beamlab {

Mask oracle_wlm(const MatrixXcd& target_ref, const MatrixXcd& interferer_ref) {
  if (target_ref.rows() != interferer_ref.rows() || target_ref.cols() != interferer_ref.cols())
    throw std::invalid_argument("oracle mask inputs have mismatched shapes");
  Mask m;
  m.values.resize(target_ref.rows(), target_ref.cols());
  for (long n = 0; n < target_ref.rows(); ++n) {
    for (long k = 0; k < target_ref.cols(); ++k) {
      const double px = std::norm(target_ref(n, k));
      const double pv = std::norm(interferer_ref(n, k));
      m.values(n, k) = (px + pv > 0.0) ? px / (px + pv) : 0.5;
    }
  }
  return m;
}

Mask oracle_wlm(const SpectrogramTensor& target_ref, const SpectrogramTensor& interferer_ref) {
  if (target_ref.num_channels() != 1 || interferer_ref.num_channels() != 1)
    throw std::invalid_argument("oracle mask expects single-channel spectrograms");
  return oracle_wlm(target_ref.channels[0], interferer_ref.channels[0]);
}

Mask complement(const Mask& m) {
  Mask out;
  out.values = 1.0 - m.values.array();
  return out;
}

Mask clamp_mask(const MatrixXd& values) {
  if (!values.allFinite()) throw std::invalid_argument("mask contains non-finite entries");
  Mask m;
  m.values = values.cwiseMax(0.0).cwiseMin(1.0);
  return m;
}

void save_mask_csv(const Mask& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mask file '" + path + "'");
  out.precision(17);
  // One row per frame.
  for (long k = 0; k < m.values.cols(); ++k) {
    for (long n = 0; n < m.values.rows(); ++n) {
      if (n > 0) out << ',';
      out << m.values(n, k);
    }
    out << '\n';
  }
}

Mask load_mask_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read mask file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("mask file '" + path + "' has a non-numeric cell");
      }
    }
    if (!rows.empty() && row.size() != rows[0].size())
      throw std::invalid_argument("mask file '" + path + "' has ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("mask file '" + path + "' is empty");

  MatrixXd values(static_cast<long>(rows[0].size()), static_cast<long>(rows.size()));
  for (size_t k = 0; k < rows.size(); ++k)
    for (size_t n = 0; n < rows[k].size(); ++n)
      values(static_cast<long>(n), static_cast<long>(k)) = rows[k][n];
  return clamp_mask(values);
}

}  // namespace beamlab
