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

#include "beamlab/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace beamlab {

namespace {

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(static_cast<uint16_t>(p[0]) |
                               (static_cast<uint16_t>(p[1]) << 8));
}

void write_u32(std::vector<unsigned char>* out, uint32_t v) {
  out->push_back(static_cast<unsigned char>(v & 0xff));
  out->push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  out->push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  out->push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void write_u16(std::vector<unsigned char>* out, uint16_t v) {
  out->push_back(static_cast<unsigned char>(v & 0xff));
  out->push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

}  // namespace

MultichannelSignal read_wav(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("cannot open wav file: " + path);
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(file)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw std::runtime_error("not a RIFF/WAVE file: " + path);
  }

  uint16_t format = 0;
  uint16_t num_channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits_per_sample = 0;
  bool have_fmt = false;
  size_t data_offset = 0;
  size_t data_size = 0;

  // Chunk scan; fmt and data may appear in any order and other chunks
  // (LIST, fact) are skipped. Chunk bodies are padded to even length.
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* hdr = bytes.data() + pos;
    const uint32_t chunk_size = read_u32(hdr + 4);
    const size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) {
      throw std::runtime_error("truncated wav chunk in: " + path);
    }
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_size < 16) {
        throw std::runtime_error("malformed fmt chunk in: " + path);
      }
      const unsigned char* f = bytes.data() + body;
      format = read_u16(f);
      num_channels = read_u16(f + 2);
      sample_rate = read_u32(f + 4);
      bits_per_sample = read_u16(f + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data_offset = body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size % 2);
  }

  if (!have_fmt || data_offset == 0) {
    throw std::runtime_error("wav file missing fmt or data chunk: " + path);
  }
  if (num_channels == 0 || sample_rate == 0) {
    throw std::runtime_error("wav file has invalid format fields: " + path);
  }

  const bool pcm16 = (format == 1 && bits_per_sample == 16);
  const bool float32 = (format == 3 && bits_per_sample == 32);
  if (!pcm16 && !float32) {
    throw std::runtime_error("unsupported wav encoding in " + path +
                             " (only PCM16 and float32 are handled)");
  }

  const size_t bytes_per_sample = bits_per_sample / 8;
  const size_t frame_bytes = bytes_per_sample * num_channels;
  const size_t num_frames = data_size / frame_bytes;
  if (num_frames == 0) {
    throw std::runtime_error("wav file has no samples: " + path);
  }

  Eigen::MatrixXd samples(num_channels, static_cast<Eigen::Index>(num_frames));
  const unsigned char* data = bytes.data() + data_offset;
  for (size_t t = 0; t < num_frames; ++t) {
    for (size_t m = 0; m < num_channels; ++m) {
      const unsigned char* p = data + t * frame_bytes + m * bytes_per_sample;
      double v = 0.0;
      if (pcm16) {
        int16_t raw;
        std::memcpy(&raw, p, 2);
        v = static_cast<double>(raw) / 32768.0;
      } else {
        float raw;
        std::memcpy(&raw, p, 4);
        v = static_cast<double>(raw);
      }
      samples(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(t)) = v;
    }
  }
  return MultichannelSignal(std::move(samples),
                            static_cast<int>(sample_rate));
}

void write_wav(const MultichannelSignal& signal, const std::string& path) {
  if (signal.num_channels() < 1 || signal.num_samples() < 1 ||
      signal.sample_rate < 1) {
    throw std::invalid_argument("wav output needs a non-empty signal");
  }
  const uint16_t num_channels = static_cast<uint16_t>(signal.num_channels());
  const uint32_t num_frames = static_cast<uint32_t>(signal.num_samples());
  const uint32_t data_size = num_frames * num_channels * 4u;

  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  write_u32(&out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  write_u32(&out, 16);
  write_u16(&out, 3);  // IEEE float
  write_u16(&out, num_channels);
  write_u32(&out, static_cast<uint32_t>(signal.sample_rate));
  write_u32(&out, static_cast<uint32_t>(signal.sample_rate) * num_channels * 4u);
  write_u16(&out, static_cast<uint16_t>(num_channels * 4u));
  write_u16(&out, 32);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  write_u32(&out, data_size);
  for (uint32_t t = 0; t < num_frames; ++t) {
    for (uint16_t m = 0; m < num_channels; ++m) {
      const float v = static_cast<float>(signal.samples(m, t));
      unsigned char raw[4];
      std::memcpy(raw, &v, 4);
      out.insert(out.end(), raw, raw + 4);
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw std::runtime_error("cannot open wav file for writing: " + path);
  }
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) {
    throw std::runtime_error("failed writing wav file: " + path);
  }
}

}  // namespace beamlab
