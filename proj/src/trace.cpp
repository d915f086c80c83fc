// Copyright 2026 The SHEFL Simulator Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shefl/trace.hpp"

#include <stdexcept>

namespace shefl {

namespace {

void put_u32(std::ofstream& file, std::uint32_t v) {
  std::uint8_t le[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                        static_cast<std::uint8_t>(v >> 16),
                        static_cast<std::uint8_t>(v >> 24)};
  file.write(reinterpret_cast<const char*>(le), 4);
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& raw, std::size_t off) {
  return static_cast<std::uint32_t>(raw[off]) |
         (static_cast<std::uint32_t>(raw[off + 1]) << 8) |
         (static_cast<std::uint32_t>(raw[off + 2]) << 16) |
         (static_cast<std::uint32_t>(raw[off + 3]) << 24);
}

}  // namespace

TraceWriter::TraceWriter(const std::filesystem::path& path)
    : file_(path, std::ios::binary) {
  if (!file_) {
    throw std::runtime_error("cannot open trace file " + path.string());
  }
}

void TraceWriter::record(std::uint32_t round, std::uint32_t client_id,
                         const SparseDelta& delta) {
  std::vector<std::uint8_t> payload = encode_delta(delta);
  put_u32(file_, round);
  put_u32(file_, client_id);
  put_u32(file_, static_cast<std::uint32_t>(payload.size()));
  file_.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
}

std::vector<TraceRecord> read_trace(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open trace file " + path.string());
  std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(file)),
                                std::istreambuf_iterator<char>());
  std::vector<TraceRecord> records;
  std::size_t off = 0;
  while (off < raw.size()) {
    if (off + 12 > raw.size()) {
      throw std::runtime_error(path.string() + ": truncated record header");
    }
    TraceRecord rec;
    rec.round = get_u32(raw, off);
    rec.client_id = get_u32(raw, off + 4);
    std::uint32_t payload = get_u32(raw, off + 8);
    off += 12;
    if (off + payload > raw.size()) {
      throw std::runtime_error(path.string() + ": truncated record payload");
    }
    rec.delta = decode_delta(std::span<const std::uint8_t>(raw.data() + off, payload));
    off += payload;
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace shefl
