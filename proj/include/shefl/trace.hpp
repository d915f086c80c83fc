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

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>

#include "shefl/sparsify.hpp"

namespace shefl {

/// Per-upload binary trace. Each record is a 12-byte little-endian header
/// {u32 round, u32 client_id, u32 payload_bytes} followed by the delta in
/// its wire layout (see encode_delta), so the model index and entry count
/// travel inside the payload.
class TraceWriter {
 public:
  explicit TraceWriter(const std::filesystem::path& path);

  void record(std::uint32_t round, std::uint32_t client_id, const SparseDelta& delta);

 private:
  std::ofstream file_;
};

struct TraceRecord {
  std::uint32_t round = 0;
  std::uint32_t client_id = 0;
  SparseDelta delta;
};

std::vector<TraceRecord> read_trace(const std::filesystem::path& path);

}  // namespace shefl
