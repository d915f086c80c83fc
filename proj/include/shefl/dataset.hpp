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

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shefl/model.hpp"
#include "shefl/rng.hpp"

namespace shefl {

/// A labeled dataset held in memory. Inputs are N x input_dim doubles;
/// image pixels are stored already scaled to [0,1].
struct Dataset {
  Eigen::MatrixXd inputs;
  std::vector<int> labels;
  int num_classes = 0;
  std::string split_tag;  // "train" or "test"

  int size() const { return static_cast<int>(inputs.rows()); }
  int input_dim() const { return static_cast<int>(inputs.cols()); }
};

/// Copies the given rows into a Batch, preserving index order.
Batch gather_batch(const Dataset& data, std::span<const int> indices);

/// Gaussian blobs: class means drawn uniformly on the sphere of radius
/// class_sep, unit-variance isotropic samples around them. Train and test
/// share the means; per-class counts are balanced within +-1 and samples
/// are laid out class-contiguously.
std::pair<Dataset, Dataset> generate_blobs(int num_classes, int input_dim,
                                           int n_train, int n_test,
                                           double class_sep, RngStream& rng);

/// Raw IDX tensor (unsigned-byte payload only).
struct IdxTensor {
  std::vector<std::size_t> dims;
  std::vector<std::uint8_t> data;
};

class IdxError : public std::runtime_error {
 public:
  enum class Kind { kBadMagic, kUnsupportedType, kTruncated, kIo };
  IdxError(Kind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Parses an IDX file: bytes 0-1 must be 0x00 0x00, byte 2 the type code
/// (only 0x08 unsigned byte is supported), byte 3 the dimension count D,
/// then D big-endian u32 sizes and the row-major payload. The payload size
/// must match the header exactly.
IdxTensor read_idx(const std::filesystem::path& path);

/// Writes an unsigned-byte IDX file (exact inverse of read_idx).
void write_idx(const std::filesystem::path& path, const IdxTensor& tensor);

/// Loads an image/label IDX pair into a Dataset, scaling pixels by 1/255.
Dataset load_idx_dataset(const std::filesystem::path& images_path,
                         const std::filesystem::path& labels_path,
                         int num_classes, const std::string& split_tag);

}  // namespace shefl
