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

#include "shefl/dataset.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace shefl {

Batch gather_batch(const Dataset& data, std::span<const int> indices) {
  Batch batch;
  batch.inputs.resize(static_cast<Eigen::Index>(indices.size()), data.input_dim());
  batch.labels.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    batch.inputs.row(static_cast<Eigen::Index>(i)) = data.inputs.row(indices[i]);
    batch.labels.push_back(data.labels[static_cast<std::size_t>(indices[i])]);
  }
  return batch;
}

namespace {

std::vector<int> balanced_counts(int total, int num_classes) {
  std::vector<int> counts(static_cast<std::size_t>(num_classes), total / num_classes);
  for (int c = 0; c < total % num_classes; ++c) counts[static_cast<std::size_t>(c)]++;
  return counts;
}

Dataset sample_around_means(const Eigen::MatrixXd& means, const std::vector<int>& counts,
                            int input_dim, int num_classes, const std::string& tag,
                            RngStream& rng) {
  int total = 0;
  for (int c : counts) total += c;
  Dataset out;
  out.inputs.resize(total, input_dim);
  out.labels.reserve(static_cast<std::size_t>(total));
  out.num_classes = num_classes;
  out.split_tag = tag;
  Eigen::Index row = 0;
  for (int c = 0; c < num_classes; ++c) {
    for (int s = 0; s < counts[static_cast<std::size_t>(c)]; ++s) {
      for (int j = 0; j < input_dim; ++j) {
        out.inputs(row, j) = means(c, j) + rng.normal();
      }
      out.labels.push_back(c);
      ++row;
    }
  }
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> generate_blobs(int num_classes, int input_dim,
                                           int n_train, int n_test,
                                           double class_sep, RngStream& rng) {
  if (num_classes < 1 || input_dim < 1) {
    throw std::invalid_argument("generate_blobs: num_classes and input_dim must be >= 1");
  }
  if (n_train < num_classes || n_test < num_classes) {
    throw std::invalid_argument("generate_blobs: counts must be >= num_classes");
  }
  if (!(class_sep >= 0.0)) {
    throw std::invalid_argument("generate_blobs: class_sep must be >= 0");
  }

  // Means on the sphere of radius class_sep (normalized Gaussian directions).
  Eigen::MatrixXd means(num_classes, input_dim);
  for (int c = 0; c < num_classes; ++c) {
    double norm_sq = 0.0;
    for (int j = 0; j < input_dim; ++j) {
      double v = rng.normal();
      means(c, j) = v;
      norm_sq += v * v;
    }
    double norm = std::sqrt(norm_sq);
    if (norm > 0.0) means.row(c) *= class_sep / norm;
  }

  Dataset train = sample_around_means(means, balanced_counts(n_train, num_classes),
                                      input_dim, num_classes, "train", rng);
  Dataset test = sample_around_means(means, balanced_counts(n_test, num_classes),
                                     input_dim, num_classes, "test", rng);
  return {std::move(train), std::move(test)};
}

namespace {

std::uint32_t be32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) |
         (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | p[3];
}

}  // namespace

IdxTensor read_idx(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw IdxError(IdxError::Kind::kIo, "cannot open " + path.string());
  }
  std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(file)),
                                std::istreambuf_iterator<char>());
  if (raw.size() < 4) {
    throw IdxError(IdxError::Kind::kTruncated,
                   path.string() + ": file shorter than the 4-byte magic");
  }
  if (raw[0] != 0x00 || raw[1] != 0x00) {
    throw IdxError(IdxError::Kind::kBadMagic,
                   path.string() + ": bad magic, expected 0x00 0x00");
  }
  if (raw[2] != 0x08) {
    throw IdxError(IdxError::Kind::kUnsupportedType,
                   path.string() + ": unsupported type code " + std::to_string(raw[2]) +
                       ", only 0x08 (unsigned byte) is supported");
  }
  std::size_t ndims = raw[3];
  std::size_t header = 4 + 4 * ndims;
  if (raw.size() < header) {
    throw IdxError(IdxError::Kind::kTruncated,
                   path.string() + ": header truncated, need " + std::to_string(header) +
                       " bytes for " + std::to_string(ndims) + " dimensions");
  }
  IdxTensor tensor;
  std::size_t payload = 1;
  for (std::size_t d = 0; d < ndims; ++d) {
    std::size_t size = be32(raw.data() + 4 + 4 * d);
    tensor.dims.push_back(size);
    payload *= size;
  }
  if (raw.size() != header + payload) {
    throw IdxError(IdxError::Kind::kTruncated,
                   path.string() + ": payload size mismatch, expected " +
                       std::to_string(header + payload) + " bytes, found " +
                       std::to_string(raw.size()));
  }
  tensor.data.assign(raw.begin() + static_cast<std::ptrdiff_t>(header), raw.end());
  return tensor;
}

void write_idx(const std::filesystem::path& path, const IdxTensor& tensor) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw IdxError(IdxError::Kind::kIo, "cannot open " + path.string() + " for writing");
  }
  std::uint8_t head[4] = {0x00, 0x00, 0x08,
                          static_cast<std::uint8_t>(tensor.dims.size())};
  file.write(reinterpret_cast<const char*>(head), 4);
  for (std::size_t size : tensor.dims) {
    std::uint8_t be[4] = {static_cast<std::uint8_t>(size >> 24),
                          static_cast<std::uint8_t>(size >> 16),
                          static_cast<std::uint8_t>(size >> 8),
                          static_cast<std::uint8_t>(size)};
    file.write(reinterpret_cast<const char*>(be), 4);
  }
  file.write(reinterpret_cast<const char*>(tensor.data.data()),
             static_cast<std::streamsize>(tensor.data.size()));
  if (!file) {
    throw IdxError(IdxError::Kind::kIo, "write failed for " + path.string());
  }
}

Dataset load_idx_dataset(const std::filesystem::path& images_path,
                         const std::filesystem::path& labels_path,
                         int num_classes, const std::string& split_tag) {
  IdxTensor images = read_idx(images_path);
  IdxTensor labels = read_idx(labels_path);
  if (images.dims.size() != 3) {
    throw std::runtime_error(images_path.string() + ": expected 3 dimensions (N,rows,cols), found " +
                             std::to_string(images.dims.size()));
  }
  if (labels.dims.size() != 1) {
    throw std::runtime_error(labels_path.string() + ": expected 1 dimension, found " +
                             std::to_string(labels.dims.size()));
  }
  std::size_t n = images.dims[0];
  if (labels.dims[0] != n) {
    throw std::runtime_error("image/label count mismatch: " + std::to_string(n) +
                             " vs " + std::to_string(labels.dims[0]));
  }
  std::size_t pixels = images.dims[1] * images.dims[2];
  Dataset out;
  out.inputs.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(pixels));
  out.labels.reserve(n);
  out.num_classes = num_classes;
  out.split_tag = split_tag;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < pixels; ++j) {
      out.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>(images.data[i * pixels + j]) / 255.0;
    }
    int label = labels.data[i];
    if (label < 0 || label >= num_classes) {
      throw std::runtime_error("label " + std::to_string(label) + " out of range at sample " +
                               std::to_string(i));
    }
    out.labels.push_back(label);
  }
  return out;
}

}  // namespace shefl
