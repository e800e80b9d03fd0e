// Copyright 2026 The nugan Authors
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

#ifndef NUGAN_MODEL_CHECKPOINT_H_
#define NUGAN_MODEL_CHECKPOINT_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nugan/tensor.h"

namespace nugan::model {

enum class DType : std::uint8_t { kF32 = 0, kF64 = 1, kU64 = 2, kU8 = 3 };

std::size_t DTypeSize(DType dtype);

struct CheckpointRecord {
  Shape shape;
  DType dtype = DType::kF32;
  std::vector<std::uint8_t> bytes;  // little-endian element data
};

// Little-endian file: "NUG1", version u32, config digest u64, then records
// (name length u32, name, rank u32, dims u64 each, dtype u8, raw data) to EOF.
class Checkpoint {
 public:
  static constexpr std::uint32_t kVersion = 1;

  Checkpoint() = default;
  explicit Checkpoint(std::uint64_t digest) : digest_(digest) {}

  std::uint64_t digest() const { return digest_; }
  void set_digest(std::uint64_t digest) { digest_ = digest; }

  void PutF32(const std::string& name, const Shape& shape, std::span<const float> data);
  void PutF64(const std::string& name, const Shape& shape, std::span<const double> data);
  void PutU64(const std::string& name, std::span<const std::uint64_t> data);
  void PutText(const std::string& name, const std::string& text);

  bool Has(const std::string& name) const { return records_.count(name) != 0; }
  const CheckpointRecord& Get(const std::string& name) const;

  // Typed reads. Throw DataError on a missing record or a dtype mismatch, and
  // DimensionError when `expected` is given and differs.
  std::vector<float> F32(const std::string& name, const Shape* expected = nullptr) const;
  std::vector<double> F64(const std::string& name, const Shape* expected = nullptr) const;
  std::vector<std::uint64_t> U64(const std::string& name) const;
  std::string Text(const std::string& name) const;

  const std::map<std::string, CheckpointRecord>& records() const { return records_; }

  // Writes to a sibling temp file, then renames. Throws DataError on I/O failure.
  void Save(const std::string& path) const;
  // Throws DataError on bad magic, unknown version, or truncation.
  static Checkpoint Load(const std::string& path);

  std::vector<std::uint8_t> Serialize() const;
  static Checkpoint Deserialize(std::span<const std::uint8_t> bytes,
                                const std::string& origin = "<memory>");

  bool operator==(const Checkpoint& other) const;

 private:
  void Put(const std::string& name, CheckpointRecord record);

  std::uint64_t digest_ = 0;
  std::map<std::string, CheckpointRecord> records_;
};

// Parameters are stored under their own names.
template <typename T>
void StoreParameters(Checkpoint& ckpt, const ParameterList<T>& params);
// Copies stored values into `params` in place. Every parameter must be present
// with a matching shape.
template <typename T>
void RestoreParameters(const Checkpoint& ckpt, ParameterList<T>& params);

}  // namespace nugan::model

#endif  // NUGAN_MODEL_CHECKPOINT_H_
