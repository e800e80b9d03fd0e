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

#include "nugan/model/checkpoint.h"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "nugan/errors.h"

namespace nugan::model {
namespace {

constexpr char kMagic[4] = {'N', 'U', 'G', '1'};

template <typename U>
void AppendLe(std::vector<std::uint8_t>& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename U>
U ReadLe(const std::uint8_t* p) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(p[i]) << (8 * i);
  return value;
}

template <typename E, typename U>
std::vector<std::uint8_t> EncodeElements(std::span<const E> data) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(data.size() * sizeof(U));
  for (E x : data) AppendLe<U>(bytes, std::bit_cast<U>(x));
  return bytes;
}

template <typename E, typename U>
std::vector<E> DecodeElements(const std::vector<std::uint8_t>& bytes) {
  std::vector<E> out(bytes.size() / sizeof(U));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::bit_cast<E>(ReadLe<U>(bytes.data() + i * sizeof(U)));
  }
  return out;
}

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, const std::string& origin)
      : bytes_(bytes), origin_(origin) {}

  bool AtEnd() const { return pos_ == bytes_.size(); }

  const std::uint8_t* Take(std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      throw DataError("checkpoint " + origin_ + " is truncated at byte " +
                      std::to_string(pos_));
    }
    const auto* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  template <typename U>
  U Read() {
    return ReadLe<U>(Take(sizeof(U)));
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

void CheckShape(const std::string& name, const CheckpointRecord& record,
                const Shape* expected) {
  if (expected != nullptr && *expected != record.shape) {
    throw DimensionError("checkpoint record '" + name + "' has shape " +
                         ShapeToString(record.shape) + ", expected " +
                         ShapeToString(*expected));
  }
}

}  // namespace

std::size_t DTypeSize(DType dtype) {
  switch (dtype) {
    case DType::kF32: return 4;
    case DType::kF64: return 8;
    case DType::kU64: return 8;
    case DType::kU8: return 1;
  }
  throw DataError("unknown checkpoint dtype tag " +
                  std::to_string(static_cast<int>(dtype)));
}

void Checkpoint::Put(const std::string& name, CheckpointRecord record) {
  records_[name] = std::move(record);
}

void Checkpoint::PutF32(const std::string& name, const Shape& shape,
                        std::span<const float> data) {
  if (NumElements(shape) != data.size()) {
    throw DimensionError("record '" + name + "' shape " + ShapeToString(shape) +
                         " does not match " + std::to_string(data.size()) + " values");
  }
  Put(name, {shape, DType::kF32, EncodeElements<float, std::uint32_t>(data)});
}

void Checkpoint::PutF64(const std::string& name, const Shape& shape,
                        std::span<const double> data) {
  if (NumElements(shape) != data.size()) {
    throw DimensionError("record '" + name + "' shape " + ShapeToString(shape) +
                         " does not match " + std::to_string(data.size()) + " values");
  }
  Put(name, {shape, DType::kF64, EncodeElements<double, std::uint64_t>(data)});
}

void Checkpoint::PutU64(const std::string& name, std::span<const std::uint64_t> data) {
  Put(name, {Shape{data.size()}, DType::kU64,
             EncodeElements<std::uint64_t, std::uint64_t>(data)});
}

void Checkpoint::PutText(const std::string& name, const std::string& text) {
  Put(name, {Shape{text.size()}, DType::kU8,
             std::vector<std::uint8_t>(text.begin(), text.end())});
}

const CheckpointRecord& Checkpoint::Get(const std::string& name) const {
  const auto it = records_.find(name);
  if (it == records_.end()) {
    throw DataError("checkpoint has no record '" + name + "'");
  }
  return it->second;
}

namespace {
const CheckpointRecord& Typed(const Checkpoint& ckpt, const std::string& name, DType dtype) {
  const auto& record = ckpt.Get(name);
  if (record.dtype != dtype) {
    throw DataError("checkpoint record '" + name + "' has dtype tag " +
                    std::to_string(static_cast<int>(record.dtype)) + ", expected " +
                    std::to_string(static_cast<int>(dtype)));
  }
  return record;
}
}  // namespace

std::vector<float> Checkpoint::F32(const std::string& name, const Shape* expected) const {
  const auto& record = Typed(*this, name, DType::kF32);
  CheckShape(name, record, expected);
  return DecodeElements<float, std::uint32_t>(record.bytes);
}

std::vector<double> Checkpoint::F64(const std::string& name, const Shape* expected) const {
  const auto& record = Typed(*this, name, DType::kF64);
  CheckShape(name, record, expected);
  return DecodeElements<double, std::uint64_t>(record.bytes);
}

std::vector<std::uint64_t> Checkpoint::U64(const std::string& name) const {
  return DecodeElements<std::uint64_t, std::uint64_t>(Typed(*this, name, DType::kU64).bytes);
}

std::string Checkpoint::Text(const std::string& name) const {
  const auto& bytes = Typed(*this, name, DType::kU8).bytes;
  return std::string(bytes.begin(), bytes.end());
}

std::vector<std::uint8_t> Checkpoint::Serialize() const {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  AppendLe<std::uint32_t>(out, kVersion);
  AppendLe<std::uint64_t>(out, digest_);
  for (const auto& [name, record] : records_) {
    AppendLe<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    AppendLe<std::uint32_t>(out, static_cast<std::uint32_t>(record.shape.size()));
    for (auto d : record.shape) AppendLe<std::uint64_t>(out, d);
    out.push_back(static_cast<std::uint8_t>(record.dtype));
    out.insert(out.end(), record.bytes.begin(), record.bytes.end());
  }
  return out;
}

Checkpoint Checkpoint::Deserialize(std::span<const std::uint8_t> bytes,
                                   const std::string& origin) {
  Reader reader(bytes, origin);
  if (bytes.size() < 4 || std::memcmp(reader.Take(4), kMagic, 4) != 0) {
    throw DataError("checkpoint " + origin + " does not start with magic NUG1");
  }
  const auto version = reader.Read<std::uint32_t>();
  if (version != kVersion) {
    throw DataError("checkpoint " + origin + " has unsupported format version " +
                    std::to_string(version) + " (expected " + std::to_string(kVersion) +
                    ")");
  }
  Checkpoint ckpt(reader.Read<std::uint64_t>());
  while (!reader.AtEnd()) {
    const auto name_len = reader.Read<std::uint32_t>();
    const auto* name_ptr = reader.Take(name_len);
    std::string name(reinterpret_cast<const char*>(name_ptr), name_len);
    CheckpointRecord record;
    const auto rank = reader.Read<std::uint32_t>();
    for (std::uint32_t i = 0; i < rank; ++i) {
      record.shape.push_back(static_cast<std::size_t>(reader.Read<std::uint64_t>()));
    }
    record.dtype = static_cast<DType>(reader.Read<std::uint8_t>());
    const std::size_t n = NumElements(record.shape) * DTypeSize(record.dtype);
    const auto* data = reader.Take(n);
    record.bytes.assign(data, data + n);
    if (ckpt.Has(name)) {
      throw DataError("checkpoint " + origin + " repeats record '" + name + "'");
    }
    ckpt.Put(name, std::move(record));
  }
  return ckpt;
}

void Checkpoint::Save(const std::string& path) const {
  const auto bytes = Serialize();
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + tmp + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw DataError("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot move " + tmp + " to " + path + ": " + ec.message());
}

Checkpoint Checkpoint::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return Deserialize(bytes, path);
}

bool Checkpoint::operator==(const Checkpoint& other) const {
  if (digest_ != other.digest_ || records_.size() != other.records_.size()) return false;
  for (const auto& [name, record] : records_) {
    const auto it = other.records_.find(name);
    if (it == other.records_.end()) return false;
    const auto& o = it->second;
    if (o.shape != record.shape || o.dtype != record.dtype || o.bytes != record.bytes) {
      return false;
    }
  }
  return true;
}

template <>
void StoreParameters(Checkpoint& ckpt, const ParameterList<float>& params) {
  for (const auto& p : params) ckpt.PutF32(p.name, p.tensor.shape(), p.tensor.data());
}

template <>
void StoreParameters(Checkpoint& ckpt, const ParameterList<double>& params) {
  for (const auto& p : params) ckpt.PutF64(p.name, p.tensor.shape(), p.tensor.data());
}

template <>
void RestoreParameters(const Checkpoint& ckpt, ParameterList<float>& params) {
  for (auto& p : params) {
    const auto values = ckpt.F32(p.name, &p.tensor.shape());
    std::copy(values.begin(), values.end(), p.tensor.mutable_data().begin());
  }
}

template <>
void RestoreParameters(const Checkpoint& ckpt, ParameterList<double>& params) {
  for (auto& p : params) {
    const auto values = ckpt.F64(p.name, &p.tensor.shape());
    std::copy(values.begin(), values.end(), p.tensor.mutable_data().begin());
  }
}

}  // namespace nugan::model
