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

#include "nugan/data/wav.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>

#include <spdlog/spdlog.h>

#include "nugan/errors.h"

namespace nugan::data {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename U>
U ReadLe(const std::uint8_t* p) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(p[i]) << (8 * i);
  return value;
}

template <typename U>
void AppendLe(std::vector<std::uint8_t>& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

void AppendTag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

struct Format {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

Format ParseFormat(std::span<const std::uint8_t> body, const std::string& origin) {
  if (body.size() < 16) {
    throw DataError(origin + ": fmt chunk is truncated (" + std::to_string(body.size()) +
                    " bytes, need 16)");
  }
  Format f;
  f.tag = ReadLe<std::uint16_t>(body.data());
  f.channels = ReadLe<std::uint16_t>(body.data() + 2);
  f.sample_rate = ReadLe<std::uint32_t>(body.data() + 4);
  f.bits = ReadLe<std::uint16_t>(body.data() + 14);
  if (f.tag == kFormatExtensible) {
    if (body.size() < 26) {
      throw DataError(origin + ": extensible fmt chunk is truncated");
    }
    // First two bytes of the subformat GUID carry the plain format tag.
    f.tag = ReadLe<std::uint16_t>(body.data() + 24);
  }
  return f;
}

}  // namespace

dsp::AudioBuffer DecodeWav(std::span<const std::uint8_t> bytes, const std::string& origin) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw DataError(origin + ": missing RIFF/WAVE header");
  }
  std::optional<Format> format;
  std::optional<std::span<const std::uint8_t>> data;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id(reinterpret_cast<const char*>(bytes.data() + pos), 4);
    const std::size_t size = ReadLe<std::uint32_t>(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      throw DataError(origin + ": chunk '" + id + "' is truncated (declares " +
                      std::to_string(size) + " bytes, " +
                      std::to_string(bytes.size() - body) + " available)");
    }
    if (id == "fmt ") {
      format = ParseFormat(bytes.subspan(body, size), origin);
    } else if (id == "data") {
      data = bytes.subspan(body, size);
    }
    pos = body + size + (size & 1);
  }
  if (!format) throw DataError(origin + ": missing fmt chunk");
  if (!data) throw DataError(origin + ": missing data chunk");
  if (format->sample_rate == 0) throw DataError(origin + ": sample rate is 0");
  if (format->channels != 1 && format->channels != 2) {
    throw DataError(origin + ": unsupported channel count " +
                    std::to_string(format->channels));
  }
  const bool pcm16 = format->tag == kFormatPcm && format->bits == 16;
  const bool float32 = format->tag == kFormatFloat && format->bits == 32;
  if (!pcm16 && !float32) {
    throw DataError(origin + ": unsupported codec (format tag " +
                    std::to_string(format->tag) + ", " + std::to_string(format->bits) +
                    " bits); expected PCM 16-bit or IEEE float 32-bit");
  }
  const std::size_t width = format->bits / 8;
  const std::size_t channels = format->channels;
  const std::size_t frames = data->size() / (width * channels);

  dsp::AudioBuffer audio;
  audio.sample_rate = static_cast<int>(format->sample_rate);
  audio.samples.resize(frames);
  const auto* p = data->data();
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const auto* s = p + (i * channels + c) * width;
      if (pcm16) {
        acc += static_cast<std::int16_t>(ReadLe<std::uint16_t>(s)) / 32768.0;
      } else {
        acc += std::bit_cast<float>(ReadLe<std::uint32_t>(s));
      }
    }
    audio.samples[i] = channels == 1 ? acc : acc / static_cast<double>(channels);
  }
  if (channels == 2) spdlog::warn("{}: stereo input averaged to mono", origin);
  return audio;
}

dsp::AudioBuffer ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return DecodeWav(bytes, path);
}

std::vector<std::uint8_t> EncodeWav(const dsp::AudioBuffer& audio) {
  if (audio.sample_rate <= 0) {
    throw DataError("cannot write audio with sample rate " +
                    std::to_string(audio.sample_rate));
  }
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 4);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  AppendTag(out, "RIFF");
  AppendLe<std::uint32_t>(out, 36 + data_bytes);
  AppendTag(out, "WAVE");
  AppendTag(out, "fmt ");
  AppendLe<std::uint32_t>(out, 16);
  AppendLe<std::uint16_t>(out, kFormatFloat);
  AppendLe<std::uint16_t>(out, 1);
  AppendLe<std::uint32_t>(out, static_cast<std::uint32_t>(audio.sample_rate));
  AppendLe<std::uint32_t>(out, static_cast<std::uint32_t>(audio.sample_rate) * 4);
  AppendLe<std::uint16_t>(out, 4);
  AppendLe<std::uint16_t>(out, 32);
  AppendTag(out, "data");
  AppendLe<std::uint32_t>(out, data_bytes);
  for (double s : audio.samples) {
    AppendLe<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
  }
  return out;
}

void WriteWav(const std::string& path, const dsp::AudioBuffer& audio) {
  const auto bytes = EncodeWav(audio);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed for " + path);
}

}  // namespace nugan::data
