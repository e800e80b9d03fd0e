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

#ifndef NUGAN_DATA_WAV_H_
#define NUGAN_DATA_WAV_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nugan/dsp/audio.h"

namespace nugan::data {

// RIFF/WAVE with PCM 16-bit or IEEE float 32-bit samples, mono or stereo.
// Stereo is averaged to mono with a logged warning. 16-bit samples are scaled
// by 1/32768. Throws DataError naming the missing or truncated chunk.
dsp::AudioBuffer ReadWav(const std::string& path);
dsp::AudioBuffer DecodeWav(std::span<const std::uint8_t> bytes,
                           const std::string& origin = "<memory>");

// IEEE float 32-bit mono. Float-representable buffers round-trip exactly.
void WriteWav(const std::string& path, const dsp::AudioBuffer& audio);
std::vector<std::uint8_t> EncodeWav(const dsp::AudioBuffer& audio);

}  // namespace nugan::data

#endif  // NUGAN_DATA_WAV_H_
