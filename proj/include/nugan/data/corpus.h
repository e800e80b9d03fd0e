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

#ifndef NUGAN_DATA_CORPUS_H_
#define NUGAN_DATA_CORPUS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nugan/data/pairs.h"
#include "nugan/dsp/audio.h"

namespace nugan::data {

enum class Split { kTrain, kHeldout };

std::string SplitName(Split split);
Split ParseSplit(const std::string& text);

struct CorpusItem {
  std::string path;
  std::optional<Split> split;  // from a manifest's split column
  // Synthetic items keep their audio in memory; file items load on demand.
  std::shared_ptr<const dsp::AudioBuffer> audio;
};

// Cached audio if present, otherwise ReadWav(path).
dsp::AudioBuffer LoadAudio(const CorpusItem& item);

struct Corpus {
  std::vector<CorpusItem> items;
  int sample_rate = dsp::kHighSampleRate;
};

struct SynthOptions {
  std::uint64_t seed = 0;
  std::size_t n_files = 60;
  double duration_s = 2.0;
  double noise_level = 1e-3;
};

// Harmonic tone stacks at 44.1 kHz whose upper partials are a fixed function
// of the fundamental. Items are named synth_NNNN.wav and held in memory.
Corpus SynthCorpus(const SynthOptions& options);
dsp::AudioBuffer SynthFile(std::uint64_t seed, double duration_s, double noise_level);

// Fraction of spectral energy above `cutoff_hz`.
double EnergyAbove(const dsp::AudioBuffer& audio, double cutoff_hz);

struct CorpusSplit {
  std::vector<CorpusItem> train;
  std::vector<CorpusItem> heldout;

  std::vector<std::string> TrainPaths() const;
  std::vector<std::string> HeldoutPaths() const;
};

// Items sorted by path, shuffled by `seed`; the first round(fraction * n)
// (at least one) are held out. Throws DataError if either side is empty.
CorpusSplit SplitByFraction(const Corpus& corpus, double heldout_fraction,
                            std::uint64_t seed);
// Items whose path contains `tag` are held out.
CorpusSplit SplitByTag(const Corpus& corpus, const std::string& tag);
// Uses each item's split column; every item must have one.
CorpusSplit SplitByManifest(const Corpus& corpus);

// Newline-separated paths relative to the manifest, optional `<TAB>split`.
// Blank lines and lines starting with '#' are skipped.
Corpus ReadManifest(const std::string& manifest_path);
// Writes every item as a WAV under `dir` plus `dir/manifest.txt`; returns the
// manifest path. Items with a split are written with the split column.
std::string WriteCorpus(const Corpus& corpus, const std::string& dir);

// Training examples from the train split. Throws DataError when any train path
// is also in `heldout_paths`, or when the train set is empty.
std::vector<TrainingExample> BuildDataset(const std::vector<CorpusItem>& train,
                                          const std::vector<std::string>& heldout_paths);

}  // namespace nugan::data

#endif  // NUGAN_DATA_CORPUS_H_
