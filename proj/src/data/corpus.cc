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

#include "nugan/data/corpus.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "nugan/data/wav.h"
#include "nugan/dsp/stft.h"
#include "nugan/errors.h"

namespace nugan::data {
namespace fs = std::filesystem;

std::string SplitName(Split split) {
  return split == Split::kTrain ? "train" : "heldout";
}

Split ParseSplit(const std::string& text) {
  if (text == "train") return Split::kTrain;
  if (text == "heldout" || text == "test") return Split::kHeldout;
  throw DataError("unknown split '" + text + "' (expected train or heldout)");
}

dsp::AudioBuffer LoadAudio(const CorpusItem& item) {
  if (item.audio) return *item.audio;
  return ReadWav(item.path);
}

dsp::AudioBuffer SynthFile(std::uint64_t seed, double duration_s, double noise_level) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  constexpr double kMaxPartialHz = 20000.0;
  constexpr double kVibratoDepth = 0.02;
  constexpr std::size_t kBlock = 32;
  const double sr = dsp::kHighSampleRate;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double f0 = 200.0 + 200.0 * unit(rng);
  const double vibrato_hz = 4.0 + 2.0 * unit(rng);
  const double am_hz = 2.0 + 3.0 * unit(rng);
  const double am_phase = kTwoPi * unit(rng);
  // Upper-band resonance placed by the fundamental.
  const double resonance_hz = 12000.0 + 20.0 * (f0 - 200.0);
  const double resonance_width = 1500.0;
  const double resonance_gain = 0.5;
  const double tilt_hz = 4000.0;

  const auto n_partials =
      static_cast<std::size_t>(kMaxPartialHz / (f0 * (1.0 + kVibratoDepth)));
  std::vector<std::complex<double>> offsets(n_partials);
  for (auto& c : offsets) c = std::polar(1.0, kTwoPi * unit(rng));

  const auto n = static_cast<std::size_t>(std::llround(duration_s * sr));
  dsp::AudioBuffer audio;
  audio.sample_rate = dsp::kHighSampleRate;
  audio.samples.assign(n, 0.0);

  std::vector<double> amp(n_partials);
  double phase = 0.0;
  for (std::size_t start = 0; start < n; start += kBlock) {
    const double t = static_cast<double>(start) / sr;
    const double f_inst = f0 * (1.0 + kVibratoDepth * std::sin(kTwoPi * vibrato_hz * t));
    const double envelope = 1.0 + 0.3 * std::sin(kTwoPi * am_hz * t + am_phase);
    for (std::size_t k = 0; k < n_partials; ++k) {
      const double f = f_inst * static_cast<double>(k + 1);
      const double d = (f - resonance_hz) / resonance_width;
      amp[k] = envelope * (std::exp(-f / tilt_hz) + resonance_gain * std::exp(-0.5 * d * d));
    }
    const std::size_t end = std::min(n, start + kBlock);
    for (std::size_t i = start; i < end; ++i) {
      const double ti = static_cast<double>(i) / sr;
      const double fi = f0 * (1.0 + kVibratoDepth * std::sin(kTwoPi * vibrato_hz * ti));
      phase = std::fmod(phase + kTwoPi * fi / sr, kTwoPi);
      const std::complex<double> step = std::polar(1.0, phase);
      std::complex<double> z = step;
      double acc = 0.0;
      for (std::size_t k = 0; k < n_partials; ++k) {
        acc += amp[k] * (z * offsets[k]).imag();
        z *= step;
      }
      audio.samples[i] = acc;
    }
  }

  double peak = 0.0;
  for (double s : audio.samples) peak = std::max(peak, std::abs(s));
  const double scale = peak > 0.0 ? 0.5 / peak : 1.0;
  std::normal_distribution<double> noise(0.0, noise_level);
  for (auto& s : audio.samples) s = s * scale + noise(rng);
  return audio;
}

Corpus SynthCorpus(const SynthOptions& options) {
  Corpus corpus;
  std::mt19937_64 seeder(options.seed);
  for (std::size_t i = 0; i < options.n_files; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "synth_%04zu.wav", i);
    CorpusItem item;
    item.path = name;
    item.audio = std::make_shared<const dsp::AudioBuffer>(
        SynthFile(seeder(), options.duration_s, options.noise_level));
    corpus.items.push_back(std::move(item));
  }
  return corpus;
}

double EnergyAbove(const dsp::AudioBuffer& audio, double cutoff_hz) {
  const auto spec = dsp::Stft(audio);
  const double bin_hz = static_cast<double>(audio.sample_rate) / dsp::kNumFft;
  double total = 0.0;
  double above = 0.0;
  for (std::size_t t = 0; t < spec.frames; ++t) {
    for (std::size_t f = 0; f < spec.bins; ++f) {
      const double e = std::norm(spec.at(t, f));
      total += e;
      if (static_cast<double>(f) * bin_hz > cutoff_hz) above += e;
    }
  }
  return total > 0.0 ? above / total : 0.0;
}

namespace {

std::vector<std::string> Paths(const std::vector<CorpusItem>& items) {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(item.path);
  return out;
}

void RequireNonEmpty(const CorpusSplit& split, const std::string& how) {
  if (split.train.empty()) throw DataError("split by " + how + " leaves no train files");
  if (split.heldout.empty()) {
    throw DataError("split by " + how + " leaves no held-out files");
  }
}

std::vector<CorpusItem> SortedItems(const Corpus& corpus) {
  auto items = corpus.items;
  std::sort(items.begin(), items.end(),
            [](const CorpusItem& a, const CorpusItem& b) { return a.path < b.path; });
  return items;
}

}  // namespace

std::vector<std::string> CorpusSplit::TrainPaths() const { return Paths(train); }
std::vector<std::string> CorpusSplit::HeldoutPaths() const { return Paths(heldout); }

CorpusSplit SplitByFraction(const Corpus& corpus, double heldout_fraction,
                            std::uint64_t seed) {
  if (!(heldout_fraction > 0.0 && heldout_fraction < 1.0)) {
    throw ConfigError("held-out fraction must be in (0, 1), got " +
                      std::to_string(heldout_fraction));
  }
  auto items = SortedItems(corpus);
  std::mt19937_64 rng(seed);
  std::shuffle(items.begin(), items.end(), rng);
  const auto n = items.size();
  auto n_heldout =
      static_cast<std::size_t>(std::llround(heldout_fraction * static_cast<double>(n)));
  n_heldout = std::max<std::size_t>(n_heldout, 1);
  CorpusSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_heldout ? split.heldout : split.train).push_back(items[i]);
  }
  RequireNonEmpty(split, "fraction");
  return split;
}

CorpusSplit SplitByTag(const Corpus& corpus, const std::string& tag) {
  if (tag.empty()) throw ConfigError("held-out tag is empty");
  CorpusSplit split;
  for (auto& item : SortedItems(corpus)) {
    (item.path.find(tag) != std::string::npos ? split.heldout : split.train)
        .push_back(item);
  }
  RequireNonEmpty(split, "tag '" + tag + "'");
  return split;
}

CorpusSplit SplitByManifest(const Corpus& corpus) {
  CorpusSplit split;
  for (auto& item : SortedItems(corpus)) {
    if (!item.split) {
      throw DataError(item.path + ": manifest entry has no split column");
    }
    (*item.split == Split::kHeldout ? split.heldout : split.train).push_back(item);
  }
  RequireNonEmpty(split, "manifest column");
  return split;
}

Corpus ReadManifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot open corpus manifest " + manifest_path);
  const fs::path root = fs::path(manifest_path).parent_path();
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    CorpusItem item;
    const auto tab = line.find('\t');
    const std::string rel = line.substr(0, tab);
    if (tab != std::string::npos) {
      try {
        item.split = ParseSplit(line.substr(tab + 1));
      } catch (const DataError& e) {
        throw DataError(manifest_path + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    item.path = (root / rel).lexically_normal().string();
    corpus.items.push_back(std::move(item));
  }
  if (corpus.items.empty()) throw DataError("corpus manifest " + manifest_path + " is empty");
  return corpus;
}

std::string WriteCorpus(const Corpus& corpus, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path manifest = fs::path(dir) / "manifest.txt";
  std::ofstream out(manifest);
  if (!out) throw DataError("cannot write " + manifest.string());
  for (const auto& item : corpus.items) {
    const auto name = fs::path(item.path).filename();
    WriteWav((fs::path(dir) / name).string(), LoadAudio(item));
    out << name.string();
    if (item.split) out << '\t' << SplitName(*item.split);
    out << '\n';
  }
  if (!out) throw DataError("write failed for " + manifest.string());
  return manifest.string();
}

std::vector<TrainingExample> BuildDataset(const std::vector<CorpusItem>& train,
                                          const std::vector<std::string>& heldout_paths) {
  if (train.empty()) throw DataError("training set is empty");
  const std::set<std::string> heldout(heldout_paths.begin(), heldout_paths.end());
  std::vector<TrainingExample> examples;
  examples.reserve(train.size());
  for (const auto& item : train) {
    if (heldout.count(item.path) != 0) {
      throw DataError(item.path + " is in both the train and held-out splits");
    }
    examples.push_back(MakePair(LoadAudio(item), item.path));
  }
  return examples;
}

}  // namespace nugan::data
