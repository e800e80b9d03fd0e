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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "nugan/data/corpus.h"
#include "nugan/data/pairs.h"
#include "nugan/data/wav.h"
#include "nugan/dsp/resample.h"
#include "nugan/dsp/stft.h"
#include "nugan/errors.h"
#include "nugan/metrics.h"
#include "oracles.h"

namespace nugan::data {
namespace {

namespace fs = std::filesystem;
using dsp::AudioBuffer;

// Minimal independent RIFF writer for codecs the library never emits.
std::vector<std::uint8_t> RawWav(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                                 std::uint16_t bits, const std::vector<std::uint8_t>& payload) {
  std::vector<std::uint8_t> out;
  auto put = [&out](std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  auto tag = [&out](const char* t) { out.insert(out.end(), t, t + 4); };
  tag("RIFF");
  put(4 + 8 + 16 + 8 + payload.size(), 4);
  tag("WAVE");
  tag("fmt ");
  put(16, 4);
  put(format, 2);
  put(channels, 2);
  put(rate, 4);
  put(rate * channels * bits / 8, 4);
  put(channels * bits / 8, 2);
  put(bits, 2);
  tag("data");
  put(payload.size(), 4);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::vector<std::uint8_t> Pcm16(const std::vector<std::int16_t>& samples) {
  std::vector<std::uint8_t> out;
  for (auto s : samples) {
    const auto u = static_cast<std::uint16_t>(s);
    out.push_back(static_cast<std::uint8_t>(u & 0xff));
    out.push_back(static_cast<std::uint8_t>(u >> 8));
  }
  return out;
}

TEST(WavTest, FloatRoundTripIsBitExact) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  AudioBuffer a{std::vector<double>(1234), 44100};
  for (auto& s : a.samples) s = dist(rng);
  a.samples[7] = std::numeric_limits<float>::denorm_min();
  const auto path = fs::temp_directory_path() / "nugan_wav_roundtrip.wav";
  WriteWav(path.string(), a);
  const auto b = ReadWav(path.string());
  fs::remove(path);
  EXPECT_EQ(b.sample_rate, 44100);
  ASSERT_EQ(b.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(std::memcmp(&a.samples[i], &b.samples[i], sizeof(double)), 0) << i;
  }
  const auto encoded = EncodeWav(a);
  EXPECT_EQ(encoded[20], 3);  // IEEE float format tag
  EXPECT_EQ(encoded[22], 1);  // mono
  EXPECT_EQ(encoded[34], 32);
}

TEST(WavTest, Pcm16Scaling) {
  const auto bytes = RawWav(1, 1, 22050, 16, Pcm16({-32768, 0, 16384, 32767}));
  const auto a = DecodeWav(bytes);
  EXPECT_EQ(a.sample_rate, 22050);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a.samples[0], -1.0);
  EXPECT_EQ(a.samples[1], 0.0);
  EXPECT_EQ(a.samples[2], 0.5);
  EXPECT_EQ(a.samples[3], 32767.0 / 32768.0);
}

TEST(WavTest, StereoIsAveraged) {
  const auto a = DecodeWav(RawWav(1, 2, 44100, 16, Pcm16({16384, 0, -32768, -16384})));
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a.samples[0], 0.25);
  EXPECT_EQ(a.samples[1], -0.75);
}

std::string DecodeError(const std::vector<std::uint8_t>& bytes) {
  try {
    DecodeWav(bytes, "clip.wav");
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

TEST(WavTest, TruncatedFilesNameTheChunk) {
  const auto good = EncodeWav(AudioBuffer{std::vector<double>(100, 0.25), 44100});
  std::vector<std::uint8_t> cut(good.begin(), good.end() - 40);
  EXPECT_NE(DecodeError(cut).find("data"), std::string::npos) << DecodeError(cut);
  std::vector<std::uint8_t> no_data(good.begin(), good.begin() + 36);
  EXPECT_NE(DecodeError(no_data).find("missing data chunk"), std::string::npos);
  std::vector<std::uint8_t> no_fmt(good.begin(), good.begin() + 12);
  EXPECT_NE(DecodeError(no_fmt).find("missing fmt chunk"), std::string::npos);
  std::vector<std::uint8_t> half_fmt(good.begin(), good.begin() + 24);
  EXPECT_NE(DecodeError(half_fmt).find("fmt"), std::string::npos) << DecodeError(half_fmt);
}

TEST(WavTest, RejectsMalformedInputs) {
  EXPECT_NE(DecodeError({'J', 'U', 'N', 'K'}).find("RIFF"), std::string::npos);
  EXPECT_NE(DecodeError(RawWav(1, 1, 0, 16, Pcm16({1, 2}))).find("sample rate is 0"),
            std::string::npos);
  EXPECT_NE(DecodeError(RawWav(2, 1, 44100, 4, {0, 0})).find("unsupported codec"),
            std::string::npos);
  EXPECT_THROW(ReadWav("/nonexistent/clip.wav"), DataError);
}

AudioBuffer Tones(std::size_t n, std::initializer_list<double> freqs) {
  AudioBuffer a{std::vector<double>(n, 0.0), dsp::kHighSampleRate};
  double phase = 0.3;
  for (double f : freqs) {
    for (std::size_t i = 0; i < n; ++i) {
      a.samples[i] += 0.1 * std::sin(2 * M_PI * f * i / dsp::kHighSampleRate + phase);
    }
    phase += 1.1;
  }
  return a;
}

TEST(MakePairTest, FrameCountsAgree) {
  for (std::size_t n : {1024u, 1025u, 5000u, 44101u}) {
    const auto ex = MakePair(oracle::WhiteNoise(n, 0.1, dsp::kHighSampleRate, n), "noise");
    const std::size_t frames = dsp::NumFrames(n & ~std::size_t{1}, dsp::kHop);
    EXPECT_EQ(ex.frames(), frames);
    EXPECT_EQ(ex.low.values.cols, 257u);
    EXPECT_EQ(ex.high_real.values.rows, frames);
    EXPECT_EQ(ex.high_real.values.cols, 256u);
    EXPECT_EQ(ex.phase_full.values.rows, frames);
    EXPECT_EQ(ex.phase_full.values.cols, 513u);
  }
  EXPECT_THROW(MakePair(oracle::WhiteNoise(1023, 0.1, dsp::kHighSampleRate, 1)), DataError);
  EXPECT_THROW(MakePair(oracle::WhiteNoise(4096, 0.1, dsp::kLowSampleRate, 1)), DataError);
}

TEST(MakePairTest, BandLimitedAudioHasFloorTargets) {
  const auto ex = MakePair(Tones(22050, {440, 1800, 3100, 5200}));
  const double floor = std::log(dsp::kMagnitudeFloor);
  // Edge frames see the reflect-padding seam, which is broadband.
  std::size_t near_floor = 0, total = 0;
  for (std::size_t t = 4; t + 4 < ex.frames(); ++t) {
    for (std::size_t k = 0; k < 256; ++k) {
      near_floor += ex.high_real.values(t, k) < floor + 0.1;
      ++total;
    }
  }
  EXPECT_GE(static_cast<double>(near_floor) / total, 0.99);
}

TEST(MakePairTest, LowBinsComeFromInterpolatedAudio) {
  const auto truth = Tones(22050, {440, 1800, 3100, 5200, 7400});
  const auto ex = MakePair(truth);
  const auto truth_log = dsp::ToLogMagnitude(dsp::SplitMagPhase(dsp::Stft(truth)).magnitude);
  const auto truth_low = dsp::SliceColumns(truth_log.values, 0, dsp::kLowBins);
  EXPECT_LT(oracle::LogMagnitudeLsd(ex.low.values.data, truth_low.data, dsp::kLowBins), 0.3);
  // Broadband truth: the interpolated low band differs from the truth near Nyquist.
  const auto noisy = oracle::WhiteNoise(22050, 0.1, dsp::kHighSampleRate, 3);
  const auto noisy_ex = MakePair(noisy);
  const auto noisy_log = dsp::ToLogMagnitude(dsp::SplitMagPhase(dsp::Stft(noisy)).magnitude);
  double gap = 0.0;
  for (std::size_t t = 0; t < noisy_ex.frames(); ++t) {
    gap += std::abs(noisy_ex.low.values(t, 256) - noisy_log.values(t, 256));
  }
  EXPECT_GT(gap / noisy_ex.frames(), 1.0);
}

TEST(MakePairTest, DeterministicAndFinite) {
  const auto audio = SynthFile(4, 0.5, 1e-3);
  const auto a = MakePair(audio, "x");
  const auto b = MakePair(audio, "x");
  EXPECT_EQ(a.low.values.data, b.low.values.data);
  EXPECT_EQ(a.high_real.values.data, b.high_real.values.data);
  EXPECT_EQ(a.phase_full.values.data, b.phase_full.values.data);
  for (double v : a.low.values.data) ASSERT_TRUE(std::isfinite(v));
  for (double v : a.high_real.values.data) ASSERT_TRUE(std::isfinite(v));
}

TEST(SynthTest, SameSeedIsBitIdentical) {
  SynthOptions options;
  options.seed = 11;
  options.n_files = 3;
  options.duration_s = 0.25;
  const auto a = SynthCorpus(options);
  const auto b = SynthCorpus(options);
  options.seed = 12;
  const auto c = SynthCorpus(options);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.items[i].path, b.items[i].path);
    EXPECT_EQ(a.items[i].audio->samples, b.items[i].audio->samples);
    EXPECT_NE(a.items[i].audio->samples, c.items[i].audio->samples);
  }
}

TEST(SynthTest, EveryFileCarriesHighBandEnergy) {
  SynthOptions options;
  options.seed = 7;
  const auto corpus = SynthCorpus(options);
  ASSERT_EQ(corpus.items.size(), 60u);
  for (const auto& item : corpus.items) {
    const double oracle_fraction = oracle::EnergyFractionAbove(*item.audio, 11025.0);
    EXPECT_GE(oracle_fraction, 0.10) << item.path;
    EXPECT_NEAR(EnergyAbove(*item.audio, 11025.0), oracle_fraction, 0.02) << item.path;
    EXPECT_EQ(item.audio->sample_rate, dsp::kHighSampleRate);
    double peak = 0.0;
    for (double s : item.audio->samples) peak = std::max(peak, std::abs(s));
    EXPECT_LT(peak, 1.0);
  }
}

// Nearest neighbour over quantized low-band frames: copies the high bins of
// the closest training frame, then reconstructs with the interpolated phase.
TEST(SynthTest, LookupRegressorBeatsSincBaseline) {
  SynthOptions options;
  options.seed = 21;
  options.n_files = 14;
  options.duration_s = 1.0;
  const auto split = SplitByFraction(SynthCorpus(options), 2.0 / 14.0, 5);
  const auto train = BuildDataset(split.train, split.HeldoutPaths());
  const double step = 0.5;
  auto quantize = [step](double v) { return std::round(v / step) * step; };
  std::vector<std::vector<double>> keys;
  std::vector<std::vector<double>> values;
  for (const auto& ex : train) {
    for (std::size_t t = 0; t < ex.frames(); ++t) {
      std::vector<double> key(257);
      for (std::size_t k = 0; k < 257; ++k) key[k] = quantize(ex.low.values(t, k));
      keys.push_back(std::move(key));
      values.emplace_back(ex.high_real.values.data.begin() + t * 256,
                          ex.high_real.values.data.begin() + (t + 1) * 256);
    }
  }
  double lookup_lsd = 0.0, baseline_lsd = 0.0;
  for (const auto& item : split.heldout) {
    auto truth = LoadAudio(item);
    const auto low_rate = dsp::Downsample(truth, 2);
    const auto features = AnalyzeLowRate(low_rate);
    dsp::LogMagnitude high{dsp::RealMatrix(features.low.values.rows, 256)};
    for (std::size_t t = 0; t < features.low.values.rows; ++t) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < keys.size(); ++j) {
        double d = 0.0;
        for (std::size_t k = 0; k < 257 && d < best_d; ++k) {
          const double e = quantize(features.low.values(t, k)) - keys[j][k];
          d += e * e;
        }
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      std::copy(values[best].begin(), values[best].end(), high.values.data.begin() + t * 256);
    }
    const auto rec = dsp::ReconstructFull(features.low, high, features.phase);
    lookup_lsd += metrics::Lsd(truth, rec.audio);
    baseline_lsd += metrics::Lsd(truth, features.interpolated);
  }
  EXPECT_LT(lookup_lsd, baseline_lsd);
  RecordProperty("lookup_lsd", std::to_string(lookup_lsd / split.heldout.size()));
  RecordProperty("baseline_lsd", std::to_string(baseline_lsd / split.heldout.size()));
}

Corpus NamedCorpus() {
  Corpus c;
  for (const char* spk : {"spk1", "spk2"}) {
    for (int script = 1; script <= 5; ++script) {
      c.items.push_back({std::string(spk) + "/script" + std::to_string(script) + "_001.wav", {}, {}});
    }
  }
  return c;
}

TEST(SplitTest, TagHoldsOutExactlyMatchingFiles) {
  const auto split = SplitByTag(NamedCorpus(), "script5");
  ASSERT_EQ(split.heldout.size(), 2u);
  for (const auto& item : split.heldout) EXPECT_NE(item.path.find("script5"), std::string::npos);
  for (const auto& item : split.train) EXPECT_EQ(item.path.find("script5"), std::string::npos);
  EXPECT_EQ(split.train.size(), 8u);
  EXPECT_THROW(SplitByTag(NamedCorpus(), "script9"), DataError);
}

TEST(SplitTest, FractionIsDisjointExhaustiveAndSeeded) {
  const auto corpus = NamedCorpus();
  const auto a = SplitByFraction(corpus, 0.3, 1);
  const auto b = SplitByFraction(corpus, 0.3, 1);
  EXPECT_EQ(a.HeldoutPaths(), b.HeldoutPaths());
  EXPECT_EQ(a.TrainPaths(), b.TrainPaths());
  EXPECT_EQ(a.heldout.size(), 3u);
  std::set<std::string> all;
  for (const auto& p : a.TrainPaths()) all.insert(p);
  for (const auto& p : a.HeldoutPaths()) EXPECT_TRUE(all.insert(p).second) << p;
  EXPECT_EQ(all.size(), corpus.items.size());
  bool differs = false;
  for (std::uint64_t seed = 2; seed < 8; ++seed) {
    differs |= SplitByFraction(corpus, 0.3, seed).HeldoutPaths() != a.HeldoutPaths();
  }
  EXPECT_TRUE(differs);
  auto reversed = corpus;
  std::reverse(reversed.items.begin(), reversed.items.end());
  EXPECT_EQ(SplitByFraction(reversed, 0.3, 1).HeldoutPaths(), a.HeldoutPaths());
  EXPECT_THROW(SplitByFraction(corpus, 1.0, 1), ConfigError);
}

TEST(SplitTest, ManifestRoundTrip) {
  const auto dir = fs::temp_directory_path() / "nugan_manifest_test";
  fs::remove_all(dir);
  SynthOptions options;
  options.n_files = 3;
  options.duration_s = 0.1;
  auto corpus = SynthCorpus(options);
  corpus.items[1].split = Split::kHeldout;
  corpus.items[0].split = corpus.items[2].split = Split::kTrain;
  const auto manifest = WriteCorpus(corpus, dir.string());
  const auto back = ReadManifest(manifest);
  ASSERT_EQ(back.items.size(), 3u);
  const auto split = SplitByManifest(back);
  ASSERT_EQ(split.heldout.size(), 1u);
  EXPECT_EQ(fs::path(split.heldout[0].path).filename(), "synth_0001.wav");
  const auto audio = LoadAudio(split.heldout[0]);
  ASSERT_EQ(audio.size(), corpus.items[1].audio->size());
  for (std::size_t i = 0; i < audio.size(); ++i) {
    EXPECT_EQ(audio.samples[i], static_cast<double>(static_cast<float>(corpus.items[1].audio->samples[i])));
  }
  {
    std::ofstream bad(dir / "bad.txt");
    bad << "# comment\nsynth_0000.wav\tvalidation\n";
  }
  EXPECT_THROW(ReadManifest((dir / "bad.txt").string()), DataError);
  EXPECT_THROW(ReadManifest((dir / "absent.txt").string()), DataError);
  fs::remove_all(dir);
}

TEST(DatasetTest, HeldoutFilesNeverBecomeExamples) {
  SynthOptions options;
  options.n_files = 4;
  options.duration_s = 0.2;
  const auto split = SplitByFraction(SynthCorpus(options), 0.25, 3);
  const auto examples = BuildDataset(split.train, split.HeldoutPaths());
  EXPECT_EQ(examples.size(), split.train.size());
  const auto heldout = split.HeldoutPaths();
  for (const auto& ex : examples) {
    EXPECT_EQ(std::find(heldout.begin(), heldout.end(), ex.source), heldout.end());
  }
  auto leaked = split.HeldoutPaths();
  leaked.push_back(split.train.front().path);
  EXPECT_THROW(BuildDataset(split.train, leaked), DataError);
  EXPECT_THROW(BuildDataset({}, heldout), DataError);
}

}  // namespace
}  // namespace nugan::data
