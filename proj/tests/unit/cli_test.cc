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

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "nugan/cli/commands.h"
#include "nugan/cli/run_config.h"
#include "nugan/data/wav.h"
#include "nugan/dsp/resample.h"
#include "nugan/errors.h"
#include "oracles.h"

#ifndef NUGAN_BINARY
#error "NUGAN_BINARY must name the nugan executable"
#endif

namespace nugan::cli {
namespace {

namespace fs = std::filesystem;

TEST(RunConfigTest, DefaultsFollowFullPreset) {
  const auto c = ParseRunConfig("", {});
  EXPECT_EQ(c.preset, "full");
  EXPECT_EQ(c.model.generator.d_model, 512);
  EXPECT_EQ(c.model.discriminator.group_counts, (std::vector<int>{1, 4, 16, 64, 256}));
  EXPECT_EQ(c.train.lr_g, 1e-4);
  EXPECT_EQ(c.lsd.n_fft, 2048);
  EXPECT_EQ(c.lsd.hop, 512);
  EXPECT_FALSE(c.run_dir.empty());
}

TEST(RunConfigTest, DeskPreset) {
  const auto c = ParseRunConfig("", {}, "desk");
  EXPECT_EQ(c.model.generator.d_model, 128);
  EXPECT_EQ(c.model.discriminator.channels, 128);
  EXPECT_LE(c.train.max_steps, 5000);
  const auto from_file = ParseRunConfig("[run]\npreset = desk\n", {});
  EXPECT_EQ(SerializeRunConfig(from_file), SerializeRunConfig(c));
  EXPECT_THROW(ParseRunConfig("", {}, "huge"), ConfigError);
}

TEST(RunConfigTest, SectionsKeysAndOverrides) {
  const auto c = ParseRunConfig(
      "[train]\nlr_g = 0.002\nseed = 9\n\n[discriminator]\ngroup_counts = 1,2,4\nchannels = 8\n",
      {"train.seed=11", "generator.n_layers=3"});
  EXPECT_EQ(c.train.lr_g, 0.002);
  EXPECT_EQ(c.train.seed, 11u);
  EXPECT_EQ(c.model.generator.n_layers, 3);
  EXPECT_EQ(c.model.discriminator.group_counts, (std::vector<int>{1, 2, 4}));
}

TEST(RunConfigTest, UnknownOrMalformedKeysAreErrors) {
  EXPECT_THROW(ParseRunConfig("[train]\nlr_gg = 0.1\n", {}), ConfigError);
  EXPECT_THROW(ParseRunConfig("[trian]\nlr_g = 0.1\n", {}), ConfigError);
  EXPECT_THROW(ParseRunConfig("[train]\nlr_g = fast\n", {}), ConfigError);
  EXPECT_THROW(ParseRunConfig("", {"train.nope=1"}), ConfigError);
  EXPECT_THROW(ParseRunConfig("", {"train.lr_g"}), ConfigError);
  EXPECT_THROW(ParseRunConfig("[train]\nbeta1 = 1.5\n", {}), ConfigError);
  EXPECT_THROW(ParseRunConfig("[discriminator]\ngroup_counts = 1,3\n", {}), ConfigError);
  try {
    ParseRunConfig("[train]\nlr_gg = 0.1\n", {});
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("train.lr_gg"), std::string::npos);
  }
}

TEST(RunConfigTest, EchoRoundTrips) {
  const auto c = ParseRunConfig("", {"train.lr_d=0.00123", "data.heldout_tag=script5",
                                     "run.run_dir=/tmp/somewhere"},
                                "desk");
  const auto text = SerializeRunConfig(c);
  const auto back = ParseRunConfig(text, {});
  EXPECT_EQ(SerializeRunConfig(back), text);
  EXPECT_EQ(back.train.lr_d, 0.00123);
  EXPECT_EQ(back.data.heldout_tag, "script5");
  EXPECT_EQ(back.run_dir, "/tmp/somewhere");
}

TEST(RunConfigTest, RunDirFallsBackToEnvironment) {
  ::setenv(kRunDirEnv, "/tmp/nugan_env_run", 1);
  EXPECT_EQ(ParseRunConfig("", {}).run_dir, "/tmp/nugan_env_run");
  ::unsetenv(kRunDirEnv);
  EXPECT_EQ(ParseRunConfig("", {}).run_dir, "runs/default");
}

TEST(RunGuardedTest, MapsExceptionsToExitCodes) {
  EXPECT_EQ(RunGuarded([] { return 0; }), kExitOk);
  EXPECT_EQ(RunGuarded([]() -> int { throw ConfigError("x"); }), kExitConfig);
  EXPECT_EQ(RunGuarded([]() -> int { throw DataError("x"); }), kExitData);
  EXPECT_EQ(RunGuarded([]() -> int { throw DimensionError("x"); }), kExitData);
  EXPECT_EQ(RunGuarded([]() -> int { throw NumericError("x"); }), kExitNumeric);
}

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

class CommandTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / "nugan_cli_test";
    fs::remove_all(root_);
    fs::create_directories(root_);
    std::ofstream cfg(root_ / "tiny.ini");
    cfg << "[data]\nsynth_files = 6\nsynth_duration = 0.5\nsynth_seed = 2\n\n"
           "[generator]\nn_layers = 1\nd_model = 32\nn_heads = 2\nd_ff = 64\n\n"
           "[discriminator]\nchannels = 16\ngroup_counts = 1,4,16\n\n"
           "[train]\nbatch_size = 2\nbatch_frames = 32\nmax_steps = 6\ncheckpoint_interval = 3\n";
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static Result Run(const std::string& args) {
    static int counter = 0;
    const auto out = root_ / ("out" + std::to_string(counter) + ".txt");
    const auto err = root_ / ("err" + std::to_string(counter++) + ".txt");
    const std::string cmd = std::string(NUGAN_BINARY) + " " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = Slurp(out);
    r.err = Slurp(err);
    return r;
  }

  static std::string Slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static std::vector<std::string> LossColumns(const fs::path& log) {
    std::istringstream in(Slurp(log));
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) out.push_back(line.substr(0, line.rfind('\t')));
    return out;
  }

  static std::string Tiny() { return "--config " + (root_ / "tiny.ini").string(); }

  // Trains once and shares the final checkpoint.
  static fs::path Checkpoint() {
    static const fs::path path = [] {
      const auto dir = root_ / "shared";
      const auto r = Run("train " + Tiny() + " --run-dir " + dir.string());
      EXPECT_EQ(r.code, 0) << r.err;
      return dir / "ckpt_000006.nug";
    }();
    return path;
  }

  static fs::path LowRateWav(const std::string& name, double amplitude) {
    const auto path = root_ / name;
    data::WriteWav(path.string(), oracle::Sine(1000, amplitude, 11025, dsp::kLowSampleRate));
    return path;
  }

  static inline fs::path root_;
};

TEST_F(CommandTest, TrainWritesLogCheckpointsAndEcho) {
  const auto dir = root_ / "train_a";
  const auto r = Run("train " + Tiny() + " --max-steps 5 --run-dir " + dir.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(LossColumns(dir / "loss.log").size(), 5u);
  EXPECT_TRUE(fs::exists(dir / "ckpt_000003.nug"));
  EXPECT_TRUE(fs::exists(dir / "ckpt_000005.nug"));
  ASSERT_TRUE(fs::exists(dir / "config.ini"));
  EXPECT_NE(r.out.find("# [train]"), std::string::npos) << r.out;
  // Rerunning from the echoed config reproduces the run.
  const auto dir_b = root_ / "train_b";
  const auto rb = Run("train --config " + (dir / "config.ini").string() + " --run-dir " +
                      dir_b.string());
  ASSERT_EQ(rb.code, 0) << rb.err;
  EXPECT_EQ(LossColumns(dir / "loss.log"), LossColumns(dir_b / "loss.log"));
}

TEST_F(CommandTest, SameSeedTwiceGivesIdenticalLogs) {
  std::vector<std::vector<std::string>> logs;
  for (const char* name : {"seed_a", "seed_b"}) {
    const auto dir = root_ / name;
    const auto r = Run("train " + Tiny() + " --seed 7 --max-steps 4 --run-dir " + dir.string());
    ASSERT_EQ(r.code, 0) << r.err;
    logs.push_back(LossColumns(dir / "loss.log"));
  }
  EXPECT_EQ(logs[0], logs[1]);
  EXPECT_EQ(logs[0].size(), 4u);
  const auto other = root_ / "seed_c";
  ASSERT_EQ(Run("train " + Tiny() + " --seed 8 --max-steps 4 --run-dir " + other.string()).code, 0);
  EXPECT_NE(LossColumns(other / "loss.log"), logs[0]);
}

TEST_F(CommandTest, ErrorsMapToExitCodes) {
  const auto missing = (root_ / "no_such_manifest.txt").string();
  const auto data_err = Run("train " + Tiny() + " --corpus " + missing + " --run-dir " +
                            (root_ / "bad").string());
  EXPECT_EQ(data_err.code, 2);
  EXPECT_NE(data_err.err.find(missing), std::string::npos) << data_err.err;
  EXPECT_EQ(std::count(data_err.err.begin(), data_err.err.end(), '\n'), 1) << data_err.err;

  const auto cfg_err = Run("train " + Tiny() + " --set train.bogus=1");
  EXPECT_EQ(cfg_err.code, 1);
  EXPECT_NE(cfg_err.err.find("train.bogus"), std::string::npos);
  EXPECT_EQ(Run("train --config " + (root_ / "absent.ini").string()).code, 1);
  EXPECT_EQ(Run("frobnicate").code, 1);

  const auto numeric = Run("train " + Tiny() + " --set train.lr_d=1e38 --set train.lr_g=1e38 " +
                           "--max-steps 6 --run-dir " + (root_ / "nan").string());
  EXPECT_EQ(numeric.code, 3) << numeric.err;
  EXPECT_NE(numeric.err.find("non-finite"), std::string::npos) << numeric.err;
}

TEST_F(CommandTest, UpsampleContract) {
  const auto in = LowRateWav("tone.wav", 0.3);
  const auto out = root_ / "tone_up.wav";
  const auto r = Run("upsample --checkpoint " + Checkpoint().string() + " " + in.string() + " " +
                     out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto audio = data::ReadWav(out.string());
  EXPECT_EQ(audio.sample_rate, 44100);
  EXPECT_LE(std::abs(static_cast<long>(audio.size()) - 2 * 11025), 256);
}

TEST_F(CommandTest, BypassIsSincBaseline) {
  const auto in = LowRateWav("tone_b.wav", 0.3);
  const auto out = root_ / "tone_b_up.wav";
  const auto r = Run("upsample --bypass-model " + in.string() + " " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto audio = data::ReadWav(out.string());
  const auto expected = dsp::SincUpsample(data::ReadWav(in.string()), 2);
  ASSERT_EQ(audio.size(), expected.size());
  for (std::size_t i = 0; i < audio.size(); ++i) {
    ASSERT_EQ(audio.samples[i], static_cast<double>(static_cast<float>(expected.samples[i])));
  }
}

TEST_F(CommandTest, SilenceStaysSilent) {
  const auto in = LowRateWav("silence.wav", 0.0);
  const auto out = root_ / "silence_up.wav";
  ASSERT_EQ(Run("upsample --checkpoint " + Checkpoint().string() + " " + in.string() + " " +
                out.string())
                .code,
            0);
  for (double s : data::ReadWav(out.string()).samples) ASSERT_LT(std::abs(s), 1e-4);  // -80 dBFS
}

TEST_F(CommandTest, UpsampleRejectsWrongRateAndVersion) {
  const auto wrong = root_ / "wrong_rate.wav";
  data::WriteWav(wrong.string(), oracle::Sine(1000, 0.3, 4096, dsp::kHighSampleRate));
  const auto r = Run("upsample --bypass-model " + wrong.string() + " " +
                     (root_ / "x.wav").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("22050"), std::string::npos) << r.err;

  const auto bad = root_ / "future.nug";
  fs::copy_file(Checkpoint(), bad, fs::copy_options::overwrite_existing);
  {
    std::fstream f(bad, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    f.put(static_cast<char>(9));
  }
  const auto v = Run("upsample --checkpoint " + bad.string() + " " +
                     LowRateWav("tone_v.wav", 0.3).string() + " " + (root_ / "y.wav").string());
  EXPECT_EQ(v.code, 2);
  EXPECT_NE(v.err.find("version"), std::string::npos) << v.err;
}

TEST_F(CommandTest, EvaluateReports) {
  const auto base = Run("evaluate " + Tiny() + " --baseline");
  ASSERT_EQ(base.code, 0) << base.err;
  EXPECT_NE(base.out.find("lsd_mean="), std::string::npos);
  EXPECT_NE(base.out.find("lsd_std="), std::string::npos);
  EXPECT_NE(base.out.find("n_files=1"), std::string::npos) << base.out;

  const auto both = Run("evaluate " + Tiny() + " --checkpoint " + Checkpoint().string());
  ASSERT_EQ(both.code, 0) << both.err;
  EXPECT_NE(both.out.find("baseline"), std::string::npos);
  EXPECT_NE(both.out.find("model"), std::string::npos);

  const auto oracle_run = Run("evaluate " + Tiny() + " --oracle");
  ASSERT_EQ(oracle_run.code, 0) << oracle_run.err;
  EXPECT_NE(oracle_run.out.find("oracle"), std::string::npos);

  EXPECT_EQ(Run("evaluate " + Tiny() + " --baseline --heldout-tag no_such_tag").code, 2);
}

TEST_F(CommandTest, CheckPassesAndNegativeControlFails) {
  const auto ok = Run("check");
  EXPECT_EQ(ok.code, 0) << ok.out << ok.err;
  for (const char* suite : {"gradcheck", "stft", "sinc", "lsd", "spectral_norm", "group_independence"}) {
    EXPECT_NE(ok.out.find(std::string("PASS ") + suite), std::string::npos) << suite;
  }
  const auto bad = Run("check --corrupt-gradient");
  EXPECT_EQ(bad.code, 4);
  EXPECT_NE((bad.out + bad.err).find("FAIL gradcheck"), std::string::npos) << bad.out << bad.err;
}

}  // namespace
}  // namespace nugan::cli
