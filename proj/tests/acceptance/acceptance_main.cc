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

// Acceptance harness: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 125).
//
// Usage: nugan_acceptance [--only name[,name...]] [--work-dir DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "nugan/cli/commands.h"
#include "nugan/cli/run_config.h"
#include "nugan/data/corpus.h"
#include "nugan/dsp/resample.h"
#include "nugan/dsp/stft.h"
#include "nugan/inference/upsampler.h"
#include "nugan/metrics.h"
#include "nugan/model/discriminator.h"
#include "nugan/model/generator.h"
#include "nugan/model/spectral_norm.h"
#include "nugan/ops.h"
#include "nugan/training/losses.h"
#include "nugan/training/trainer.h"
#include "oracles.h"

namespace nugan::acceptance {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Shared between the desk-learning and reference-target criteria.
struct DeskNumbers {
  bool measured = false;
  double model_lsd = 0.0, model_std = 0.0;
  double baseline_lsd = 0.0, baseline_std = 0.0;
};
DeskNumbers g_desk;
fs::path g_work;

// ---------------------------------------------------------------- gradients

constexpr int kInstances = 20;
constexpr double kTolFloat = 1e-3;
constexpr double kTolDouble = 1e-6;

struct Worst {
  double value = 0.0;
  std::string name;
  void Update(double e, const std::string& n) {
    if (std::isnan(e)) e = std::numeric_limits<double>::infinity();
    if (e > value || name.empty()) {
      if (e >= value) {
        value = e;
        name = n;
      }
    }
  }
};

struct GradTally {
  Worst f32, f64;
  std::size_t cases = 0;
};

using ShapeGen = std::function<std::vector<Shape>(std::mt19937_64&)>;

std::size_t Pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// `f` is a generic callable usable as TensorFn<float> and TensorFn<double>.
template <typename F>
void Primitive(GradTally& tally, const std::string& name, F f, const ShapeGen& shapes,
               std::mt19937_64& rng, bool positive = false) {
  for (int i = 0; i < kInstances; ++i) {
    const auto s = shapes(rng);
    std::vector<Tensor<float>> xf;
    std::vector<Tensor<double>> xd;
    for (const auto& shape : s) xf.push_back(oracle::RandomTensor<float>(shape, rng, positive));
    for (const auto& shape : s) xd.push_back(oracle::RandomTensor<double>(shape, rng, positive));
    const oracle::TensorFn<float> ff = f;
    const oracle::TensorFn<double> fd = f;
    tally.f32.Update(oracle::CheckGradient<float>(ff, fd, xf, rng, 48).relative_error, name);
    tally.f64.Update(oracle::CheckGradient<double>(fd, fd, xd, rng, 48).relative_error, name);
  }
  ++tally.cases;
}

template <typename A, typename B>
void CopyValues(const ParameterList<A>& from, ParameterList<B>& to) {
  for (std::size_t k = 0; k < from.size(); ++k) {
    auto dst = to[k].tensor.mutable_data();
    const auto src = from[k].tensor.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<B>(src[i]);
  }
}

template <typename B>
void CopyValues(const std::vector<Tensor<double>>& from, ParameterList<B>& to) {
  for (std::size_t k = 0; k < from.size(); ++k) {
    auto dst = to[k].tensor.mutable_data();
    const auto src = from[k].data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<B>(src[i]);
  }
}

template <typename A, typename B>
void CopySpectral(model::DiscriminatorEnsemble<A>& from, model::DiscriminatorEnsemble<B>& to) {
  for (std::size_t m = 0; m < from.size(); ++m) {
    auto a = from[m].SpectralStates();
    auto b = to[m].SpectralStates();
    for (std::size_t k = 0; k < a.size(); ++k) {
      b[k].state->u.assign(a[k].state->u.begin(), a[k].state->u.end());
    }
  }
}

template <typename T>
std::vector<Tensor<T>> Tensors(const ParameterList<T>& params) {
  std::vector<Tensor<T>> out;
  for (const auto& p : params) out.push_back(p.tensor);
  return out;
}

template <typename T>
Tensor<T> GeneratorLoss(const model::Generator<T>& g, model::DiscriminatorEnsemble<T>& d,
                        const Tensor<T>& low, const Tensor<T>& high) {
  std::vector<std::vector<Tensor<T>>> rf, ff;
  std::vector<Tensor<T>> logits;
  {
    NoGradGuard no_grad;
    for (auto& o : d.Forward(Concat<T>({low, high}, 2), false)) rf.push_back(o.features);
  }
  for (auto& o : d.Forward(Concat<T>({low, g.Forward(low)}, 2), false)) {
    ff.push_back(o.features);
    logits.push_back(o.logits);
  }
  return Add(training::HingeGLoss(logits),
             Scale(training::FeatureMatchingLoss(rf, ff), T(10)));
}

template <typename T>
Tensor<T> DiscriminatorLoss(const model::Generator<T>& g, model::DiscriminatorEnsemble<T>& d,
                            const Tensor<T>& low, const Tensor<T>& high) {
  Tensor<T> fake_high;
  {
    NoGradGuard no_grad;
    fake_high = g.Forward(low);
  }
  std::vector<Tensor<T>> rl, fl;
  for (auto& o : d.Forward(Concat<T>({low, high}, 2), false)) rl.push_back(o.logits);
  for (auto& o : d.Forward(Concat<T>({low, fake_high}, 2), false)) fl.push_back(o.logits);
  return training::HingeDLoss(rl, fl);
}

// Toy-width models in float, double, and a double reference copy, all with
// identical weights and spectral-norm vectors.
struct ToyModels {
  ToyModels(std::uint64_t seed, std::mt19937_64& rng)
      : gf(Gc(), seed), gd(Gc(), seed), gr(Gc(), seed),
        df(Dc(), seed + 1), dd(Dc(), seed + 1), dr(Dc(), seed + 1) {
    auto gfp = gf.Parameters();
    auto gdp = gd.Parameters();
    auto grp = gr.Parameters();
    CopyValues(gfp, gdp);
    CopyValues(gfp, grp);
    auto dfp = df.Parameters();
    auto ddp = dd.Parameters();
    auto drp = dr.Parameters();
    CopyValues(dfp, ddp);
    CopyValues(dfp, drp);
    CopySpectral(df, dd);
    CopySpectral(df, dr);
    const std::size_t frames = Pick(rng, 4, 8);
    const std::size_t batch = Pick(rng, 1, 2);
    low_f = oracle::RandomTensor<float>({batch, frames, 257}, rng, false, false);
    high_f = oracle::RandomTensor<float>({batch, frames, 256}, rng, false, false);
    low_d = oracle::ToDouble<float>({low_f})[0];
    high_d = oracle::ToDouble<float>({high_f})[0];
  }
  static model::GeneratorConfig Gc() {
    model::GeneratorConfig c;
    c.n_layers = 1;
    c.d_model = 8;
    c.n_heads = 2;
    c.d_ff = 16;
    c.max_frames = 16;
    return c;
  }
  static model::DiscriminatorConfig Dc() {
    model::DiscriminatorConfig c;
    c.channels = 4;
    c.group_counts = {1, 2, 4};
    c.n_layers = 1;
    return c;
  }
  model::Generator<float> gf;
  model::Generator<double> gd, gr;
  model::DiscriminatorEnsemble<float> df;
  model::DiscriminatorEnsemble<double> dd, dr;
  Tensor<float> low_f, high_f;
  Tensor<double> low_d, high_d;
};

void ComposedLosses(GradTally& tally, std::mt19937_64& rng) {
  constexpr std::size_t kCoords = 3;
  for (int i = 0; i < kInstances; ++i) {
    ToyModels m(100 + static_cast<std::uint64_t>(i), rng);
    // Generator loss with respect to generator parameters; D frozen.
    {
      auto dfp = m.df.Parameters();
      auto ddp = m.dd.Parameters();
      auto drp = m.dr.Parameters();
      SetRequiresGrad(dfp, false);
      SetRequiresGrad(ddp, false);
      SetRequiresGrad(drp, false);
      oracle::TensorFn<double> ref = [&](const std::vector<Tensor<double>>& x) {
        auto p = m.gr.Parameters();
        CopyValues(x, p);
        return GeneratorLoss(m.gr, m.dr, m.low_d, m.high_d);
      };
      oracle::TensorFn<float> ff = [&](const auto&) {
        return GeneratorLoss(m.gf, m.df, m.low_f, m.high_f);
      };
      oracle::TensorFn<double> fd = [&](const auto&) {
        return GeneratorLoss(m.gd, m.dd, m.low_d, m.high_d);
      };
      tally.f32.Update(
          oracle::CheckGradient<float>(ff, ref, Tensors(m.gf.Parameters()), rng, kCoords)
              .relative_error,
          "generator_loss");
      tally.f64.Update(
          oracle::CheckGradient<double>(fd, ref, Tensors(m.gd.Parameters()), rng, kCoords)
              .relative_error,
          "generator_loss");
      SetRequiresGrad(dfp, true);
      SetRequiresGrad(ddp, true);
      SetRequiresGrad(drp, true);
    }
    // Discriminator loss with respect to discriminator parameters.
    {
      oracle::TensorFn<double> ref = [&](const std::vector<Tensor<double>>& x) {
        auto p = m.dr.Parameters();
        CopyValues(x, p);
        return DiscriminatorLoss(m.gr, m.dr, m.low_d, m.high_d);
      };
      oracle::TensorFn<float> ff = [&](const auto&) {
        return DiscriminatorLoss(m.gf, m.df, m.low_f, m.high_f);
      };
      oracle::TensorFn<double> fd = [&](const auto&) {
        return DiscriminatorLoss(m.gd, m.dd, m.low_d, m.high_d);
      };
      tally.f32.Update(
          oracle::CheckGradient<float>(ff, ref, Tensors(m.df.Parameters()), rng, kCoords)
              .relative_error,
          "discriminator_loss");
      tally.f64.Update(
          oracle::CheckGradient<double>(fd, ref, Tensors(m.dd.Parameters()), rng, kCoords)
              .relative_error,
          "discriminator_loss");
    }
  }
  tally.cases += 2;
}

Outcome GradientCorrectness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2026);
  GradTally t;
  auto same2 = [](std::mt19937_64& r) {
    Shape s{Pick(r, 1, 4), Pick(r, 1, 5)};
    return std::vector<Shape>{s, s};
  };
  auto one = [](std::mt19937_64& r) {
    return std::vector<Shape>{{Pick(r, 1, 4), Pick(r, 1, 5), Pick(r, 1, 3)}};
  };
  auto scalar_rhs = [](std::mt19937_64& r) {
    return std::vector<Shape>{{Pick(r, 1, 6), Pick(r, 1, 4)}, {1}};
  };

  Primitive(t, "add", [](const auto& x) { return Add(x[0], x[1]); }, same2, rng);
  Primitive(t, "add_broadcast", [](const auto& x) { return Add(x[0], x[1]); }, scalar_rhs, rng);
  Primitive(t, "sub", [](const auto& x) { return Sub(x[0], x[1]); }, same2, rng);
  Primitive(t, "sub_broadcast", [](const auto& x) { return Sub(x[1], x[0]); }, scalar_rhs, rng);
  Primitive(t, "mul", [](const auto& x) { return Mul(x[0], x[1]); }, same2, rng);
  Primitive(t, "mul_broadcast", [](const auto& x) { return Mul(x[0], x[1]); }, scalar_rhs, rng);
  Primitive(t, "div", [](const auto& x) { return Div(x[0], x[1]); }, same2, rng);
  Primitive(t, "div_broadcast", [](const auto& x) { return Div(x[0], x[1]); }, scalar_rhs, rng);
  Primitive(t, "neg", [](const auto& x) { return Neg(x[0]); }, one, rng);
  Primitive(t, "exp", [](const auto& x) { return Exp(x[0]); }, one, rng);
  Primitive(t, "log", [](const auto& x) { return Log(x[0]); }, one, rng, true);
  Primitive(t, "abs", [](const auto& x) { return Abs(x[0]); }, one, rng);
  Primitive(t, "relu", [](const auto& x) { return Relu(x[0]); }, one, rng);
  Primitive(t, "leaky_relu", [](const auto& x) { return LeakyRelu(x[0]); }, one, rng);
  Primitive(t, "gelu", [](const auto& x) { return Gelu(x[0]); }, one, rng);
  Primitive(t, "max_with_scalar",
            [](const auto& x) {
              using T = typename std::decay_t<decltype(x[0])>::value_type;
              return MaxWithScalar(x[0], T(0));
            },
            one, rng);
  Primitive(t, "scale",
            [](const auto& x) {
              using T = typename std::decay_t<decltype(x[0])>::value_type;
              return Scale(x[0], T(-1.75));
            },
            one, rng);
  Primitive(t, "add_scalar",
            [](const auto& x) {
              using T = typename std::decay_t<decltype(x[0])>::value_type;
              return AddScalar(x[0], T(0.5));
            },
            one, rng);
  Primitive(t, "matmul", [](const auto& x) { return MatMul(x[0], x[1]); },
            [](std::mt19937_64& r) {
              const auto m = Pick(r, 1, 5), k = Pick(r, 1, 6), n = Pick(r, 1, 5);
              return std::vector<Shape>{{m, k}, {k, n}};
            },
            rng);
  Primitive(t, "bias_add", [](const auto& x) { return BiasAdd(x[0], x[1]); },
            [](std::mt19937_64& r) {
              const auto n = Pick(r, 1, 6);
              return std::vector<Shape>{{Pick(r, 1, 3), Pick(r, 1, 4), n}, {n}};
            },
            rng);
  Primitive(t, "linear", [](const auto& x) { return Linear(x[0], x[1], x[2]); },
            [](std::mt19937_64& r) {
              const auto m = Pick(r, 1, 5), k = Pick(r, 1, 6), n = Pick(r, 1, 5);
              return std::vector<Shape>{{m, k}, {k, n}, {n}};
            },
            rng);
  Primitive(t, "sum", [](const auto& x) { return Sum(x[0]); }, one, rng);
  Primitive(t, "mean", [](const auto& x) { return Mean(x[0]); }, one, rng);
  Primitive(t, "sum_axis", [](const auto& x) { return Sum(x[0], x[0].numel() % 3); }, one, rng);
  Primitive(t, "mean_axis", [](const auto& x) { return Mean(x[0], x[0].numel() % 3); }, one,
            rng);
  Primitive(t, "softmax", [](const auto& x) { return Softmax(x[0], x[0].numel() % 2); },
            [](std::mt19937_64& r) { return std::vector<Shape>{{Pick(r, 1, 4), Pick(r, 2, 6)}}; },
            rng);
  Primitive(t, "layer_norm", [](const auto& x) { return LayerNorm(x[0], x[1], x[2]); },
            [](std::mt19937_64& r) {
              const auto n = Pick(r, 2, 8);
              return std::vector<Shape>{{Pick(r, 1, 4), n}, {n}, {n}};
            },
            rng);
  Primitive(t, "reshape",
            [](const auto& x) { return Reshape(x[0], Shape{x[0].numel()}); }, one, rng);
  Primitive(t, "transpose", [](const auto& x) { return Transpose(x[0], 0, 2); }, one, rng);
  Primitive(t, "slice",
            [](const auto& x) {
              const auto n = x[0].dim(1);
              return Slice(x[0], 1, n / 2, n - n / 2);
            },
            one, rng);
  Primitive(t, "concat", [](const auto& x) { return Concat<typename std::decay_t<decltype(x[0])>::value_type>({x[0], x[1]}, 1); },
            [](std::mt19937_64& r) {
              const auto a = Pick(r, 1, 4);
              return std::vector<Shape>{{a, Pick(r, 1, 4)}, {a, Pick(r, 1, 4)}};
            },
            rng);
  // Conv geometry is derived from the shapes, so one generic callable serves
  // every random instance.
  Primitive(t, "conv1d_grouped",
            [](const auto& x) {
              const std::size_t c_in = x[0].dim(1);
              const std::size_t per_group = x[1].dim(1);
              const std::size_t groups = c_in / per_group;
              const std::size_t stride = 1 + x[2].numel() % 2;
              const std::size_t padding = x[1].dim(2) > 1 ? 1 : 0;
              return Conv1dGrouped(x[0], x[1], x[2], Conv1dOptions{stride, padding, groups});
            },
            [](std::mt19937_64& r) {
              const auto g = Pick(r, 1, 3);
              const auto cin = g * Pick(r, 1, 2);
              const auto k = Pick(r, 1, 4);
              // C_out parity picks the stride (see above).
              const auto cout = g * Pick(r, 1, 3);
              return std::vector<Shape>{{Pick(r, 1, 2), cin, k + Pick(r, 2, 6)},
                                        {cout, cin / g, k},
                                        {cout}};
            },
            rng);
  // Spectral normalization with a fixed u vector.
  for (int i = 0; i < kInstances; ++i) {
    const Shape s{Pick(rng, 2, 5), Pick(rng, 1, 3), Pick(rng, 1, 3)};
    std::vector<double> u(s[0]);
    std::normal_distribution<double> normal;
    for (auto& v : u) v = normal(rng);
    auto f = [u](const auto& x) {
      using T = typename std::decay_t<decltype(x[0])>::value_type;
      model::SpectralNormState<T> state{std::vector<T>(u.begin(), u.end()), 1};
      return model::SpectralNormalize(x[0], state, false);
    };
    const oracle::TensorFn<float> ff = f;
    const oracle::TensorFn<double> fd = f;
    t.f32.Update(oracle::CheckGradient<float>(ff, fd, {oracle::RandomTensor<float>(s, rng)}, rng)
                     .relative_error,
                 "spectral_normalize");
    t.f64.Update(
        oracle::CheckGradient<double>(fd, fd, {oracle::RandomTensor<double>(s, rng)}, rng)
            .relative_error,
        "spectral_normalize");
  }
  ++t.cases;
  ComposedLosses(t, rng);

  const double secs = Seconds(start);
  const bool ok = t.f32.value < kTolFloat && t.f64.value < kTolDouble && secs < 120.0;
  return {ok, fmt::format("{} ops x {} instances; float32 worst {:.2e} ({}) tol {:.0e}; "
                          "float64 worst {:.2e} ({}) tol {:.0e}; {:.1f} s (< 120)",
                          t.cases, kInstances, t.f32.value, t.f32.name, kTolFloat, t.f64.value,
                          t.f64.name, kTolDouble, secs)};
}

// ---------------------------------------------------------------------- dsp

Outcome DspOracles() {
  const auto start = Clock::now();
  constexpr double kPi = std::numbers::pi;
  double worst_roundtrip = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = oracle::WhiteNoise(44100, 0.1, dsp::kHighSampleRate, seed);
    const auto y = dsp::Istft(dsp::Stft(x));
    double num = 0.0, den = 0.0;
    for (std::size_t i = dsp::kNumFft; i + dsp::kNumFft < x.size(); ++i) {
      num += (x.samples[i] - y.samples[i]) * (x.samples[i] - y.samples[i]);
      den += x.samples[i] * x.samples[i];
    }
    worst_roundtrip = std::max(worst_roundtrip, std::sqrt(num / den));
  }

  const auto tone = oracle::Sine(1000.0, 1.0, 22050, dsp::kLowSampleRate);
  const auto up = dsp::SincUpsample(tone, 2);
  double sinc_err = 0.0;
  for (std::size_t i = up.size() / 10; i < up.size() - up.size() / 10; ++i) {
    const double ref = std::sin(2.0 * kPi * 1000.0 * static_cast<double>(i) / 44100.0);
    sinc_err = std::max(sinc_err, std::abs(up.samples[i] - ref));
  }

  const auto high = oracle::Sine(15000.0, 1.0, 44100, dsp::kHighSampleRate);
  const auto down = dsp::Downsample(high, 2);
  const std::size_t edge = down.size() / 10;
  double p_in = 0.0, p_out = 0.0;
  for (double s : high.samples) p_in += s * s;
  for (std::size_t i = edge; i < down.size() - edge; ++i) p_out += down.samples[i] * down.samples[i];
  p_in /= static_cast<double>(high.size());
  p_out /= static_cast<double>(down.size() - 2 * edge);
  const double db = 10.0 * std::log10(std::max(p_out, 1e-30) / p_in);

  const double secs = Seconds(start);
  const bool ok = worst_roundtrip < 1e-4 && sinc_err < 1e-3 && db < -40.0 && secs < 60.0;
  return {ok, fmt::format("istft(stft) rel L2 {:.2e} (< 1e-4); 1 kHz sinc max err {:.2e} "
                          "(< 1e-3); 15 kHz after downsample {:.1f} dB (< -40); {:.1f} s",
                          worst_roundtrip, sinc_err, db, secs)};
}

// ---------------------------------------------------------------------- lsd

Outcome LsdOracle() {
  const metrics::LsdConfig config;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto x = oracle::WhiteNoise(6000 + 997 * i, 0.2, dsp::kHighSampleRate, 2 * i);
    auto y = oracle::WhiteNoise(6000 + 997 * i, 0.2, dsp::kHighSampleRate, 2 * i + 1);
    for (std::size_t k = 0; k < y.size(); ++k) y.samples[k] = 0.5 * y.samples[k] + x.samples[k];
    const double fast = metrics::Lsd(x, y, config);
    const double slow = oracle::DirectLsd(x, y, config.n_fft, config.hop, config.power_floor);
    worst = std::max(worst, std::abs(fast - slow));
  }
  const auto x = oracle::WhiteNoise(20000, 0.1, dsp::kHighSampleRate, 99);
  auto x10 = x;
  for (auto& s : x10.samples) s *= 10.0;
  const double scaled = metrics::Lsd(x, x10, config);
  const double self = metrics::Lsd(x, x, config);
  const bool ok = worst < 1e-9 && std::abs(scaled - 2.0) < 1e-9 && self == 0.0;
  return {ok, fmt::format("max |fast - direct| {:.2e} over 10 pairs (< 1e-9); lsd(x, 10x) = "
                          "{:.12f}; lsd(x, x) = {}",
                          worst, scaled, self)};
}

// ------------------------------------------------------- self-reconstruction

Outcome SelfReconstruction() {
  data::SynthOptions options;
  options.seed = 31;
  options.n_files = 10;
  options.duration_s = 2.0;
  const auto corpus = data::SynthCorpus(options);
  const auto report =
      metrics::EvaluateCorpus(corpus.items, {}, metrics::EvalMode::kOracle, nullptr);
  const double worst =
      *std::max_element(report.lsd_per_file.begin(), report.lsd_per_file.end());
  return {worst < 0.1, fmt::format("true high bins + interpolated phase: LSD mean {:.3f}, "
                                   "max {:.3f} over {} files (< 0.1)",
                                   report.lsd_mean, worst, report.n_files)};
}

// ------------------------------------------------------------ spectral norm

Outcome SpectralNorm() {
  const auto start = Clock::now();
  auto config = cli::PresetConfig("desk");
  config.data.synth_files = 24;
  const auto split = cli::LoadSplit(config);
  const auto dataset = data::BuildDataset(split.train, split.HeldoutPaths());
  training::Trainer trainer(config.model, config.train);
  training::BatchSampler sampler(dataset, config.train.batch_size, config.train.batch_frames,
                                 config.train.seed);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  std::string lo_name, hi_name;
  std::size_t checks = 0;
  auto measure = [&](int step) {
    auto& ensemble = trainer.discriminators();
    for (std::size_t m = 0; m < ensemble.size(); ++m) {
      for (auto& s : ensemble[m].SpectralStates()) {
        // The weight exactly as the next discriminator forward normalizes it:
        // power iteration on a copy of the state, then division by sigma_hat.
        auto state = *s.state;
        Tensor<float> normalized;
        {
          NoGradGuard no_grad;
          normalized = model::SpectralNormalize(s.weight, state, true);
        }
        const auto w = normalized.data();
        const double sigma =
            oracle::LargestSingularValue(std::vector<double>(w.begin(), w.end()), s.weight.dim(0));
        const std::string where = fmt::format("d{}/{} at step {}", m, s.name, step);
        if (sigma < lo) lo = sigma, lo_name = where;
        if (sigma > hi) hi = sigma, hi_name = where;
        ++checks;
      }
    }
  };
  constexpr int kSteps = 500;
  measure(0);
  for (int step = 1; step <= kSteps; ++step) {
    trainer.TrainStep(sampler.Next());
    measure(step);
  }
  const bool ok = lo >= 0.9 && hi <= 1.1;
  return {ok, fmt::format("{} steps, {} weight checks: dense sigma(W / sigma_hat) in "
                          "[{:.4f} ({}), {:.4f} ({})], bound [0.9, 1.1]; {:.0f} s",
                          kSteps, checks, lo, lo_name, hi, hi_name, Seconds(start))};
}

// ---------------------------------------------------------------- structure

bool GroupIndependent(int groups, std::string& why) {
  model::DiscriminatorConfig config;
  config.channels = 256;
  config.group_counts = {groups};
  model::Discriminator<double> d(config, groups, 17);
  std::mt19937_64 rng(static_cast<std::uint64_t>(groups));
  constexpr std::size_t kFrames = 32;
  const auto x = oracle::RandomTensor<double>({1, 256, kFrames}, rng, false, false);
  const auto base = d.ForwardHidden(x, false);
  const std::size_t width = 256 / static_cast<std::size_t>(groups);
  // Perturb the first, a middle, and the last group in turn.
  for (std::size_t j : {std::size_t{0}, static_cast<std::size_t>(groups) / 2,
                        static_cast<std::size_t>(groups) - 1}) {
    std::vector<double> y(x.data().begin(), x.data().end());
    for (std::size_t c = j * width; c < (j + 1) * width; ++c) {
      for (std::size_t t = 0; t < kFrames; ++t) y[c * kFrames + t] += 0.3;
    }
    const auto moved = d.ForwardHidden(Tensor<double>(x.shape(), y), false);
    for (std::size_t l = 0; l < base.features.size(); ++l) {
      const auto& a = base.features[l];
      const auto& b = moved.features[l];
      const std::size_t frames = a.dim(2);
      bool changed = false;
      for (std::size_t c = 0; c < 256; ++c) {
        for (std::size_t t = 0; t < frames; ++t) {
          const bool same = a.data()[c * frames + t] == b.data()[c * frames + t];
          if (c / width == j) {
            changed |= !same;
          } else if (!same) {
            why = fmt::format("groups {} layer {}: group {} leaked into channel {}", groups, l,
                              j, c);
            return false;
          }
        }
      }
      if (!changed) {
        why = fmt::format("groups {} layer {}: perturbed group {} had no effect", groups, l, j);
        return false;
      }
    }
  }
  return true;
}

Outcome Structural() {
  std::vector<std::string> failures;
  // Hinge at the margins.
  {
    using F = Tensor<float>;
    const std::vector<F> real{F::Full({2, 1, 5}, 1.0f), F::Full({2, 1, 3}, 1.0f)};
    const std::vector<F> fake{F::Full({2, 1, 5}, -1.0f), F::Full({2, 1, 3}, -1.0f)};
    const float h = training::HingeDLoss(real, fake).item();
    if (h != 0.0f) failures.push_back(fmt::format("hinge at margins = {}", h));
    const std::vector<F> inside{F::Full({2, 1, 5}, 0.5f)};
    const float h2 = training::HingeDLoss(inside, std::vector<F>{F::Full({2, 1, 5}, -0.5f)}).item();
    if (std::abs(h2 - 1.0f) > 1e-6f) failures.push_back(fmt::format("hinge inside = {}", h2));
  }
  // Feature matching ignores the logits layer: shifting only the logits
  // weights leaves the loss bit-identical while the logits move.
  {
    model::DiscriminatorConfig config;
    config.channels = 32;
    config.group_counts = {1, 4, 16};
    model::DiscriminatorEnsemble<float> d(config, 8);
    std::mt19937_64 rng(8);
    const auto real = oracle::RandomTensor<float>({1, 32, 513}, rng, false, false);
    const auto fake = oracle::RandomTensor<float>({1, 32, 513}, rng, false, false);
    auto eval = [&] {
      NoGradGuard no_grad;
      const auto r = d.Forward(real, false);
      const auto f = d.Forward(fake, false);
      std::vector<std::vector<Tensor<float>>> rf, ff;
      std::vector<float> logits;
      for (std::size_t i = 0; i < r.size(); ++i) {
        rf.push_back(r[i].features);
        ff.push_back(f[i].features);
        logits.insert(logits.end(), f[i].logits.data().begin(), f[i].logits.data().end());
      }
      return std::make_pair(training::FeatureMatchingLoss(rf, ff).item(), logits);
    };
    const auto before = eval();
    std::size_t touched = 0;
    for (auto& p : d.Parameters()) {
      if (p.name.find("logits/") == std::string::npos) continue;
      for (auto& v : p.tensor.mutable_data()) v += 0.5f;
      ++touched;
    }
    const auto after = eval();
    if (touched == 0) failures.push_back("no logits parameters found");
    if (before.first != after.first) failures.push_back("feature matching depends on logits layer");
    if (before.second == after.second) failures.push_back("logits did not move");
  }
  for (int g : {4, 16, 64, 256}) {
    std::string why;
    if (!GroupIndependent(g, why)) failures.push_back(why);
  }
  std::string detail = "hinge(real=1, fake=-1) = 0; feature matching excludes logits; group "
                       "independence at {4, 16, 64, 256} with 256 channels";
  if (!failures.empty()) {
    detail.clear();
    for (const auto& f : failures) detail += (detail.empty() ? "" : "; ") + f;
  }
  return {failures.empty(), detail};
}

// ------------------------------------------------------------ desk learning

Outcome DeskLearning() {
  const auto start = Clock::now();
  auto config = cli::PresetConfig("desk");
  const auto split = cli::LoadSplit(config);
  if (split.train.size() < 50 || split.heldout.size() < 10) {
    return {false, fmt::format("corpus split {}/{} is below 50/10", split.train.size(),
                               split.heldout.size())};
  }
  const auto dataset = data::BuildDataset(split.train, split.HeldoutPaths());
  training::LoopOptions loop;
  loop.run_dir = (g_work / "desk").string();
  fs::remove_all(loop.run_dir);
  const auto ckpt = training::TrainLoop(dataset, config.model, config.train, loop);
  const double train_secs = Seconds(start);

  const auto generator = training::LoadGenerator(model::Checkpoint::Load(ckpt));
  const inference::Upsampler upsampler(&generator);
  const auto train_paths = split.TrainPaths();
  const auto base = metrics::EvaluateCorpus(split.heldout, train_paths,
                                            metrics::EvalMode::kBaseline, nullptr, config.lsd);
  const auto model = metrics::EvaluateCorpus(split.heldout, train_paths,
                                             metrics::EvalMode::kModel, &upsampler, config.lsd);
  g_desk = {true, model.lsd_mean, model.lsd_std, base.lsd_mean, base.lsd_std};
  const double improvement = 1.0 - model.lsd_mean / base.lsd_mean;
  const bool ok = model.lsd_mean < base.lsd_mean && improvement >= 0.15;
  return {ok, fmt::format("{} train / {} held-out, {} steps in {:.0f} s: model LSD {:.3f} +- "
                          "{:.3f}, sinc baseline {:.3f} +- {:.3f}, improvement {:.1f}% (>= 15%)",
                          split.train.size(), split.heldout.size(), config.train.max_steps,
                          train_secs, model.lsd_mean, model.lsd_std, base.lsd_mean, base.lsd_std,
                          100.0 * improvement)};
}

// ---------------------------------------------------------- overfit a batch

double HighBinLsd(const Tensor<float>& predicted, const Tensor<float>& truth) {
  const std::vector<double> a(predicted.data().begin(), predicted.data().end());
  const std::vector<double> b(truth.data().begin(), truth.data().end());
  return oracle::LogMagnitudeLsd(a, b, dsp::kHighBins);
}

Outcome SingleBatchOverfit() {
  const auto start = Clock::now();
  auto config = cli::PresetConfig("desk");
  config.data.synth_files = 8;
  config.train.batch_size = 2;
  const auto split = cli::LoadSplit(config);
  const auto dataset = data::BuildDataset(split.train, split.HeldoutPaths());
  training::BatchSampler sampler(dataset, config.train.batch_size, config.train.batch_frames,
                                 config.train.seed);
  const auto batch = sampler.Next();
  training::Trainer trainer(config.model, config.train);
  const double initial = HighBinLsd(trainer.Predict(batch.low), batch.high);
  constexpr int kSteps = 2000;
  for (int i = 0; i < kSteps; ++i) trainer.TrainStep(batch);
  const double final_lsd = HighBinLsd(trainer.Predict(batch.low), batch.high);
  const double ratio = final_lsd / initial;
  return {ratio < 0.5, fmt::format("batch {}x{}: high-bin LSD {:.3f} -> {:.3f} after {} steps "
                                   "({:.1f}% of initial, < 50%); {:.0f} s",
                                   config.train.batch_size, config.train.batch_frames, initial,
                                   final_lsd, kSteps, 100.0 * ratio, Seconds(start))};
}

// ------------------------------------------------------------- determinism

std::vector<std::string> LossColumns(const fs::path& log) {
  std::ifstream in(log);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(line.substr(0, line.rfind('\t')));
  return out;
}

std::string Bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome DeterminismAndResume() {
  auto config = cli::PresetConfig("desk");
  config.data.synth_files = 12;
  config.train.batch_size = 2;
  config.train.batch_frames = 32;
  config.train.max_steps = 30;
  config.train.checkpoint_interval = 10;
  config.train.seed = 123;
  const auto split = cli::LoadSplit(config);
  const auto dataset = data::BuildDataset(split.train, split.HeldoutPaths());
  auto run = [&](const std::string& name, std::optional<std::string> resume) {
    training::LoopOptions loop;
    loop.run_dir = (g_work / name).string();
    if (!resume) fs::remove_all(loop.run_dir);
    loop.resume_from = resume;
    return training::TrainLoop(dataset, config.model, config.train, loop);
  };
  const auto a = run("det_a", std::nullopt);
  const auto b = run("det_b", std::nullopt);
  // Resume a copy of run a from its step-10 checkpoint.
  fs::remove_all(g_work / "det_c");
  fs::create_directories(g_work / "det_c");
  const auto mid = (g_work / "det_c" / training::CheckpointName(10)).string();
  fs::copy_file(g_work / "det_a" / training::CheckpointName(10), mid);
  fs::copy_file(g_work / "det_a" / "loss.log", g_work / "det_c" / "loss.log");
  const auto c = run("det_c", mid);

  const auto la = LossColumns(g_work / "det_a" / "loss.log");
  const auto lb = LossColumns(g_work / "det_b" / "loss.log");
  const auto lc = LossColumns(g_work / "det_c" / "loss.log");
  std::vector<std::string> failures;
  if (la.size() != 30) failures.push_back(fmt::format("run a logged {} lines", la.size()));
  if (la != lb) failures.push_back("two runs with the same seed logged different losses");
  if (la != lc) failures.push_back("resumed run diverged from the uninterrupted run");
  if (Bytes(a) != Bytes(b)) failures.push_back("final checkpoints of identical runs differ");
  if (Bytes(a) != Bytes(c)) failures.push_back("final checkpoint after resume differs");
  std::string detail = fmt::format(
      "seed {}: two runs give identical {}-line loss logs and checkpoints; resume from step 10 "
      "reproduces steps 11-30 and the final checkpoint bit-exactly",
      config.train.seed, la.size());
  if (!failures.empty()) {
    detail.clear();
    for (const auto& f : failures) detail += (detail.empty() ? "" : "; ") + f;
  }
  return {failures.empty(), detail};
}

// ---------------------------------------------------------- reference targets

Outcome ReferenceTargets() {
  std::string measured = "desk run not executed";
  if (g_desk.measured) {
    measured = fmt::format("measured at desk scale on the synthetic corpus: model {:.3f} +- "
                           "{:.3f}, sinc baseline {:.3f} +- {:.3f}",
                           g_desk.model_lsd, g_desk.model_std, g_desk.baseline_lsd,
                           g_desk.baseline_std);
  }
  return {g_desk.measured,
          "reference targets only, not reproduced (private 20-hour corpus, human raters, full "
          "training): LSD baseline 2.53 +- 0.34 / 1.82 +- 0.31, model 1.43 +- 0.10 / 1.26 +- "
          "0.11; ABX 57.4% / 60.8%. Substituted by the other criteria; " +
              measured};
}

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace nugan::acceptance

int main(int argc, char** argv) {
  using namespace nugan::acceptance;
  std::set<std::string> only;
  g_work = fs::temp_directory_path() / "nugan_acceptance";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      for (std::string item; std::getline(list, item, ',');) only.insert(item);
    } else if (arg == "--work-dir" && i + 1 < argc) {
      g_work = argv[++i];
    } else {
      std::cerr << "usage: " << argv[0] << " [--only name[,name...]] [--work-dir DIR]\n";
      return 2;
    }
  }
  fs::create_directories(g_work);

  // Desk learning runs before the reference-target line, which reports its numbers.
  const std::vector<Criterion> criteria{
      {"gradient_correctness", GradientCorrectness},
      {"dsp_oracles", DspOracles},
      {"lsd_oracle", LsdOracle},
      {"self_reconstruction", SelfReconstruction},
      {"spectral_norm", SpectralNorm},
      {"structural_gan", Structural},
      {"desk_learning", DeskLearning},
      {"single_batch_overfit", SingleBatchOverfit},
      {"determinism_resume", DeterminismAndResume},
      {"reference_targets", ReferenceTargets},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.name)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.passed ? 0 : 1;
    std::cout << (o.passed ? "PASS " : "FAIL ") << c.name << ": " << o.detail << std::endl;
  }
  return std::min(failed, 125);
}
