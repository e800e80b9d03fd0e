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

#include "nugan/cli/selfcheck.h"

#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "nugan/dsp/resample.h"
#include "nugan/dsp/stft.h"
#include "nugan/metrics.h"
#include "nugan/model/discriminator.h"
#include "nugan/model/generator.h"
#include "nugan/model/spectral_norm.h"
#include "nugan/ops.h"
#include "nugan/training/losses.h"

namespace nugan::cli {
namespace {

using D = Tensor<double>;
using Fn = std::function<D(const std::vector<D>&)>;
constexpr double kPi = std::numbers::pi;

// Values in +-[0.2, 1.5] keep inputs clear of the kinks of abs/relu/max.
D RandomTensor(Shape shape, std::mt19937_64& rng, bool positive = false) {
  std::uniform_real_distribution<double> mag(0.2, 1.5);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> v(NumElements(shape));
  for (auto& x : v) x = (positive || sign(rng)) ? mag(rng) : -mag(rng);
  return D(std::move(shape), std::move(v), true);
}

double Contract(const D& out, const std::vector<double>& r) {
  const auto v = out.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += v[i] * r[i];
  return acc;
}

// Max |analytic - central difference| over max |central difference| for the
// scalar sum(f(inputs) * R), R random. At most `max_coords` coordinates per
// input are probed.
double GradError(const Fn& f, std::vector<D> inputs, std::mt19937_64& rng,
                 std::size_t max_coords = 64) {
  constexpr double kEps = 1e-6;
  Tape<double>::Current().Clear();
  for (auto& x : inputs) x.zero_grad();
  const D out = f(inputs);
  std::normal_distribution<double> normal;
  std::vector<double> r(out.numel());
  for (auto& x : r) x = normal(rng);
  Backward(Sum(Mul(out, D(out.shape(), r))));

  NoGradGuard no_grad;
  double max_diff = 0.0;
  double max_ref = 0.0;
  for (auto& x : inputs) {
    if (!x.requires_grad()) continue;
    const std::size_t n = x.numel();
    std::vector<std::size_t> coords;
    if (n <= max_coords) {
      for (std::size_t i = 0; i < n; ++i) coords.push_back(i);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (std::size_t i = 0; i < max_coords; ++i) coords.push_back(pick(rng));
    }
    for (auto c : coords) {
      auto data = x.mutable_data();
      const double orig = data[c];
      data[c] = orig + kEps;
      const double up = Contract(f(inputs), r);
      data[c] = orig - kEps;
      const double down = Contract(f(inputs), r);
      data[c] = orig;
      const double numeric = (up - down) / (2.0 * kEps);
      const double analytic = x.has_grad() ? x.grad()[c] : 0.0;
      max_diff = std::max(max_diff, std::abs(analytic - numeric));
      max_ref = std::max(max_ref, std::abs(numeric));
    }
  }
  return max_diff / std::max(max_ref, 1e-12);
}

SuiteResult GradCheckSuite() {
  constexpr double kTol = 1e-6;
  std::mt19937_64 rng(11);
  std::vector<std::pair<std::string, std::function<double()>>> cases;
  auto add = [&](const std::string& name, Fn f, std::function<std::vector<D>()> make) {
    cases.emplace_back(name, [&rng, f, make] { return GradError(f, make(), rng); });
  };
  auto r = [&rng](Shape s) { return RandomTensor(std::move(s), rng); };
  auto rp = [&rng](Shape s) { return RandomTensor(std::move(s), rng, true); };

  add("add", [](auto& x) { return Add(x[0], x[1]); }, [&] { return std::vector{r({3, 4}), r({3, 4})}; });
  add("sub", [](auto& x) { return Sub(x[0], x[1]); }, [&] { return std::vector{r({5}), r({1})}; });
  add("mul", [](auto& x) { return Mul(x[0], x[1]); }, [&] { return std::vector{r({3, 4}), r({3, 4})}; });
  add("div", [](auto& x) { return Div(x[0], x[1]); }, [&] { return std::vector{r({6}), r({6})}; });
  add("exp", [](auto& x) { return Exp(x[0]); }, [&] { return std::vector{r({7})}; });
  add("log", [](auto& x) { return Log(x[0]); }, [&] { return std::vector{rp({7})}; });
  add("abs", [](auto& x) { return Abs(x[0]); }, [&] { return std::vector{r({7})}; });
  add("relu", [](auto& x) { return Relu(x[0]); }, [&] { return std::vector{r({7})}; });
  add("leaky_relu", [](auto& x) { return LeakyRelu(x[0]); }, [&] { return std::vector{r({7})}; });
  add("gelu", [](auto& x) { return Gelu(x[0]); }, [&] { return std::vector{r({7})}; });
  add("matmul", [](auto& x) { return MatMul(x[0], x[1]); }, [&] { return std::vector{r({3, 5}), r({5, 2})}; });
  add("linear", [](auto& x) { return Linear(x[0], x[1], x[2]); },
      [&] { return std::vector{r({4, 3}), r({3, 5}), r({5})}; });
  add("mean_axis", [](auto& x) { return Mean(x[0], 1); }, [&] { return std::vector{r({2, 3, 4})}; });
  add("softmax", [](auto& x) { return Softmax(x[0], 1); }, [&] { return std::vector{r({3, 5})}; });
  add("layer_norm", [](auto& x) { return LayerNorm(x[0], x[1], x[2]); },
      [&] { return std::vector{r({3, 6}), r({6}), r({6})}; });
  add("transpose", [](auto& x) { return Transpose(x[0], 0, 2); }, [&] { return std::vector{r({2, 3, 4})}; });
  add("slice_concat",
      [](auto& x) { return Concat<double>({Slice(x[0], 1, 1, 2), x[1]}, 1); },
      [&] { return std::vector{r({2, 4}), r({2, 3})}; });
  add("conv1d_grouped",
      [](auto& x) { return Conv1dGrouped(x[0], x[1], x[2], Conv1dOptions{2, 1, 2}); },
      [&] { return std::vector{r({2, 4, 9}), r({6, 2, 4}), r({6})}; });

  // Composed losses at toy widths.
  model::GeneratorConfig gc;
  gc.n_layers = 1;
  gc.d_model = 8;
  gc.n_heads = 2;
  gc.d_ff = 16;
  gc.max_frames = 16;
  model::DiscriminatorConfig dc;
  dc.channels = 4;
  dc.group_counts = {1, 2};
  dc.n_layers = 1;
  model::Generator<double> gen(gc, 5);
  model::DiscriminatorEnsemble<double> disc(dc, 6);
  const D low = RandomTensor({1, 4, 257}, rng);
  const D high = RandomTensor({1, 4, 256}, rng);
  auto params_of = [](const ParameterList<double>& ps) {
    std::vector<D> out;
    for (const auto& p : ps) out.push_back(p.tensor);
    return out;
  };
  cases.emplace_back("generator_loss", [&] {
    auto d_params = disc.Parameters();
    SetRequiresGrad(d_params, false);
    const auto real = disc.Forward(Concat<double>({low.detach(), high.detach()}, 2), false);
    Fn f = [&](const std::vector<D>&) {
      const auto fake = disc.Forward(Concat<double>({low.detach(), gen.Forward(low.detach())}, 2), false);
      std::vector<D> logits;
      std::vector<std::vector<D>> rf, ff;
      for (std::size_t i = 0; i < fake.size(); ++i) {
        logits.push_back(fake[i].logits);
        rf.push_back(real[i].features);
        ff.push_back(fake[i].features);
      }
      return Add(training::HingeGLoss(logits),
                 Scale(training::FeatureMatchingLoss(rf, ff), 10.0));
    };
    const double err = GradError(f, params_of(gen.Parameters()), rng, 6);
    SetRequiresGrad(d_params, true);
    return err;
  });
  cases.emplace_back("discriminator_loss", [&] {
    auto g_params = gen.Parameters();
    SetRequiresGrad(g_params, false);
    Fn f = [&](const std::vector<D>&) {
      const auto real = disc.Forward(Concat<double>({low.detach(), high.detach()}, 2), false);
      const auto fake = disc.Forward(Concat<double>({low.detach(), gen.Forward(low.detach())}, 2), false);
      std::vector<D> rl, fl;
      for (std::size_t i = 0; i < real.size(); ++i) {
        rl.push_back(real[i].logits);
        fl.push_back(fake[i].logits);
      }
      return training::HingeDLoss(rl, fl);
    };
    const double err = GradError(f, params_of(disc.Parameters()), rng, 6);
    SetRequiresGrad(g_params, true);
    return err;
  });

  double worst = 0.0;
  std::string worst_name;
  for (auto& [name, run] : cases) {
    const double err = run();
    if (std::isnan(err) || err > worst) {
      worst = std::isnan(err) ? std::numeric_limits<double>::infinity() : err;
      worst_name = name;
    }
  }
  return {"gradcheck", worst < kTol,
          fmt::format("{} cases, worst relative error {:.2e} ({}), tolerance {:.0e}",
                      cases.size(), worst, worst_name, kTol)};
}

dsp::AudioBuffer Noise(std::size_t n, int rate, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.1);
  dsp::AudioBuffer a{std::vector<double>(n), rate};
  for (auto& s : a.samples) s = normal(rng);
  return a;
}

SuiteResult StftSuite() {
  const auto x = Noise(22050, dsp::kHighSampleRate, 3);
  const auto y = dsp::Istft(dsp::Stft(x));
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = dsp::kNumFft; i + dsp::kNumFft < x.size(); ++i) {
    num += (x.samples[i] - y.samples[i]) * (x.samples[i] - y.samples[i]);
    den += x.samples[i] * x.samples[i];
  }
  const double err = std::sqrt(num / den);
  return {"stft", err < 1e-4, fmt::format("round-trip relative L2 {:.2e} (< 1e-4)", err)};
}

SuiteResult SincSuite() {
  dsp::AudioBuffer tone{std::vector<double>(22050), dsp::kLowSampleRate};
  for (std::size_t i = 0; i < tone.size(); ++i) {
    tone.samples[i] = std::sin(2.0 * kPi * 1000.0 * static_cast<double>(i) / 22050.0);
  }
  const auto up = dsp::SincUpsample(tone, 2);
  double max_err = 0.0;
  const std::size_t n = up.size();
  for (std::size_t i = n / 10; i < n - n / 10; ++i) {
    const double ref = std::sin(2.0 * kPi * 1000.0 * static_cast<double>(i) / 44100.0);
    max_err = std::max(max_err, std::abs(up.samples[i] - ref));
  }
  dsp::AudioBuffer high{std::vector<double>(44100), dsp::kHighSampleRate};
  for (std::size_t i = 0; i < high.size(); ++i) {
    high.samples[i] = std::sin(2.0 * kPi * 15000.0 * static_cast<double>(i) / 44100.0);
  }
  const auto down = dsp::Downsample(high, 2);
  double p_in = 0.0;
  double p_out = 0.0;
  for (double s : high.samples) p_in += s * s;
  for (std::size_t i = down.size() / 10; i < down.size() - down.size() / 10; ++i) {
    p_out += down.samples[i] * down.samples[i];
  }
  p_in /= static_cast<double>(high.size());
  p_out /= static_cast<double>(down.size() - 2 * (down.size() / 10));
  const double db = 10.0 * std::log10(std::max(p_out, 1e-30) / p_in);
  return {"sinc", max_err < 1e-3 && db < -40.0,
          fmt::format("1 kHz max error {:.2e} (< 1e-3), 15 kHz after decimation {:.1f} dB (< -40)",
                      max_err, db)};
}

// Direct evaluation of the log-spectral distance: explicit reflect padding,
// Hann window and O(N^2) DFT per frame.
double DirectLsd(const dsp::AudioBuffer& x, const dsp::AudioBuffer& y, int n_fft, int hop,
                 double floor) {
  const auto len = static_cast<long>(x.size());
  const long frames = 1 + len / hop;
  const int bins = n_fft / 2 + 1;
  auto sample = [len](const dsp::AudioBuffer& a, long i) {
    if (i < 0) i = -i;
    if (i >= len) i = 2 * (len - 1) - i;
    return a.samples[static_cast<std::size_t>(i)];
  };
  double total = 0.0;
  for (long t = 0; t < frames; ++t) {
    double sq = 0.0;
    for (int k = 0; k < bins; ++k) {
      std::complex<double> X, Y;
      for (int m = 0; m < n_fft; ++m) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * m / n_fft);
        const auto e = std::polar(1.0, -2.0 * kPi * k * m / n_fft);
        const long i = t * hop + m - n_fft / 2;
        X += w * sample(x, i) * e;
        Y += w * sample(y, i) * e;
      }
      const double d = std::log10(std::max(std::norm(X), floor)) -
                       std::log10(std::max(std::norm(Y), floor));
      sq += d * d;
    }
    total += std::sqrt(sq / bins);
  }
  return total / static_cast<double>(frames);
}

SuiteResult LsdSuite() {
  const metrics::LsdConfig cfg{256, 64};
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto x = Noise(1024, dsp::kHighSampleRate, 100 + s);
    const auto y = Noise(1024, dsp::kHighSampleRate, 200 + s);
    worst = std::max(worst, std::abs(metrics::Lsd(x, y, cfg) -
                                     DirectLsd(x, y, cfg.n_fft, cfg.hop, cfg.power_floor)));
  }
  const auto x = Noise(8192, dsp::kHighSampleRate, 7);
  auto x10 = x;
  for (auto& s : x10.samples) s *= 10.0;
  const double scaled = metrics::Lsd(x, x10);
  const double self = metrics::Lsd(x, x);
  const bool ok = worst < 1e-9 && std::abs(scaled - 2.0) < 1e-9 && self == 0.0;
  return {"lsd", ok,
          fmt::format("direct-vs-fast {:.1e} (< 1e-9), lsd(x,10x) = {:.12f}, lsd(x,x) = {}",
                      worst, scaled, self)};
}

double LargestSingularValue(const D& w) {
  const std::size_t rows = w.dim(0);
  const std::size_t cols = w.numel() / rows;
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = w.data()[r * cols + c];
  }
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

SuiteResult SpectralNormSuite() {
  std::mt19937_64 rng(21);
  NoGradGuard no_grad;
  const D diag(Shape{2, 2}, {3.0, 0.0, 0.0, 1.0});
  auto state = model::InitSpectralNormState(diag, rng, 0);
  D normalized;
  for (int i = 0; i < 20; ++i) normalized = model::SpectralNormalize(diag, state, true);
  const double sigma_diag = LargestSingularValue(normalized);

  std::normal_distribution<double> normal;
  std::vector<double> v(256);
  for (auto& x : v) x = normal(rng);
  const D w(Shape{16, 16}, v);
  auto s2 = model::InitSpectralNormState(w, rng, 0);
  for (int i = 0; i < 50; ++i) normalized = model::SpectralNormalize(w, s2, true);
  const double sigma_rand = LargestSingularValue(normalized);
  const bool ok = sigma_diag >= 0.99 && sigma_diag <= 1.01 && sigma_rand >= 0.95 &&
                  sigma_rand <= 1.05;
  return {"spectral_norm", ok,
          fmt::format("sigma(diag(3,1)/sigma_hat) = {:.4f}, random 16x16 after 50 steps = {:.4f}",
                      sigma_diag, sigma_rand)};
}

SuiteResult GroupSuite() {
  model::DiscriminatorConfig dc;
  dc.channels = 16;
  dc.group_counts = {4};
  dc.n_layers = 2;
  dc.in_bins = 513;
  model::Discriminator<double> disc(dc, 4, 9);
  std::mt19937_64 rng(13);
  NoGradGuard no_grad;
  const std::size_t frames = 16;
  const std::size_t per_group = 4;
  const D base = RandomTensor({1, 16, frames}, rng);
  const auto ref = disc.ForwardHidden(base, false);
  bool ok = true;
  std::size_t checked = 0;
  for (std::size_t g = 0; g < 4; ++g) {
    std::vector<double> v(base.data().begin(), base.data().end());
    for (std::size_t c = g * per_group; c < (g + 1) * per_group; ++c) {
      for (std::size_t t = 0; t < frames; ++t) v[c * frames + t] += 0.5;
    }
    const auto out = disc.ForwardHidden(D(base.shape(), v), false);
    for (std::size_t l = 0; l < out.features.size(); ++l) {
      const auto& a = ref.features[l];
      const auto& b = out.features[l];
      const std::size_t len = a.dim(2);
      bool inside_changed = false;
      for (std::size_t c = 0; c < 16; ++c) {
        const bool inside = c / per_group == g;
        for (std::size_t t = 0; t < len; ++t) {
          const bool same = a.data()[c * len + t] == b.data()[c * len + t];
          if (!inside && !same) ok = false;
          if (inside && !same) inside_changed = true;
        }
      }
      ok = ok && inside_changed;
      ++checked;
    }
  }
  return {"group_independence", ok,
          fmt::format("{} (group, layer) pairs: perturbations stay inside their group", checked)};
}

}  // namespace

std::vector<SuiteResult> RunSelfCheck(const SelfCheckOptions& options) {
  SetBackwardSeedScaleForTesting(options.corrupt_gradient ? 1.5 : 1.0);
  const std::vector<std::pair<std::string, std::function<SuiteResult()>>> suites = {
      {"gradcheck", GradCheckSuite},
      {"stft", StftSuite},
      {"sinc", SincSuite},
      {"lsd", LsdSuite},
      {"spectral_norm", SpectralNormSuite},
      {"group_independence", GroupSuite}};
  std::vector<SuiteResult> results;
  for (const auto& [name, suite] : suites) {
    const auto start = std::chrono::steady_clock::now();
    SuiteResult r;
    try {
      r = suite();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.name = name;
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  SetBackwardSeedScaleForTesting(1.0);
  return results;
}

}  // namespace nugan::cli
