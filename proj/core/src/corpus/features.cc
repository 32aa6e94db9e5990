// Copyright 2026 The polyloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "polyloop/corpus/features.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <numbers>

namespace polyloop::corpus {
namespace {

double HzToMel(double hz) {
  constexpr double kLinearStep = 200.0 / 3.0;
  constexpr double kBreakHz = 1000.0;
  const double log_step = std::log(6.4) / 27.0;
  if (hz < kBreakHz) return hz / kLinearStep;
  return kBreakHz / kLinearStep + std::log(hz / kBreakHz) / log_step;
}

double MelToHz(double mel) {
  constexpr double kLinearStep = 200.0 / 3.0;
  constexpr double kBreakHz = 1000.0;
  const double log_step = std::log(6.4) / 27.0;
  const double break_mel = kBreakHz / kLinearStep;
  if (mel < break_mel) return mel * kLinearStep;
  return kBreakHz * std::exp(log_step * (mel - break_mel));
}

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};

std::uint32_t ReadU32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t ReadU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

std::vector<double> SlaneyMelFilterbank(const MelFeatureConfig& cfg) {
  const std::size_t n_freqs = cfg.n_fft / 2 + 1;
  std::vector<double> fb(cfg.mel_bins * n_freqs, 0.0);
  const double lo = HzToMel(cfg.fmin), hi = HzToMel(cfg.fmax);
  std::vector<double> hz(cfg.mel_bins + 2);
  for (std::size_t i = 0; i < hz.size(); ++i) {
    hz[i] = MelToHz(lo + (hi - lo) * static_cast<double>(i) /
                             static_cast<double>(cfg.mel_bins + 1));
  }
  for (std::size_t m = 0; m < cfg.mel_bins; ++m) {
    const double left = hz[m], centre = hz[m + 1], right = hz[m + 2];
    const double norm = 2.0 / (right - left);
    for (std::size_t k = 0; k < n_freqs; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate /
                       static_cast<double>(cfg.n_fft);
      const double up = (f - left) / (centre - left);
      const double down = (right - f) / (right - centre);
      fb[m * n_freqs + k] = norm * std::max(0.0, std::min(up, down));
    }
  }
  return fb;
}

MelSpectrogram ComputeLogMel(std::span<const float> samples,
                             const MelFeatureConfig& cfg) {
  if (cfg.n_fft < 2 || cfg.hop == 0 || cfg.mel_bins == 0 ||
      cfg.fmax <= cfg.fmin || cfg.fmax > cfg.sample_rate / 2.0 + 1e-9) {
    throw ValidationError("invalid mel feature configuration");
  }
  const std::size_t n = samples.size();
  if (n == 0) return MelSpectrogram(0, cfg.mel_bins);
  const std::size_t pad = cfg.n_fft / 2;
  // Reflect padding; zero where the signal is too short to reflect.
  auto sample_at = [&](std::ptrdiff_t i) -> double {
    const auto len = static_cast<std::ptrdiff_t>(n);
    if (i < 0) i = -i;
    if (i >= len) i = 2 * (len - 1) - i;
    if (i < 0 || i >= len) return 0.0;
    return samples[static_cast<std::size_t>(i)];
  };
  const std::size_t frames = 1 + n / cfg.hop;
  const std::size_t n_freqs = cfg.n_fft / 2 + 1;
  const auto fb = SlaneyMelFilterbank(cfg);

  std::vector<double> window(cfg.n_fft);
  for (std::size_t i = 0; i < cfg.n_fft; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i /
                                     static_cast<double>(cfg.n_fft));
  }
  double* in = fftw_alloc_real(cfg.n_fft);
  fftw_complex* out = fftw_alloc_complex(n_freqs);
  std::unique_ptr<fftw_plan_s, FftwPlanDeleter> plan(fftw_plan_dft_r2c_1d(
      static_cast<int>(cfg.n_fft), in, out, FFTW_ESTIMATE));

  MelSpectrogram mel(frames, cfg.mel_bins);
  std::vector<double> mag(n_freqs);
  for (std::size_t f = 0; f < frames; ++f) {
    const auto start = static_cast<std::ptrdiff_t>(f * cfg.hop) -
                       static_cast<std::ptrdiff_t>(pad);
    for (std::size_t i = 0; i < cfg.n_fft; ++i) {
      in[i] = window[i] * sample_at(start + static_cast<std::ptrdiff_t>(i));
    }
    fftw_execute(plan.get());
    for (std::size_t k = 0; k < n_freqs; ++k) {
      mag[k] = std::hypot(out[k][0], out[k][1]);
    }
    for (std::size_t m = 0; m < cfg.mel_bins; ++m) {
      double acc = 0.0;
      const double* row = &fb[m * n_freqs];
      for (std::size_t k = 0; k < n_freqs; ++k) acc += row[k] * mag[k];
      mel.at(f, m) = static_cast<float>(std::log(std::max(acc, cfg.log_floor)));
    }
  }
  plan.reset();
  fftw_free(in);
  fftw_free(out);
  return mel;
}

WavAudio ReadWav(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open wav " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(file)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw IoError(path + ": not a RIFF/WAVE file");
  }
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t len = ReadU32(chunk + 4);
    if (pos + 8 + len > bytes.size()) break;
    if (std::memcmp(chunk, "fmt ", 4) == 0 && len >= 16) {
      format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = ReadU32(chunk + 12);
      bits = ReadU16(chunk + 22);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_len = len;
    }
    pos += 8 + len + (len & 1);
  }
  if (!data || channels == 0) throw IoError(path + ": missing fmt or data chunk");
  const bool pcm16 = format == 1 && bits == 16;
  const bool f32 = format == 3 && bits == 32;
  if (!pcm16 && !f32) {
    throw IoError(path + ": only 16-bit PCM and 32-bit float are supported");
  }
  const std::size_t width = bits / 8;
  const std::size_t frames = data_len / (width * channels);
  WavAudio audio;
  audio.sample_rate = static_cast<int>(rate);
  audio.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0;
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + (i * channels + c) * width;
      if (pcm16) {
        acc += static_cast<std::int16_t>(ReadU16(p)) / 32768.0;
      } else {
        const std::uint32_t u = ReadU32(p);
        float v;
        std::memcpy(&v, &u, 4);
        acc += v;
      }
    }
    audio.samples[i] = static_cast<float>(acc / channels);
  }
  return audio;
}

void WriteWav(const std::string& path, const WavAudio& audio) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write wav " + path);
  auto u32 = [&](std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v),
                                static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
  };
  auto u16 = [&](std::uint16_t v) {
    const unsigned char b[2] = {static_cast<unsigned char>(v),
                                static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
  };
  const auto data_len = static_cast<std::uint32_t>(audio.samples.size() * 2);
  out.write("RIFF", 4);
  u32(36 + data_len);
  out.write("WAVEfmt ", 8);
  u32(16);
  u16(1);
  u16(1);
  u32(static_cast<std::uint32_t>(audio.sample_rate));
  u32(static_cast<std::uint32_t>(audio.sample_rate) * 2);
  u16(2);
  u16(16);
  out.write("data", 4);
  u32(data_len);
  for (float s : audio.samples) {
    const float c = std::clamp(s, -1.0f, 1.0f);
    u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(c * 32767.0f))));
  }
}

}  // namespace polyloop::corpus
