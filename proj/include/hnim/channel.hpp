#pragma once

// Frequency-selective Rayleigh channel, AWGN at a calibrated Eb/N0, and the
// subblock channel covariance.

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hnim/error.hpp"
#include "hnim/modem.hpp"
#include "hnim/rng.hpp"

namespace hnim {

/// Per-tap average powers, normalized to unit total power.
struct PowerDelayProfile {
  std::vector<double> tap_power;

  std::size_t n_taps() const { return tap_power.size(); }

  static PowerDelayProfile uniform(std::size_t n_taps) {
    if (n_taps == 0) throw ConfigError("channel needs at least one tap");
    return {std::vector<double>(n_taps, 1.0 / static_cast<double>(n_taps))};
  }

  /// Tap l has power proportional to exp(-l / decay); decay in taps.
  static PowerDelayProfile exponential(std::size_t n_taps, double decay) {
    if (n_taps == 0) throw ConfigError("channel needs at least one tap");
    if (!(decay > 0)) throw ConfigError("exponential profile decay must be positive");
    std::vector<double> p(n_taps);
    double total = 0;
    for (std::size_t l = 0; l < n_taps; ++l) total += p[l] = std::exp(-static_cast<double>(l) / decay);
    for (auto& v : p) v /= total;
    return {p};
  }
};

struct ChannelRealization {
  std::vector<cd> taps;
  std::vector<cd> freq_response;  // unscaled DFT of the zero-padded taps
  std::vector<double> pdp;

  std::span<const cd> subblock(std::size_t g, std::size_t len) const {
    return std::span(freq_response).subspan(g * len, len);
  }
};

/// Unscaled N-point DFT of the zero-padded taps: H(k) = sum_l h_l e^{-j2pi kl/N}.
inline std::vector<cd> frequency_response(std::span<const cd> taps, std::size_t n_fft) {
  if (taps.size() > n_fft) throw ConfigError("more channel taps than FFT bins");
  std::vector<cd> padded(n_fft, cd{});
  std::copy(taps.begin(), taps.end(), padded.begin());
  auto h = unitary_fft(padded);
  const double s = std::sqrt(static_cast<double>(n_fft));
  for (auto& v : h) v *= s;
  return h;
}

inline ChannelRealization make_channel(std::vector<cd> taps, std::size_t n_fft) {
  ChannelRealization ch;
  ch.freq_response = frequency_response(taps, n_fft);
  ch.pdp.assign(taps.size(), 0.0);
  for (std::size_t l = 0; l < taps.size(); ++l) ch.pdp[l] = std::norm(taps[l]);
  ch.taps = std::move(taps);
  return ch;
}

/// Each tap independently CN(0, pdp[l]).
inline ChannelRealization draw_channel(const PowerDelayProfile& pdp, std::size_t n_fft, Rng& rng) {
  if (pdp.n_taps() == 0) throw ConfigError("channel needs at least one tap");
  std::vector<cd> taps(pdp.n_taps());
  for (std::size_t l = 0; l < taps.size(); ++l) taps[l] = complex_gaussian(rng, pdp.tap_power[l]);
  auto ch = make_channel(std::move(taps), n_fft);
  ch.pdp = pdp.tap_power;
  return ch;
}

/// Noise variances; equal in time and frequency under the unitary transform.
struct NoiseSpec {
  double variance_time = 0.0;
  double variance_freq = 0.0;
  double ebn0_db = std::numeric_limits<double>::infinity();

  bool enabled() const { return variance_time > 0.0; }

  static NoiseSpec from_variance(double variance) {
    if (variance < 0) throw ConfigError("noise variance must be nonnegative");
    return {variance, variance, std::numeric_limits<double>::quiet_NaN()};
  }
  static NoiseSpec none() { return {}; }
};

/// Eb/N0 convention shared by all schemes: unit average power per
/// time-domain sample, so E_b = 1 / SE with SE in bits/s/Hz including the CP,
/// and N_o,T = E_b / 10^(Eb/N0 / 10).
inline NoiseSpec calibrate_noise(double spectral_efficiency, double ebn0_db) {
  if (!(spectral_efficiency > 0)) throw ConfigError("spectral efficiency must be positive");
  if (std::isinf(ebn0_db) && ebn0_db > 0) return NoiseSpec::none();
  const double eb = 1.0 / spectral_efficiency;
  const double n0 = eb / std::pow(10.0, ebn0_db / 10.0);
  return {n0, n0, ebn0_db};
}

/// Linear convolution of the CP-extended block with the taps, truncated to the
/// block length, plus CN(0, N_o,T) noise per sample.
inline TimeBlock apply_channel(const TimeBlock& x, const ChannelRealization& ch, const NoiseSpec& noise, Rng& rng) {
  if (ch.taps.empty()) throw ConfigError("channel has no taps");
  if (x.n_cp + 1 < ch.taps.size())
    throw ConfigError("cyclic prefix shorter than the channel impulse response (n_cp < n_taps - 1)");
  TimeBlock y;
  y.n_cp = x.n_cp;
  y.samples.assign(x.samples.size(), cd{});
  for (std::size_t n = 0; n < x.samples.size(); ++n) {
    cd acc{};
    const std::size_t lmax = std::min(ch.taps.size(), n + 1);
    for (std::size_t l = 0; l < lmax; ++l) acc += ch.taps[l] * x.samples[n - l];
    y.samples[n] = acc;
  }
  if (noise.enabled())
    for (auto& v : y.samples) v += complex_gaussian(rng, noise.variance_time);
  return y;
}

/// K_L = E[h h^H] over L contiguous bins:
/// K(a, b) = sum_l pdp_l e^{-j 2 pi (a - b) l / N_F}.
inline Eigen::MatrixXcd subblock_channel_covariance(const PowerDelayProfile& pdp, std::size_t n_fft, std::size_t L) {
  Eigen::MatrixXcd K(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
  for (std::size_t a = 0; a < L; ++a)
    for (std::size_t b = 0; b < L; ++b) {
      cd acc{};
      const double d = static_cast<double>(static_cast<long>(a) - static_cast<long>(b));
      for (std::size_t l = 0; l < pdp.n_taps(); ++l)
        acc += pdp.tap_power[l] * std::polar(1.0, -2.0 * std::numbers::pi * d * static_cast<double>(l) /
                                                      static_cast<double>(n_fft));
      K(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
    }
  return K;
}

/// Receiver front end output: the unequalized y_F (used by the detectors) and
/// the one-tap zero-forcing output y_eq.
struct FrontEndOutput {
  FrequencyBlock y_f;
  FrequencyBlock y_eq;
};

/// CP removal, unitary FFT and one-tap equalization. Bins with |h| below
/// `floor` are divided by a coefficient of magnitude `floor` and the same
/// phase (phase 0 for an exact zero).
inline FrontEndOutput receive_front_end(const TimeBlock& y, const ChannelRealization& ch, double floor = 1e-12) {
  const auto n = y.samples.size() - y.n_cp;
  if (ch.freq_response.size() != n) throw ConfigError("channel response length differs from the FFT size");
  FrontEndOutput out;
  out.y_f.values = unitary_fft(y.data());
  out.y_eq.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    cd h = ch.freq_response[k];
    const double mag = std::abs(h);
    if (mag < floor) h = mag == 0.0 ? cd{floor, 0.0} : h * (floor / mag);
    out.y_eq.values[k] = out.y_f.values[k] / h;
  }
  return out;
}

}  // namespace hnim
