#pragma once

// Closed-form metrics: spectral efficiency and average rates, the
// determinant-based achievable rate, pairwise error probabilities and the
// union bound on the bit error probability, energy-efficiency ratios, and
// empirical PAPR statistics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hnim/channel.hpp"
#include "hnim/codebook.hpp"
#include "hnim/error.hpp"
#include "hnim/modem.hpp"
#include "hnim/rng.hpp"

namespace hnim {

// ---------------------------------------------------------------------------
// Spectral efficiency

/// log2 of the binomial coefficient, continued to real k through log-gamma.
inline double log2_binomial(double n, double k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return (std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1)) / std::numbers::ln2;
}

/// Bits of one block with the given active counts, using the per-subblock
/// term log2(L) + log2 C(L, I) + I log2(M).
inline double pattern_bits_per_block(std::size_t L, std::size_t M, std::span<const std::size_t> active_counts) {
  double bits = 0;
  for (auto I : active_counts)
    bits += std::log2(static_cast<double>(L)) + log2_binomial(static_cast<double>(L), static_cast<double>(I)) +
            static_cast<double>(I) * std::log2(static_cast<double>(M));
  return bits;
}

/// Hybrid average-rate numerator with I_avg = (L+1)/2, per block.
inline double hnim_average_bits_per_block(std::size_t n_fft, std::size_t L, std::size_t M) {
  const double Lf = static_cast<double>(L);
  const double i_avg = (Lf + 1.0) / 2.0;
  return static_cast<double>(n_fft) / Lf *
         (std::log2(Lf) + log2_binomial(Lf, i_avg) + i_avg * std::log2(static_cast<double>(M)));
}

/// OFDM-SNM average bits per block with I_avg = (L+1)/2.
inline double snm_average_bits_per_block(std::size_t n_fft, std::size_t L, std::size_t M) {
  const double Lf = static_cast<double>(L);
  return static_cast<double>(n_fft) / Lf * (std::log2(Lf) + (Lf + 1.0) / 2.0 * std::log2(static_cast<double>(M)));
}

/// OFDM-IM bits per block with K active of L.
inline double im_bits_per_block(std::size_t n_fft, std::size_t L, std::size_t K, std::size_t M) {
  const double idx = std::floor(log2_binomial(static_cast<double>(L), static_cast<double>(K)) + 1e-12);
  return static_cast<double>(n_fft) / static_cast<double>(L) *
         (idx + static_cast<double>(K) * std::log2(static_cast<double>(M)));
}

inline double ofdm_bits_per_block(std::size_t n_fft, std::size_t M) {
  return static_cast<double>(n_fft) * std::log2(static_cast<double>(M));
}

struct SpectralEfficiency {
  double codebook_bits = 0;  // p1 + p2 + mean(I) log2 M per subblock, times G
  double pattern_bits = 0;   // per-pattern formula over the given pattern sequence
  double average_bits = 0;   // per-pattern formula at I_avg = (L+1)/2
  double ofdm_bits = 0;      // N_F log2 M
  double symbol_len = 0;     // N_F + N_CP

  double codebook_se() const { return codebook_bits / symbol_len; }
  double pattern_se() const { return pattern_bits / symbol_len; }
  double average_se() const { return average_bits / symbol_len; }
  double ofdm_se() const { return ofdm_bits / symbol_len; }
};

/// Bits per block and SE for the hybrid scheme. `realized` lists the active
/// count of each subblock; when empty, every subblock uses the codebook's
/// mean active count (rounded).
inline SpectralEfficiency spectral_efficiency(const FrameConfig& config, const Codebook& codebook,
                                              std::span<const std::size_t> realized = {}) {
  config.validate();
  SpectralEfficiency se;
  const auto bps = static_cast<double>(config.bits_per_symbol());
  se.symbol_len = static_cast<double>(config.n_fft + config.n_cp);
  se.codebook_bits = static_cast<double>(config.n_subblocks) *
                     (static_cast<double>(codebook.label_bits()) + codebook.mean_active_count() * bps);
  std::vector<std::size_t> fallback;
  if (realized.empty()) {
    fallback.assign(config.n_subblocks, static_cast<std::size_t>(std::lround(codebook.mean_active_count())));
    realized = fallback;
  }
  if (realized.size() != config.n_subblocks) throw ConfigError("one active count per subblock is required");
  se.pattern_bits = pattern_bits_per_block(config.subblock_len, config.mod_order, realized);
  se.average_bits = hnim_average_bits_per_block(config.n_fft, config.subblock_len, config.mod_order);
  se.ofdm_bits = ofdm_bits_per_block(config.n_fft, config.mod_order);
  return se;
}

/// Mean information bits per OFDM block for any scheme layout.
inline double scheme_bits_per_block(const SchemeLayout& layout) { return layout.mean_bits_per_block(); }

/// Scheme SE in bits/s/Hz with a CP of `n_cp` samples.
inline double scheme_spectral_efficiency(const SchemeLayout& layout, std::size_t n_cp) {
  return layout.mean_bits_per_block() / static_cast<double>(layout.n_fft + n_cp);
}

/// Hybrid-vs-OFDM average-rate inequality
///   log2 L + log2 C(L, I_avg) + I_avg log2 M >= L log2 M, I_avg = (L+1)/2.
inline double rate_crossover_margin(std::size_t L, std::size_t M) {
  const double Lf = static_cast<double>(L);
  const double i_avg = (Lf + 1.0) / 2.0;
  const double m = std::log2(static_cast<double>(M));
  return std::log2(Lf) + log2_binomial(Lf, i_avg) + i_avg * m - Lf * m;
}

inline bool rate_crossover_check(std::size_t L, std::size_t M) {
  if (!is_power_of_two(L)) throw ConfigError("L must be a power of two");
  return rate_crossover_margin(L, M) >= 0.0;
}

// ---------------------------------------------------------------------------
// Subblock realizations

struct Realization {
  std::size_t entry = 0;
  std::vector<std::size_t> symbols;
  std::vector<cd> x;  // scaled subblock vector, length L
  BitVector bits;     // p1 | p2 | p3
  double prob = 0;    // 2^-(p1+p2) M^-I
};

/// Every (entry, symbol combination) the layout can transmit on one subblock.
inline std::vector<Realization> enumerate_realizations(const SchemeLayout& layout, std::size_t cap = 4096) {
  const auto& cb = layout.codebook;
  const auto M = layout.alphabet.size();
  std::size_t total = 0;
  for (const auto& e : cb.entries()) {
    std::size_t c = 1;
    for (std::size_t i = 0; i < e.active_count; ++i) {
      c *= M;
      if (c > cap) throw ConfigError("realization count exceeds the configured cap");
    }
    total += c;
    if (total > cap) throw ConfigError("realization count exceeds the configured cap");
  }
  std::vector<Realization> out;
  out.reserve(total);
  const double label_p = std::ldexp(1.0, -static_cast<int>(cb.label_bits()));
  for (std::size_t e = 0; e < cb.size(); ++e) {
    const auto& entry = cb[e];
    const double a = subblock_scale(layout.subblock_power, entry.active_count);
    const auto pos = entry.active_positions();
    std::vector<std::size_t> combo(entry.active_count, 0);
    while (true) {
      Realization r;
      r.entry = e;
      r.symbols = combo;
      r.x.assign(cb.subblock_len(), cd{});
      for (std::size_t k = 0; k < pos.size(); ++k) r.x[pos[k]] = a * layout.alphabet[combo[k]];
      r.bits = entry.label();
      for (auto s : combo) {
        auto lbl = layout.alphabet.label(s);
        r.bits.insert(r.bits.end(), lbl.begin(), lbl.end());
      }
      r.prob = label_p * std::pow(static_cast<double>(M), -static_cast<double>(entry.active_count));
      out.push_back(std::move(r));
      std::size_t i = combo.size();
      while (i > 0 && ++combo[i - 1] == M) combo[--i] = 0;
      if (i == 0) break;
    }
  }
  return out;
}

/// Bits of `sent` that are not reproduced by `detected`: label bits are
/// compared position-wise, symbol bits position-wise over the sent length,
/// and sent bits with no detected counterpart count as errors.
inline std::size_t count_bit_errors(std::span<const std::uint8_t> sent, std::span<const std::uint8_t> detected) {
  std::size_t errors = 0;
  for (std::size_t k = 0; k < sent.size(); ++k)
    if (k >= detected.size() || sent[k] != detected[k]) ++errors;
  return errors;
}

namespace detail {

/// Per-bin squared distances between two realizations.
inline std::vector<double> distance_profile(const Realization& a, const Realization& b) {
  std::vector<double> d(a.x.size());
  for (std::size_t l = 0; l < d.size(); ++l) d[l] = std::norm(a.x[l] - b.x[l]);
  return d;
}

/// Eigenvalues of D^{1/2} K D^{1/2} with D = diag(d); det(I + t K D) is
/// prod(1 + t lambda).
inline Eigen::VectorXd weighted_covariance_eigenvalues(const Eigen::MatrixXcd& K, std::span<const double> d) {
  const auto n = static_cast<Eigen::Index>(d.size());
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = std::sqrt(d[static_cast<std::size_t>(i)]);
  Eigen::MatrixXcd A = s.asDiagonal() * K * s.asDiagonal();
  A = (0.5 * (A + A.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = std::max(ev(i), 0.0);
  return ev;
}

inline double det_one_plus(const Eigen::VectorXd& eig, double t) {
  double det = 1.0;
  for (Eigen::Index i = 0; i < eig.size(); ++i) det *= 1.0 + t * eig(i);
  return det;
}

}  // namespace detail

/// det(I_L + K_L U) for U = diag(|x_j - x_w|^2) / (2 N0), computed directly.
inline double rate_determinant(const Eigen::MatrixXcd& K, const Realization& a, const Realization& b, double n0) {
  const auto d = detail::distance_profile(a, b);
  const auto n = K.rows();
  Eigen::MatrixXcd U = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) U(i, i) = d[static_cast<std::size_t>(i)] / (2.0 * n0);
  return (Eigen::MatrixXcd::Identity(n, n) + K * U).determinant().real();
}

/// Determinant-form achievable rate in bits/s/Hz for each frequency-domain
/// noise variance:
///   R = N_F / (L (N_F + N_CP)) * ( - sum_j p_j log2 sum_w p_w / det(I + K_L U_jw) )
/// with U_jw = diag(|x_j - x_w|^2) / (2 N0) and realization probabilities p.
/// Equal probabilities give the uniform 1/2^p form. The high-SNR limit is the
/// codebook SE, the zero-SNR limit is 0.
inline std::vector<double> achievable_rate(const SchemeLayout& layout, const Eigen::MatrixXcd& K,
                                           std::span<const double> noise_var_freq, std::size_t cap = 4096) {
  const auto L = layout.codebook.subblock_len();
  if (static_cast<std::size_t>(K.rows()) != L || K.rows() != K.cols())
    throw ConfigError("covariance must be L x L");
  const auto reals = enumerate_realizations(layout, cap);
  const auto n = reals.size();
  std::vector<Eigen::VectorXd> eig(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t w = j + 1; w < n; ++w)
      eig[j * n + w] = detail::weighted_covariance_eigenvalues(K, detail::distance_profile(reals[j], reals[w]));
  const double scale = static_cast<double>(layout.n_fft) /
                       (static_cast<double>(L) * static_cast<double>(layout.n_fft + layout.n_cp));
  std::vector<double> out;
  for (double n0 : noise_var_freq) {
    if (!(n0 > 0)) throw ConfigError("noise variance must be positive");
    const double t = 1.0 / (2.0 * n0);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double inner = 0.0;
      for (std::size_t w = 0; w < n; ++w) {
        if (w == j) {
          inner += reals[w].prob;
          continue;
        }
        const auto& ev = j < w ? eig[j * n + w] : eig[w * n + j];
        inner += reals[w].prob / detail::det_one_plus(ev, t);
      }
      acc -= reals[j].prob * std::log2(inner);
    }
    out.push_back(scale * acc);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pairwise error probability

inline double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

/// Two-term exponential approximation of Q.
struct QApproximation {
  static constexpr double rho[2] = {1.0 / 12.0, 1.0 / 4.0};
  static constexpr double eta[2] = {1.0 / 2.0, 2.0 / 3.0};
};

/// Q(x) ~ sum_j rho_j exp(-eta_j x^2).
inline double q_approx(double x) {
  double s = 0;
  for (int j = 0; j < 2; ++j) s += QApproximation::rho[j] * std::exp(-QApproximation::eta[j] * x * x);
  return s;
}

struct PepValue {
  double exact = 0;   // Q form
  double approx = 0;  // product-of-exponentials form
};

/// Conditional PEP between two activation patterns given the subblock channel:
///   exact  = Q( sqrt( snr * sum_l R(l) Delta(l) ) )
///   approx = sum_j rho_j prod_l exp(-eta_j snr R(l) Delta(l))
/// with R(l) = |h(l)|^2, Delta(l) = |c(l)/sqrt(I) - c_hat(l)/sqrt(I_hat)|^2 and
/// snr = P_t / N0. An all-zero pattern contributes the zero vector.
inline PepValue conditional_pep(const CodebookEntry& c, const CodebookEntry& c_hat, std::span<const cd> h, double snr) {
  if (c.sap.size() != c_hat.sap.size() || h.size() != c.sap.size())
    throw ConfigError("patterns and channel must share the subblock length");
  if (c.sap == c_hat.sap) throw ConfigError("conditional PEP needs distinct codewords");
  const double a = c.active_count ? 1.0 / std::sqrt(static_cast<double>(c.active_count)) : 0.0;
  const double b = c_hat.active_count ? 1.0 / std::sqrt(static_cast<double>(c_hat.active_count)) : 0.0;
  double s = 0;
  for (std::size_t l = 0; l < h.size(); ++l) {
    const double delta = std::pow(a * c.sap[l] - b * c_hat.sap[l], 2);
    s += std::norm(h[l]) * delta;
  }
  PepValue v;
  v.exact = q_function(std::sqrt(snr * s));
  for (int j = 0; j < 2; ++j) v.approx += QApproximation::rho[j] * std::exp(-QApproximation::eta[j] * snr * s);
  return v;
}

/// How the conditional PEP is averaged over the fading.
enum class ChannelAveraging {
  independent_bins,  // E[exp(-a R)] = 1/(1+a) per bin, bins independent
  covariance,        // correlated Rayleigh with covariance K_L: 1/det(I + a K_L D)
  empirical,         // sample mean over drawn channel realizations
};

struct AbepOptions {
  ChannelAveraging averaging = ChannelAveraging::covariance;
  PowerDelayProfile pdp = PowerDelayProfile::uniform(10);
  std::size_t empirical_draws = 10000;
  std::uint64_t seed = 1;
  bool exact_q = false;  // empirical averaging only: use Q instead of its approximation
  std::size_t cap = 4096;
};

/// Union bound on the bit error probability for each frequency-domain noise
/// variance:
///   P_b <= sum_j p_j sum_{w != j} PEP(x_j -> x_w) e(j, w) / sum_j p_j n_j
/// with PEP from the exponential Q approximation of Q(||h (x_j - x_w)|| /
/// sqrt(2 N0)), e(j, w) = count_bit_errors(bits_j, bits_w) and n_j the bits
/// carried by realization j. The ratio-of-expectations normalization matches
/// a simulated BER of total errors over total bits.
inline std::vector<double> abep_upper_bound(const SchemeLayout& layout, std::span<const double> noise_var_freq,
                                            const AbepOptions& opt = {}) {
  if (opt.exact_q && opt.averaging != ChannelAveraging::empirical)
    throw ConfigError("exact Q averaging is only available with empirical channel averaging");
  const auto reals = enumerate_realizations(layout, opt.cap);
  const auto L = layout.codebook.subblock_len();
  double mean_bits = 0;
  for (const auto& r : reals) mean_bits += r.prob * static_cast<double>(r.bits.size());

  // Unordered pairs grouped by distance profile; the PEP depends only on it.
  std::map<std::vector<std::int64_t>, std::pair<std::vector<double>, double>> classes;
  for (std::size_t j = 0; j < reals.size(); ++j)
    for (std::size_t w = j + 1; w < reals.size(); ++w) {
      const double weight = reals[j].prob * static_cast<double>(count_bit_errors(reals[j].bits, reals[w].bits)) +
                            reals[w].prob * static_cast<double>(count_bit_errors(reals[w].bits, reals[j].bits));
      if (weight == 0) continue;
      auto d = detail::distance_profile(reals[j], reals[w]);
      std::vector<std::int64_t> key(d.size());
      for (std::size_t l = 0; l < d.size(); ++l) key[l] = std::llround(d[l] * 1e9);
      auto [it, inserted] = classes.try_emplace(std::move(key), d, 0.0);
      it->second.second += weight;
    }

  Eigen::MatrixXcd K;
  std::vector<Eigen::VectorXd> eig;
  std::vector<std::vector<double>> gains;  // |h(l)|^2 per draw
  if (opt.averaging == ChannelAveraging::covariance) {
    K = subblock_channel_covariance(opt.pdp, layout.n_fft, L);
    for (const auto& [key, cls] : classes) eig.push_back(detail::weighted_covariance_eigenvalues(K, cls.first));
  } else if (opt.averaging == ChannelAveraging::empirical) {
    if (opt.empirical_draws == 0) throw ConfigError("empirical averaging needs at least one draw");
    Rng rng(opt.seed);
    gains.reserve(opt.empirical_draws);
    for (std::size_t i = 0; i < opt.empirical_draws; ++i) {
      const auto ch = draw_channel(opt.pdp, layout.n_fft, rng);
      std::vector<double> g(L);
      for (std::size_t l = 0; l < L; ++l) g[l] = std::norm(ch.freq_response[l]);
      gains.push_back(std::move(g));
    }
  }

  std::vector<double> out;
  for (double n0 : noise_var_freq) {
    if (!(n0 > 0)) throw ConfigError("noise variance must be positive");
    const double t = 1.0 / (2.0 * n0);
    double total = 0;
    std::size_t ci = 0;
    for (const auto& [key, cls] : classes) {
      const auto& d = cls.first;
      double pep = 0;
      switch (opt.averaging) {
        case ChannelAveraging::independent_bins:
          for (int q = 0; q < 2; ++q) {
            double prod = 1;
            for (double dl : d) prod /= 1.0 + QApproximation::eta[q] * t * dl;
            pep += QApproximation::rho[q] * prod;
          }
          break;
        case ChannelAveraging::covariance:
          for (int q = 0; q < 2; ++q)
            pep += QApproximation::rho[q] / detail::det_one_plus(eig[ci], QApproximation::eta[q] * t);
          break;
        case ChannelAveraging::empirical: {
          double acc = 0;
          for (const auto& g : gains) {
            double s = 0;
            for (std::size_t l = 0; l < L; ++l) s += g[l] * d[l];
            acc += opt.exact_q ? q_function(std::sqrt(t * s)) : q_approx(std::sqrt(t * s));
          }
          pep = acc / static_cast<double>(gains.size());
          break;
        }
      }
      total += pep * cls.second;
      ++ci;
    }
    out.push_back(total / mean_bits);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Energy efficiency

struct EeRow {
  std::string label;
  double se_ratio = 0;
  double active_fraction = 0;  // N_a / N_v
  double esf = 0;              // 1 - N_a / N_v, the fraction of energy saved
  double ee_ratio = 0;
  bool unbounded = false;      // ESF == 1
};

/// SE and EE ratios against conventional OFDM, EE_r = SE_r / (1 - ESF).
///
/// SE_r divides the scheme's bits per block by the tabulated reference of
/// (N_F + N_CP) log2 M bits; conventional OFDM is the reference and has
/// SE_r = 1 by definition. ESF is the inactive fraction of subcarriers.
inline EeRow ee_ratio(const SchemeLayout& layout, std::string label) {
  EeRow r;
  r.label = std::move(label);
  const double reference =
      static_cast<double>(layout.n_fft + layout.n_cp) * static_cast<double>(layout.alphabet.bits_per_symbol());
  r.se_ratio = layout.id == SchemeId::ofdm ? 1.0 : layout.mean_bits_per_block() / reference;
  r.active_fraction = layout.codebook.mean_active_count() / static_cast<double>(layout.codebook.subblock_len());
  r.esf = 1.0 - r.active_fraction;
  if (r.esf >= 1.0) {
    r.unbounded = true;
    r.ee_ratio = std::numeric_limits<double>::infinity();
  } else {
    r.ee_ratio = r.se_ratio / (1.0 - r.esf);
  }
  return r;
}

inline std::vector<EeRow> ee_ratios(std::span<const std::pair<std::string, SchemeLayout>> schemes) {
  std::vector<EeRow> rows;
  for (const auto& [label, layout] : schemes) rows.push_back(ee_ratio(layout, label));
  return rows;
}

// ---------------------------------------------------------------------------
// PAPR

/// PAPR in dB of the oversampled time signal of one frequency block
/// (zeros inserted in the middle of the spectrum). Returns NaN for an
/// all-zero block.
inline double papr_db(std::span<const cd> freq, std::size_t oversample) {
  if (oversample == 0) throw ConfigError("oversampling factor must be positive");
  const auto n = freq.size();
  std::vector<cd> padded(n * oversample, cd{});
  const auto half = n / 2;
  std::copy(freq.begin(), freq.begin() + static_cast<std::ptrdiff_t>(half), padded.begin());
  std::copy(freq.begin() + static_cast<std::ptrdiff_t>(half), freq.end(),
            padded.end() - static_cast<std::ptrdiff_t>(n - half));
  const auto xt = unitary_ifft(padded);
  double peak = 0, mean = 0;
  for (const auto& v : xt) {
    const double p = std::norm(v);
    peak = std::max(peak, p);
    mean += p;
  }
  mean /= static_cast<double>(xt.size());
  if (mean == 0) return std::numeric_limits<double>::quiet_NaN();
  return 10.0 * std::log10(peak / mean);
}

struct PaprStats {
  std::vector<double> papr_db;  // sorted ascending, zero-energy blocks excluded
  std::size_t zero_blocks = 0;

  /// Pr[PAPR > threshold].
  double ccdf(double threshold_db) const {
    if (papr_db.empty()) return 0.0;
    const auto it = std::upper_bound(papr_db.begin(), papr_db.end(), threshold_db);
    return static_cast<double>(papr_db.end() - it) / static_cast<double>(papr_db.size());
  }

  /// Smallest observed PAPR whose CCDF is at most `prob`.
  double threshold_at(double prob) const {
    if (papr_db.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto n = papr_db.size();
    auto k = static_cast<std::size_t>(std::ceil((1.0 - prob) * static_cast<double>(n)));
    k = std::min(k == 0 ? 0 : k - 1, n - 1);
    return papr_db[k];
  }

  std::vector<std::pair<double, double>> curve(double lo_db, double hi_db, double step_db) const {
    std::vector<std::pair<double, double>> pts;
    const auto steps = static_cast<std::size_t>(std::floor((hi_db - lo_db) / step_db + 1e-9));
    for (std::size_t i = 0; i <= steps; ++i) {
      const double t = lo_db + static_cast<double>(i) * step_db;
      pts.emplace_back(t, ccdf(t));
    }
    return pts;
  }
};

/// Empirical PAPR distribution over `n_blocks` random blocks of a scheme.
inline PaprStats papr_ccdf(const SchemeLayout& layout, std::size_t n_blocks, std::size_t oversample, Rng& rng) {
  PaprStats st;
  BitVector bits(layout.max_bits_per_block());
  for (std::size_t b = 0; b < n_blocks; ++b) {
    for (auto& v : bits) v = random_bit(rng);
    const auto tx = build_block(bits, layout);
    const double p = papr_db(tx.freq.values, oversample);
    if (std::isnan(p))
      ++st.zero_blocks;
    else
      st.papr_db.push_back(p);
  }
  std::sort(st.papr_db.begin(), st.papr_db.end());
  return st;
}

}  // namespace hnim
