#pragma once

// Subblock detectors: exhaustive joint ML, decoupled ML (ISAPE), genie-SAP ML
// (PSAPE) and the per-entry LLR detector, with complex-multiplication counts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hnim/codebook.hpp"
#include "hnim/error.hpp"
#include "hnim/modem.hpp"

namespace hnim {

enum class DetectorId { ml, isape, psape, llr };

inline std::string_view to_string(DetectorId d) {
  switch (d) {
    case DetectorId::ml: return "ml";
    case DetectorId::isape: return "isape";
    case DetectorId::psape: return "psape";
    case DetectorId::llr: return "llr";
  }
  return "?";
}

inline DetectorId parse_detector(std::string_view s) {
  if (s == "ml") return DetectorId::ml;
  if (s == "isape") return DetectorId::isape;
  if (s == "psape") return DetectorId::psape;
  if (s == "llr") return DetectorId::llr;
  throw ConfigError("unknown detector id: " + std::string(s));
}

struct SubblockDecision {
  std::size_t entry_index = 0;
  std::vector<std::size_t> symbol_indices;  // one per active subcarrier of the entry
  BitVector bits;                           // p1 | p2 | p3
  double metric = 0.0;                      // residual energy (ML family) or score (LLR)
  std::uint64_t op_count = 0;               // complex multiplications
  std::uint64_t metric_evals = 0;           // candidate metrics (ML) or per-bin terms (others)
};

/// Codebook, constellation, power and noise shared by every subblock.
///
/// Precomputes the scaled constellation a_I * s for each active count I so
/// that every detector evaluates identical per-bin terms.
class DetectorContext {
 public:
  DetectorContext(const Codebook& codebook, const ConstellationAlphabet& alphabet, double subblock_power,
                  double noise_var)
      : codebook_(&codebook), alphabet_(&alphabet), power_(subblock_power), noise_var_(noise_var) {
    scaled_.resize(codebook.subblock_len() + 1);
    for (std::size_t i = 1; i <= codebook.subblock_len(); ++i) {
      const double a = subblock_scale(subblock_power, i);
      for (const auto& s : alphabet.points()) scaled_[i].push_back(a * s);
    }
    for (const auto& e : codebook.entries()) active_.push_back(e.active_positions());
  }

  explicit DetectorContext(const SchemeLayout& layout, double noise_var)
      : DetectorContext(layout.codebook, layout.alphabet, layout.subblock_power, noise_var) {}

  const Codebook& codebook() const { return *codebook_; }
  const ConstellationAlphabet& alphabet() const { return *alphabet_; }
  double subblock_power() const { return power_; }
  double noise_var() const { return noise_var_; }
  std::span<const cd> scaled_points(std::size_t active) const { return scaled_[active]; }
  std::span<const std::size_t> active_positions(std::size_t entry) const { return active_[entry]; }

  BitVector bits_of(std::size_t entry, std::span<const std::size_t> symbols) const {
    BitVector out = codebook()[entry].label();
    for (auto s : symbols) {
      auto lbl = alphabet().label(s);
      out.insert(out.end(), lbl.begin(), lbl.end());
    }
    return out;
  }

 private:
  const Codebook* codebook_;
  const ConstellationAlphabet* alphabet_;
  double power_;
  double noise_var_;
  std::vector<std::vector<cd>> scaled_;
  std::vector<std::vector<std::size_t>> active_;
};

namespace detail {

inline double active_term(cd y, cd h, cd scaled_point) { return std::norm(y - h * scaled_point); }

inline void check_lengths(std::span<const cd> y, std::span<const cd> h, const DetectorContext& ctx) {
  if (y.size() != ctx.codebook().subblock_len() || h.size() != y.size())
    throw ConfigError("subblock vectors must have the codebook's subblock length");
}

// Nearest scaled point on one bin; ties go to the lowest index.
inline std::size_t slice(cd y, cd h, std::span<const cd> pts, double& best, std::uint64_t& mults) {
  std::size_t arg = 0;
  best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < pts.size(); ++s) {
    const double t = active_term(y, h, pts[s]);
    if (t < best) {
      best = t;
      arg = s;
    }
  }
  mults += pts.size();
  return arg;
}

}  // namespace detail

/// Exhaustive joint search over every entry and every symbol combination on
/// its active set; sum_e M^I(e) candidates. Ties go to the lowest row, then
/// to the lexicographically first symbol combination.
inline SubblockDecision detect_optimal_ml(std::span<const cd> y, std::span<const cd> h, const DetectorContext& ctx) {
  detail::check_lengths(y, h, ctx);
  const auto& cb = ctx.codebook();
  const auto M = ctx.alphabet().size();
  SubblockDecision best;
  best.metric = std::numeric_limits<double>::infinity();
  std::uint64_t mults = 0, evals = 0;
  std::vector<std::size_t> combo;
  for (std::size_t e = 0; e < cb.size(); ++e) {
    const auto& sap = cb[e].sap;
    const auto pts = ctx.scaled_points(cb[e].active_count);
    combo.assign(cb[e].active_count, 0);
    while (true) {
      double metric = 0.0;
      std::size_t k = 0;
      for (std::size_t l = 0; l < sap.size(); ++l)
        metric += sap[l] ? detail::active_term(y[l], h[l], pts[combo[k++]]) : std::norm(y[l]);
      mults += combo.size();
      ++evals;
      if (metric < best.metric) {
        best.metric = metric;
        best.entry_index = e;
        best.symbol_indices = combo;
      }
      // Odometer, last active bin fastest.
      std::size_t i = combo.size();
      while (i > 0 && ++combo[i - 1] == M) combo[--i] = 0;
      if (i == 0) break;
    }
  }
  best.bits = ctx.bits_of(best.entry_index, best.symbol_indices);
  best.op_count = mults;
  best.metric_evals = evals;
  return best;
}

/// Decoupled ML (the ISAPE receiver): per entry, each active bin takes its
/// nearest scaled point and inactive bins contribute |y|^2; the smallest
/// summed metric wins (lowest row on ties).
inline SubblockDecision detect_decoupled_ml(std::span<const cd> y, std::span<const cd> h,
                                            const DetectorContext& ctx) {
  detail::check_lengths(y, h, ctx);
  const auto& cb = ctx.codebook();
  SubblockDecision best;
  best.metric = std::numeric_limits<double>::infinity();
  std::uint64_t mults = 0, evals = 0;
  std::vector<std::size_t> syms;
  for (std::size_t e = 0; e < cb.size(); ++e) {
    const auto& sap = cb[e].sap;
    const auto pts = ctx.scaled_points(cb[e].active_count);
    syms.clear();
    double metric = 0.0;
    for (std::size_t l = 0; l < sap.size(); ++l) {
      ++evals;
      if (!sap[l]) {
        metric += std::norm(y[l]);
        continue;
      }
      double t = 0.0;
      syms.push_back(detail::slice(y[l], h[l], pts, t, mults));
      metric += t;
    }
    if (metric < best.metric) {
      best.metric = metric;
      best.entry_index = e;
      best.symbol_indices = syms;
    }
  }
  best.bits = ctx.bits_of(best.entry_index, best.symbol_indices);
  best.op_count = mults;
  best.metric_evals = evals;
  return best;
}

/// Genie-SAP detector: the transmitted entry is given, only the symbols on its
/// active set are detected.
inline SubblockDecision detect_psape(std::span<const cd> y, std::span<const cd> h, std::size_t true_entry,
                                     const DetectorContext& ctx) {
  detail::check_lengths(y, h, ctx);
  if (true_entry >= ctx.codebook().size()) throw ConfigError("true entry index out of range");
  const auto& entry = ctx.codebook()[true_entry];
  const auto pts = ctx.scaled_points(entry.active_count);
  SubblockDecision d;
  d.entry_index = true_entry;
  for (auto l : ctx.active_positions(true_entry)) {
    double t = 0.0;
    d.symbol_indices.push_back(detail::slice(y[l], h[l], pts, t, d.op_count));
    d.metric += t;
    ++d.metric_evals;
  }
  d.bits = ctx.bits_of(true_entry, d.symbol_indices);
  return d;
}

namespace detail {

inline double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace detail

/// LLR detector. For every entry, active bin l scores
///   lambda(l) = ln (1/M) sum_s exp(-|y - h a_I s|^2 / N0) + |y|^2 / N0
/// with the entry's own amplitude a_I, i.e. the log-likelihood ratio of
/// "active with a uniformly drawn symbol" against "inactive". The entry score
/// is the sum over its active bins and the largest score wins (lowest row on
/// ties). Symbols are then sliced per bin.
inline SubblockDecision detect_llr(std::span<const cd> y, std::span<const cd> h, const DetectorContext& ctx) {
  detail::check_lengths(y, h, ctx);
  const double n0 = ctx.noise_var();
  if (!(n0 > 0)) throw ConfigError("LLR detector needs a positive noise variance");
  const auto& cb = ctx.codebook();
  const auto M = ctx.alphabet().size();
  std::vector<double> ex(M);
  const double log_m = std::log(static_cast<double>(M));
  double best_score = -std::numeric_limits<double>::infinity();
  std::size_t best_entry = 0;
  std::uint64_t mults = 0, evals = 0;
  for (std::size_t e = 0; e < cb.size(); ++e) {
    const auto pts = ctx.scaled_points(cb[e].active_count);
    double score = 0.0;
    for (auto l : ctx.active_positions(e)) {
      for (std::size_t s = 0; s < M; ++s) ex[s] = -detail::active_term(y[l], h[l], pts[s]) / n0;
      mults += M;
      ++evals;
      score += detail::log_sum_exp(ex) - log_m + std::norm(y[l]) / n0;
    }
    if (score > best_score) {
      best_score = score;
      best_entry = e;
    }
  }
  SubblockDecision d;
  d.entry_index = best_entry;
  d.metric = best_score;
  const auto pts = ctx.scaled_points(cb[best_entry].active_count);
  for (auto l : ctx.active_positions(best_entry)) {
    double t = 0.0;
    d.symbol_indices.push_back(detail::slice(y[l], h[l], pts, t, mults));
  }
  d.bits = ctx.bits_of(best_entry, d.symbol_indices);
  d.op_count = mults;
  d.metric_evals = evals;
  return d;
}

/// Dispatch by id; `true_entry` is used by PSAPE only.
inline SubblockDecision detect(DetectorId id, std::span<const cd> y, std::span<const cd> h, std::size_t true_entry,
                               const DetectorContext& ctx) {
  switch (id) {
    case DetectorId::ml: return detect_optimal_ml(y, h, ctx);
    case DetectorId::isape: return detect_decoupled_ml(y, h, ctx);
    case DetectorId::psape: return detect_psape(y, h, true_entry, ctx);
    case DetectorId::llr: return detect_llr(y, h, ctx);
  }
  throw ConfigError("unknown detector");
}

struct ComplexityReport {
  DetectorId detector = DetectorId::ml;
  double metric_evals_per_subblock = 0;  // averaged over the codebook entries for PSAPE
  double mults_per_subblock = 0;
  double mults_per_bit = 0;
  std::string order;  // asymptotic class
};

/// Measured complex-multiplication counts per subblock and per detected bit.
///
/// The ML, ISAPE and LLR counts do not depend on the received data; PSAPE is
/// averaged over equally likely transmitted entries.
inline ComplexityReport count_operations(DetectorId id, const SchemeLayout& layout) {
  const DetectorContext ctx(layout, 1.0);
  const std::size_t L = layout.codebook.subblock_len();
  std::vector<cd> y(L, cd{0.3, -0.2}), h(L, cd{1.0, 0.1});
  ComplexityReport r;
  r.detector = id;
  const auto n = layout.codebook.size();
  if (id == DetectorId::psape) {
    for (std::size_t e = 0; e < n; ++e) {
      const auto d = detect(id, y, h, e, ctx);
      r.mults_per_subblock += static_cast<double>(d.op_count) / static_cast<double>(n);
      r.metric_evals_per_subblock += static_cast<double>(d.metric_evals) / static_cast<double>(n);
    }
  } else {
    const auto d = detect(id, y, h, 0, ctx);
    r.mults_per_subblock = static_cast<double>(d.op_count);
    r.metric_evals_per_subblock = static_cast<double>(d.metric_evals);
  }
  r.mults_per_bit = r.mults_per_subblock / layout.mean_bits_per_subblock();
  switch (id) {
    case DetectorId::ml: r.order = "O(G M^(n/2))"; break;
    case DetectorId::isape: r.order = "O(G)"; break;
    case DetectorId::psape: r.order = "O(G)"; break;
    case DetectorId::llr: r.order = "O(M)"; break;
  }
  return r;
}

}  // namespace hnim
