#include <gtest/gtest.h>

#include <cmath>

#include "hnim/channel.hpp"
#include "hnim/detectors.hpp"
#include "hnim/modem.hpp"

using namespace hnim;

namespace {

struct Subblock {
  std::vector<cd> y, h, x;
  std::size_t entry;
  BitVector bits;
};

// Random look-up-table subblock through i.i.d. CN(0,1) bins plus noise.
Subblock random_subblock(const SchemeLayout& layout, double n0, Rng& rng, std::size_t entry = SIZE_MAX) {
  const auto& cb = layout.codebook;
  if (entry == SIZE_MAX) entry = rng() % cb.size();
  const auto& e = cb[entry];
  SubblockBits g{e.p1_bits, e.p2_bits, BitVector(e.active_count * layout.alphabet.bits_per_symbol())};
  for (auto& b : g.p3) b = random_bit(rng);
  const auto built = build_subblock(g, cb, layout.alphabet, layout.subblock_power);
  Subblock s;
  s.entry = entry;
  s.x = built.values;
  s.bits = g.concatenated();
  for (std::size_t l = 0; l < s.x.size(); ++l) {
    s.h.push_back(complex_gaussian(rng, 1.0));
    s.y.push_back(s.h.back() * s.x[l] + (n0 > 0 ? complex_gaussian(rng, n0) : cd{}));
  }
  return s;
}

// Independent brute-force ML oracle over all realizations.
std::pair<std::size_t, double> oracle_ml(const Subblock& s, const SchemeLayout& layout) {
  const auto& cb = layout.codebook;
  const auto M = layout.alphabet.size();
  double best = INFINITY;
  std::size_t arg = 0;
  for (std::size_t e = 0; e < cb.size(); ++e) {
    const auto I = cb[e].active_count;
    std::size_t combos = 1;
    for (std::size_t i = 0; i < I; ++i) combos *= M;
    const double a = I ? std::sqrt(layout.subblock_power / I) : 0;
    for (std::size_t c = 0; c < combos; ++c) {
      std::size_t rem = c, k = 0;
      std::vector<std::size_t> sym(I);
      for (std::size_t i = I; i-- > 0;) {
        sym[i] = rem % M;
        rem /= M;
      }
      double m = 0;
      for (std::size_t l = 0; l < s.y.size(); ++l) {
        const cd x = cb[e].sap[l] ? a * layout.alphabet[sym[k++]] : cd{};
        m += std::norm(s.y[l] - s.h[l] * x);
      }
      if (m < best - 1e-12) {
        best = m;
        arg = e;
      }
    }
  }
  return {arg, best};
}

const SchemeLayout& bpsk_layout() {
  static const auto l = make_scheme(SchemeId::hnim, FrameConfig::reference(16, 2));
  return l;
}

}  // namespace

TEST(OptimalMl, NoiselessRow7) {
  const auto& layout = bpsk_layout();
  const DetectorContext ctx(layout, 0.1);
  Rng rng(1);
  const auto s = random_subblock(layout, 0.0, rng, 6);
  const auto d = detect_optimal_ml(s.y, s.h, ctx);
  EXPECT_EQ(d.entry_index, 6u);
  EXPECT_EQ(d.bits, s.bits);
  EXPECT_NEAR(d.metric, 0.0, 1e-24);
}

TEST(OptimalMl, ZeroSubblockIsRow13) {
  const auto& layout = bpsk_layout();
  const DetectorContext ctx(layout, 0.1);
  std::vector<cd> y(4), h = {1, {0.3, 0.2}, -0.7, {0, 1}};
  const auto d = detect_optimal_ml(y, h, ctx);
  EXPECT_EQ(d.entry_index, 12u);
  EXPECT_EQ(d.metric, 0.0);
  EXPECT_TRUE(d.symbol_indices.empty());
}

TEST(OptimalMl, CandidateCount) {
  const auto& layout = bpsk_layout();
  const DetectorContext ctx(layout, 0.1);
  std::vector<cd> y(4, 0.5), h(4, 1.0);
  EXPECT_EQ(detect_optimal_ml(y, h, ctx).metric_evals, 81u);
  // Oracle: sum over entries of M^I.
  std::uint64_t expect = 0;
  for (const auto& e : layout.codebook.entries()) expect += 1u << e.active_count;
  EXPECT_EQ(expect, 81u);
  const auto q = make_scheme(SchemeId::hnim, FrameConfig::reference(16, 4));
  const DetectorContext cq(q, 0.1);
  EXPECT_EQ(detect_optimal_ml(y, h, cq).metric_evals, 4u * 4 + 6 * 16 + 4 * 64 + 1 + 256);
}

TEST(OptimalMl, MatchesBruteForceOracle) {
  Rng rng(2);
  for (std::size_t M : {2, 4}) {
    const auto layout = make_scheme(SchemeId::hnim, FrameConfig::reference(16, M));
    const DetectorContext ctx(layout, 0.5);
    for (int t = 0; t < 2000; ++t) {
      const auto s = random_subblock(layout, 0.5, rng);
      const auto d = detect_optimal_ml(s.y, s.h, ctx);
      const auto [e, m] = oracle_ml(s, layout);
      EXPECT_EQ(d.entry_index, e);
      EXPECT_NEAR(d.metric, m, 1e-9);
    }
  }
}

TEST(Isape, EqualsMlOnRandomNoisySubblocks) {
  const auto& layout = bpsk_layout();
  const double n0 = calibrate_noise(96.0 / 72.0, 10.0).variance_freq;
  const DetectorContext ctx(layout, n0);
  Rng rng(3);
  int mismatches = 0;
  for (int t = 0; t < 10000; ++t) {
    const auto s = random_subblock(layout, n0, rng);
    const auto a = detect_optimal_ml(s.y, s.h, ctx);
    const auto b = detect_decoupled_ml(s.y, s.h, ctx);
    mismatches += a.entry_index != b.entry_index || a.symbol_indices != b.symbol_indices;
  }
  EXPECT_EQ(mismatches, 0);
}

// Property: every entry x every symbol pattern x 100 noise draws.
TEST(Isape, ExhaustiveSweepEqualsMl) {
  for (std::size_t M : {2, 4}) {
    const auto layout = make_scheme(SchemeId::hnim, FrameConfig::reference(16, M));
    const DetectorContext ctx(layout, 0.3);
    Rng rng(4);
    const auto& cb = layout.codebook;
    for (std::size_t e = 0; e < cb.size(); ++e) {
      const auto nbits = cb[e].active_count * layout.alphabet.bits_per_symbol();
      for (std::uint64_t p = 0; p < (1u << nbits); ++p) {
        SubblockBits g{cb[e].p1_bits, cb[e].p2_bits, uint_to_bits(p, nbits)};
        const auto x = build_subblock(g, cb, layout.alphabet, layout.subblock_power).values;
        for (int n = 0; n < 100; ++n) {
          std::vector<cd> y(4), h(4);
          for (int l = 0; l < 4; ++l) {
            h[l] = complex_gaussian(rng, 1.0);
            y[l] = h[l] * x[l] + complex_gaussian(rng, 0.3);
          }
          const auto a = detect_optimal_ml(y, h, ctx);
          const auto b = detect_decoupled_ml(y, h, ctx);
          ASSERT_EQ(a.entry_index, b.entry_index);
          ASSERT_EQ(a.symbol_indices, b.symbol_indices);
          ASSERT_EQ(a.bits, b.bits);
        }
      }
    }
  }
}

TEST(Isape, MetricEvaluationCount) {
  const auto& layout = bpsk_layout();
  const DetectorContext ctx(layout, 0.1);
  std::vector<cd> y(4, 0.5), h(4, 1.0);
  EXPECT_EQ(detect_decoupled_ml(y, h, ctx).metric_evals, 16u * 4u);
}

TEST(Psape, NoiselessAndEmptyPattern) {
  const auto& layout = bpsk_layout();
  const DetectorContext ctx(layout, 0.1);
  Rng rng(5);
  for (std::size_t e = 0; e < 16; ++e) {
    const auto s = random_subblock(layout, 0.0, rng, e);
    EXPECT_EQ(detect_psape(s.y, s.h, e, ctx).bits, s.bits);
  }
  for (int t = 0; t < 100; ++t) {
    const auto s = random_subblock(layout, 10.0, rng, 12);
    const auto d = detect_psape(s.y, s.h, 12, ctx);
    EXPECT_EQ(d.bits, s.bits);
    EXPECT_TRUE(d.symbol_indices.empty());
  }
}

// A correct ISAPE decision implies a correct PSAPE decision, so the PSAPE
// subblock errors are a subset of the ISAPE ones on every trial.
TEST(Psape, NeverWorseThanIsapePerSubblock) {
  const auto& layout = bpsk_layout();
  Rng rng(6);
  for (double snr : {0.0, 10.0, 20.0}) {
    const double n0 = calibrate_noise(96.0 / 72.0, snr).variance_freq;
    const DetectorContext ctx(layout, n0);
    std::size_t ep = 0, ei = 0;
    for (int t = 0; t < 20000; ++t) {
      const auto s = random_subblock(layout, n0, rng);
      const bool wp = detect_psape(s.y, s.h, s.entry, ctx).bits != s.bits;
      const bool wi = detect_decoupled_ml(s.y, s.h, ctx).bits != s.bits;
      EXPECT_FALSE(wp && !wi);
      ep += wp;
      ei += wi;
    }
    EXPECT_LE(ep, ei);
  }
}

TEST(Llr, NoiselessPicksTruth) {
  for (std::size_t M : {2, 4}) {
    const auto layout = make_scheme(SchemeId::hnim, FrameConfig::reference(16, M));
    const DetectorContext ctx(layout, 1e-9);
    Rng rng(7);
    for (int t = 0; t < 2000; ++t) {
      const auto s = random_subblock(layout, 0.0, rng);
      const auto d = detect_llr(s.y, s.h, ctx);
      EXPECT_EQ(d.entry_index, s.entry);
      EXPECT_EQ(d.bits, s.bits);
    }
  }
}

TEST(Llr, HandEvaluatedScores) {
  const auto& layout = bpsk_layout();
  const double n0 = 1e-3;
  const DetectorContext ctx(layout, n0);
  const std::vector<cd> y = {2, 2, 0, 0}, h(4, 1.0);
  // Oracle: high-SNR score per entry = sum over active bins of
  // (|y|^2 - min_s |y - a_I s|^2) / N0 - ln 2.
  double best = -INFINITY;
  std::size_t arg = 0;
  for (std::size_t e = 0; e < 16; ++e) {
    const auto& en = layout.codebook[e];
    const double a = en.active_count ? std::sqrt(4.0 / en.active_count) : 0;
    double sc = 0;
    for (std::size_t l = 0; l < 4; ++l)
      if (en.sap[l])
        sc += (std::norm(y[l]) - std::min(std::norm(y[l] - a), std::norm(y[l] + a))) / n0 - std::log(2.0);
    if (sc > best) {
      best = sc;
      arg = e;
    }
  }
  EXPECT_EQ(arg, 4u);
  const auto d = detect_llr(y, h, ctx);
  EXPECT_EQ(d.entry_index, 4u);
  EXPECT_NEAR(d.metric, best, 1e-6 * best);
}

TEST(Llr, RejectsNonPositiveNoise) {
  const auto& layout = bpsk_layout();
  const DetectorContext ctx(layout, 0.0);
  std::vector<cd> y(4), h(4, 1.0);
  EXPECT_THROW(detect_llr(y, h, ctx), ConfigError);
}

TEST(Llr, StableAtExtremeSnr) {
  const auto& layout = bpsk_layout();
  const DetectorContext ctx(layout, 1e-12);
  Rng rng(8);
  const auto s = random_subblock(layout, 0.0, rng, 15);
  const auto d = detect_llr(s.y, s.h, ctx);
  EXPECT_TRUE(std::isfinite(d.metric));
  EXPECT_EQ(d.bits, s.bits);
}

// Property: decisions only ever name legal entries and their bits demap back.
TEST(Property, LegalEntriesAndRoundTrip) {
  const auto& layout = bpsk_layout();
  const DetectorContext ctx(layout, 1.0);
  Rng rng(9);
  for (int t = 0; t < 2000; ++t) {
    const auto s = random_subblock(layout, 1.0, rng);
    for (auto id : {DetectorId::ml, DetectorId::isape, DetectorId::psape, DetectorId::llr}) {
      const auto d = detect(id, s.y, s.h, s.entry, ctx);
      ASSERT_LT(d.entry_index, 16u);
      const auto& e = layout.codebook[d.entry_index];
      EXPECT_EQ(d.symbol_indices.size(), e.active_count);
      const auto [p1, p2] = demap_sap(layout.codebook, e.sap);
      EXPECT_TRUE(std::equal(p1.begin(), p1.end(), d.bits.begin()));
      EXPECT_TRUE(std::equal(p2.begin(), p2.end(), d.bits.begin() + 2));
      EXPECT_EQ(d.bits.size(), 4 + e.active_count);
    }
  }
}

// Property: a common complex factor on y and h leaves the decisions alone.
// The LLR score also involves N0, so it gets a unit-modulus factor.
TEST(Property, ScaleInvariance) {
  const auto& layout = bpsk_layout();
  const DetectorContext ctx(layout, 0.5);
  Rng rng(10);
  for (int t = 0; t < 2000; ++t) {
    const auto s = random_subblock(layout, 0.5, rng);
    const cd alpha = complex_gaussian(rng, 4.0);
    const cd rot = alpha / std::abs(alpha);
    std::vector<cd> ya, ha, yr, hr;
    for (std::size_t l = 0; l < 4; ++l) {
      ya.push_back(alpha * s.y[l]);
      ha.push_back(alpha * s.h[l]);
      yr.push_back(rot * s.y[l]);
      hr.push_back(rot * s.h[l]);
    }
    for (auto id : {DetectorId::ml, DetectorId::isape, DetectorId::psape})
      EXPECT_EQ(detect(id, s.y, s.h, s.entry, ctx).bits, detect(id, ya, ha, s.entry, ctx).bits);
    EXPECT_EQ(detect_llr(s.y, s.h, ctx).bits, detect_llr(yr, hr, ctx).bits);
    // With N0 scaled by |alpha|^2 the LLR decision is invariant for any alpha.
    const DetectorContext scaled(layout, 0.5 * std::norm(alpha));
    EXPECT_EQ(detect_llr(s.y, s.h, ctx).entry_index, detect_llr(ya, ha, scaled).entry_index);
  }
}

TEST(Complexity, Counts) {
  const auto& b = bpsk_layout();
  const auto q = make_scheme(SchemeId::hnim, FrameConfig::reference(16, 4));
  EXPECT_DOUBLE_EQ(count_operations(DetectorId::ml, b).metric_evals_per_subblock, 81.0);
  EXPECT_DOUBLE_EQ(count_operations(DetectorId::isape, b).metric_evals_per_subblock, 64.0);
  EXPECT_DOUBLE_EQ(count_operations(DetectorId::isape, q).metric_evals_per_subblock, 64.0);
  const double r = count_operations(DetectorId::llr, q).mults_per_subblock /
                   count_operations(DetectorId::llr, b).mults_per_subblock;
  EXPECT_NEAR(r, 2.0, 0.4);
  // PSAPE averages M * mean(I) slicing multiplications.
  EXPECT_DOUBLE_EQ(count_operations(DetectorId::psape, b).mults_per_subblock, 2.0 * 2.0);
  EXPECT_GT(count_operations(DetectorId::ml, q).mults_per_subblock,
            count_operations(DetectorId::isape, q).mults_per_subblock);
  EXPECT_EQ(count_operations(DetectorId::llr, b).order, "O(M)");
  EXPECT_THROW(parse_detector("sphere"), ConfigError);
}
