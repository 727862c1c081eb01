#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "hnim/codebook.hpp"

using namespace hnim;

namespace {

BitVector bv(std::initializer_list<int> v) {
  BitVector out;
  for (int b : v) out.push_back(static_cast<std::uint8_t>(b));
  return out;
}

// The L = 4 look-up table transcribed row by row: p1, p2, SAP, I.
struct Row {
  const char* p1;
  const char* p2;
  const char* sap;
  std::size_t I;
};
constexpr Row kTable[16] = {
    {"00", "00", "1000", 1}, {"00", "01", "0100", 1}, {"00", "10", "0010", 1}, {"00", "11", "0001", 1},
    {"01", "00", "1100", 2}, {"01", "01", "1010", 2}, {"01", "10", "1001", 2}, {"01", "11", "0101", 2},
    {"10", "00", "1110", 3}, {"10", "01", "1011", 3}, {"10", "10", "1101", 3}, {"10", "11", "0111", 3},
    {"11", "00", "0000", 0}, {"11", "01", "0011", 2}, {"11", "10", "0110", 2}, {"11", "11", "1111", 4},
};

}  // namespace

TEST(LookupTable, RowsMatchTranscription) {
  const auto cb = build_table1_codebook();
  ASSERT_EQ(cb.size(), 16u);
  EXPECT_EQ(cb.subblock_len(), 4u);
  for (std::size_t g = 0; g < 16; ++g) {
    const auto& e = cb[g];
    EXPECT_EQ(e.row_id, static_cast<int>(g + 1));
    EXPECT_EQ(e.p1_bits, bits_from_string(kTable[g].p1)) << "row " << g + 1;
    EXPECT_EQ(e.p2_bits, bits_from_string(kTable[g].p2)) << "row " << g + 1;
    EXPECT_EQ(e.sap, bits_from_string(kTable[g].sap)) << "row " << g + 1;
    EXPECT_EQ(e.active_count, kTable[g].I) << "row " << g + 1;
  }
}

TEST(LookupTable, NamedRows) {
  const auto cb = build_table1_codebook();
  EXPECT_EQ(cb[6].sap, bv({1, 0, 0, 1}));
  EXPECT_EQ(cb[6].active_count, 2u);
  EXPECT_EQ(cb[12].sap, bv({0, 0, 0, 0}));
  EXPECT_EQ(cb[12].active_count, 0u);
  EXPECT_EQ(cb[15].sap, bv({1, 1, 1, 1}));
  EXPECT_EQ(cb[15].active_count, 4u);
}

TEST(LookupTable, ActiveCountMultisetAndMean) {
  const auto cb = build_table1_codebook();
  std::map<std::size_t, int> hist;
  std::size_t total = 0;
  for (const auto& e : cb.entries()) {
    ++hist[e.active_count];
    total += e.active_count;
  }
  EXPECT_EQ(hist[0], 1);
  EXPECT_EQ(hist[1], 4);
  EXPECT_EQ(hist[2], 6);
  EXPECT_EQ(hist[3], 4);
  EXPECT_EQ(hist[4], 1);
  EXPECT_EQ(total, 32u);
  EXPECT_DOUBLE_EQ(cb.mean_active_count(), 2.0);
}

TEST(MapBits, Examples) {
  const auto cb = build_table1_codebook();
  auto e = map_bits(cb, bv({0, 0}), bv({1, 1}));
  EXPECT_EQ(e.sap, bv({0, 0, 0, 1}));
  EXPECT_EQ(e.active_count, 1u);
  e = map_bits(cb, bv({1, 0}), bv({0, 1}));
  EXPECT_EQ(e.sap, bv({1, 0, 1, 1}));
  EXPECT_EQ(e.active_count, 3u);
  e = map_bits(cb, bv({1, 1}), bv({1, 0}));
  EXPECT_EQ(e.sap, bv({0, 1, 1, 0}));
  EXPECT_EQ(e.active_count, 2u);
}

TEST(MapBits, LengthMismatchIsConfigError) {
  const auto cb = build_table1_codebook();
  EXPECT_THROW(map_bits(cb, bv({0}), bv({1, 1})), ConfigError);
  EXPECT_THROW(map_bits(cb, bv({0, 0}), bv({1, 1, 0})), ConfigError);
}

TEST(DemapSap, Examples) {
  const auto cb = build_table1_codebook();
  EXPECT_EQ(demap_sap(cb, bv({0, 1, 0, 1})), std::make_pair(bv({0, 1}), bv({1, 1})));
  EXPECT_EQ(demap_sap(cb, bv({0, 0, 1, 1})), std::make_pair(bv({1, 1}), bv({0, 1})));
  EXPECT_EQ(demap_sap(cb, bv({1, 1, 1, 0})), std::make_pair(bv({1, 0}), bv({0, 0})));
}

TEST(DemapSap, IllegalPattern) {
  // The look-up table uses all 16 patterns, so the check needs a smaller pattern set.
  const auto cb = build_im_codebook(4, 2);
  EXPECT_THROW(demap_sap(cb, bv({1, 1, 1, 1})), IllegalPatternError);
  EXPECT_THROW(demap_sap(cb, bv({0, 1, 0, 1})), IllegalPatternError);  // 5th combination, unused
  EXPECT_THROW(demap_sap(build_table1_codebook(), bv({1, 0, 2, 0})), IllegalPatternError);
  EXPECT_THROW(demap_sap(build_table1_codebook(), bv({1, 0, 0})), ConfigError);
}

TEST(Validate, LookupTablePasses) {
  const auto r = validate_codebook(build_table1_codebook());
  EXPECT_TRUE(r.labels_injective);
  EXPECT_TRUE(r.saps_injective);
  EXPECT_TRUE(r.esa);
  EXPECT_EQ(r.esa_target, 8u);
  // Oracle: count ones per column of the transcription.
  for (std::size_t j = 0; j < 4; ++j) {
    std::size_t ones = 0;
    for (const auto& row : kTable) ones += row.sap[j] == '1';
    EXPECT_EQ(r.activation_counts[j], ones);
    EXPECT_EQ(ones, 8u);
  }
}

TEST(Validate, DuplicatedSapFailsInjectivity) {
  const auto cb = build_table1_codebook();
  std::vector<CodebookEntry> entries(cb.entries().begin(), cb.entries().end());
  entries[15].sap = bv({1, 1, 1, 0});
  entries[15].active_count = 3;
  const auto r = validate_codebook(Codebook(entries, 4));
  EXPECT_TRUE(r.labels_injective);
  EXPECT_FALSE(r.saps_injective);
  EXPECT_FALSE(r.ok());
}

TEST(Validate, InconsistentActiveCountRejectedAtConstruction) {
  const auto cb = build_table1_codebook();
  std::vector<CodebookEntry> entries(cb.entries().begin(), cb.entries().end());
  entries[0].active_count = 2;
  EXPECT_THROW(Codebook(entries, 4), ConfigError);
}

TEST(RoundTrip, LookupTableBothDirections) {
  const auto cb = build_table1_codebook();
  for (const auto& e : cb.entries()) {
    const auto [p1, p2] = demap_sap(cb, e.sap);
    EXPECT_EQ(p1, e.p1_bits);
    EXPECT_EQ(p2, e.p2_bits);
    EXPECT_EQ(map_bits(cb, p1, p2), e);
  }
}

class GenericCodebook : public ::testing::TestWithParam<std::pair<std::size_t, std::uint64_t>> {};

TEST_P(GenericCodebook, ValidAndRoundTrips) {
  const auto [L, seed] = GetParam();
  const auto cb = generate_generic_codebook(L, seed);
  EXPECT_EQ(cb.size(), L * L);
  EXPECT_EQ(cb.p1(), ilog2(L));
  EXPECT_EQ(cb.p2(), ilog2(L));
  const auto r = validate_codebook(cb);
  EXPECT_TRUE(r.ok());
  for (auto c : r.activation_counts) EXPECT_EQ(c, L * L / 2);
  for (const auto& e : cb.entries()) {
    const auto [p1, p2] = demap_sap(cb, e.sap);
    EXPECT_EQ(map_bits(cb, p1, p2), e);
  }
  // Same seed, same table.
  EXPECT_EQ(codebook_to_text(cb), codebook_to_text(generate_generic_codebook(L, seed)));
}

INSTANTIATE_TEST_SUITE_P(Sizes, GenericCodebook,
                         ::testing::Values(std::pair<std::size_t, std::uint64_t>{2, 1}, std::pair{2, 7},
                                           std::pair{4, 1}, std::pair{4, 99}, std::pair{8, 1}, std::pair{8, 5},
                                           std::pair{16, 3}));

TEST(GenericCodebookL2, MatchesExhaustiveOracle) {
  // Exhaustive search: 4 distinct 2-bit patterns over 4 entries always
  // activate each position exactly twice.
  const auto cb = generate_generic_codebook(2, 11);
  const auto r = validate_codebook(cb);
  EXPECT_EQ(r.activation_counts, (std::vector<std::size_t>{2, 2}));
}

TEST(GenericCodebook, RejectsBadSizes) {
  EXPECT_THROW(generate_generic_codebook(3, 1), ConfigError);
  EXPECT_THROW(generate_generic_codebook(1, 1), ConfigError);
  EXPECT_THROW(generate_generic_codebook(32, 1), ConfigError);
}

TEST(Baselines, ImAndSnmAndOfdm) {
  const auto im = build_im_codebook(4, 2);
  EXPECT_EQ(im.size(), 4u);
  EXPECT_EQ(im.p1(), 0u);
  EXPECT_EQ(im.p2(), 2u);
  EXPECT_EQ(im[0].sap, bv({1, 1, 0, 0}));
  EXPECT_EQ(im[1].sap, bv({1, 0, 1, 0}));
  EXPECT_EQ(im[2].sap, bv({1, 0, 0, 1}));
  EXPECT_EQ(im[3].sap, bv({0, 1, 1, 0}));
  const auto snm = build_snm_codebook(4);
  EXPECT_EQ(snm.size(), 4u);
  for (std::size_t v = 0; v < 4; ++v) {
    EXPECT_EQ(snm[v].active_count, v + 1);
    for (std::size_t l = 0; l < 4; ++l) EXPECT_EQ(snm[v].sap[l], l <= v ? 1 : 0);
  }
  EXPECT_DOUBLE_EQ(snm.mean_active_count(), 2.5);
  const auto ofdm = build_ofdm_codebook();
  EXPECT_EQ(ofdm.size(), 1u);
  EXPECT_EQ(ofdm[0].sap, bv({1}));
}

TEST(TextFormat, RoundTripsBitExactly) {
  for (const auto& cb : {build_table1_codebook(), generate_generic_codebook(8, 2), build_im_codebook(4, 2),
                         build_ofdm_codebook()}) {
    const auto text = codebook_to_text(cb);
    const auto back = codebook_from_text(text);
    EXPECT_TRUE(std::ranges::equal(back.entries(), cb.entries()));
    EXPECT_EQ(codebook_to_text(back), text);
  }
}

TEST(TextFormat, LookupTableLines) {
  const auto text = codebook_to_text(build_table1_codebook());
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "1 00 00 1000 1");
  for (int i = 0; i < 12; ++i) std::getline(is, line);
  EXPECT_EQ(line, "13 11 00 0000 0");
}

TEST(TextFormat, MalformedInputRejected) {
  EXPECT_THROW(codebook_from_text("1 00 00 1000\n"), ConfigError);
  EXPECT_THROW(codebook_from_text("1 00 00 10x0 1\n"), ConfigError);
}

TEST(FrameConfigCheck, Invariants) {
  EXPECT_NO_THROW(FrameConfig{}.validate());
  FrameConfig c;
  c.n_subblocks = 15;
  EXPECT_THROW(c.validate(), ConfigError);
  c = FrameConfig{};
  c.mod_order = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = FrameConfig{};
  c.mod_order = 3;
  EXPECT_THROW(c.validate(), ConfigError);
  c = FrameConfig{};
  c.p1 = 3;
  EXPECT_THROW(c.validate(), ConfigError);
}
