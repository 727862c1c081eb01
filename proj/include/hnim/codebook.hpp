#pragma once

// Bits <-> subcarrier activation pattern (SAP) mapping for OFDM with hybrid
// number and index modulation, plus the pattern sets of the baseline schemes.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hnim/error.hpp"
#include "hnim/rng.hpp"

namespace hnim {

using BitVector = std::vector<std::uint8_t>;

/// Integer value of a bit vector, leftmost bit most significant.
inline std::uint64_t bits_to_uint(std::span<const std::uint8_t> bits) {
  std::uint64_t v = 0;
  for (auto b : bits) v = (v << 1) | (b & 1U);
  return v;
}

/// Inverse of bits_to_uint for a fixed width.
inline BitVector uint_to_bits(std::uint64_t value, std::size_t width) {
  BitVector bits(width);
  for (std::size_t i = 0; i < width; ++i) bits[width - 1 - i] = static_cast<std::uint8_t>((value >> i) & 1U);
  return bits;
}

inline bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline std::size_t ilog2(std::size_t v) { return static_cast<std::size_t>(std::bit_width(v) - 1); }

/// Block structure and modulation parameters of one OFDM-HNIM frame.
struct FrameConfig {
  std::size_t n_fft = 64;        // subcarriers per OFDM symbol
  std::size_t n_cp = 8;          // cyclic prefix samples
  std::size_t subblock_len = 4;  // subcarriers per subblock (L)
  std::size_t n_subblocks = 16;  // subblocks per symbol (G)
  std::size_t mod_order = 2;     // constellation size (M)
  std::size_t p1 = 2;            // number-modulation bits per subblock
  std::size_t p2 = 2;            // index-modulation bits per subblock

  std::size_t bits_per_symbol() const { return ilog2(mod_order); }

  /// Throws ConfigError when the invariants between the fields do not hold.
  void validate() const {
    if (subblock_len == 0 || n_subblocks == 0) throw ConfigError("subblock length and count must be positive");
    if (n_fft != subblock_len * n_subblocks)
      throw ConfigError("n_fft must equal subblock_len * n_subblocks");
    if (mod_order < 2 || !is_power_of_two(mod_order)) throw ConfigError("mod_order must be a power of two >= 2");
    if (!is_power_of_two(subblock_len) || subblock_len < 2)
      throw ConfigError("subblock_len must be a power of two >= 2");
    if (p1 != ilog2(subblock_len) || p2 != ilog2(subblock_len))
      throw ConfigError("p1 and p2 must both equal log2(subblock_len)");
  }

  /// Configuration of the reference setup: N_F=64, L=4, G=16, BPSK.
  static FrameConfig reference(std::size_t cp = 8, std::size_t mod_order = 2) {
    FrameConfig c;
    c.n_cp = cp;
    c.mod_order = mod_order;
    return c;
  }
};

struct CodebookEntry {
  int row_id = 0;  // 1-based
  BitVector p1_bits;
  BitVector p2_bits;
  BitVector sap;
  std::size_t active_count = 0;

  std::uint32_t sap_mask() const {
    std::uint32_t m = 0;
    for (auto b : sap) m = (m << 1) | (b & 1U);
    return m;
  }

  /// Concatenated (p1, p2) label.
  BitVector label() const {
    BitVector out(p1_bits);
    out.insert(out.end(), p2_bits.begin(), p2_bits.end());
    return out;
  }

  /// Positions of the active subcarriers in ascending order.
  std::vector<std::size_t> active_positions() const {
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < sap.size(); ++i)
      if (sap[i]) pos.push_back(i);
    return pos;
  }

  friend bool operator==(const CodebookEntry&, const CodebookEntry&) = default;
};

/// Ordered list of 2^(p1+p2) entries over subblocks of a fixed length.
///
/// Construction checks shape only (lengths, binary values, active counts);
/// injectivity and ESA are properties reported by validate_codebook so that a
/// defective table can still be built and inspected. Lookups resolve to the
/// first matching entry.
class Codebook {
 public:
  Codebook(std::vector<CodebookEntry> entries, std::size_t subblock_len)
      : entries_(std::move(entries)), subblock_len_(subblock_len) {
    if (subblock_len_ == 0 || subblock_len_ > 31) throw ConfigError("codebook subblock length must be in [1, 31]");
    if (entries_.empty()) throw ConfigError("codebook has no entries");
    p1_ = entries_.front().p1_bits.size();
    p2_ = entries_.front().p2_bits.size();
    if (p1_ + p2_ > 30) throw ConfigError("codebook label too long");
    if (entries_.size() != (std::size_t{1} << (p1_ + p2_)))
      throw ConfigError("codebook must hold exactly 2^(p1+p2) entries");
    by_label_.assign(entries_.size(), npos);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (e.p1_bits.size() != p1_ || e.p2_bits.size() != p2_) throw ConfigError("codebook entries disagree on p1/p2 length");
      if (e.sap.size() != subblock_len_) throw ConfigError("codebook SAP length differs from subblock length");
      std::size_t ones = 0;
      for (auto b : e.sap) {
        if (b > 1) throw ConfigError("SAP entries must be 0 or 1");
        ones += b;
      }
      for (auto b : e.label())
        if (b > 1) throw ConfigError("bit labels must be 0 or 1");
      if (ones != e.active_count) throw ConfigError("active_count does not match the SAP weight");
      max_active_ = std::max(max_active_, ones);
      const auto lbl = bits_to_uint(e.label());
      if (by_label_[lbl] == npos) by_label_[lbl] = i;
      by_sap_.try_emplace(e.sap_mask(), i);
    }
  }

  std::span<const CodebookEntry> entries() const { return entries_; }
  const CodebookEntry& operator[](std::size_t i) const { return entries_[i]; }
  std::size_t size() const { return entries_.size(); }
  std::size_t subblock_len() const { return subblock_len_; }
  std::size_t p1() const { return p1_; }
  std::size_t p2() const { return p2_; }
  std::size_t label_bits() const { return p1_ + p2_; }
  std::size_t max_active() const { return max_active_; }

  std::optional<std::size_t> find_label(std::uint64_t label) const {
    if (label >= by_label_.size() || by_label_[label] == npos) return std::nullopt;
    return by_label_[label];
  }
  std::optional<std::size_t> find_sap(std::uint32_t mask) const {
    auto it = by_sap_.find(mask);
    if (it == by_sap_.end()) return std::nullopt;
    return it->second;
  }

  double mean_active_count() const {
    double s = 0;
    for (const auto& e : entries_) s += static_cast<double>(e.active_count);
    return s / static_cast<double>(entries_.size());
  }

 private:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  std::vector<CodebookEntry> entries_;
  std::size_t subblock_len_;
  std::size_t p1_ = 0;
  std::size_t p2_ = 0;
  std::size_t max_active_ = 0;
  std::vector<std::size_t> by_label_;
  std::unordered_map<std::uint32_t, std::size_t> by_sap_;
};

namespace detail {

inline CodebookEntry make_entry(int row, std::uint64_t p1, std::size_t p1_len, std::uint64_t p2, std::size_t p2_len,
                                std::uint32_t sap_mask, std::size_t len) {
  CodebookEntry e;
  e.row_id = row;
  e.p1_bits = uint_to_bits(p1, p1_len);
  e.p2_bits = uint_to_bits(p2, p2_len);
  e.sap = uint_to_bits(sap_mask, len);
  e.active_count = static_cast<std::size_t>(std::popcount(sap_mask));
  return e;
}

}  // namespace detail

/// The 16-row look-up table for L = 4 with p1 = p2 = 2, verbatim (row 13 keeps
/// the all-zero pattern).
inline Codebook build_table1_codebook() {
  // SAP masks in row order; leftmost subcarrier is the most significant bit.
  static constexpr std::uint32_t saps[16] = {
      0b1000, 0b0100, 0b0010, 0b0001,  // p1 = 00
      0b1100, 0b1010, 0b1001, 0b0101,  // p1 = 01
      0b1110, 0b1011, 0b1101, 0b0111,  // p1 = 10
      0b0000, 0b0011, 0b0110, 0b1111,  // p1 = 11
  };
  std::vector<CodebookEntry> entries;
  for (std::uint32_t g = 0; g < 16; ++g)
    entries.push_back(detail::make_entry(static_cast<int>(g + 1), g >> 2, 2, g & 3U, 2, saps[g], 4));
  return Codebook(std::move(entries), 4);
}

inline const CodebookEntry& map_bits(const Codebook& cb, std::span<const std::uint8_t> p1_bits,
                                     std::span<const std::uint8_t> p2_bits) {
  if (p1_bits.size() != cb.p1() || p2_bits.size() != cb.p2())
    throw ConfigError("bit vector lengths do not match the codebook's p1/p2");
  const auto label = (bits_to_uint(p1_bits) << cb.p2()) | bits_to_uint(p2_bits);
  auto idx = cb.find_label(label);
  if (!idx) throw ConfigError("bit label missing from codebook");
  return cb[*idx];
}

inline std::pair<BitVector, BitVector> demap_sap(const Codebook& cb, std::span<const std::uint8_t> sap) {
  if (sap.size() != cb.subblock_len()) throw ConfigError("SAP length does not match the codebook");
  std::uint32_t mask = 0;
  for (auto b : sap) {
    if (b > 1) throw IllegalPatternError("SAP entries must be 0 or 1");
    mask = (mask << 1) | b;
  }
  auto idx = cb.find_sap(mask);
  if (!idx) throw IllegalPatternError("illegal pattern: SAP is not in the codebook");
  const auto& e = cb[*idx];
  return {e.p1_bits, e.p2_bits};
}

struct CodebookReport {
  bool labels_injective = true;
  bool saps_injective = true;
  std::vector<std::size_t> activation_counts;  // per subcarrier position
  std::size_t esa_target = 0;                  // entries / 2
  bool esa = true;

  bool injective() const { return labels_injective && saps_injective; }
  bool ok() const { return injective() && esa; }
};

inline CodebookReport validate_codebook(const Codebook& cb) {
  CodebookReport r;
  r.activation_counts.assign(cb.subblock_len(), 0);
  r.esa_target = cb.size() / 2;
  std::vector<std::uint64_t> labels;
  std::vector<std::uint32_t> saps;
  for (const auto& e : cb.entries()) {
    labels.push_back(bits_to_uint(e.label()));
    saps.push_back(e.sap_mask());
    for (std::size_t j = 0; j < e.sap.size(); ++j) r.activation_counts[j] += e.sap[j];
  }
  std::sort(labels.begin(), labels.end());
  std::sort(saps.begin(), saps.end());
  r.labels_injective = std::adjacent_find(labels.begin(), labels.end()) == labels.end();
  r.saps_injective = std::adjacent_find(saps.begin(), saps.end()) == saps.end();
  r.esa = cb.size() % 2 == 0 &&
          std::all_of(r.activation_counts.begin(), r.activation_counts.end(),
                      [&](std::size_t c) { return c == r.esa_target; });
  return r;
}

/// Seeded codebook for any power-of-two L in [2, 16] with p1 = p2 = log2(L).
///
/// Construction rule (deterministic for a given seed):
///  1. Number value k (the p1 bits) targets weight k+1. Each group takes up to
///     L unused patterns of that weight in seeded-shuffled order.
///  2. Remaining slots are filled with unused patterns whose weight is closest
///     to the per-slot average needed to bring the total number of ones to
///     L^3/2, which ESA requires.
///  3. ESA repair: while some position is over-activated and another
///     under-activated, move a one between them inside an entry whose swapped
///     pattern is unused (weight preserved). When no such move exists, an
///     entry is replaced by an unused pattern of the same weight if that does
///     not worsen the imbalance.
///  4. Within a group, p2 values are assigned in the order patterns were
///     taken.
/// Throws ConfigError if L is out of range or repair does not converge.
inline Codebook generate_generic_codebook(std::size_t L, std::uint64_t seed) {
  if (L < 2 || L > 16 || !is_power_of_two(L))
    throw ConfigError("generic codebook needs a power-of-two L in [2, 16]");
  const std::size_t bits = ilog2(L);
  const std::size_t n_entries = L * L;
  const std::size_t n_patterns = std::size_t{1} << L;
  const std::size_t target_ones = L * n_entries / 2;
  Rng rng(seed);

  std::vector<std::vector<std::uint32_t>> by_weight(L + 1);
  for (std::uint32_t p = 0; p < n_patterns; ++p) by_weight[static_cast<std::size_t>(std::popcount(p))].push_back(p);
  for (auto& w : by_weight) std::shuffle(w.begin(), w.end(), rng);

  std::vector<bool> used(n_patterns, false);
  std::vector<std::vector<std::uint32_t>> groups(L);
  std::size_t ones = 0;
  for (std::size_t k = 0; k < L; ++k) {
    for (auto p : by_weight[k + 1]) {
      if (groups[k].size() == L) break;
      groups[k].push_back(p);
      used[p] = true;
      ones += k + 1;
    }
  }
  std::size_t open = 0;
  for (const auto& g : groups) open += L - g.size();
  for (std::size_t k = 0; k < L; ++k) {
    while (groups[k].size() < L) {
      const double want = (static_cast<double>(target_ones) - static_cast<double>(ones)) / static_cast<double>(open);
      std::optional<std::uint32_t> pick;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t w = 0; w <= L; ++w) {
        const double d = std::abs(static_cast<double>(w) - want);
        if (d >= best) continue;
        for (auto p : by_weight[w])
          if (!used[p]) {
            pick = p;
            best = d;
            break;
          }
      }
      if (!pick) throw ConfigError("generic codebook: pattern pool exhausted");
      groups[k].push_back(*pick);
      used[*pick] = true;
      ones += static_cast<std::size_t>(std::popcount(*pick));
      --open;
    }
  }

  const std::size_t half = n_entries / 2;
  auto counts_of = [&] {
    std::vector<long> c(L, 0);
    for (const auto& g : groups)
      for (auto p : g)
        for (std::size_t j = 0; j < L; ++j)
          if (p >> (L - 1 - j) & 1U) ++c[j];
    return c;
  };
  auto imbalance = [&](const std::vector<long>& c) {
    long s = 0;
    for (auto v : c) s += (v - static_cast<long>(half)) * (v - static_cast<long>(half));
    return s;
  };

  // Total weight must match before position balancing can succeed.
  for (std::size_t guard = 0; ones != target_ones; ++guard) {
    if (guard > 100000) throw ConfigError("generic codebook: weight balancing did not converge");
    const bool too_many = ones > target_ones;
    std::uniform_int_distribution<std::size_t> pick_entry(0, n_entries - 1);
    const auto e = pick_entry(rng);
    auto& slot = groups[e / L][e % L];
    const auto w = static_cast<std::size_t>(std::popcount(slot));
    if ((too_many && w == 0) || (!too_many && w == L)) continue;
    const auto nw = too_many ? w - 1 : w + 1;
    for (auto p : by_weight[nw])
      if (!used[p]) {
        used[slot] = false;
        used[p] = true;
        slot = p;
        ones = too_many ? ones - 1 : ones + 1;
        break;
      }
  }

  for (std::size_t iter = 0;; ++iter) {
    if (iter > 200000) throw ConfigError("generic codebook: ESA repair did not converge");
    const auto c = counts_of();
    const auto score = imbalance(c);
    if (score == 0) break;
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> moves;  // entry, from, to
    for (std::size_t e = 0; e < n_entries; ++e) {
      const auto p = groups[e / L][e % L];
      for (std::size_t j = 0; j < L; ++j) {
        if (c[j] <= static_cast<long>(half) || !(p >> (L - 1 - j) & 1U)) continue;
        for (std::size_t k = 0; k < L; ++k) {
          if (c[k] >= static_cast<long>(half) || (p >> (L - 1 - k) & 1U)) continue;
          const auto q = p ^ (1U << (L - 1 - j)) ^ (1U << (L - 1 - k));
          if (!used[q]) moves.emplace_back(e, j, k);
        }
      }
    }
    if (!moves.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, moves.size() - 1);
      const auto [e, j, k] = moves[pick(rng)];
      auto& slot = groups[e / L][e % L];
      const auto q = slot ^ (1U << (L - 1 - j)) ^ (1U << (L - 1 - k));
      used[slot] = false;
      used[q] = true;
      slot = q;
      continue;
    }
    std::uniform_int_distribution<std::size_t> pick_entry(0, n_entries - 1);
    const auto e = pick_entry(rng);
    auto& slot = groups[e / L][e % L];
    const auto& pool = by_weight[static_cast<std::size_t>(std::popcount(slot))];
    std::uniform_int_distribution<std::size_t> pick_pattern(0, pool.size() - 1);
    const auto q = pool[pick_pattern(rng)];
    if (used[q]) continue;
    const auto old = slot;
    slot = q;
    if (imbalance(counts_of()) > score) {
      slot = old;
    } else {
      used[old] = false;
      used[q] = true;
    }
  }

  std::vector<CodebookEntry> entries;
  for (std::size_t k = 0; k < L; ++k)
    for (std::size_t v = 0; v < L; ++v)
      entries.push_back(detail::make_entry(static_cast<int>(k * L + v + 1), k, bits, v, bits, groups[k][v], L));
  return Codebook(std::move(entries), L);
}

/// OFDM-IM pattern set: floor(log2 C(L,K)) index bits select one of the first
/// 2^p2 K-of-L combinations in lexicographic order.
inline Codebook build_im_codebook(std::size_t L, std::size_t K) {
  if (L == 0 || L > 16 || K == 0 || K > L) throw ConfigError("OFDM-IM needs 1 <= K <= L <= 16");
  std::vector<std::uint32_t> combos;
  // Lexicographic over position sets, leftmost subcarrier first.
  std::vector<std::size_t> idx(K);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    std::uint32_t m = 0;
    for (auto i : idx) m |= 1U << (L - 1 - i);
    combos.push_back(m);
    std::size_t i = K;
    while (i > 0 && idx[i - 1] == L - K + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < K; ++j) idx[j] = idx[j - 1] + 1;
  }
  const std::size_t p2 = ilog2(combos.size());
  std::vector<CodebookEntry> entries;
  for (std::size_t v = 0; v < (std::size_t{1} << p2); ++v)
    entries.push_back(detail::make_entry(static_cast<int>(v + 1), 0, 0, v, p2, combos[v], L));
  return Codebook(std::move(entries), L);
}

/// OFDM-SNM pattern set: log2(L) number bits with value v activate the first
/// v+1 subcarriers.
inline Codebook build_snm_codebook(std::size_t L) {
  if (L < 2 || L > 16 || !is_power_of_two(L)) throw ConfigError("OFDM-SNM needs a power-of-two L in [2, 16]");
  const std::size_t p1 = ilog2(L);
  std::vector<CodebookEntry> entries;
  for (std::size_t v = 0; v < L; ++v) {
    const std::uint32_t mask = ((1U << (v + 1)) - 1U) << (L - 1 - v);
    entries.push_back(detail::make_entry(static_cast<int>(v + 1), v, p1, 0, 0, mask, L));
  }
  return Codebook(std::move(entries), L);
}

/// Conventional OFDM seen as a one-subcarrier subblock that is always active.
inline Codebook build_ofdm_codebook() {
  return Codebook({detail::make_entry(1, 0, 0, 0, 0, 1U, 1)}, 1);
}

// Text format: one line per entry, "g p1_bits p2_bits sap I", bits as 0/1
// characters, '-' for an empty bit field.

inline std::string bits_to_string(std::span<const std::uint8_t> bits) {
  if (bits.empty()) return "-";
  std::string s;
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

inline BitVector bits_from_string(std::string_view s) {
  BitVector out;
  if (s == "-") return out;
  for (char ch : s) {
    if (ch != '0' && ch != '1') throw ConfigError("bit field must contain only 0/1");
    out.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return out;
}

inline void write_codebook(std::ostream& os, const Codebook& cb) {
  for (const auto& e : cb.entries())
    os << e.row_id << ' ' << bits_to_string(e.p1_bits) << ' ' << bits_to_string(e.p2_bits) << ' '
       << bits_to_string(e.sap) << ' ' << e.active_count << '\n';
}

inline std::string codebook_to_text(const Codebook& cb) {
  std::ostringstream os;
  write_codebook(os, cb);
  return os.str();
}

inline Codebook read_codebook(std::istream& is) {
  std::vector<CodebookEntry> entries;
  std::string line;
  std::size_t L = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::istringstream ls(line);
    CodebookEntry e;
    std::string p1, p2, sap;
    if (!(ls >> e.row_id >> p1 >> p2 >> sap >> e.active_count)) throw ConfigError("malformed codebook line: " + line);
    e.p1_bits = bits_from_string(p1);
    e.p2_bits = bits_from_string(p2);
    e.sap = bits_from_string(sap);
    L = e.sap.size();
    entries.push_back(std::move(e));
  }
  return Codebook(std::move(entries), L);
}

inline Codebook codebook_from_text(const std::string& text) {
  std::istringstream is(text);
  return read_codebook(is);
}

}  // namespace hnim
