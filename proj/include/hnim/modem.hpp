#pragma once

// Transmitter and receiver chains: constellation mapping, bit splitting,
// subblock construction with per-subblock power reallocation, unitary
// IFFT/CP framing and the receiver front end.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "hnim/codebook.hpp"
#include "hnim/error.hpp"

namespace hnim {

using cd = std::complex<double>;

/// Gray-labelled unit-energy constellation (BPSK or QPSK).
class ConstellationAlphabet {
 public:
  static ConstellationAlphabet bpsk() { return ConstellationAlphabet({{1.0, 0.0}, {-1.0, 0.0}}); }

  // Label (b0 b1) maps to ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2).
  static ConstellationAlphabet qpsk() {
    const double a = 1.0 / std::sqrt(2.0);
    return ConstellationAlphabet({{a, a}, {a, -a}, {-a, a}, {-a, -a}});
  }

  static ConstellationAlphabet for_order(std::size_t mod_order) {
    if (mod_order == 2) return bpsk();
    if (mod_order == 4) return qpsk();
    throw ConfigError("only BPSK (M=2) and QPSK (M=4) constellations are supported");
  }

  std::span<const cd> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  std::size_t bits_per_symbol() const { return bits_; }
  const cd& operator[](std::size_t i) const { return points_[i]; }

  std::size_t index_of(std::span<const std::uint8_t> bits) const {
    if (bits.size() != bits_) throw ConfigError("symbol bit group has the wrong length");
    return static_cast<std::size_t>(bits_to_uint(bits));
  }
  BitVector label(std::size_t index) const { return uint_to_bits(index, bits_); }

 private:
  explicit ConstellationAlphabet(std::vector<cd> points)
      : points_(std::move(points)), bits_(ilog2(points_.size())) {}

  std::vector<cd> points_;
  std::size_t bits_;
};

enum class SchemeId { hnim, im, snm, ofdm };

inline std::string_view to_string(SchemeId s) {
  switch (s) {
    case SchemeId::hnim: return "hnim";
    case SchemeId::im: return "im";
    case SchemeId::snm: return "snm";
    case SchemeId::ofdm: return "ofdm";
  }
  return "?";
}

inline SchemeId parse_scheme(std::string_view s) {
  if (s == "hnim") return SchemeId::hnim;
  if (s == "im") return SchemeId::im;
  if (s == "snm") return SchemeId::snm;
  if (s == "ofdm") return SchemeId::ofdm;
  throw ConfigError("unknown scheme id: " + std::string(s));
}

/// Everything the chains need to build and detect one scheme's blocks.
///
/// Every scheme is described by a codebook over its own subblock length;
/// conventional OFDM uses one-subcarrier subblocks with a single always-on
/// pattern. subblock_power is P_t, the energy of a subblock with I > 0.
struct SchemeLayout {
  SchemeId id = SchemeId::hnim;
  Codebook codebook = build_table1_codebook();
  ConstellationAlphabet alphabet = ConstellationAlphabet::bpsk();
  std::size_t n_fft = 64;
  std::size_t n_cp = 8;
  std::size_t subblock_len = 4;
  std::size_t n_subblocks = 16;
  double subblock_power = 4.0;

  /// Bits carried by a subblock using entry e.
  std::size_t bits_for(const CodebookEntry& e) const {
    return codebook.label_bits() + e.active_count * alphabet.bits_per_symbol();
  }

  /// Average bits per subblock with every label equally likely.
  double mean_bits_per_subblock() const {
    return static_cast<double>(codebook.label_bits()) +
           codebook.mean_active_count() * static_cast<double>(alphabet.bits_per_symbol());
  }
  double mean_bits_per_block() const { return mean_bits_per_subblock() * static_cast<double>(n_subblocks); }
  std::size_t max_bits_per_block() const {
    return n_subblocks * (codebook.label_bits() + codebook.max_active() * alphabet.bits_per_symbol());
  }
};

/// Default OFDM-IM activation: half of each subblock.
inline std::size_t default_im_active(std::size_t L) { return L / 2; }

/// Builds the layout of `scheme` over the frame geometry of `config`.
///
/// HNIM uses the L = 4 look-up codebook and generate_generic_codebook(L, 1)
/// otherwise. Every scheme spends P_t = L per subblock (unit average power
/// per subcarrier when all subblocks are active).
inline SchemeLayout make_scheme(SchemeId scheme, const FrameConfig& config, std::size_t im_active = 0) {
  config.validate();
  const auto L = config.subblock_len;
  SchemeLayout s{.id = scheme,
                 .codebook = build_table1_codebook(),
                 .alphabet = ConstellationAlphabet::for_order(config.mod_order),
                 .n_fft = config.n_fft,
                 .n_cp = config.n_cp,
                 .subblock_len = L,
                 .n_subblocks = config.n_subblocks,
                 .subblock_power = static_cast<double>(L)};
  switch (scheme) {
    case SchemeId::hnim:
      if (L != 4) s.codebook = generate_generic_codebook(L, 1);
      break;
    case SchemeId::im:
      s.codebook = build_im_codebook(L, im_active == 0 ? default_im_active(L) : im_active);
      break;
    case SchemeId::snm:
      s.codebook = build_snm_codebook(L);
      break;
    case SchemeId::ofdm:
      s.codebook = build_ofdm_codebook();
      s.subblock_len = 1;
      s.n_subblocks = config.n_fft;
      s.subblock_power = 1.0;
      break;
  }
  return s;
}

struct SubblockBits {
  BitVector p1;
  BitVector p2;
  BitVector p3;

  BitVector concatenated() const {
    BitVector out(p1);
    out.insert(out.end(), p2.begin(), p2.end());
    out.insert(out.end(), p3.begin(), p3.end());
    return out;
  }
};

struct SplitResult {
  std::vector<SubblockBits> groups;
  std::size_t consumed = 0;
};

/// Consumes the stream sequentially: per subblock p1+p2 label bits, then
/// I(g) log2(M) symbol bits for the pattern those label bits select.
inline SplitResult split_bits(std::span<const std::uint8_t> bits, const SchemeLayout& layout) {
  SplitResult out;
  out.groups.reserve(layout.n_subblocks);
  std::size_t pos = 0;
  auto take = [&](std::size_t n) {
    if (pos + n > bits.size()) throw ConfigError("insufficient bits for the OFDM block");
    BitVector v(bits.begin() + static_cast<std::ptrdiff_t>(pos), bits.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
    return v;
  };
  const auto& cb = layout.codebook;
  for (std::size_t g = 0; g < layout.n_subblocks; ++g) {
    SubblockBits grp;
    grp.p1 = take(cb.p1());
    grp.p2 = take(cb.p2());
    const auto& entry = map_bits(cb, grp.p1, grp.p2);
    grp.p3 = take(entry.active_count * layout.alphabet.bits_per_symbol());
    out.groups.push_back(std::move(grp));
  }
  out.consumed = pos;
  return out;
}

struct SubblockPayload {
  std::size_t entry_index = 0;
  std::vector<std::size_t> symbol_indices;
  std::vector<cd> symbols;  // unscaled constellation points, one per active subcarrier
  BitVector p3_bits;
};

struct BuiltSubblock {
  SubblockPayload payload;
  std::vector<cd> values;  // length L
};

/// Amplitude applied to the active subcarriers of a subblock with I of them.
inline double subblock_scale(double subblock_power, std::size_t active) {
  return active == 0 ? 0.0 : std::sqrt(subblock_power / static_cast<double>(active));
}

inline BuiltSubblock build_subblock(const SubblockBits& group, const Codebook& codebook,
                                    const ConstellationAlphabet& alphabet, double subblock_power) {
  const auto& entry = map_bits(codebook, group.p1, group.p2);
  const auto k = alphabet.bits_per_symbol();
  if (group.p3.size() != entry.active_count * k) throw ConfigError("p3 length does not match the active count");
  BuiltSubblock out;
  out.payload.entry_index = static_cast<std::size_t>(entry.row_id - 1);
  out.payload.p3_bits = group.p3;
  out.values.assign(codebook.subblock_len(), cd{0.0, 0.0});
  const double a = subblock_scale(subblock_power, entry.active_count);
  std::size_t sym = 0;
  for (std::size_t l = 0; l < entry.sap.size(); ++l) {
    if (!entry.sap[l]) continue;
    const auto idx = alphabet.index_of(std::span(group.p3).subspan(sym * k, k));
    out.payload.symbol_indices.push_back(idx);
    out.payload.symbols.push_back(alphabet[idx]);
    out.values[l] = a * alphabet[idx];
    ++sym;
  }
  return out;
}

struct FrequencyBlock {
  std::vector<cd> values;
};

struct TimeBlock {
  std::vector<cd> samples;  // CP followed by the N_F data samples
  std::size_t n_cp = 0;

  std::span<const cd> data() const { return std::span(samples).subspan(n_cp); }
};

/// Unitary inverse DFT.
inline std::vector<cd> unitary_ifft(std::span<const cd> freq) {
  if (freq.size() <= 1) return {freq.begin(), freq.end()};  // Eigen FFT does not handle N = 1
  thread_local Eigen::FFT<double> fft;
  std::vector<cd> in(freq.begin(), freq.end());
  std::vector<cd> out;
  fft.inv(out, in);  // scaled by 1/N
  const double s = std::sqrt(static_cast<double>(freq.size()));
  for (auto& v : out) v *= s;
  return out;
}

/// Unitary forward DFT.
inline std::vector<cd> unitary_fft(std::span<const cd> time) {
  if (time.size() <= 1) return {time.begin(), time.end()};  // Eigen FFT does not handle N = 1
  thread_local Eigen::FFT<double> fft;
  std::vector<cd> in(time.begin(), time.end());
  std::vector<cd> out;
  fft.fwd(out, in);
  const double s = 1.0 / std::sqrt(static_cast<double>(time.size()));
  for (auto& v : out) v *= s;
  return out;
}

/// IFFT of x_F and CP prepend.
inline TimeBlock ofdm_modulate(const FrequencyBlock& x, std::size_t n_cp) {
  const auto n = x.values.size();
  if (n_cp > n) throw ConfigError("cyclic prefix longer than the symbol");
  auto xt = unitary_ifft(x.values);
  TimeBlock out;
  out.n_cp = n_cp;
  out.samples.reserve(n + n_cp);
  out.samples.insert(out.samples.end(), xt.end() - static_cast<std::ptrdiff_t>(n_cp), xt.end());
  out.samples.insert(out.samples.end(), xt.begin(), xt.end());
  return out;
}

inline FrequencyBlock assemble_block(std::span<const std::vector<cd>> subblocks) {
  FrequencyBlock x;
  for (const auto& sb : subblocks) x.values.insert(x.values.end(), sb.begin(), sb.end());
  return x;
}

inline TimeBlock assemble_and_modulate(std::span<const std::vector<cd>> subblocks, std::size_t n_cp) {
  return ofdm_modulate(assemble_block(subblocks), n_cp);
}

/// Result of mapping one bit stream onto an OFDM block.
struct TxBlock {
  FrequencyBlock freq;
  std::vector<SubblockBits> groups;
  std::vector<SubblockPayload> payloads;
  std::size_t consumed = 0;
};

inline TxBlock build_block(std::span<const std::uint8_t> bits, const SchemeLayout& layout) {
  TxBlock tx;
  auto split = split_bits(bits, layout);
  tx.consumed = split.consumed;
  tx.freq.values.reserve(layout.n_fft);
  for (auto& grp : split.groups) {
    auto built = build_subblock(grp, layout.codebook, layout.alphabet, layout.subblock_power);
    tx.freq.values.insert(tx.freq.values.end(), built.values.begin(), built.values.end());
    tx.payloads.push_back(std::move(built.payload));
  }
  tx.groups = std::move(split.groups);
  return tx;
}

/// Frequency-domain block of one of the baseline schemes (IM, SNM, OFDM).
inline TxBlock build_baseline_block(std::span<const std::uint8_t> bits, const FrameConfig& config, SchemeId scheme) {
  if (scheme == SchemeId::hnim) throw ConfigError("build_baseline_block expects im, snm or ofdm");
  return build_block(bits, make_scheme(scheme, config));
}

}  // namespace hnim
