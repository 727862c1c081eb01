// Sends one OFDM block through a 10-tap Rayleigh channel at 15 dB and prints
// how many bits each detector gets wrong.

#include <cstdio>

#include "hnim/hnim.hpp"

int main() {
  using namespace hnim;
  const auto layout = make_scheme(SchemeId::hnim, FrameConfig::reference(16));
  const double se = scheme_spectral_efficiency(layout, 8);
  const auto noise = calibrate_noise(se, 15.0);
  Rng rng(2024);

  BitVector bits(layout.max_bits_per_block());
  for (auto& b : bits) b = random_bit(rng);
  const auto tx = build_block(bits, layout);
  const auto ch = draw_channel(PowerDelayProfile::uniform(10), layout.n_fft, rng);
  const auto rx = apply_channel(ofdm_modulate(tx.freq, layout.n_cp), ch, noise, rng);
  const auto fe = receive_front_end(rx, ch);

  std::printf("bits consumed: %zu, SE %.4f b/s/Hz, N0 %.4g\n", tx.consumed, se, noise.variance_freq);
  const DetectorContext ctx(layout, noise.variance_freq);
  for (auto id : {DetectorId::ml, DetectorId::isape, DetectorId::psape, DetectorId::llr}) {
    std::size_t errors = 0;
    for (std::size_t g = 0; g < layout.n_subblocks; ++g) {
      const auto y = std::span<const cd>(fe.y_f.values).subspan(g * 4, 4);
      const auto d = detect(id, y, ch.subblock(g, 4), tx.payloads[g].entry_index, ctx);
      errors += count_bit_errors(tx.groups[g].concatenated(), d.bits);
    }
    std::printf("%-6s %zu bit errors\n", std::string(to_string(id)).c_str(), errors);
  }
}
