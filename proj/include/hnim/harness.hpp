#pragma once

// Reproducible Monte Carlo sweeps, CSV output and figure recipes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hnim/analysis.hpp"
#include "hnim/channel.hpp"
#include "hnim/codebook.hpp"
#include "hnim/detectors.hpp"
#include "hnim/error.hpp"
#include "hnim/modem.hpp"
#include "hnim/rng.hpp"

namespace hnim {

struct ChannelSpec {
  std::size_t taps = 10;
  std::string profile = "uniform";  // uniform | exponential
  double decay = 3.0;               // exponential decay constant in taps

  PowerDelayProfile pdp() const {
    if (profile == "uniform") return PowerDelayProfile::uniform(taps);
    if (profile == "exponential") return PowerDelayProfile::exponential(taps, decay);
    throw ConfigError("unknown channel profile: " + profile);
  }
};

struct StopRule {
  std::uint64_t min_bit_errors = 200;
  std::uint64_t max_bits = 10'000'000;
};

/// Everything a sweep depends on; results are a pure function of it.
///
/// `frame.n_cp` is the cyclic prefix used on the air; `se_cp` is the CP length
/// of the spectral-efficiency bookkeeping (Eb/N0 calibration and throughput).
struct ExperimentSpec {
  SchemeId scheme = SchemeId::hnim;
  DetectorId detector = DetectorId::ml;
  FrameConfig frame = FrameConfig::reference(16);
  std::size_t se_cp = 8;
  ChannelSpec channel;
  std::vector<double> snr_db = {0, 5, 10, 15, 20, 25, 30, 35, 40};
  bool noiseless = false;
  StopRule stop;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::size_t batch = 64;  // trials between stop-rule checks

  void validate() const {
    frame.validate();
    if (!noiseless) {
      if (snr_db.empty()) throw ConfigError("SNR grid is empty");
      for (std::size_t i = 1; i < snr_db.size(); ++i)
        if (!(snr_db[i] > snr_db[i - 1])) throw ConfigError("SNR grid must be strictly increasing");
    }
    if (stop.min_bit_errors == 0 || stop.max_bits == 0) throw ConfigError("stop rule must be positive");
    if (batch == 0) throw ConfigError("batch size must be positive");
    if (channel.taps == 0) throw ConfigError("channel needs at least one tap");
    if (frame.n_cp + 1 < channel.taps)
      throw ConfigError("cyclic prefix shorter than the channel impulse response (n_cp < n_taps - 1)");
    (void)channel.pdp();
  }
};

/// Integer tallies of one sweep point; summing is exact and order-free.
struct Tally {
  std::uint64_t trials = 0;
  std::uint64_t bits = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t blocks = 0;
  std::uint64_t block_errors = 0;
  std::uint64_t subblocks = 0;
  std::uint64_t subblock_errors = 0;
  std::uint64_t ops = 0;
  std::uint64_t metric_evals = 0;
  // Per-trial moments for the ratio-estimator confidence interval.
  std::uint64_t sum_e2 = 0;
  std::uint64_t sum_n2 = 0;
  std::uint64_t sum_en = 0;

  Tally& operator+=(const Tally& o) {
    trials += o.trials;
    bits += o.bits;
    bit_errors += o.bit_errors;
    blocks += o.blocks;
    block_errors += o.block_errors;
    subblocks += o.subblocks;
    subblock_errors += o.subblock_errors;
    ops += o.ops;
    metric_evals += o.metric_evals;
    sum_e2 += o.sum_e2;
    sum_n2 += o.sum_n2;
    sum_en += o.sum_en;
    return *this;
  }
  friend bool operator==(const Tally&, const Tally&) = default;
};

struct SweepPoint {
  double snr_db = 0;
  Tally tally;
  double ber = 0;
  double bler = 0;  // OFDM blocks with at least one bit error
  double ci_halfwidth = 0;
  double throughput = 0;  // SE (1 - BER)
  double ops_per_bit = 0;
};

struct SweepResult {
  ExperimentSpec spec;
  double spectral_efficiency = 0;
  std::vector<SweepPoint> points;
};

namespace detail {

// Nominal noise variance handed to the LLR detector when the channel is
// noiseless; the detector needs N0 > 0.
inline constexpr double kNoiselessDetectorVariance = 1e-12;

struct SweepSetup {
  SchemeLayout layout;
  PowerDelayProfile pdp;
  double se = 0;
};

inline Tally run_trial(const ExperimentSpec& spec, const SweepSetup& setup, const NoiseSpec& noise,
                       const DetectorContext& ctx, std::uint64_t point, std::uint64_t trial) {
  const auto& layout = setup.layout;
  auto rng = make_trial_rng(spec.seed, point, trial);
  BitVector bits(layout.max_bits_per_block());
  for (auto& b : bits) b = random_bit(rng);
  const auto tx = build_block(bits, layout);
  const auto ch = draw_channel(setup.pdp, layout.n_fft, rng);
  const auto rx = apply_channel(ofdm_modulate(tx.freq, layout.n_cp), ch, noise, rng);
  const auto fe = receive_front_end(rx, ch);

  Tally t;
  t.trials = 1;
  t.blocks = 1;
  const auto L = layout.subblock_len;
  const std::span<const cd> yf(fe.y_f.values);
  for (std::size_t g = 0; g < layout.n_subblocks; ++g) {
    const auto d = detect(spec.detector, yf.subspan(g * L, L), ch.subblock(g, L), tx.payloads[g].entry_index, ctx);
    const auto sent = tx.groups[g].concatenated();
    const auto errors = count_bit_errors(sent, d.bits);
    t.bits += sent.size();
    t.bit_errors += errors;
    t.subblocks += 1;
    t.subblock_errors += errors ? 1 : 0;
    t.ops += d.op_count;
    t.metric_evals += d.metric_evals;
  }
  t.block_errors = t.bit_errors ? 1 : 0;
  t.sum_e2 = t.bit_errors * t.bit_errors;
  t.sum_n2 = t.bits * t.bits;
  t.sum_en = t.bit_errors * t.bits;
  return t;
}

inline SweepPoint finish_point(double snr_db, const Tally& t, double se) {
  SweepPoint p;
  p.snr_db = snr_db;
  p.tally = t;
  if (t.bits == 0) return p;
  p.ber = static_cast<double>(t.bit_errors) / static_cast<double>(t.bits);
  p.bler = static_cast<double>(t.block_errors) / static_cast<double>(t.blocks);
  if (t.trials > 1) {
    // Ratio estimator: var(BER) ~ T sum (e_i - r n_i)^2 / ((T - 1) (sum n)^2).
    const long double r = p.ber;
    const long double ss = static_cast<long double>(t.sum_e2) - 2 * r * static_cast<long double>(t.sum_en) +
                           r * r * static_cast<long double>(t.sum_n2);
    const long double T = static_cast<long double>(t.trials);
    const long double n = static_cast<long double>(t.bits);
    const long double var = std::max<long double>(0, T * ss / ((T - 1) * n * n));
    p.ci_halfwidth = static_cast<double>(1.959963984540054L * std::sqrt(var));
  }
  p.throughput = se * (1.0 - p.ber);
  p.ops_per_bit = static_cast<double>(t.ops) / static_cast<double>(t.bits);
  return p;
}

}  // namespace detail

/// Monte Carlo sweep over the SNR grid. Trials run in batches of
/// `spec.batch`; the stop rule is checked only between batches, so the set of
/// trials and every tally are independent of `spec.workers`.
inline SweepResult run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  detail::SweepSetup setup{make_scheme(spec.scheme, spec.frame), spec.channel.pdp(), 0.0};
  setup.se = scheme_spectral_efficiency(setup.layout, spec.se_cp);

  SweepResult result;
  result.spec = spec;
  result.spectral_efficiency = setup.se;
  const std::vector<double> grid =
      spec.noiseless ? std::vector<double>{std::numeric_limits<double>::infinity()} : spec.snr_db;
  const std::size_t workers = std::max<std::size_t>(1, spec.workers);

  for (std::size_t pi = 0; pi < grid.size(); ++pi) {
    const auto noise = spec.noiseless ? NoiseSpec::none() : calibrate_noise(setup.se, grid[pi]);
    const DetectorContext ctx(setup.layout,
                              noise.enabled() ? noise.variance_freq : detail::kNoiselessDetectorVariance);
    Tally total;
    std::vector<Tally> batch(spec.batch);
    for (std::uint64_t first = 0;; first += spec.batch) {
      auto work = [&](std::size_t w) {
        for (std::size_t i = w; i < spec.batch; i += workers)
          batch[i] = detail::run_trial(spec, setup, noise, ctx, pi, first + i);
      };
      if (workers == 1) {
        work(0);
      } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
      }
      for (const auto& t : batch) total += t;
      if (total.bit_errors >= spec.stop.min_bit_errors || total.bits >= spec.stop.max_bits) break;
    }
    result.points.push_back(detail::finish_point(grid[pi], total, setup.se));
  }
  return result;
}

// ---------------------------------------------------------------------------
// CSV

struct CsvRow {
  double x = 0;
  double value = 0;
  double ci_halfwidth = 0;
};

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// Header `# metric=<name> scheme=<id> detector=<id> seed=<n>`, then
/// `snr_db,value,ci_halfwidth` rows (the first column holds the abscissa of
/// non-SNR curves).
inline void write_csv(std::ostream& os, const std::string& metric, const std::string& scheme,
                      const std::string& detector, std::uint64_t seed, std::span<const CsvRow> rows) {
  os << "# metric=" << metric << " scheme=" << scheme << " detector=" << detector << " seed=" << seed << '\n';
  for (const auto& r : rows)
    os << format_number(r.x) << ',' << format_number(r.value) << ',' << format_number(r.ci_halfwidth) << '\n';
}

inline void write_csv_file(const std::filesystem::path& path, const std::string& metric, const std::string& scheme,
                           const std::string& detector, std::uint64_t seed, std::span<const CsvRow> rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path.string());
  write_csv(os, metric, scheme, detector, seed, rows);
}

enum class SweepMetric { ber, bler, throughput };

inline std::vector<CsvRow> sweep_rows(const SweepResult& r, SweepMetric m) {
  std::vector<CsvRow> rows;
  for (const auto& p : r.points) {
    switch (m) {
      case SweepMetric::ber: rows.push_back({p.snr_db, p.ber, p.ci_halfwidth}); break;
      case SweepMetric::bler: rows.push_back({p.snr_db, p.bler, 0.0}); break;
      case SweepMetric::throughput:
        rows.push_back({p.snr_db, p.throughput, r.spectral_efficiency * p.ci_halfwidth});
        break;
    }
  }
  return rows;
}

inline std::string sweep_csv(const SweepResult& r, SweepMetric m) {
  static constexpr const char* names[] = {"ber", "bler", "throughput"};
  std::ostringstream os;
  write_csv(os, names[static_cast<int>(m)], std::string(to_string(r.spec.scheme)),
            std::string(to_string(r.spec.detector)), r.spec.seed, sweep_rows(r, m));
  return os.str();
}

/// Writes ber_, bler_ and throughput_<scheme>_<detector>.csv into `dir`.
inline std::vector<std::filesystem::path> write_sweep(const SweepResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string suffix = std::string(to_string(r.spec.scheme)) + "_" + std::string(to_string(r.spec.detector));
  std::vector<std::filesystem::path> out;
  for (auto [m, name] : {std::pair{SweepMetric::ber, "ber"}, std::pair{SweepMetric::bler, "bler"},
                         std::pair{SweepMetric::throughput, "throughput"}}) {
    auto path = dir / (std::string(name) + "_" + suffix + ".csv");
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path.string());
    os << sweep_csv(r, m);
    out.push_back(path);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Figure recipes

struct ReproduceOptions {
  StopRule stop;
  std::vector<double> snr_db = {0, 5, 10, 15, 20, 25, 30, 35, 40};
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::size_t papr_blocks = 20000;
  std::size_t papr_oversample = 4;
  std::size_t empirical_draws = 10000;
};

namespace detail {

inline std::vector<double> noise_grid(double se, std::span<const double> snr_db) {
  std::vector<double> n0;
  for (double s : snr_db) n0.push_back(calibrate_noise(se, s).variance_freq);
  return n0;
}

}  // namespace detail

/// Runs the recipe for fig1..fig7 and writes one CSV per curve into `dir`.
///
///  fig1  average rate vs M at L = 8 per scheme; determinant-form rate vs
///        Eb/N0 for the hybrid scheme at L = 4, BPSK.
///  fig2  hybrid vs OFDM average rate vs L for M in {2, 4, 16, 64};
///        determinant-form rate vs Eb/N0 at L = 4, QPSK.
///  fig3  SE and EE ratios, bars s1..s5 = HNIM, SNM, IM AR=0.25, IM AR=0.5,
///        OFDM.
///  fig4  throughput under BPSK, optimal ML, all schemes.
///  fig5  throughput under QPSK.
///  fig6  BER under BPSK: HNIM with ml/psape/isape/llr, baselines with ml,
///        plus the union bound (abep_bound.csv).
///  fig7  PAPR CCDF per scheme.
inline std::vector<std::filesystem::path> reproduce_figure(const std::string& figure, const std::filesystem::path& dir,
                                                           const ReproduceOptions& opt = {}) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  auto emit = [&](const std::string& name, const std::string& metric, const std::string& scheme,
                  const std::string& detector, std::span<const CsvRow> rows) {
    const auto path = dir / name;
    write_csv_file(path, metric, scheme, detector, opt.seed, rows);
    files.push_back(path);
  };
  const std::vector<SchemeId> all = {SchemeId::hnim, SchemeId::snm, SchemeId::im, SchemeId::ofdm};

  auto rate_curve = [&](std::size_t M, const std::string& name) {
    const auto frame = FrameConfig::reference(8, M);
    const auto layout = make_scheme(SchemeId::hnim, frame);
    const auto K = subblock_channel_covariance(PowerDelayProfile::uniform(10), frame.n_fft, frame.subblock_len);
    const double se = scheme_spectral_efficiency(layout, frame.n_cp);
    const auto rates = achievable_rate(layout, K, detail::noise_grid(se, opt.snr_db));
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < rates.size(); ++i) rows.push_back({opt.snr_db[i], rates[i], 0});
    emit(name, "achievable_rate", "hnim", "none", rows);
  };

  auto sweep_figure = [&](std::size_t M, SweepMetric metric, const std::string& prefix,
                          std::span<const std::pair<SchemeId, DetectorId>> curves) {
    for (const auto& [scheme, det] : curves) {
      ExperimentSpec spec;
      spec.scheme = scheme;
      spec.detector = det;
      spec.frame = FrameConfig::reference(16, M);
      spec.snr_db = opt.snr_db;
      spec.stop = opt.stop;
      spec.seed = opt.seed;
      spec.workers = opt.workers;
      const auto r = run_sweep(spec);
      emit(prefix + "_" + std::string(to_string(scheme)) + "_" + std::string(to_string(det)) + ".csv",
           prefix, std::string(to_string(scheme)), std::string(to_string(det)), sweep_rows(r, metric));
    }
  };

  if (figure == "fig1") {
    const std::size_t n_fft = 64, L = 8, cp = 8;
    for (auto s : all) {
      std::vector<CsvRow> rows;
      for (std::size_t M : {2, 4, 8, 16, 32, 64}) {
        double bits = 0;
        switch (s) {
          case SchemeId::hnim: bits = hnim_average_bits_per_block(n_fft, L, M); break;
          case SchemeId::snm: bits = snm_average_bits_per_block(n_fft, L, M); break;
          case SchemeId::im: bits = im_bits_per_block(n_fft, L, L / 2, M); break;
          case SchemeId::ofdm: bits = ofdm_bits_per_block(n_fft, M); break;
        }
        rows.push_back({static_cast<double>(M), bits / static_cast<double>(n_fft + cp), 0});
      }
      emit("avg_rate_vs_M_" + std::string(to_string(s)) + ".csv", "average_rate_vs_M", std::string(to_string(s)),
           "none", rows);
    }
    rate_curve(2, "rate_hnim_bpsk.csv");
  } else if (figure == "fig2") {
    const std::size_t n_fft = 64, cp = 8;
    for (std::size_t M : {2, 4, 16, 64}) {
      std::vector<CsvRow> hy, of;
      for (std::size_t L : {2, 4, 8, 16, 32}) {
        hy.push_back({static_cast<double>(L), hnim_average_bits_per_block(n_fft, L, M) / (n_fft + cp), 0});
        of.push_back({static_cast<double>(L), ofdm_bits_per_block(n_fft, M) / (n_fft + cp), 0});
      }
      emit("avg_rate_vs_L_hnim_M" + std::to_string(M) + ".csv", "average_rate_vs_L", "hnim", "none", hy);
      emit("avg_rate_vs_L_ofdm_M" + std::to_string(M) + ".csv", "average_rate_vs_L", "ofdm", "none", of);
    }
    rate_curve(4, "rate_hnim_qpsk.csv");
  } else if (figure == "fig3") {
    const auto frame = FrameConfig::reference(8, 2);
    const std::vector<std::pair<std::string, SchemeLayout>> bars = {
        {"s1", make_scheme(SchemeId::hnim, frame)},
        {"s2", make_scheme(SchemeId::snm, frame)},
        {"s3", make_scheme(SchemeId::im, frame, 1)},
        {"s4", make_scheme(SchemeId::im, frame, 2)},
        {"s5", make_scheme(SchemeId::ofdm, frame)},
    };
    const auto rows = ee_ratios(bars);
    std::vector<CsvRow> se, ee, esf;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      se.push_back({static_cast<double>(i + 1), rows[i].se_ratio, 0});
      ee.push_back({static_cast<double>(i + 1), rows[i].ee_ratio, 0});
      esf.push_back({static_cast<double>(i + 1), rows[i].esf, 0});
    }
    emit("se_ratio.csv", "se_ratio", "s1..s5", "none", se);
    emit("esf.csv", "esf", "s1..s5", "none", esf);
    emit("ee_ratio.csv", "ee_ratio", "s1..s5", "none", ee);
  } else if (figure == "fig4" || figure == "fig5") {
    std::vector<std::pair<SchemeId, DetectorId>> curves;
    for (auto s : all) curves.emplace_back(s, DetectorId::ml);
    sweep_figure(figure == "fig4" ? 2 : 4, SweepMetric::throughput, "throughput", curves);
  } else if (figure == "fig6") {
    const std::vector<std::pair<SchemeId, DetectorId>> curves = {
        {SchemeId::hnim, DetectorId::ml},  {SchemeId::hnim, DetectorId::psape}, {SchemeId::hnim, DetectorId::isape},
        {SchemeId::hnim, DetectorId::llr}, {SchemeId::im, DetectorId::ml},      {SchemeId::snm, DetectorId::ml},
        {SchemeId::ofdm, DetectorId::ml}};
    sweep_figure(2, SweepMetric::ber, "ber", curves);
    const auto layout = make_scheme(SchemeId::hnim, FrameConfig::reference(16, 2));
    const double se = scheme_spectral_efficiency(layout, 8);
    AbepOptions ab;
    ab.pdp = PowerDelayProfile::uniform(10);
    const auto bound = abep_upper_bound(layout, detail::noise_grid(se, opt.snr_db), ab);
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < bound.size(); ++i) rows.push_back({opt.snr_db[i], bound[i], 0});
    emit("abep_bound.csv", "abep_bound", "hnim", "ml", rows);
  } else if (figure == "fig7") {
    for (auto s : all) {
      const auto layout = make_scheme(s, FrameConfig::reference(8, 2));
      Rng rng(splitmix64(opt.seed) ^ static_cast<std::uint64_t>(s));
      const auto st = papr_ccdf(layout, opt.papr_blocks, opt.papr_oversample, rng);
      std::vector<CsvRow> rows;
      for (auto [t, p] : st.curve(0.0, 14.0, 0.25)) rows.push_back({t, p, 0});
      emit("papr_ccdf_" + std::string(to_string(s)) + ".csv", "papr_ccdf", std::string(to_string(s)), "none", rows);
    }
  } else {
    throw ConfigError("unknown figure id: " + figure);
  }
  return files;
}

}  // namespace hnim
