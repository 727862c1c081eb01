// Command-line front end: simulate, analyze, reproduce, codebook.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "hnim/hnim.hpp"

namespace {

using namespace hnim;

// TOML config where `channel.taps = 10` inside a subcommand section keeps
// its dotted name instead of opening a nested section.
struct DottedConfig : CLI::ConfigTOML {
  std::vector<CLI::ConfigItem> from_config(std::istream& is) const override {
    auto items = CLI::ConfigTOML::from_config(is);
    std::vector<CLI::ConfigItem> out;
    for (auto& it : items) {
      if (!it.parents.empty() && it.parents.back() == "channel") {
        if (it.name == "++" || it.name == "--") continue;
        it.parents.pop_back();
        it.name = "channel." + it.name;
      }
      out.push_back(std::move(it));
    }
    return out;
  }
};

struct GridArgs {
  double start = 0, stop = 40, step = 5;

  void add(CLI::App* app) {
    app->add_option("--snr-start", start, "first Eb/N0 point in dB")->capture_default_str();
    app->add_option("--snr-stop", stop, "last Eb/N0 point in dB (inclusive)")->capture_default_str();
    app->add_option("--snr-step", step, "Eb/N0 step in dB")->capture_default_str()->check(CLI::PositiveNumber);
  }
  std::vector<double> grid() const {
    std::vector<double> g;
    for (int i = 0;; ++i) {
      const double v = start + i * step;
      if (v > stop + 1e-9) break;
      g.push_back(v);
    }
    if (g.empty()) throw ConfigError("empty SNR grid");
    return g;
  }
};

std::size_t mod_order(const std::string& mod) {
  if (mod == "bpsk") return 2;
  if (mod == "qpsk") return 4;
  throw ConfigError("unknown modulation: " + mod);
}

const std::map<std::string, std::string> kScheme = {{"hnim", "hnim"}, {"im", "im"}, {"snm", "snm"}, {"ofdm", "ofdm"}};
const std::map<std::string, std::string> kDetector = {
    {"ml", "ml"}, {"isape", "isape"}, {"psape", "psape"}, {"llr", "llr"}};

void write_rows(const std::filesystem::path& dir, const std::string& file, const std::string& metric,
                const std::string& scheme, const std::string& detector, std::uint64_t seed,
                const std::vector<CsvRow>& rows) {
  if (dir.empty()) {
    write_csv(std::cout, metric, scheme, detector, seed, rows);
  } else {
    write_csv_file(dir / file, metric, scheme, detector, seed, rows);
    std::cout << (dir / file).string() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OFDM hybrid number and index modulation link simulator"};
  app.config_formatter(std::make_shared<DottedConfig>());
  app.set_config("--config", "", "TOML file; options go under [simulate], [analyze] or [reproduce]");
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo BER, BLER and throughput sweep");
  std::string scheme = "hnim", detector = "ml", mod = "bpsk", profile = "uniform", out;
  GridArgs grid;
  std::uint64_t seed = 1, min_errors = 200, max_bits = 10'000'000;
  std::size_t workers = 1, cp = 16, se_cp = 8, taps = 10, subblock_len = 4;
  double decay = 3.0;
  bool noiseless = false;
  sim->add_option("--scheme", scheme)->transform(CLI::CheckedTransformer(kScheme))->capture_default_str();
  sim->add_option("--detector", detector)->transform(CLI::CheckedTransformer(kDetector))->capture_default_str();
  sim->add_option("--mod", mod)->check(CLI::IsMember({"bpsk", "qpsk"}))->capture_default_str();
  grid.add(sim);
  sim->add_option("--seed", seed)->capture_default_str();
  sim->add_option("--workers", workers)->capture_default_str()->check(CLI::PositiveNumber);
  sim->add_option("--min-errors", min_errors, "stop a point after this many bit errors")->capture_default_str();
  sim->add_option("--max-bits", max_bits, "stop a point after this many bits")->capture_default_str();
  sim->add_option("--cp", cp, "cyclic prefix on the air")->capture_default_str();
  sim->add_option("--se-cp", se_cp, "cyclic prefix used for SE and Eb/N0 bookkeeping")->capture_default_str();
  sim->add_option("--subblock-len", subblock_len)->capture_default_str();
  sim->add_option("--channel.taps", taps)->capture_default_str();
  sim->add_option("--channel.profile", profile)->check(CLI::IsMember({"uniform", "exponential"}))->capture_default_str();
  sim->add_option("--channel.decay", decay, "exponential profile decay in taps")->capture_default_str();
  sim->add_flag("--noiseless", noiseless, "disable noise (single infinite-SNR point)");
  sim->add_option("--out", out, "output directory (CSV to stdout when omitted)");

  // analyze
  auto* ana = app.add_subcommand("analyze", "closed-form metrics");
  std::string metric = "se", averaging = "covariance";
  std::size_t blocks = 10000, oversample = 4, draws = 10000;
  GridArgs agrid;
  std::string amod = "bpsk", ascheme = "hnim", aout;
  std::size_t acp = 8, ataps = 10, alen = 4;
  std::uint64_t aseed = 1;
  ana->add_option("--metric", metric)->check(CLI::IsMember({"se", "rate", "abep", "ee", "papr"}))->required();
  ana->add_option("--scheme", ascheme)->transform(CLI::CheckedTransformer(kScheme))->capture_default_str();
  ana->add_option("--mod", amod)->check(CLI::IsMember({"bpsk", "qpsk"}))->capture_default_str();
  ana->add_option("--cp", acp)->capture_default_str();
  ana->add_option("--subblock-len", alen)->capture_default_str();
  ana->add_option("--channel.taps", ataps)->capture_default_str();
  agrid.add(ana);
  ana->add_option("--averaging", averaging, "abep channel averaging")
      ->check(CLI::IsMember({"covariance", "independent", "empirical"}))
      ->capture_default_str();
  ana->add_option("--draws", draws, "channel draws for empirical averaging")->capture_default_str();
  ana->add_option("--blocks", blocks, "PAPR blocks")->capture_default_str();
  ana->add_option("--oversample", oversample, "PAPR oversampling factor")->capture_default_str();
  ana->add_option("--seed", aseed)->capture_default_str();
  ana->add_option("--out", aout, "output directory (CSV to stdout when omitted)");

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "write the CSVs of one figure");
  std::string figure, rout = "results";
  ReproduceOptions ropt;
  GridArgs rgrid;
  rep->add_option("--figure", figure)
      ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"}))
      ->required();
  rep->add_option("--out", rout)->capture_default_str();
  rep->add_option("--seed", ropt.seed)->capture_default_str();
  rep->add_option("--workers", ropt.workers)->capture_default_str();
  rep->add_option("--min-errors", ropt.stop.min_bit_errors)->capture_default_str();
  rep->add_option("--max-bits", ropt.stop.max_bits)->capture_default_str();
  rep->add_option("--papr-blocks", ropt.papr_blocks)->capture_default_str();
  rgrid.add(rep);

  // codebook
  auto* cbk = app.add_subcommand("codebook", "print or check a codebook in text form");
  std::size_t cb_len = 4;
  std::uint64_t cb_seed = 1;
  std::string cb_check;
  cbk->add_option("--subblock-len", cb_len, "4 prints the look-up table, other sizes are generated")
      ->capture_default_str();
  cbk->add_option("--seed", cb_seed)->capture_default_str();
  cbk->add_option("--check", cb_check, "validate a codebook file instead of printing")->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      ExperimentSpec spec;
      spec.scheme = parse_scheme(scheme);
      spec.detector = parse_detector(detector);
      spec.frame = FrameConfig::reference(cp, mod_order(mod));
      spec.frame.subblock_len = subblock_len;
      spec.frame.n_subblocks = spec.frame.n_fft / subblock_len;
      spec.frame.p1 = spec.frame.p2 = ilog2(subblock_len);
      spec.se_cp = se_cp;
      spec.channel = {taps, profile, decay};
      spec.noiseless = noiseless;
      if (!noiseless) spec.snr_db = grid.grid();
      spec.stop = {min_errors, max_bits};
      spec.seed = seed;
      spec.workers = workers;
      const auto r = run_sweep(spec);
      if (out.empty()) {
        std::cout << sweep_csv(r, SweepMetric::ber) << sweep_csv(r, SweepMetric::bler)
                  << sweep_csv(r, SweepMetric::throughput);
      } else {
        for (const auto& p : write_sweep(r, out)) std::cout << p.string() << '\n';
      }
    } else if (*ana) {
      FrameConfig frame = FrameConfig::reference(acp, mod_order(amod));
      frame.subblock_len = alen;
      frame.n_subblocks = frame.n_fft / alen;
      frame.p1 = frame.p2 = ilog2(alen);
      const auto sid = parse_scheme(ascheme);
      const auto layout = make_scheme(sid, frame);
      const double se = scheme_spectral_efficiency(layout, frame.n_cp);
      const std::string sname(to_string(sid));
      if (metric == "se") {
        const std::vector<CsvRow> rows = {{0, layout.mean_bits_per_block(), 0}, {1, se, 0}};
        std::cout << "# bits_per_block=" << format_number(layout.mean_bits_per_block())
                  << " se=" << format_number(se) << '\n';
        write_rows(aout, "se_" + sname + ".csv", "spectral_efficiency", sname, "none", aseed, rows);
      } else if (metric == "rate" || metric == "abep") {
        const auto snr = agrid.grid();
        std::vector<double> n0;
        for (double s : snr) n0.push_back(calibrate_noise(se, s).variance_freq);
        const auto pdp = PowerDelayProfile::uniform(ataps);
        std::vector<double> vals;
        if (metric == "rate") {
          vals = achievable_rate(layout, subblock_channel_covariance(pdp, frame.n_fft, alen), n0);
        } else {
          AbepOptions opt;
          opt.pdp = pdp;
          opt.seed = aseed;
          opt.empirical_draws = draws;
          opt.averaging = averaging == "covariance"    ? ChannelAveraging::covariance
                          : averaging == "independent" ? ChannelAveraging::independent_bins
                                                       : ChannelAveraging::empirical;
          vals = abep_upper_bound(layout, n0, opt);
        }
        std::vector<CsvRow> rows;
        for (std::size_t i = 0; i < snr.size(); ++i) rows.push_back({snr[i], vals[i], 0});
        write_rows(aout, metric + "_" + sname + ".csv", metric == "rate" ? "achievable_rate" : "abep_bound", sname,
                   metric == "rate" ? "none" : "ml", aseed, rows);
      } else if (metric == "ee") {
        const std::vector<std::pair<std::string, SchemeLayout>> bars = {
            {"hnim", make_scheme(SchemeId::hnim, frame)},   {"snm", make_scheme(SchemeId::snm, frame)},
            {"im_ar25", make_scheme(SchemeId::im, frame, alen / 4 ? alen / 4 : 1)},
            {"im_ar50", make_scheme(SchemeId::im, frame)}, {"ofdm", make_scheme(SchemeId::ofdm, frame)}};
        std::printf("scheme,se_ratio,esf,ee_ratio\n");
        for (const auto& r : ee_ratios(bars))
          std::printf("%s,%s,%s,%s\n", r.label.c_str(), format_number(r.se_ratio).c_str(),
                      format_number(r.esf).c_str(), format_number(r.ee_ratio).c_str());
      } else {
        Rng rng(aseed);
        const auto st = papr_ccdf(layout, blocks, oversample, rng);
        std::vector<CsvRow> rows;
        for (auto [t, p] : st.curve(0.0, 14.0, 0.25)) rows.push_back({t, p, 0});
        std::cout << "# zero_blocks=" << st.zero_blocks << " papr_at_1e-2=" << format_number(st.threshold_at(1e-2))
                  << '\n';
        write_rows(aout, "papr_ccdf_" + sname + ".csv", "papr_ccdf", sname, "none", aseed, rows);
      }
    } else if (*rep) {
      ropt.snr_db = rgrid.grid();
      for (const auto& p : reproduce_figure(figure, rout, ropt)) std::cout << p.string() << '\n';
    } else if (*cbk) {
      if (!cb_check.empty()) {
        std::ifstream is(cb_check);
        const auto cb = read_codebook(is);
        const auto rep_ = validate_codebook(cb);
        std::cout << "entries=" << cb.size() << " labels_injective=" << rep_.labels_injective
                  << " saps_injective=" << rep_.saps_injective << " esa=" << rep_.esa << " counts=";
        for (auto c : rep_.activation_counts) std::cout << c << ' ';
        std::cout << '\n';
        return rep_.ok() ? 0 : 1;
      }
      const auto cb = cb_len == 4 ? build_table1_codebook() : generate_generic_codebook(cb_len, cb_seed);
      write_codebook(std::cout, cb);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
