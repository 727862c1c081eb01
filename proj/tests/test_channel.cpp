#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "hnim/channel.hpp"

using namespace hnim;

TEST(Pdp, Normalized) {
  for (const auto& p : {PowerDelayProfile::uniform(10), PowerDelayProfile::exponential(10, 3.0)}) {
    double s = 0;
    for (double v : p.tap_power) s += v;
    EXPECT_NEAR(s, 1.0, 1e-14);
  }
  const auto e = PowerDelayProfile::exponential(3, 2.0);
  EXPECT_NEAR(e.tap_power[1] / e.tap_power[0], std::exp(-0.5), 1e-14);
  EXPECT_THROW(PowerDelayProfile::uniform(0), ConfigError);
  EXPECT_THROW(PowerDelayProfile::exponential(4, 0.0), ConfigError);
}

TEST(DrawChannel, SingleTapIsFlat) {
  Rng rng(1);
  const auto ch = draw_channel(PowerDelayProfile::uniform(1), 64, rng);
  for (const auto& h : ch.freq_response) EXPECT_NEAR(std::abs(h), std::abs(ch.freq_response[0]), 1e-14);
}

TEST(DrawChannel, ResponseMatchesDirectTransform) {
  Rng rng(2);
  const auto ch = draw_channel(PowerDelayProfile::uniform(10), 64, rng);
  for (std::size_t k = 0; k < 64; ++k) {
    cd acc{};
    for (std::size_t l = 0; l < 10; ++l)
      acc += ch.taps[l] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * l) / 64.0);
    EXPECT_LT(std::abs(acc - ch.freq_response[k]), 1e-12);
  }
}

TEST(DrawChannel, UnitAveragePowerPerBin) {
  Rng rng(3);
  std::vector<double> acc(64, 0.0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto ch = draw_channel(PowerDelayProfile::uniform(10), 64, rng);
    for (std::size_t k = 0; k < 64; ++k) acc[k] += std::norm(ch.freq_response[k]);
  }
  for (double a : acc) EXPECT_NEAR(a / n, 1.0, 0.01);
}

TEST(ApplyChannel, IdentityAndHandConvolution) {
  Rng rng(4);
  TimeBlock x{{1, 2, 3, 4, 5, 6}, 2};
  auto y = apply_channel(x, make_channel({cd{1, 0}}, 4), NoiseSpec::none(), rng);
  EXPECT_EQ(y.samples, x.samples);
  TimeBlock imp{{1, 0, 0, 0, 0, 0}, 2};
  y = apply_channel(imp, make_channel({cd{1, 0}, cd{0.5, 0}}, 4), NoiseSpec::none(), rng);
  EXPECT_EQ(y.samples, (std::vector<cd>{1, 0.5, 0, 0, 0, 0}));
}

TEST(ApplyChannel, NoiseVariance) {
  Rng rng(5);
  TimeBlock zero{std::vector<cd>(100000), 0};
  const auto y = apply_channel(zero, make_channel({cd{1, 0}}, 1), NoiseSpec::from_variance(0.25), rng);
  double s = 0;
  for (const auto& v : y.samples) s += std::norm(v);
  EXPECT_NEAR(s / 100000.0 / 0.25, 1.0, 0.02);
}

TEST(ApplyChannel, ShortCpIsConfigError) {
  Rng rng(6);
  TimeBlock x{std::vector<cd>(72), 8};
  EXPECT_THROW(apply_channel(x, draw_channel(PowerDelayProfile::uniform(10), 64, rng), NoiseSpec::none(), rng),
               ConfigError);
  EXPECT_NO_THROW(apply_channel(x, draw_channel(PowerDelayProfile::uniform(9), 64, rng), NoiseSpec::none(), rng));
}

TEST(CalibrateNoise, Convention) {
  EXPECT_DOUBLE_EQ(calibrate_noise(1.0, 0.0).variance_time, 1.0);
  EXPECT_NEAR(calibrate_noise(1.0, 10.0).variance_time, 0.1, 1e-15);
  const auto a = calibrate_noise(96.0 / 72.0, 7.0), b = calibrate_noise(64.0 / 72.0, 7.0);
  EXPECT_NEAR(a.variance_time / b.variance_time, 0.6667, 1e-4);
  EXPECT_EQ(a.variance_time, a.variance_freq);
  EXPECT_THROW(calibrate_noise(0.0, 10.0), ConfigError);
  EXPECT_FALSE(calibrate_noise(1.0, std::numeric_limits<double>::infinity()).enabled());
}

TEST(Covariance, ClosedFormCases) {
  const auto k1 = subblock_channel_covariance(PowerDelayProfile::uniform(1), 64, 4);
  EXPECT_LT((k1 - Eigen::MatrixXcd::Ones(4, 4)).norm(), 1e-14);
  const auto k4 = subblock_channel_covariance(PowerDelayProfile::uniform(4), 64, 4);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(k4(i, i) - 1.0), 0.0, 1e-14);
}

TEST(Covariance, HermitianPsdUnitDiagonal) {
  for (const auto& p : {PowerDelayProfile::uniform(10), PowerDelayProfile::exponential(10, 2.0)})
    for (std::size_t L : {2, 4, 8}) {
      const auto K = subblock_channel_covariance(p, 64, L);
      EXPECT_LT((K - K.adjoint()).norm(), 1e-14);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(K);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
      for (std::size_t i = 0; i < L; ++i) EXPECT_NEAR(K(i, i).real(), 1.0, 1e-14);
    }
}

TEST(Covariance, MatchesSampleCovariance) {
  Rng rng(7);
  const int n = 100000;
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(4, 4);
  for (int i = 0; i < n; ++i) {
    const auto ch = draw_channel(PowerDelayProfile::uniform(10), 64, rng);
    Eigen::Map<const Eigen::VectorXcd> h(ch.freq_response.data(), 4);
    S += h * h.adjoint();
  }
  S /= n;
  const auto K = subblock_channel_covariance(PowerDelayProfile::uniform(10), 64, 4);
  EXPECT_LT((S - K).norm() / K.norm(), 0.01);
}

// Property: CP-extended propagation + front end = per-bin multiplication.
TEST(Property, CircularConvolution) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    FrequencyBlock x{std::vector<cd>(64)};
    for (auto& v : x.values) v = complex_gaussian(rng, 1.0);
    const auto ch = draw_channel(PowerDelayProfile::exponential(10, 3.0), 64, rng);
    const auto fe = receive_front_end(apply_channel(ofdm_modulate(x, 16), ch, NoiseSpec::none(), rng), ch);
    double num = 0, den = 0;
    for (std::size_t k = 0; k < 64; ++k) {
      num += std::norm(fe.y_f.values[k] - x.values[k] * ch.freq_response[k]);
      den += std::norm(x.values[k] * ch.freq_response[k]);
    }
    EXPECT_LT(std::sqrt(num / den), 1e-10);
  }
}
