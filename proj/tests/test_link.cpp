#include <catch2/catch_amalgamated.hpp>

#include "uavris/link.hpp"

using namespace uavris;

namespace {

ChannelState random_channels(int A, int L, int K, std::uint64_t seed) {
  Rng rng(seed);
  ChannelState cs;
  cs.g1_true.resize(A, L);
  cs.g_ru_true.resize(K, L);
  for (int l = 0; l < L; ++l) {
    for (int a = 0; a < A; ++a) cs.g1_true(a, l) = rng.cnormal(1.0);
    for (int k = 0; k < K; ++k) cs.g_ru_true(k, l) = rng.cnormal(1.0);
  }
  cs.g1_est = cs.g1_true;
  cs.g_ru_est = cs.g_ru_true;
  return cs;
}

Precoder unit_precoder(int A, int K, double power) {
  Precoder p;
  p.vectors = Eigen::MatrixXcd::Zero(A, K);
  p.powers = Eigen::VectorXd::Constant(K, power);
  for (int k = 0; k < K; ++k) p.vectors(0, k) = std::sqrt(power);
  return p;
}

}  // namespace

TEST_CASE("effective_gain is zero with no assigned elements") {
  auto cs = random_channels(2, 4, 1, 1);
  ReflectionConfig refl{Eigen::VectorXd::Zero(4)};
  AssignmentMatrix assign{Eigen::MatrixXi::Zero(1, 4)};
  auto w = effective_gain(cs, refl, assign, unit_precoder(2, 1, 3.0), 0);
  REQUIRE(std::abs(w) == Catch::Approx(0.0));
}

TEST_CASE("effective_gain scalar cascade") {
  ChannelState cs;
  cs.g1_true = Eigen::MatrixXcd::Constant(1, 1, Complex{1.0, 0.0});
  cs.g_ru_true = Eigen::MatrixXcd::Constant(1, 1, Complex{1.0, 0.0});
  cs.g1_est = cs.g1_true;
  cs.g_ru_est = cs.g_ru_true;
  ReflectionConfig refl{Eigen::VectorXd::Zero(1)};
  AssignmentMatrix assign{Eigen::MatrixXi::Ones(1, 1)};
  double p = 2.7;
  auto w = effective_gain(cs, refl, assign, unit_precoder(1, 1, p), 0);
  REQUIRE(w.real() == Catch::Approx(std::sqrt(p)).epsilon(1e-12));
  REQUIRE(w.imag() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("effective_gain two-element co- and anti-phase") {
  ChannelState cs;
  cs.g1_true = Eigen::MatrixXcd::Constant(1, 2, Complex{1.0, 0.0});
  cs.g_ru_true.resize(1, 2);
  cs.g_ru_true(0, 0) = Complex{0.8, 0.0};
  cs.g_ru_true(0, 1) = Complex{0.5, 0.0};
  cs.g1_est = cs.g1_true;
  cs.g_ru_est = cs.g_ru_true;
  AssignmentMatrix assign{Eigen::MatrixXi::Ones(1, 2)};
  Precoder pc = unit_precoder(1, 1, 1.0);

  ReflectionConfig co{Eigen::VectorXd::Zero(2)};
  auto w_co = effective_gain(cs, co, assign, pc, 0);
  REQUIRE(std::abs(w_co) == Catch::Approx(1.3).epsilon(1e-12));

  Eigen::VectorXd anti(2);
  anti << 0.0, kPi;
  auto w_anti = effective_gain(cs, ReflectionConfig{anti}, assign, pc, 0);
  REQUIRE(std::abs(w_anti) == Catch::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("snr formula and HI ceiling") {
  REQUIRE(snr(Complex{2.0, 0.0}, 0.0, 0.5) == Catch::Approx(8.0).epsilon(1e-12));
  REQUIRE(snr(Complex{0.0, 0.0}, 0.1, 1.0) == Catch::Approx(0.0));
  // |w|^2 -> infinity with psi = 0.08 approaches 1/psi^2 = 156.25
  double big = snr(Complex{1e9, 0.0}, 0.08, 1e-12);
  REQUIRE(big == Catch::Approx(156.25).epsilon(1e-6));
  double bigger = snr(Complex{1e12, 0.0}, 0.08, 1e-12);
  REQUIRE(bigger <= 156.25);
  REQUIRE(bigger >= big);
  REQUIRE_THROWS_AS(snr(Complex{1.0, 0.0}, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("rates hand values") {
  Eigen::VectorXd one(1);
  one << 1.0;
  REQUIRE(rates(one, 0.0, 1.0)[0] == Catch::Approx(1.0).epsilon(1e-12));
  Eigen::VectorXd three(1);
  three << 3.0;
  REQUIRE(rates(three, 0.5, 1e7)[0] == Catch::Approx(1e7).epsilon(1e-12));
  REQUIRE(rates(three, 1.0, 1e7)[0] == Catch::Approx(0.0));
  REQUIRE_THROWS_AS(rates(one, -0.1, 1.0), std::invalid_argument);
}

TEST_CASE("rate is non-increasing in tau and non-decreasing in snr") {
  Eigen::VectorXd g(1);
  double prev = 1e18;
  for (double tau = 0.0; tau <= 1.0; tau += 0.05) {
    g << 10.0;
    double r = rates(g, tau, 1e6)[0];
    REQUIRE(r <= prev + 1e-9);
    prev = r;
  }
  prev = -1.0;
  for (double s = 0.0; s <= 100.0; s += 5.0) {
    g << s;
    double r = rates(g, 0.3, 1e6)[0];
    REQUIRE(r >= prev - 1e-9);
    prev = r;
  }
}

TEST_CASE("max_ratio_direction aligns the scalar cascade for A=1") {
  auto cs = random_channels(1, 3, 1, 11);
  Eigen::VectorXd phases(3);
  phases << 0.3, 1.1, 4.0;
  ReflectionConfig refl{phases};
  AssignmentMatrix assign{Eigen::MatrixXi::Ones(1, 3)};
  auto dir = max_ratio_direction(cs, refl, assign, 0);
  REQUIRE(dir.norm() == Catch::Approx(1.0).epsilon(1e-12));

  double p = 4.0;
  Precoder pc;
  pc.vectors = dir * std::sqrt(p);
  pc.powers = Eigen::VectorXd::Constant(1, p);
  auto w = effective_gain(cs, refl, assign, pc, 0);
  Complex cascade{0, 0};
  for (int l = 0; l < 3; ++l)
    cascade += cs.g_ru_true(0, l) * Complex{std::cos(phases[l]), std::sin(phases[l])} *
               std::conj(cs.g1_true(0, l));
  REQUIRE(std::abs(w) == Catch::Approx(std::abs(cascade) * std::sqrt(p)).epsilon(1e-9));
}

TEST_CASE("max_ratio_direction beats random directions") {
  Rng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    auto cs = random_channels(3, 4, 1, 100 + trial);
    ReflectionConfig refl{Eigen::VectorXd::Zero(4)};
    AssignmentMatrix assign{Eigen::MatrixXi::Ones(1, 4)};
    auto dir = max_ratio_direction(cs, refl, assign, 0);
    Precoder best;
    best.vectors = dir;
    best.powers = Eigen::VectorXd::Ones(1);
    double w_best = std::abs(effective_gain(cs, refl, assign, best, 0));
    for (int i = 0; i < 20; ++i) {
      Eigen::VectorXcd u(3);
      for (int a = 0; a < 3; ++a) u[a] = rng.cnormal(1.0);
      u /= u.norm();
      Precoder rnd;
      rnd.vectors = u;
      rnd.powers = Eigen::VectorXd::Ones(1);
      REQUIRE(w_best >= std::abs(effective_gain(cs, refl, assign, rnd, 0)) - 1e-9);
    }
  }
}

TEST_CASE("max_ratio_direction matches a fine grid search for A=2") {
  auto cs = random_channels(2, 2, 1, 19);
  ReflectionConfig refl{Eigen::VectorXd::Zero(2)};
  AssignmentMatrix assign{Eigen::MatrixXi::Ones(1, 2)};
  auto dir = max_ratio_direction(cs, refl, assign, 0);
  Precoder best;
  best.vectors = dir;
  best.powers = Eigen::VectorXd::Ones(1);
  double w_best = std::abs(effective_gain(cs, refl, assign, best, 0));

  // search unit vectors (cos a, sin a e^{j b}) over a 360-point grid per angle
  double w_grid = 0.0;
  for (int i = 0; i < 360; ++i) {
    double a = kPi / 2.0 * i / 360.0;
    for (int j = 0; j < 360; ++j) {
      double b = 2.0 * kPi * j / 360.0;
      Eigen::VectorXcd u(2);
      u[0] = Complex{std::cos(a), 0.0};
      u[1] = Complex{std::sin(a) * std::cos(b), std::sin(a) * std::sin(b)};
      Precoder pc;
      pc.vectors = u;
      pc.powers = Eigen::VectorXd::Ones(1);
      w_grid = std::max(w_grid, std::abs(effective_gain(cs, refl, assign, pc, 0)));
    }
  }
  REQUIRE(w_best >= w_grid - 1e-6);
  REQUIRE(w_best == Catch::Approx(w_grid).epsilon(1e-3));
}

TEST_CASE("fallback direction is unit norm when the cascade vanishes") {
  auto cs = random_channels(3, 2, 1, 23);
  ReflectionConfig refl{Eigen::VectorXd::Zero(2)};
  AssignmentMatrix assign{Eigen::MatrixXi::Zero(1, 2)};
  auto dir = max_ratio_direction(cs, refl, assign, 0);
  REQUIRE(dir.norm() == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("snr of user k ignores other users' assignment rows") {
  auto cs = random_channels(2, 6, 3, 29);
  Eigen::VectorXd phases = Eigen::VectorXd::LinSpaced(6, 0.0, 5.0);
  ReflectionConfig refl{phases};
  Eigen::MatrixXi beta = Eigen::MatrixXi::Zero(3, 6);
  beta(0, 0) = 1;
  beta(0, 1) = 1;
  AssignmentMatrix a1{beta};
  Eigen::MatrixXi beta2 = beta;
  beta2(1, 2) = 1;
  beta2(2, 3) = 1;
  AssignmentMatrix a2{beta2};

  Precoder pc = unit_precoder(2, 3, 2.0);
  auto w1 = effective_gain(cs, refl, a1, pc, 0);
  auto w2 = effective_gain(cs, refl, a2, pc, 0);
  REQUIRE(snr(w1, 0.05, 1e-9) == Catch::Approx(snr(w2, 0.05, 1e-9)).epsilon(1e-12));
}

TEST_CASE("common phase offset leaves |w| unchanged for A=1") {
  auto cs = random_channels(1, 4, 1, 37);
  Eigen::VectorXd phases(4);
  phases << 0.2, 0.9, 2.2, 5.1;
  AssignmentMatrix assign{Eigen::MatrixXi::Ones(1, 4)};
  Precoder pc = unit_precoder(1, 1, 1.0);
  double base = std::abs(effective_gain(cs, ReflectionConfig{phases}, assign, pc, 0));
  Eigen::VectorXd shifted = phases.array() + 0.7;
  double moved = std::abs(effective_gain(cs, ReflectionConfig{shifted}, assign, pc, 0));
  REQUIRE(moved == Catch::Approx(base).epsilon(1e-9));
}

TEST_CASE("assignment matrix validation") {
  Eigen::MatrixXi bad = Eigen::MatrixXi::Zero(2, 2);
  bad(0, 0) = 1;
  bad(1, 0) = 1;
  REQUIRE_THROWS_AS(AssignmentMatrix{bad}.validate(), std::invalid_argument);
  Eigen::MatrixXi nonbinary = Eigen::MatrixXi::Zero(1, 2);
  nonbinary(0, 1) = 2;
  REQUIRE_THROWS_AS(AssignmentMatrix{nonbinary}.validate(), std::invalid_argument);
}
