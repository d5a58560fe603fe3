#include <catch2/catch_amalgamated.hpp>

#include "uavris/channel.hpp"

using namespace uavris;

namespace {

Layout test_layout(int users = 1) {
  std::vector<Position3D> u;
  for (int k = 0; k < users; ++k) u.push_back({5.0 + k, 5.0, 1.5});
  return Layout::make(2, 2, 0.05, 20.0, std::move(u), 10.0, 10.0);
}

}  // namespace

TEST_CASE("los_probability hand values") {
  PathLossParams p;  // C_X = 9.61, C_Y = 0.16
  double expected_90 = 1.0 / (1.0 + 9.61 * std::exp(-0.16 * (90.0 - 9.61)));
  REQUIRE(los_probability(90.0, p) == Catch::Approx(expected_90).epsilon(1e-12));
  REQUIRE(los_probability(90.0, p) == Catch::Approx(0.999975).margin(1e-6));
  REQUIRE(los_probability(p.c_x, p) == Catch::Approx(1.0 / (1.0 + p.c_x)).epsilon(1e-12));
  PathLossParams degenerate = p;
  degenerate.c_x = 0.0;
  REQUIRE(los_probability(5.0, degenerate) == Catch::Approx(1.0));
  REQUIRE(los_probability(85.0, degenerate) == Catch::Approx(1.0));
}

TEST_CASE("los_probability is monotonically increasing in theta") {
  PathLossParams p;
  double prev = 0.0;
  for (double theta = 1.0; theta <= 90.0; theta += 1.0) {
    double cur = los_probability(theta, p);
    REQUIRE(cur > prev);
    REQUIRE(cur > 0.0);
    REQUIRE(cur < 1.0);
    prev = cur;
  }
}

TEST_CASE("bs_ris_pathloss limits and hand value") {
  PathLossParams p;
  p.alpha = 3.0;
  SECTION("pure LoS limit") {
    PathLossParams los = p;
    los.c_x = 0.0;  // Pr_LoS = 1 for every angle
    double g = bs_ris_pathloss({0, 0, 0}, {0, 0, 10}, los);
    REQUIRE(g == Catch::Approx(std::pow(10.0, -3.0)).epsilon(1e-12));
  }
  SECTION("pure NLoS limit") {
    PathLossParams nlos = p;
    nlos.c_x = 1e12;
    nlos.c_y = 0.0;  // Pr_LoS = 1e-12
    nlos.phi_nlos_db = 20.0;
    double g = bs_ris_pathloss({0, 0, 0}, {0, 0, 10}, nlos);
    REQUIRE(g == Catch::Approx(0.01 * std::pow(10.0, -3.0)).epsilon(1e-6));
  }
  SECTION("Table III constants at d=10, theta=90") {
    double pr = los_probability(90.0, p);
    double expected = (pr + (1.0 - pr) * 0.01) * 1e-3;
    REQUIRE(bs_ris_pathloss({0, 0, 0}, {0, 0, 10}, p) == Catch::Approx(expected).epsilon(1e-12));
    REQUIRE(expected == Catch::Approx(1.0e-3).margin(1e-6));
  }
  REQUIRE_THROWS_AS(bs_ris_pathloss({0, 0, 0}, {0, 0, 0}, p), std::invalid_argument);
}

TEST_CASE("ris_user_pathloss hand values") {
  PathLossParams p;  // upsilon = -30 dB, nu = 2.5
  REQUIRE(ris_user_pathloss({0, 0, 1}, {0, 0, 0}, p) == Catch::Approx(1e-3).epsilon(1e-12));
  double g10 = ris_user_pathloss({0, 0, 10}, {0, 0, 0}, p);
  REQUIRE(g10 == Catch::Approx(1e-3 * std::pow(10.0, -2.5)).epsilon(1e-12));
  PathLossParams flat = p;
  flat.nu = 1e-300;  // effectively zero exponent
  REQUIRE(ris_user_pathloss({0, 0, 3}, {0, 0, 0}, flat) ==
          Catch::Approx(ris_user_pathloss({0, 0, 17}, {0, 0, 0}, flat)).epsilon(1e-9));
  REQUIRE_THROWS_AS(ris_user_pathloss({1, 1, 1}, {1, 1, 1}, p), std::invalid_argument);
}

TEST_CASE("sample_channels with zero zeta gives error-free CSI") {
  auto layout = test_layout();
  PathLossParams p;
  Rng rng(3);
  auto cs = sample_channels(layout, 2, p, 0.0, 0.0, 1e-12, rng);
  REQUIRE(cs.g1_est == cs.g1_true);
  REQUIRE(cs.g_ru_est == cs.g_ru_true);
}

TEST_CASE("sample_channels deterministic LoS limit for huge Rician factor") {
  auto layout = test_layout();
  PathLossParams p;
  p.k_rician = 1e12;
  Rng rng(4);
  auto cs = sample_channels(layout, 1, p, 0.0, 0.0, 1e-12, rng);
  for (int l = 0; l < cs.elements(); ++l) {
    double gain = ris_user_pathloss(layout.ris_elements[l], layout.users[0], p);
    REQUIRE(std::abs(cs.g_ru_true(0, l)) == Catch::Approx(std::sqrt(gain)).epsilon(1e-5));
  }
}

TEST_CASE("sample_channels is bit-reproducible per seed") {
  auto layout = test_layout(2);
  PathLossParams p;
  Rng a(123), b(123);
  auto ca = sample_channels(layout, 3, p, 0.01, 0.0, 1e-12, a);
  auto cb = sample_channels(layout, 3, p, 0.01, 0.0, 1e-12, b);
  REQUIRE(ca.g1_true == cb.g1_true);
  REQUIRE(ca.g1_est == cb.g1_est);
  REQUIRE(ca.g_ru_true == cb.g_ru_true);
  REQUIRE(ca.g_ru_est == cb.g_ru_est);
}

TEST_CASE("channel second moments match the path gains", "[montecarlo]") {
  auto layout = test_layout();
  PathLossParams p;
  Rng rng(77);
  const int n = 100000;

  SECTION("Rayleigh BS-RIS entries") {
    double expected = bs_ris_pathloss(layout.bs, layout.ris_elements[0], p);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      auto cs = sample_channels(layout, 1, p, 0.0, 0.0, 1e-12, rng);
      sum += std::norm(cs.g1_true(0, 0));
    }
    REQUIRE(sum / n == Catch::Approx(expected).epsilon(0.02));
  }

  SECTION("Rician RIS-user entries") {
    double expected = ris_user_pathloss(layout.ris_elements[0], layout.users[0], p);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      auto cs = sample_channels(layout, 1, p, 0.0, 0.0, 1e-12, rng);
      sum += std::norm(cs.g_ru_true(0, 0));
    }
    REQUIRE(sum / n == Catch::Approx(expected).epsilon(0.02));
  }

  SECTION("estimation error power is zeta squared") {
    const double zeta = 0.05;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      auto cs = sample_channels(layout, 1, p, zeta, 0.0, 1e-12, rng);
      sum += std::norm(cs.g1_est(0, 0) - cs.g1_true(0, 0));
    }
    REQUIRE(sum / n == Catch::Approx(zeta * zeta).epsilon(0.02));
  }
}

TEST_CASE("csi error can be restricted to one hop") {
  auto layout = test_layout();
  PathLossParams p;
  Rng rng(9);
  auto cs = sample_channels(layout, 2, p, 0.1, 0.0, 1e-12, rng, /*error_on_bs_ris=*/false,
                            /*error_on_ris_user=*/true);
  REQUIRE(cs.g1_est == cs.g1_true);
  REQUIRE(cs.g_ru_est != cs.g_ru_true);
}
