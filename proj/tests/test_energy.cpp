#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "uavris/energy.hpp"

using namespace uavris;

TEST_CASE("nonlinear_harvest endpoints") {
  HarvesterParams hp;  // p_sat 0.1, c 150, d 0.014
  REQUIRE(nonlinear_harvest(0.0, hp) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(nonlinear_harvest(1e6, hp) == Catch::Approx(hp.p_sat).epsilon(1e-12));
  REQUIRE_THROWS_AS(nonlinear_harvest(-0.1, hp), std::invalid_argument);
}

TEST_CASE("nonlinear_harvest matches an independent evaluation at the sigmoid midpoint") {
  HarvesterParams hp;
  double got = nonlinear_harvest(hp.d, hp);
  REQUIRE(got == Catch::Approx(oracle::harvest(hp.d, hp.p_sat, hp.c, hp.d)).epsilon(1e-14));
  double delta = 1.0 / (1.0 + std::exp(hp.c * hp.d));
  double expected = (hp.p_sat / 2.0 - hp.p_sat * delta) / (1.0 - delta);
  REQUIRE(got == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("nonlinear_harvest is monotone and bounded for random parameters") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    HarvesterParams hp{rng.uniform(0.01, 1.0), rng.uniform(1.0, 300.0), rng.uniform(0.0, 0.2)};
    double prev = -1.0;
    for (double p = 0.0; p <= 2.0; p += 0.01) {
      double h = nonlinear_harvest(p, hp);
      REQUIRE(h >= prev - 1e-12);
      REQUIRE(h >= -1e-12);
      REQUIRE(h <= hp.p_sat + 1e-12);
      prev = h;
    }
  }
}

TEST_CASE("incident_rf_power scalar cases") {
  ChannelState cs;
  cs.g1_true.resize(1, 1);
  cs.g1_true(0, 0) = Complex{std::sqrt(2.0), 0.0};
  Eigen::MatrixXcd cov(1, 1);
  SECTION("zero transmit power") {
    cov(0, 0) = 0.0;
    REQUIRE(incident_rf_power(cs, cov) == Catch::Approx(0.0));
  }
  SECTION("|g|^2 = 2, P = 3 gives 6 W") {
    cov(0, 0) = 3.0;
    REQUIRE(incident_rf_power(cs, cov) == Catch::Approx(6.0).epsilon(1e-12));
  }
  SECTION("shape mismatch") {
    Eigen::MatrixXcd bad(2, 2);
    REQUIRE_THROWS_AS(incident_rf_power(cs, bad), std::invalid_argument);
  }
}

TEST_CASE("incident_rf_power equals the Monte-Carlo expectation", "[montecarlo]") {
  Rng rng(5);
  const int A = 4, L = 16, K = 2;
  ChannelState cs;
  cs.g1_true.resize(A, L);
  for (int l = 0; l < L; ++l)
    for (int a = 0; a < A; ++a) cs.g1_true(a, l) = rng.cnormal(1.0);
  Eigen::MatrixXcd v(A, K);
  for (int k = 0; k < K; ++k)
    for (int a = 0; a < A; ++a) v(a, k) = rng.cnormal(0.5);
  Eigen::MatrixXcd cov = v * v.adjoint();
  double analytic = incident_rf_power(cs, cov);

  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXcd s = Eigen::VectorXcd::Zero(A);
    for (int k = 0; k < K; ++k) s += v.col(k) * rng.cnormal(1.0);
    for (int l = 0; l < L; ++l) sum += std::norm((cs.g1_true.col(l).adjoint() * s).value());
  }
  REQUIRE(sum / n == Catch::Approx(analytic).epsilon(0.01));
}

TEST_CASE("slot_harvest_ts accounting") {
  HarvesterParams hp;
  double p_rf = 0.05;
  SECTION("tau 0 harvests nothing from RF") {
    auto r = slot_harvest_ts(0.0, p_rf, 0.3, 1.0, hp);
    REQUIRE(r.rf_harvested == Catch::Approx(0.0));
    REQUIRE(r.re_harvested == Catch::Approx(0.3));
  }
  SECTION("tau 1 harvests the full slot") {
    auto r = slot_harvest_ts(1.0, p_rf, 0.0, 2.0, hp);
    REQUIRE(r.rf_harvested == Catch::Approx(nonlinear_harvest(p_rf, hp) * 2.0).epsilon(1e-12));
  }
  SECTION("tau 0.5 hand arithmetic") {
    auto r = slot_harvest_ts(0.5, p_rf, 0.1, 1.0, hp);
    REQUIRE(r.rf_harvested ==
            Catch::Approx(oracle::harvest(p_rf, hp.p_sat, hp.c, hp.d) * 0.5).epsilon(1e-12));
    REQUIRE(r.incident == Catch::Approx(p_rf));
    REQUIRE(r.efficiency ==
            Catch::Approx((r.rf_harvested + r.re_harvested) / r.incident).epsilon(1e-15));
  }
  REQUIRE_THROWS_AS(slot_harvest_ts(1.5, p_rf, 0.0, 1.0, hp), std::invalid_argument);
}

TEST_CASE("slot_harvest_hera accounting") {
  HarvesterParams hp;
  const int L = 4;
  Eigen::VectorXd per_el = Eigen::VectorXd::Constant(L, 0.01);

  SECTION("full assignment removes the phase-II term") {
    Eigen::MatrixXi beta = Eigen::MatrixXi::Ones(1, L);
    auto hera = slot_harvest_hera(0.3, per_el, beta, 0.2, 1.0, hp);
    auto ts = slot_harvest_ts(0.3, per_el.sum(), 0.2, 1.0, hp);
    REQUIRE(hera.rf_harvested == Catch::Approx(ts.rf_harvested).epsilon(1e-12));
  }
  SECTION("tau 1 degenerates to pure EH") {
    Eigen::MatrixXi beta = Eigen::MatrixXi::Zero(1, L);
    beta(0, 0) = 1;
    auto hera = slot_harvest_hera(1.0, per_el, beta, 0.0, 1.0, hp);
    auto ts = slot_harvest_ts(1.0, per_el.sum(), 0.0, 1.0, hp);
    REQUIRE(hera.rf_harvested == Catch::Approx(ts.rf_harvested).epsilon(1e-12));
  }
  SECTION("two idle elements feed phase II with 2p") {
    Eigen::MatrixXi beta = Eigen::MatrixXi::Zero(1, L);
    beta(0, 0) = 1;
    beta(0, 1) = 1;
    double tau = 0.4;
    auto hera = slot_harvest_hera(tau, per_el, beta, 0.0, 1.0, hp);
    double expected = oracle::harvest(0.04, hp.p_sat, hp.c, hp.d) * tau +
                      oracle::harvest(0.02, hp.p_sat, hp.c, hp.d) * (1.0 - tau);
    REQUIRE(hera.rf_harvested == Catch::Approx(expected).epsilon(1e-12));
  }
  SECTION("multi-assigned element is rejected") {
    Eigen::MatrixXi beta = Eigen::MatrixXi::Zero(2, L);
    beta(0, 0) = 1;
    beta(1, 0) = 1;
    REQUIRE_THROWS_AS(slot_harvest_hera(0.5, per_el, beta, 0.0, 1.0, hp), std::invalid_argument);
  }
}

TEST_CASE("hera harvest brackets: idle array >= any assignment >= full assignment") {
  HarvesterParams hp;
  Rng rng(31);
  const int L = 6, K = 2;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd per_el(L);
    for (int l = 0; l < L; ++l) per_el[l] = rng.uniform(0.0, 0.05);
    double tau = rng.uniform(0.0, 1.0);
    Eigen::MatrixXi none = Eigen::MatrixXi::Zero(K, L);
    Eigen::MatrixXi full = Eigen::MatrixXi::Zero(K, L);
    Eigen::MatrixXi some = Eigen::MatrixXi::Zero(K, L);
    for (int l = 0; l < L; ++l) {
      full(static_cast<int>(rng.integer(K)), l) = 1;
      if (rng.uniform() < 0.5) some(static_cast<int>(rng.integer(K)), l) = 1;
    }
    double h_none = slot_harvest_hera(tau, per_el, none, 0.0, 1.0, hp).rf_harvested;
    double h_some = slot_harvest_hera(tau, per_el, some, 0.0, 1.0, hp).rf_harvested;
    double h_full = slot_harvest_hera(tau, per_el, full, 0.0, 1.0, hp).rf_harvested;
    REQUIRE(h_none >= h_some - 1e-12);
    REQUIRE(h_some >= h_full - 1e-12);
  }
}

TEST_CASE("update_battery clamp, arithmetic and causality") {
  EnergyLedger ledger{50.0, 100.0, 0, 0, 0};
  SECTION("overflow clamps to capacity") {
    auto u = update_battery(ledger, 60.0, 10.0);
    REQUIRE(u.feasible);
    REQUIRE(u.ledger.battery == Catch::Approx(100.0));
  }
  SECTION("plain arithmetic") {
    auto u = update_battery(ledger, 10.0, 20.0);
    REQUIRE(u.feasible);
    REQUIRE(u.ledger.battery == Catch::Approx(40.0));
  }
  SECTION("causality violation is signalled, not clamped") {
    EnergyLedger low{5.0, 100.0, 0, 0, 0};
    auto u = update_battery(low, 0.0, 10.0);
    REQUIRE_FALSE(u.feasible);
    REQUIRE(u.ledger.battery >= 0.0);
  }
  REQUIRE_THROWS_AS(update_battery(ledger, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("battery invariants hold over a long random trajectory") {
  Rng rng(41);
  EnergyLedger ledger{500.0, 1000.0, 0, 0, 0};
  for (int t = 0; t < 100000; ++t) {
    double h = rng.uniform(0.0, 2.0);
    double c = rng.uniform(0.0, 2.5);
    auto u = update_battery(ledger, h, c);
    ledger = u.ledger;
    REQUIRE(ledger.battery >= 0.0);
    REQUIRE(ledger.battery <= ledger.capacity);
  }
}

TEST_CASE("sample_renewable degenerate and mean behaviour", "[montecarlo]") {
  SECTION("zero rate gives zero energy") {
    RenewableSource src(0.05, 0.0, 1);
    for (int i = 0; i < 100; ++i) REQUIRE(sample_renewable(src, 1.0) == 0.0);
  }
  SECTION("zero amplitude gives zero energy") {
    RenewableSource src(0.0, 5.0, 1);
    for (int i = 0; i < 100; ++i) REQUIRE(sample_renewable(src, 1.0) == 0.0);
  }
  SECTION("compound Poisson mean") {
    RenewableSource src(0.05, 2.0, 7);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_renewable(src, 1.0);
    REQUIRE(sum / n == Catch::Approx(2.0 * 1.0 * 0.05 / 2.0).epsilon(0.02));
  }
}
