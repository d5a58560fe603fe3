#pragma once

#include <Eigen/Dense>
#include <vector>

#include "uavris/channel.hpp"
#include "uavris/core.hpp"

namespace uavris {

/// Non-linear RF harvester constants: saturation power and the sigmoid shape
/// parameters tied to the rectifier hardware.
struct HarvesterParams {
  double p_sat = 0.1;  // watts
  double c = 150.0;    // 1/watts
  double d = 0.014;    // watts
};

/// Renewable arrivals: Poisson arrival times with rate lambda, each carrying
/// Uniform(0, mu) joules.
struct RenewableSource {
  double mu = 0.05;     // joules per arrival, upper bound
  double lambda = 1.0;  // arrivals per second
  Rng rng{0};

  RenewableSource() = default;
  RenewableSource(double mu_j, double lambda_per_s, std::uint64_t seed)
      : mu(mu_j), lambda(lambda_per_s), rng(seed) {
    if (mu < 0 || lambda < 0) throw std::invalid_argument("RenewableSource: negative parameter");
  }
};

struct EnergyLedger {
  double battery = 0.0;   // joules
  double capacity = 0.0;  // joules
  double last_harvested = 0.0;
  double last_consumed = 0.0;
  double last_incident = 0.0;
};

struct SlotEnergyReport {
  double rf_harvested = 0.0;  // joules
  double re_harvested = 0.0;  // joules
  double consumed = 0.0;      // joules
  double incident = 0.0;      // joules
  double efficiency = 0.0;    // (rf + re) / incident when incident > 0
};

/// Sigmoidal non-linear EH transfer: input RF power to harvested power,
/// zero at zero input and saturating at p_sat.
inline double nonlinear_harvest(double p_rf, const HarvesterParams& hp) {
  if (p_rf < 0) throw std::invalid_argument("nonlinear_harvest: negative input power");
  double omega = hp.p_sat / (1.0 + std::exp(-hp.c * (p_rf - hp.d)));
  double delta = 1.0 / (1.0 + std::exp(hp.c * hp.d));
  return (omega - hp.p_sat * delta) / (1.0 - delta);
}

/// Expected incident RF power summed over all RIS elements for a transmit
/// covariance S: sum_l g_l^H Cov g_l, evaluated on the true channels.
inline double incident_rf_power(const ChannelState& cs, const Eigen::MatrixXcd& tx_cov) {
  if (tx_cov.rows() != cs.g1_true.rows() || tx_cov.cols() != cs.g1_true.rows())
    throw std::invalid_argument("incident_rf_power: covariance shape mismatch");
  double total = 0.0;
  for (int l = 0; l < cs.g1_true.cols(); ++l) {
    const auto g = cs.g1_true.col(l);
    total += (g.adjoint() * tx_cov * g).value().real();
  }
  return total;
}

/// Per-element expected incident power, same model as incident_rf_power.
inline Eigen::VectorXd per_element_incident_power(const ChannelState& cs,
                                                  const Eigen::MatrixXcd& tx_cov) {
  if (tx_cov.rows() != cs.g1_true.rows() || tx_cov.cols() != cs.g1_true.rows())
    throw std::invalid_argument("per_element_incident_power: covariance shape mismatch");
  Eigen::VectorXd out(cs.g1_true.cols());
  for (int l = 0; l < cs.g1_true.cols(); ++l) {
    const auto g = cs.g1_true.col(l);
    out[l] = (g.adjoint() * tx_cov * g).value().real();
  }
  return out;
}

/// Time-switching accounting: the whole array harvests for fraction tau and
/// reflects for the rest of the slot, harvesting nothing in phase II.
inline SlotEnergyReport slot_harvest_ts(double tau, double p_rf_total, double re_joules,
                                        double slot_seconds, const HarvesterParams& hp) {
  if (tau < 0 || tau > 1) throw std::invalid_argument("slot_harvest_ts: tau out of [0,1]");
  SlotEnergyReport r;
  r.rf_harvested = nonlinear_harvest(p_rf_total, hp) * tau * slot_seconds;
  r.re_harvested = re_joules;
  r.incident = p_rf_total * slot_seconds;
  r.efficiency = r.incident > 0 ? (r.rf_harvested + r.re_harvested) / r.incident : 0.0;
  return r;
}

/// HERA accounting: phase I feeds the whole array into the harvester for
/// fraction tau; in phase II only the unassigned elements keep harvesting.
/// One rectifier circuit, so the non-linearity applies to the summed input
/// power of each phase.
inline SlotEnergyReport slot_harvest_hera(double tau, const Eigen::VectorXd& per_element_rf,
                                          const Eigen::MatrixXi& beta, double re_joules,
                                          double slot_seconds, const HarvesterParams& hp) {
  if (tau < 0 || tau > 1) throw std::invalid_argument("slot_harvest_hera: tau out of [0,1]");
  if (beta.cols() != per_element_rf.size())
    throw std::invalid_argument("slot_harvest_hera: beta shape mismatch");
  double phase1 = per_element_rf.sum();
  double phase2 = 0.0;
  for (int l = 0; l < per_element_rf.size(); ++l) {
    int assigned = beta.col(l).sum();
    if (assigned > 1)
      throw std::invalid_argument("slot_harvest_hera: element assigned to multiple users");
    if (assigned == 0) phase2 += per_element_rf[l];
  }
  SlotEnergyReport r;
  r.rf_harvested = (nonlinear_harvest(phase1, hp) * tau +
                    nonlinear_harvest(phase2, hp) * (1.0 - tau)) *
                   slot_seconds;
  r.re_harvested = re_joules;
  r.incident = phase1 * slot_seconds;
  r.efficiency = r.incident > 0 ? (r.rf_harvested + r.re_harvested) / r.incident : 0.0;
  return r;
}

struct BatteryUpdate {
  EnergyLedger ledger;
  bool feasible = true;  // false when consumption would exceed stored + harvested energy
};

/// Battery dynamics with the overflow clamp. A causality violation is
/// reported, not clamped: the consumption is suppressed and the harvest still
/// credited.
inline BatteryUpdate update_battery(const EnergyLedger& ledger, double harvested,
                                    double consumed) {
  if (harvested < 0 || consumed < 0)
    throw std::invalid_argument("update_battery: negative energy amount");
  BatteryUpdate u;
  u.ledger = ledger;
  u.ledger.last_harvested = harvested;
  u.ledger.last_consumed = consumed;
  if (ledger.battery + harvested < consumed) {
    u.feasible = false;
    u.ledger.last_consumed = 0.0;
    u.ledger.battery = std::min(ledger.capacity, ledger.battery + harvested);
    return u;
  }
  u.ledger.battery = std::min(ledger.capacity, ledger.battery + harvested - consumed);
  return u;
}

/// Compound-Poisson renewable draw for one slot.
inline double sample_renewable(RenewableSource& source, double slot_seconds) {
  int arrivals = source.rng.poisson(source.lambda * slot_seconds);
  double total = 0.0;
  for (int i = 0; i < arrivals; ++i) total += source.rng.uniform(0.0, source.mu);
  return total;
}

}  // namespace uavris
