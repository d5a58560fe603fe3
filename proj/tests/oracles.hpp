// Independent reference implementations used as test oracles. Everything here
// is written with plain scalar loops against the model formulas, on purpose
// not sharing any computation path with the library implementation it checks.
#pragma once

#include <complex>
#include <vector>

#include "uavris/env.hpp"

namespace oracle {

inline double harvest(double p_rf, double p_sat, double c, double d) {
  double omega = p_sat / (1.0 + std::exp(-c * (p_rf - d)));
  double delta = 1.0 / (1.0 + std::exp(c * d));
  return (omega - p_sat * delta) / (1.0 - delta);
}

struct SlotResult {
  double reward = 0.0;
  double efficiency = 0.0;
  bool feasible = true;
  std::vector<double> rates;
};

/// End-to-end single-slot reward: precoding, incident power, strategy
/// harvesting, SNR/rate, constraint checks, zero-on-violation.
inline SlotResult slot_reward(const uavris::FrozenSlot& slot,
                              const uavris::DecodedAction& act, const uavris::EnvConfig& cfg) {
  using C = std::complex<double>;
  const int A = cfg.antennas;
  const int K = cfg.users;
  const int L = cfg.elements();
  const auto& ch = slot.channels;

  // matched precoder from estimated channels
  std::vector<std::vector<C>> v(K, std::vector<C>(A, C{0, 0}));
  for (int k = 0; k < K; ++k) {
    std::vector<C> h(A, C{0, 0});
    for (int l = 0; l < L; ++l) {
      if (act.beta(k, l) == 0) continue;
      C phase{std::cos(act.phases[l]), std::sin(act.phases[l])};
      C b = ch.g_ru_est(k, l) * phase;
      for (int a = 0; a < A; ++a) h[a] += std::conj(b) * ch.g1_est(a, l);
    }
    double norm2 = 0.0;
    for (int a = 0; a < A; ++a) norm2 += std::norm(h[a]);
    double amp = std::sqrt(act.powers[k]);
    if (norm2 > 0) {
      double n = std::sqrt(norm2);
      for (int a = 0; a < A; ++a) v[k][a] = h[a] / n * amp;
    } else {
      for (int a = 0; a < A; ++a) v[k][a] = C{amp / std::sqrt(double(A)), 0};
    }
  }

  // per-element expected incident power on true channels
  std::vector<double> p_el(L, 0.0);
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k) {
      C dot{0, 0};
      for (int a = 0; a < A; ++a) dot += std::conj(ch.g1_true(a, l)) * v[k][a];
      p_el[l] += std::norm(dot);
    }
  double p_total = 0.0;
  for (double p : p_el) p_total += p;

  double rf_j = 0.0;
  int active = 0;
  if (cfg.strategy == uavris::Strategy::Hera) {
    double p_idle = 0.0;
    for (int l = 0; l < L; ++l) {
      int assigned = 0;
      for (int k = 0; k < K; ++k) assigned += act.beta(k, l);
      if (assigned == 0)
        p_idle += p_el[l];
      else
        ++active;
    }
    rf_j = (harvest(p_total, cfg.harvester.p_sat, cfg.harvester.c, cfg.harvester.d) * act.tau +
            harvest(p_idle, cfg.harvester.p_sat, cfg.harvester.c, cfg.harvester.d) *
                (1.0 - act.tau)) *
           cfg.slot_seconds;
  } else {
    rf_j = harvest(p_total, cfg.harvester.p_sat, cfg.harvester.c, cfg.harvester.d) * act.tau *
           cfg.slot_seconds;
    active = L;
  }

  SlotResult res;
  res.rates.resize(K);
  bool qos_ok = true;
  for (int k = 0; k < K; ++k) {
    C w{0, 0};
    for (int l = 0; l < L; ++l) {
      if (act.beta(k, l) == 0) continue;
      C phase{std::cos(act.phases[l]), std::sin(act.phases[l])};
      C dot{0, 0};
      for (int a = 0; a < A; ++a) dot += std::conj(ch.g1_true(a, l)) * v[k][a];
      w += ch.g_ru_true(k, l) * phase * dot;
    }
    double w2 = std::norm(w);
    double gamma = w2 / (w2 * cfg.psi * cfg.psi + cfg.noise_power_w);
    res.rates[k] = (1.0 - act.tau) * cfg.bandwidth_hz * std::log2(1.0 + gamma);
    if (res.rates[k] < cfg.r_min_bps) qos_ok = false;
  }

  double consumed = (cfg.hover_power_w + active * cfg.element_power_w) * cfg.slot_seconds;
  double harvested = rf_j + slot.re_joules;
  double incident_j = p_total * cfg.slot_seconds;
  res.efficiency = incident_j > 0 ? harvested / incident_j : 0.0;
  res.feasible = qos_ok && (slot.ledger.battery + harvested >= consumed) && incident_j > 0;
  res.reward = res.feasible ? res.efficiency : 0.0;
  return res;
}

struct BruteForceResult {
  uavris::DecodedAction best;
  double best_reward = -1.0;
  std::size_t combinations = 0;
};

/// Exhaustive reference: independent grid construction and loop nesting
/// (assignments outermost, tau innermost), rewards from slot_reward above.
inline BruteForceResult brute_force_search(const uavris::FrozenSlot& slot,
                                           const uavris::EnvConfig& cfg,
                                           const uavris::ExhaustiveGrids& grids) {
  const int K = cfg.users;
  const int L = cfg.elements();
  BruteForceResult res;

  std::vector<int> beta_digits(L, 0);
  bool more_beta = true;
  while (more_beta) {
    uavris::DecodedAction act;
    act.beta = Eigen::MatrixXi::Zero(K, L);
    for (int l = 0; l < L; ++l)
      if (beta_digits[l] > 0) act.beta(beta_digits[l] - 1, l) = 1;
    act.phases.resize(L);
    act.powers.resize(K);

    std::vector<int> phase_digits(L, 0);
    bool more_phase = true;
    while (more_phase) {
      for (int l = 0; l < L; ++l)
        act.phases[l] = 2.0 * uavris::kPi * phase_digits[l] / grids.phase_levels;

      std::vector<int> power_digits(K, 0);
      bool more_power = true;
      while (more_power) {
        for (int k = 0; k < K; ++k)
          act.powers[k] =
              cfg.p_user_max_w * (power_digits[k] + 1) / double(grids.power_levels);
        double total = 0.0;
        for (int k = 0; k < K; ++k) total += act.powers[k];
        if (total > cfg.p_bs_max_w && total > 0)
          for (int k = 0; k < K; ++k) act.powers[k] *= cfg.p_bs_max_w / total;

        for (int ti = 0; ti < grids.tau_levels; ++ti) {
          act.tau = grids.tau_levels == 1 ? 0.0 : double(ti) / (grids.tau_levels - 1);
          SlotResult r = slot_reward(slot, act, cfg);
          ++res.combinations;
          if (r.reward > res.best_reward) {
            res.best_reward = r.reward;
            res.best = act;
          }
        }

        more_power = false;
        for (int k = K - 1; k >= 0; --k) {
          if (++power_digits[k] < grids.power_levels) {
            more_power = true;
            break;
          }
          power_digits[k] = 0;
        }
      }

      more_phase = false;
      for (int l = L - 1; l >= 0; --l) {
        if (++phase_digits[l] < grids.phase_levels) {
          more_phase = true;
          break;
        }
        phase_digits[l] = 0;
      }
    }

    more_beta = false;
    for (int l = L - 1; l >= 0; --l) {
      if (++beta_digits[l] < K + 1) {
        more_beta = true;
        break;
      }
      beta_digits[l] = 0;
    }
  }
  return res;
}

}  // namespace oracle
