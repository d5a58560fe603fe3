#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "uavris/channel.hpp"
#include "uavris/core.hpp"
#include "uavris/energy.hpp"
#include "uavris/geometry.hpp"
#include "uavris/link.hpp"

namespace uavris {

enum class Strategy { TimeSwitching, Hera };

inline const char* to_string(Strategy s) {
  return s == Strategy::TimeSwitching ? "ts" : "hera";
}

inline Strategy strategy_from_string(const std::string& s) {
  if (s == "ts") return Strategy::TimeSwitching;
  if (s == "hera") return Strategy::Hera;
  throw std::invalid_argument("strategy: expected 'ts' or 'hera', got '" + s + "'");
}

/// Everything that defines one simulated system instance. Values not present
/// in the paper's Table III are artifact defaults and stay configurable.
struct EnvConfig {
  int antennas = 4;  // A
  int users = 3;     // K
  int ris_rows = 4;  // M
  int ris_cols = 4;  // N
  Strategy strategy = Strategy::Hera;
  bool renewable_enabled = true;

  // impairments
  double zeta = 0.0;  // CSI error std
  double psi = 0.0;   // hardware impairment level
  bool zeta_on_bs_ris = true;
  bool zeta_on_ris_user = true;

  PathLossParams pathloss{};
  HarvesterParams harvester{};

  double noise_power_w = dbm_to_watts(-102.0);
  double bandwidth_hz = 10e6;
  double r_min_bps = 70e6;
  double p_bs_max_w = 500.0;
  double p_user_max_w = 500.0;

  Arena arena{20.0, 20.0};
  double uav_altitude_m = 20.0;
  double user_height_m = 1.5;
  double element_spacing_m = 0.05;
  double user_speed_m_per_slot = 1.0;

  double slot_seconds = 1.0;
  double re_max_joules = 0.05;   // mu
  double re_rate_per_s = 1.0;    // lambda
  double battery_capacity_j = 1000.0;
  double initial_battery_frac = 0.5;
  double hover_power_w = 0.0;
  double element_power_w = 1e-3;

  int episode_length = 100;  // T
  double discount = 0.99;
  std::uint64_t seed = 1;
  int kmeans_iterations = 10;
  bool log_channels = false;

  int elements() const { return ris_rows * ris_cols; }
  int action_dim() const { return 1 + users + elements() + users * elements(); }
  int state_dim() const {
    const int L = elements();
    return 2 * antennas * L + 2 * users * L + 3 * L + 3 * users + 1 + action_dim();
  }

  void validate() const {
    auto fail = [](const std::string& field) {
      throw std::invalid_argument("EnvConfig: invalid field '" + field + "'");
    };
    if (antennas < 1) fail("antennas");
    if (users < 1) fail("users");
    if (ris_rows < 1) fail("ris_rows");
    if (ris_cols < 1) fail("ris_cols");
    if (episode_length < 1) fail("episode_length");
    if (noise_power_w <= 0) fail("noise_power_w");
    if (bandwidth_hz <= 0) fail("bandwidth_hz");
    if (p_bs_max_w < 0) fail("p_bs_max_w");
    if (p_user_max_w < 0) fail("p_user_max_w");
    if (uav_altitude_m <= 0) fail("uav_altitude_m");
    if (user_height_m < 0) fail("user_height_m");
    if (slot_seconds <= 0) fail("slot_seconds");
    if (battery_capacity_j <= 0) fail("battery_capacity_j");
    if (initial_battery_frac < 0 || initial_battery_frac > 1) fail("initial_battery_frac");
    if (zeta < 0) fail("zeta");
    if (psi < 0) fail("psi");
    if (re_max_joules < 0) fail("re_max_joules");
    if (re_rate_per_s < 0) fail("re_rate_per_s");
    if (discount < 0 || discount > 1) fail("discount");
    if (harvester.p_sat <= 0) fail("harvester.p_sat");
    if (harvester.c <= 0) fail("harvester.c");
    if (harvester.d < 0) fail("harvester.d");
    if (pathloss.alpha <= 0) fail("pathloss.alpha");
    if (pathloss.nu <= 0) fail("pathloss.nu");
    if (pathloss.k_rician < 0) fail("pathloss.k_rician");
  }
};

/// Structured form of one action: slot split, per-user transmit powers, RIS
/// phases, and the binary element assignment.
struct DecodedAction {
  double tau = 0.0;
  Eigen::VectorXd powers;   // K, watts
  Eigen::VectorXd phases;   // L, radians in [0, 2*pi]
  Eigen::MatrixXi beta;     // K×L

  /// Scale-stable flat encoding used as the previous-action state block:
  /// [tau, p_k / P_U^max, theta_l / 2pi, beta entries].
  Eigen::VectorXd normalized(const EnvConfig& cfg) const {
    Eigen::VectorXd v(cfg.action_dim());
    int idx = 0;
    v[idx++] = tau;
    for (int k = 0; k < cfg.users; ++k)
      v[idx++] = cfg.p_user_max_w > 0 ? powers[k] / cfg.p_user_max_w : 0.0;
    for (int l = 0; l < cfg.elements(); ++l) v[idx++] = phases[l] / (2.0 * kPi);
    for (int k = 0; k < cfg.users; ++k)
      for (int l = 0; l < cfg.elements(); ++l) v[idx++] = static_cast<double>(beta(k, l));
    return v;
  }
};

struct DecodeResult {
  DecodedAction action;
  int clipped = 0;  // raw components outside [-1,1]
};

/// Maps a raw vector in [-1,1]^action_dim onto the feasible action set.
/// Power, phase and slot-split boxes are enforced by affine squashing; the
/// BS power budget by uniform rescaling; the assignment constraints by the
/// per-element argmax-plus-threshold rule, so every decoded action satisfies
/// the box/budget/selection constraints by construction.
inline DecodeResult decode_action(const Eigen::VectorXd& raw, const EnvConfig& cfg) {
  const int K = cfg.users;
  const int L = cfg.elements();
  if (raw.size() != cfg.action_dim())
    throw std::invalid_argument("decode_action: wrong action dimension");

  DecodeResult res;
  Eigen::VectorXd r = raw;
  for (int i = 0; i < r.size(); ++i) {
    if (r[i] < -1.0 || r[i] > 1.0) {
      r[i] = std::min(std::max(r[i], -1.0), 1.0);
      ++res.clipped;
    }
  }

  DecodedAction& a = res.action;
  int idx = 0;
  a.tau = (r[idx++] + 1.0) / 2.0;

  a.powers.resize(K);
  for (int k = 0; k < K; ++k) a.powers[k] = (r[idx++] + 1.0) / 2.0 * cfg.p_user_max_w;
  double total = a.powers.sum();
  if (total > cfg.p_bs_max_w && total > 0) a.powers *= cfg.p_bs_max_w / total;

  a.phases.resize(L);
  for (int l = 0; l < L; ++l) a.phases[l] = (r[idx++] + 1.0) * kPi;

  a.beta = Eigen::MatrixXi::Zero(K, L);
  for (int l = 0; l < L; ++l) {
    int best_k = 0;
    double best_logit = r[1 + K + L + 0 * L + l];
    for (int k = 1; k < K; ++k) {
      double logit = r[1 + K + L + k * L + l];
      if (logit > best_logit) {
        best_logit = logit;
        best_k = k;
      }
    }
    // sigmoid(logit) >= 0.5 iff logit >= 0; otherwise the element harvests
    if (best_logit >= 0.0) a.beta(best_k, l) = 1;
  }
  return res;
}

/// One slot's exogenous scene: geometry, channels, renewable draw, and the
/// battery state the action is charged against.
struct FrozenSlot {
  Layout layout;
  ChannelState channels;
  double re_joules = 0.0;
  EnergyLedger ledger;
};

struct SlotEval {
  double reward = 0.0;
  double efficiency = 0.0;
  bool feasible = true;
  std::vector<std::string> violations;
  Eigen::VectorXd rates_bps;
  Eigen::VectorXd snrs;
  Eigen::VectorXcd effective_gains;
  SlotEnergyReport energy;
  double consumed_j = 0.0;
  double harvested_j = 0.0;
  int active_elements = 0;
};

/// Full single-slot physics: precoding from estimated CSI, incident power and
/// harvesting on true channels, rates on true channels, constraint checks,
/// and the zero-on-violation reward.
inline SlotEval evaluate_slot(const FrozenSlot& slot, const DecodedAction& action,
                              const EnvConfig& cfg) {
  const int K = cfg.users;
  const int L = cfg.elements();
  SlotEval ev;

  ReflectionConfig reflection{action.phases};
  AssignmentMatrix assignment{action.beta};
  assignment.validate();

  // beamformer directions come from the estimated channels; everything
  // physical below is scored on the true ones
  Precoder precoder;
  precoder.vectors.resize(cfg.antennas, K);
  precoder.powers = action.powers;
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXcd dir =
        max_ratio_direction(slot.channels, reflection, assignment, k, /*use_estimated=*/true);
    precoder.vectors.col(k) = dir * std::sqrt(action.powers[k]);
  }

  Eigen::MatrixXcd cov = precoder.covariance();
  Eigen::VectorXd per_element = per_element_incident_power(slot.channels, cov);
  double p_incident = per_element.sum();

  if (cfg.strategy == Strategy::Hera) {
    ev.energy = slot_harvest_hera(action.tau, per_element, action.beta, slot.re_joules,
                                  cfg.slot_seconds, cfg.harvester);
  } else {
    ev.energy = slot_harvest_ts(action.tau, p_incident, slot.re_joules, cfg.slot_seconds,
                                cfg.harvester);
  }

  ev.effective_gains.resize(K);
  ev.snrs.resize(K);
  for (int k = 0; k < K; ++k) {
    ev.effective_gains[k] =
        effective_gain(slot.channels, reflection, assignment, precoder, k, /*use_estimated=*/false);
    ev.snrs[k] = snr(ev.effective_gains[k], cfg.psi, cfg.noise_power_w);
  }
  ev.rates_bps = rates(ev.snrs, action.tau, cfg.bandwidth_hz);

  // reflect-mode element count: HERA pays for assigned elements, TS for the
  // whole array (all elements reflect in phase II)
  if (cfg.strategy == Strategy::Hera) {
    for (int l = 0; l < L; ++l) ev.active_elements += assignment.beta.col(l).sum() > 0 ? 1 : 0;
  } else {
    ev.active_elements = L;
  }
  ev.consumed_j = (cfg.hover_power_w + ev.active_elements * cfg.element_power_w) * cfg.slot_seconds;
  ev.energy.consumed = ev.consumed_j;
  ev.harvested_j = ev.energy.rf_harvested + ev.energy.re_harvested;

  for (int k = 0; k < K; ++k)
    if (ev.rates_bps[k] < cfg.r_min_bps)
      ev.violations.push_back("qos user " + std::to_string(k));
  if (slot.ledger.battery + ev.harvested_j < ev.consumed_j)
    ev.violations.push_back("energy causality");
  if (ev.energy.incident <= 0.0) ev.violations.push_back("no incident energy");

  ev.efficiency = ev.energy.efficiency;
  ev.feasible = ev.violations.empty();
  ev.reward = ev.feasible ? ev.efficiency : 0.0;
  return ev;
}

struct StepOutcome {
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool done = false;
  SlotEval info;
};

/// Fixed per-feature divisors that bring the state blocks to a common scale;
/// derived from config constants only so any two environments with the same
/// config agree on them.
inline Eigen::VectorXd observation_scale(const EnvConfig& cfg) {
  const int A = cfg.antennas;
  const int K = cfg.users;
  const int L = cfg.elements();
  Position3D nominal_element{cfg.arena.width / 2.0, cfg.arena.height / 2.0, cfg.uav_altitude_m};
  double bs_scale = std::sqrt(bs_ris_pathloss({0, 0, 0}, nominal_element, cfg.pathloss) / 2.0 +
                              cfg.zeta * cfg.zeta / 2.0);
  double vdist = std::max(cfg.uav_altitude_m - cfg.user_height_m, 1.0);
  Position3D nominal_user{cfg.arena.width / 2.0, cfg.arena.height / 2.0, cfg.user_height_m};
  Position3D above{cfg.arena.width / 2.0, cfg.arena.height / 2.0, cfg.user_height_m + vdist};
  double ru_scale = std::sqrt(ris_user_pathloss(above, nominal_user, cfg.pathloss) / 2.0 +
                              cfg.zeta * cfg.zeta / 2.0);
  double pos_scale = std::max({cfg.arena.width, cfg.arena.height, cfg.uav_altitude_m});
  double re_scale = std::max(cfg.re_max_joules * std::max(cfg.re_rate_per_s, 1.0), 1e-9);

  Eigen::VectorXd s(cfg.state_dim());
  int idx = 0;
  for (int i = 0; i < 2 * A * L; ++i) s[idx++] = bs_scale;
  for (int i = 0; i < 2 * K * L; ++i) s[idx++] = ru_scale;
  for (int i = 0; i < 3 * L + 3 * K; ++i) s[idx++] = pos_scale;
  s[idx++] = re_scale;
  for (int i = 0; i < cfg.action_dim(); ++i) s[idx++] = 1.0;
  return s;
}

/// Episodic environment. A step evaluates the action against the scene the
/// agent observed, settles the battery, then advances the world (user motion,
/// K-means UAV re-placement, fresh channels and renewable draw) to produce
/// the next state.
class Environment {
 public:
  explicit Environment(EnvConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    reset(cfg_.seed);
  }

  const EnvConfig& config() const { return cfg_; }
  int state_dim() const { return cfg_.state_dim(); }
  int action_dim() const { return cfg_.action_dim(); }
  const Layout& layout() const { return layout_; }
  const ChannelState& channels() const { return channels_; }
  const EnergyLedger& ledger() const { return ledger_; }
  double pending_renewable() const { return re_joules_; }
  int slot() const { return t_; }

  Eigen::VectorXd reset() { return reset(next_reset_seed_++); }

  Eigen::VectorXd reset(std::uint64_t seed) {
    rng_ = Rng(seed);
    next_reset_seed_ = seed + 1;
    mobility_ = MobilityModel(cfg_.arena, cfg_.user_speed_m_per_slot, rng_.raw());
    renewable_ = RenewableSource(cfg_.re_max_joules, cfg_.re_rate_per_s, rng_.raw());

    std::vector<Position3D> users(cfg_.users);
    for (auto& u : users)
      u = {rng_.uniform(0.0, cfg_.arena.width), rng_.uniform(0.0, cfg_.arena.height),
           cfg_.user_height_m};
    std::vector<std::pair<double, double>> horiz;
    for (const auto& u : users) horiz.emplace_back(u.x, u.y);
    auto uav = kmeans_place_uav(horiz, cfg_.kmeans_iterations);
    layout_ = Layout::make(cfg_.ris_rows, cfg_.ris_cols, cfg_.element_spacing_m,
                           cfg_.uav_altitude_m, std::move(users), uav.first, uav.second);

    channels_ = sample_channels(layout_, cfg_.antennas, cfg_.pathloss, cfg_.zeta, cfg_.psi,
                                cfg_.noise_power_w, rng_, cfg_.zeta_on_bs_ris,
                                cfg_.zeta_on_ris_user);
    re_joules_ = cfg_.renewable_enabled ? sample_renewable(renewable_, cfg_.slot_seconds) : 0.0;
    ledger_ = EnergyLedger{cfg_.battery_capacity_j * cfg_.initial_battery_frac,
                           cfg_.battery_capacity_j, 0.0, 0.0, 0.0};
    prev_action_ = Eigen::VectorXd::Zero(cfg_.action_dim());
    t_ = 0;
    done_ = false;
    return assemble_state();
  }

  StepOutcome step(const Eigen::VectorXd& raw_action) {
    if (done_) throw std::runtime_error("Environment::step called after episode end");
    DecodeResult decoded = decode_action(raw_action, cfg_);

    FrozenSlot scene{layout_, channels_, re_joules_, ledger_};
    SlotEval ev = evaluate_slot(scene, decoded.action, cfg_);

    BatteryUpdate upd = update_battery(ledger_, ev.harvested_j, ev.consumed_j);
    ledger_ = upd.ledger;
    ledger_.last_incident = ev.energy.incident;

    advance_scene();
    prev_action_ = decoded.action.normalized(cfg_);
    ++t_;
    done_ = t_ >= cfg_.episode_length;

    StepOutcome out;
    out.reward = ev.reward;
    out.info = std::move(ev);
    out.done = done_;
    out.next_state = assemble_state();
    return out;
  }

  /// Snapshot of the current exogenous scene with a fresh initial battery,
  /// for frozen-slot optimization and evaluation.
  FrozenSlot freeze() const {
    FrozenSlot s{layout_, channels_, re_joules_,
                 EnergyLedger{cfg_.battery_capacity_j * cfg_.initial_battery_frac,
                              cfg_.battery_capacity_j, 0.0, 0.0, 0.0}};
    return s;
  }

  /// State vector for a frozen slot, with a zeroed previous action (the
  /// reset convention), so agents can be probed on held-out scenes.
  Eigen::VectorXd frozen_state(const FrozenSlot& slot) const {
    return assemble_state_from(slot.layout, slot.channels, slot.re_joules,
                               Eigen::VectorXd::Zero(cfg_.action_dim()));
  }

  /// Rolls the exogenous scene forward `count` times, capturing one frozen
  /// slot per advance. Scene evolution does not depend on actions.
  std::vector<FrozenSlot> roll_frozen(int count) {
    std::vector<FrozenSlot> slots;
    slots.reserve(count);
    for (int i = 0; i < count; ++i) {
      slots.push_back(freeze());
      advance_scene();
    }
    return slots;
  }

 private:
  void advance_scene() {
    layout_ = step_users(layout_, mobility_);
    std::vector<std::pair<double, double>> horiz;
    for (const auto& u : layout_.users) horiz.emplace_back(u.x, u.y);
    auto uav = kmeans_place_uav(horiz, cfg_.kmeans_iterations);
    layout_.place_uav(uav.first, uav.second);
    channels_ = sample_channels(layout_, cfg_.antennas, cfg_.pathloss, cfg_.zeta, cfg_.psi,
                                cfg_.noise_power_w, rng_, cfg_.zeta_on_bs_ris,
                                cfg_.zeta_on_ris_user);
    re_joules_ = cfg_.renewable_enabled ? sample_renewable(renewable_, cfg_.slot_seconds) : 0.0;
  }

  Eigen::VectorXd assemble_state() const {
    return assemble_state_from(layout_, channels_, re_joules_, prev_action_);
  }

  Eigen::VectorXd assemble_state_from(const Layout& layout, const ChannelState& cs,
                                      double re_joules,
                                      const Eigen::VectorXd& prev_action) const {
    const int A = cfg_.antennas;
    const int K = cfg_.users;
    const int L = cfg_.elements();
    Eigen::VectorXd s(cfg_.state_dim());
    int idx = 0;
    for (int l = 0; l < L; ++l)
      for (int a = 0; a < A; ++a) s[idx++] = cs.g1_est(a, l).real();
    for (int l = 0; l < L; ++l)
      for (int a = 0; a < A; ++a) s[idx++] = cs.g1_est(a, l).imag();
    for (int l = 0; l < L; ++l)
      for (int k = 0; k < K; ++k) s[idx++] = cs.g_ru_est(k, l).real();
    for (int l = 0; l < L; ++l)
      for (int k = 0; k < K; ++k) s[idx++] = cs.g_ru_est(k, l).imag();
    for (int l = 0; l < L; ++l) {
      s[idx++] = layout.ris_elements[l].x;
      s[idx++] = layout.ris_elements[l].y;
      s[idx++] = layout.ris_elements[l].z;
    }
    for (int k = 0; k < K; ++k) {
      s[idx++] = layout.users[k].x;
      s[idx++] = layout.users[k].y;
      s[idx++] = layout.users[k].z;
    }
    s[idx++] = re_joules;
    s.segment(idx, cfg_.action_dim()) = prev_action;
    return s;
  }

  EnvConfig cfg_;
  Rng rng_{0};
  std::uint64_t next_reset_seed_ = 0;
  MobilityModel mobility_;
  RenewableSource renewable_;
  Layout layout_;
  ChannelState channels_;
  EnergyLedger ledger_;
  double re_joules_ = 0.0;
  Eigen::VectorXd prev_action_;
  int t_ = 0;
  bool done_ = true;
};

}  // namespace uavris
