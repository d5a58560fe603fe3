#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "uavris/agents.hpp"
#include "uavris/env.hpp"

namespace uavris {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// %.17g round-trips IEEE doubles exactly through strtod, which the archived
/// config reproducibility contract depends on.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// One full experiment: environment, agent, run bookkeeping and the grid for
/// the exhaustive baseline. Serializes losslessly with every default inlined.
struct ExperimentConfig {
  EnvConfig env;
  AgentHyperparams agent;
  std::string agent_kind = "ee-ddpg";
  std::vector<std::uint64_t> seeds = {1};
  std::string output_dir = "runs/out";
  int eval_steps = 200;
  bool verbose_slots = false;
  bool trace = false;
  ExhaustiveGrids grids;
  int exhaustive_slots = 20;

  void validate() const {
    env.validate();
    agent.validate();
    if (agent_kind != "ee-ddpg" && agent_kind != "td3" && agent_kind != "ddpg" &&
        agent_kind != "random" && agent_kind != "exhaustive")
      throw std::invalid_argument("ExperimentConfig: invalid field 'agent.kind'");
    if (seeds.empty()) throw std::invalid_argument("ExperimentConfig: invalid field 'run.seeds'");
    if (eval_steps < 0) throw std::invalid_argument("ExperimentConfig: invalid field 'run.eval_steps'");
    if (exhaustive_slots < 1)
      throw std::invalid_argument("ExperimentConfig: invalid field 'exhaustive.slots'");
  }
};

namespace detail {

inline std::string join_u64(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

inline std::string join_int(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Canonical key = value rendering with fixed section and key order; every
/// field is always present so archived configs are self-contained.
inline std::string serialize_config(const ExperimentConfig& c, bool include_output = true) {
  std::string s;
  auto kv = [&s](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
  auto kd = [&](const std::string& k, double v) { kv(k, format_double(v)); };
  auto ki = [&](const std::string& k, long long v) { kv(k, std::to_string(v)); };
  auto kb = [&](const std::string& k, bool v) { kv(k, v ? "true" : "false"); };

  s += "[env]\n";
  ki("antennas", c.env.antennas);
  ki("users", c.env.users);
  ki("ris_rows", c.env.ris_rows);
  ki("ris_cols", c.env.ris_cols);
  kv("strategy", to_string(c.env.strategy));
  kv("renewable", c.env.renewable_enabled ? "on" : "off");
  kd("zeta", c.env.zeta);
  kd("psi", c.env.psi);
  kb("zeta_on_bs_ris", c.env.zeta_on_bs_ris);
  kb("zeta_on_ris_user", c.env.zeta_on_ris_user);
  kd("alpha", c.env.pathloss.alpha);
  kd("nu", c.env.pathloss.nu);
  kd("upsilon_db", c.env.pathloss.upsilon_db);
  kd("phi_nlos_db", c.env.pathloss.phi_nlos_db);
  kd("c_x", c.env.pathloss.c_x);
  kd("c_y", c.env.pathloss.c_y);
  kd("k_rician", c.env.pathloss.k_rician);
  kd("carrier_wavelength_m", c.env.pathloss.carrier_wavelength);
  kd("harvester_p_sat_w", c.env.harvester.p_sat);
  kd("harvester_c", c.env.harvester.c);
  kd("harvester_d_w", c.env.harvester.d);
  kd("noise_power_w", c.env.noise_power_w);
  kd("bandwidth_hz", c.env.bandwidth_hz);
  kd("r_min_bps", c.env.r_min_bps);
  kd("p_bs_max_w", c.env.p_bs_max_w);
  kd("p_user_max_w", c.env.p_user_max_w);
  kd("arena_width_m", c.env.arena.width);
  kd("arena_height_m", c.env.arena.height);
  kd("uav_altitude_m", c.env.uav_altitude_m);
  kd("user_height_m", c.env.user_height_m);
  kd("element_spacing_m", c.env.element_spacing_m);
  kd("user_speed_m_per_slot", c.env.user_speed_m_per_slot);
  kd("slot_seconds", c.env.slot_seconds);
  kd("re_max_joules", c.env.re_max_joules);
  kd("re_rate_per_s", c.env.re_rate_per_s);
  kd("battery_capacity_j", c.env.battery_capacity_j);
  kd("initial_battery_frac", c.env.initial_battery_frac);
  kd("hover_power_w", c.env.hover_power_w);
  kd("element_power_w", c.env.element_power_w);
  ki("episode_length", c.env.episode_length);
  kd("discount", c.env.discount);
  ki("kmeans_iterations", c.env.kmeans_iterations);
  kb("log_channels", c.env.log_channels);

  s += "[agent]\n";
  kv("kind", c.agent_kind);
  kd("gamma", c.agent.gamma);
  kd("rho", c.agent.rho);
  kd("actor_lr", c.agent.actor_lr);
  kd("critic_lr", c.agent.critic_lr);
  kd("explore_sigma", c.agent.explore_sigma);
  kd("target_sigma", c.agent.target_sigma);
  kd("noise_clip", c.agent.noise_clip);
  kd("temperature", c.agent.temperature);
  ki("target_samples", c.agent.target_samples);
  ki("batch_size", c.agent.batch_size);
  ki("buffer_capacity", static_cast<long long>(c.agent.buffer_capacity));
  kv("hidden", detail::join_int(c.agent.hidden));
  ki("episodes", c.agent.episodes);
  ki("policy_delay", c.agent.policy_delay);
  ki("warmup_steps", c.agent.warmup_steps);

  s += "[run]\n";
  kv("seeds", detail::join_u64(c.seeds));
  if (include_output) kv("out", c.output_dir);
  ki("eval_steps", c.eval_steps);
  kb("verbose_slots", c.verbose_slots);
  kb("trace", c.trace);

  s += "[exhaustive]\n";
  ki("tau_levels", c.grids.tau_levels);
  ki("power_levels", c.grids.power_levels);
  ki("phase_levels", c.grids.phase_levels);
  ki("budget", static_cast<long long>(c.grids.budget));
  ki("slots", c.exhaustive_slots);
  return s;
}

/// Identity of a run; excludes the output directory so relocating results
/// does not change it.
inline std::uint64_t config_hash(const ExperimentConfig& c) {
  return fnv1a64(serialize_config(c, /*include_output=*/false));
}

/// Loadability hash for checkpoints: everything that fixes tensor shapes and
/// action semantics. Evaluation may vary impairments or strategy against a
/// trained agent, so those stay out.
inline std::uint64_t compat_hash(const ExperimentConfig& c) {
  std::string s = "antennas=" + std::to_string(c.env.antennas) +
                  ";users=" + std::to_string(c.env.users) +
                  ";ris_rows=" + std::to_string(c.env.ris_rows) +
                  ";ris_cols=" + std::to_string(c.env.ris_cols) +
                  ";kind=" + c.agent_kind + ";hidden=" + detail::join_int(c.agent.hidden);
  return fnv1a64(s);
}

/// Applies `key = value` lines in `[section]`s onto a config. Unknown
/// sections or keys are errors naming the offending field.
inline void apply_config_text(ExperimentConfig& c, const std::string& text) {
  std::string section;
  std::size_t pos = 0;
  int line_no = 0;
  auto parse_bool = [](const std::string& v, const std::string& key) {
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    throw std::invalid_argument("config: invalid boolean for '" + key + "': " + v);
  };
  auto parse_double = [](const std::string& v, const std::string& key) {
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
      throw std::invalid_argument("config: invalid number for '" + key + "': " + v);
    return d;
  };
  auto parse_int = [&parse_double](const std::string& v, const std::string& key) {
    return static_cast<long long>(parse_double(v, key));
  };

  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line = detail::trim(text.substr(pos, nl == std::string::npos ? nl : nl - pos));
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config: malformed section at line " + std::to_string(line_no));
      section = line.substr(1, line.size() - 2);
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value at line " + std::to_string(line_no));
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    std::string field = section + "." + key;

    bool handled = true;
    if (section == "env") {
      if (key == "antennas") c.env.antennas = static_cast<int>(parse_int(value, field));
      else if (key == "users") c.env.users = static_cast<int>(parse_int(value, field));
      else if (key == "ris_rows") c.env.ris_rows = static_cast<int>(parse_int(value, field));
      else if (key == "ris_cols") c.env.ris_cols = static_cast<int>(parse_int(value, field));
      else if (key == "strategy") c.env.strategy = strategy_from_string(value);
      else if (key == "renewable") c.env.renewable_enabled = parse_bool(value, field);
      else if (key == "zeta") c.env.zeta = parse_double(value, field);
      else if (key == "psi") c.env.psi = parse_double(value, field);
      else if (key == "zeta_on_bs_ris") c.env.zeta_on_bs_ris = parse_bool(value, field);
      else if (key == "zeta_on_ris_user") c.env.zeta_on_ris_user = parse_bool(value, field);
      else if (key == "alpha") c.env.pathloss.alpha = parse_double(value, field);
      else if (key == "nu") c.env.pathloss.nu = parse_double(value, field);
      else if (key == "upsilon_db") c.env.pathloss.upsilon_db = parse_double(value, field);
      else if (key == "phi_nlos_db") c.env.pathloss.phi_nlos_db = parse_double(value, field);
      else if (key == "c_x") c.env.pathloss.c_x = parse_double(value, field);
      else if (key == "c_y") c.env.pathloss.c_y = parse_double(value, field);
      else if (key == "k_rician") c.env.pathloss.k_rician = parse_double(value, field);
      else if (key == "carrier_wavelength_m") c.env.pathloss.carrier_wavelength = parse_double(value, field);
      else if (key == "harvester_p_sat_w") c.env.harvester.p_sat = parse_double(value, field);
      else if (key == "harvester_c") c.env.harvester.c = parse_double(value, field);
      else if (key == "harvester_d_w") c.env.harvester.d = parse_double(value, field);
      else if (key == "noise_power_w") c.env.noise_power_w = parse_double(value, field);
      else if (key == "bandwidth_hz") c.env.bandwidth_hz = parse_double(value, field);
      else if (key == "r_min_bps") c.env.r_min_bps = parse_double(value, field);
      else if (key == "p_bs_max_w") c.env.p_bs_max_w = parse_double(value, field);
      else if (key == "p_user_max_w") c.env.p_user_max_w = parse_double(value, field);
      else if (key == "arena_width_m") c.env.arena.width = parse_double(value, field);
      else if (key == "arena_height_m") c.env.arena.height = parse_double(value, field);
      else if (key == "uav_altitude_m") c.env.uav_altitude_m = parse_double(value, field);
      else if (key == "user_height_m") c.env.user_height_m = parse_double(value, field);
      else if (key == "element_spacing_m") c.env.element_spacing_m = parse_double(value, field);
      else if (key == "user_speed_m_per_slot") c.env.user_speed_m_per_slot = parse_double(value, field);
      else if (key == "slot_seconds") c.env.slot_seconds = parse_double(value, field);
      else if (key == "re_max_joules") c.env.re_max_joules = parse_double(value, field);
      else if (key == "re_rate_per_s") c.env.re_rate_per_s = parse_double(value, field);
      else if (key == "battery_capacity_j") c.env.battery_capacity_j = parse_double(value, field);
      else if (key == "initial_battery_frac") c.env.initial_battery_frac = parse_double(value, field);
      else if (key == "hover_power_w") c.env.hover_power_w = parse_double(value, field);
      else if (key == "element_power_w") c.env.element_power_w = parse_double(value, field);
      else if (key == "episode_length") c.env.episode_length = static_cast<int>(parse_int(value, field));
      else if (key == "discount") c.env.discount = parse_double(value, field);
      else if (key == "kmeans_iterations") c.env.kmeans_iterations = static_cast<int>(parse_int(value, field));
      else if (key == "log_channels") c.env.log_channels = parse_bool(value, field);
      else handled = false;
    } else if (section == "agent") {
      if (key == "kind") c.agent_kind = value;
      else if (key == "gamma") c.agent.gamma = parse_double(value, field);
      else if (key == "rho") c.agent.rho = parse_double(value, field);
      else if (key == "actor_lr") c.agent.actor_lr = parse_double(value, field);
      else if (key == "critic_lr") c.agent.critic_lr = parse_double(value, field);
      else if (key == "explore_sigma") c.agent.explore_sigma = parse_double(value, field);
      else if (key == "target_sigma") c.agent.target_sigma = parse_double(value, field);
      else if (key == "noise_clip") c.agent.noise_clip = parse_double(value, field);
      else if (key == "temperature") c.agent.temperature = parse_double(value, field);
      else if (key == "target_samples") c.agent.target_samples = static_cast<int>(parse_int(value, field));
      else if (key == "batch_size") c.agent.batch_size = static_cast<int>(parse_int(value, field));
      else if (key == "buffer_capacity") c.agent.buffer_capacity = static_cast<std::size_t>(parse_int(value, field));
      else if (key == "hidden") {
        c.agent.hidden.clear();
        std::size_t p = 0;
        while (p < value.size()) {
          std::size_t comma = value.find(',', p);
          std::string tok = detail::trim(value.substr(p, comma == std::string::npos ? comma : comma - p));
          if (!tok.empty()) c.agent.hidden.push_back(static_cast<int>(parse_int(tok, field)));
          p = comma == std::string::npos ? value.size() : comma + 1;
        }
      } else if (key == "episodes") c.agent.episodes = static_cast<int>(parse_int(value, field));
      else if (key == "policy_delay") c.agent.policy_delay = static_cast<int>(parse_int(value, field));
      else if (key == "warmup_steps") c.agent.warmup_steps = static_cast<int>(parse_int(value, field));
      else handled = false;
    } else if (section == "run") {
      if (key == "seeds") {
        c.seeds.clear();
        std::size_t p = 0;
        while (p < value.size()) {
          std::size_t comma = value.find(',', p);
          std::string tok = detail::trim(value.substr(p, comma == std::string::npos ? comma : comma - p));
          if (!tok.empty()) c.seeds.push_back(static_cast<std::uint64_t>(parse_int(tok, field)));
          p = comma == std::string::npos ? value.size() : comma + 1;
        }
      } else if (key == "out") c.output_dir = value;
      else if (key == "eval_steps") c.eval_steps = static_cast<int>(parse_int(value, field));
      else if (key == "verbose_slots") c.verbose_slots = parse_bool(value, field);
      else if (key == "trace") c.trace = parse_bool(value, field);
      else handled = false;
    } else if (section == "exhaustive") {
      if (key == "tau_levels") c.grids.tau_levels = static_cast<int>(parse_int(value, field));
      else if (key == "power_levels") c.grids.power_levels = static_cast<int>(parse_int(value, field));
      else if (key == "phase_levels") c.grids.phase_levels = static_cast<int>(parse_int(value, field));
      else if (key == "budget") c.grids.budget = static_cast<std::size_t>(parse_int(value, field));
      else if (key == "slots") c.exhaustive_slots = static_cast<int>(parse_int(value, field));
      else handled = false;
    } else {
      throw std::invalid_argument("config: unknown section '" + section + "'");
    }
    if (!handled) throw std::invalid_argument("config: unknown key '" + field + "'");
  }
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  apply_config_text(c, text);
  return c;
}

}  // namespace uavris
