#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "uavris/agents.hpp"
#include "uavris/checkpoint.hpp"
#include "uavris/config.hpp"
#include "uavris/env.hpp"

namespace uavris {

struct EpisodeRow {
  int episode = 0;
  double episode_return = 0.0;
  double mean_efficiency = 0.0;
  int violations = 0;
};

struct SlotRow {
  int slot = 0;
  double reward = 0.0;
  double efficiency = 0.0;
  double battery_j = 0.0;
  std::vector<double> rates_bps;
  bool feasible = true;
};

struct RunRecord {
  ExperimentConfig config;
  std::string run_dir;
  std::uint64_t hash = 0;
  std::vector<EpisodeRow> episodes;
  std::vector<SlotRow> slots;
  nlohmann::json summary;
};

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failure on " + path.string());
}

inline nlohmann::json position_json(const Position3D& p) {
  return nlohmann::json::array({p.x, p.y, p.z});
}

inline nlohmann::json layout_json(const Layout& l) {
  nlohmann::json j;
  j["bs"] = position_json(l.bs);
  j["uav_center"] = position_json(l.uav_center);
  j["elements"] = nlohmann::json::array();
  for (const auto& e : l.ris_elements) j["elements"].push_back(position_json(e));
  j["users"] = nlohmann::json::array();
  for (const auto& u : l.users) j["users"].push_back(position_json(u));
  return j;
}

inline nlohmann::json channels_json(const ChannelState& cs) {
  auto complex_matrix = [](const Eigen::MatrixXcd& m) {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (int r = 0; r < m.rows(); ++r) {
      nlohmann::json rr = nlohmann::json::array(), ri = nlohmann::json::array();
      for (int c = 0; c < m.cols(); ++c) {
        rr.push_back(m(r, c).real());
        ri.push_back(m(r, c).imag());
      }
      re.push_back(std::move(rr));
      im.push_back(std::move(ri));
    }
    return nlohmann::json{{"re", re}, {"im", im}};
  };
  nlohmann::json j;
  j["g1_true"] = complex_matrix(cs.g1_true);
  j["g1_est"] = complex_matrix(cs.g1_est);
  j["g_ru_true"] = complex_matrix(cs.g_ru_true);
  j["g_ru_est"] = complex_matrix(cs.g_ru_est);
  return j;
}

/// Streams the three per-slot CSV schemas plus the optional JSON trace.
class SlotWriters {
 public:
  SlotWriters(const std::filesystem::path& dir, int users, bool enabled, bool trace,
              bool log_channels)
      : enabled_(enabled), trace_(trace), log_channels_(log_channels) {
    if (enabled_) {
      slots_.open(dir / "slots.csv");
      energy_.open(dir / "energy.csv");
      links_.open(dir / "links.csv");
      slots_ << "slot,reward,efficiency,battery_j";
      for (int k = 0; k < users; ++k) slots_ << ",rate_user_" << k;
      slots_ << ",feasible\n";
      energy_ << "slot,rf_j,re_j,consumed_j,incident_j,efficiency,battery_j\n";
      links_ << "slot,user,snr_db,rate_bps,qos_met\n";
    }
    if (trace_) trace_out_.open(dir / "trace.jsonl");
  }

  void write(int slot, const SlotEval& ev, double battery_j, double r_min_bps,
             const Layout& layout, const ChannelState& cs) {
    if (enabled_) {
      slots_ << slot << ',' << format_double(ev.reward) << ',' << format_double(ev.efficiency)
             << ',' << format_double(battery_j);
      for (int k = 0; k < ev.rates_bps.size(); ++k)
        slots_ << ',' << format_double(ev.rates_bps[k]);
      slots_ << ',' << (ev.feasible ? 1 : 0) << '\n';
      energy_ << slot << ',' << format_double(ev.energy.rf_harvested) << ','
              << format_double(ev.energy.re_harvested) << ',' << format_double(ev.consumed_j)
              << ',' << format_double(ev.energy.incident) << ','
              << format_double(ev.energy.efficiency) << ',' << format_double(battery_j) << '\n';
      for (int k = 0; k < ev.snrs.size(); ++k)
        links_ << slot << ',' << k << ',' << format_double(linear_to_db(std::max(ev.snrs[k], 1e-300)))
               << ',' << format_double(ev.rates_bps[k]) << ','
               << (ev.rates_bps[k] >= r_min_bps ? 1 : 0) << '\n';
    }
    if (trace_) {
      nlohmann::json j;
      j["slot"] = slot;
      j["layout"] = layout_json(layout);
      if (log_channels_) j["channels"] = channels_json(cs);
      trace_out_ << j.dump() << '\n';
    }
  }

 private:
  bool enabled_, trace_, log_channels_;
  std::ofstream slots_, energy_, links_;
};

inline std::filesystem::path prepare_run_dir(const ExperimentConfig& cfg) {
  std::filesystem::path dir(cfg.output_dir);
  if (std::filesystem::exists(dir / "summary.json"))
    throw std::invalid_argument("run directory already holds a completed run: " + dir.string());
  std::filesystem::create_directories(dir);
  write_text(dir / "_RUNNING", "");
  write_text(dir / "config.resolved.ini", serialize_config(cfg));
  return dir;
}

inline void finish_run_dir(const std::filesystem::path& dir, const nlohmann::json& summary) {
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  std::filesystem::remove(dir / "_RUNNING");
}

inline std::uint64_t agent_seed(std::uint64_t run_seed) { return run_seed ^ 0xa5a5a5a5a5a5a5a5ull; }

}  // namespace detail

inline std::unique_ptr<Agent> build_agent(const ExperimentConfig& cfg, std::uint64_t run_seed) {
  return make_agent(cfg.agent_kind, cfg.env.state_dim(), cfg.env.action_dim(),
                    observation_scale(cfg.env), cfg.agent, detail::agent_seed(run_seed));
}

/// Trains one seed of one configuration, writing the per-episode CSV/JSONL,
/// best and final checkpoints, and the summary JSON. Deterministic for a
/// given resolved config.
inline RunRecord run_train(const ExperimentConfig& cfg) {
  cfg.validate();
  auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = cfg.seeds.front();
  auto dir = detail::prepare_run_dir(cfg);

  EnvConfig env_cfg = cfg.env;
  env_cfg.seed = seed;
  Environment env(env_cfg);
  auto agent = build_agent(cfg, seed);
  Rng warmup_rng(seed ^ 0x5bd1e9955bd1e995ull);

  std::ofstream ep_csv(dir / "episodes.csv");
  ep_csv << "episode,return,mean_efficiency,violations\n";
  std::ofstream ep_jsonl(dir / "episodes.jsonl");
  detail::SlotWriters writers(dir, cfg.env.users, cfg.verbose_slots, cfg.trace,
                              cfg.env.log_channels);

  RunRecord rec;
  rec.config = cfg;
  rec.run_dir = dir.string();
  rec.hash = config_hash(cfg);

  long total_steps = 0;
  long violation_slots = 0;
  double best_return = -1.0;
  int best_episode = -1;
  double return_sum = 0.0;

  for (int ep = 0; ep < cfg.agent.episodes; ++ep) {
    Eigen::VectorXd state = env.reset();
    double ep_return = 0.0;
    int ep_violations = 0;
    for (int t = 0; t < cfg.env.episode_length; ++t) {
      Eigen::VectorXd action;
      if (total_steps < cfg.agent.warmup_steps) {
        action.resize(env.action_dim());
        for (int i = 0; i < action.size(); ++i) action[i] = warmup_rng.uniform(-1.0, 1.0);
      } else {
        action = agent->act(state, /*explore=*/true);
      }
      StepOutcome out = env.step(action);
      agent->observe(Transition{state, action, out.reward, out.next_state, out.done});
      if (agent->trainable()) agent->train_step();
      writers.write(total_steps, out.info, env.ledger().battery, cfg.env.r_min_bps,
                    env.layout(), env.channels());
      ep_return += out.reward;
      if (!out.info.feasible) {
        ++ep_violations;
        ++violation_slots;
      }
      state = out.next_state;
      ++total_steps;
    }
    double mean_eff = ep_return / cfg.env.episode_length;
    ep_csv << ep << ',' << format_double(ep_return) << ',' << format_double(mean_eff) << ','
           << ep_violations << '\n';
    nlohmann::json ej{{"episode", ep},
                      {"return", ep_return},
                      {"mean_efficiency", mean_eff},
                      {"violations", ep_violations},
                      {"seed", seed}};
    ep_jsonl << ej.dump() << '\n';
    rec.episodes.push_back(EpisodeRow{ep, ep_return, mean_eff, ep_violations});
    return_sum += ep_return;
    if (ep_return > best_return) {
      best_return = ep_return;
      best_episode = ep;
      if (agent->trainable()) save_checkpoint(*agent, cfg, (dir / "checkpoint_best.json").string());
    }
  }
  if (agent->trainable()) save_checkpoint(*agent, cfg, (dir / "checkpoint_final.json").string());

  const int n_ep = cfg.agent.episodes;
  const int quartile = std::max(n_ep / 4, 1);
  double fq_sum = 0.0;
  for (int ep = n_ep - quartile; ep < n_ep; ++ep)
    fq_sum += rec.episodes[ep].episode_return / cfg.env.episode_length;

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.summary = nlohmann::json{
      {"kind", "train"},
      {"config_hash", hash_hex(rec.hash)},
      {"seed", seed},
      {"agent", cfg.agent_kind},
      {"strategy", to_string(cfg.env.strategy)},
      {"renewable", cfg.env.renewable_enabled},
      {"episodes", n_ep},
      {"episode_length", cfg.env.episode_length},
      {"mean_return", return_sum / n_ep},
      {"mean_efficiency", return_sum / n_ep / cfg.env.episode_length},
      {"final_quartile_mean_reward", fq_sum / quartile},
      {"violation_rate", static_cast<double>(violation_slots) / total_steps},
      {"best_episode", best_episode},
      {"best_return", best_return},
      {"wall_clock_s", wall}};
  detail::finish_run_dir(dir, rec.summary);
  return rec;
}

/// Greedy evaluation. Live mode rolls the environment with the loaded policy;
/// frozen mode probes the policy on independently generated held-out slots
/// with a fresh battery each, the setting the exhaustive baseline shares.
inline RunRecord run_eval(const ExperimentConfig& cfg, const std::string& checkpoint_path,
                          bool frozen = false) {
  cfg.validate();
  auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = cfg.seeds.front();
  auto dir = detail::prepare_run_dir(cfg);

  EnvConfig env_cfg = cfg.env;
  env_cfg.seed = seed;
  Environment env(env_cfg);
  auto agent = build_agent(cfg, seed);
  if (!checkpoint_path.empty()) load_checkpoint(*agent, cfg, checkpoint_path);

  detail::SlotWriters writers(dir, cfg.env.users, /*enabled=*/true, cfg.trace,
                              cfg.env.log_channels);

  RunRecord rec;
  rec.config = cfg;
  rec.run_dir = dir.string();
  rec.hash = config_hash(cfg);

  double reward_sum = 0.0;
  long violations = 0;
  const int steps = cfg.eval_steps;

  if (frozen) {
    env.reset(seed + 1);
    auto slots = env.roll_frozen(steps);
    for (int i = 0; i < steps; ++i) {
      Eigen::VectorXd state = env.frozen_state(slots[i]);
      Eigen::VectorXd action = agent->act(state, /*explore=*/false);
      SlotEval ev = evaluate_slot(slots[i], decode_action(action, cfg.env).action, cfg.env);
      writers.write(i, ev, slots[i].ledger.battery, cfg.env.r_min_bps, slots[i].layout,
                    slots[i].channels);
      rec.slots.push_back(SlotRow{i, ev.reward, ev.efficiency, slots[i].ledger.battery,
                                  {ev.rates_bps.begin(), ev.rates_bps.end()}, ev.feasible});
      reward_sum += ev.reward;
      if (!ev.feasible) ++violations;
    }
  } else {
    Eigen::VectorXd state = env.reset();
    for (int i = 0; i < steps; ++i) {
      Eigen::VectorXd action = agent->act(state, /*explore=*/false);
      StepOutcome out = env.step(action);
      writers.write(i, out.info, env.ledger().battery, cfg.env.r_min_bps, env.layout(),
                    env.channels());
      rec.slots.push_back(SlotRow{i, out.reward, out.info.efficiency, env.ledger().battery,
                                  {out.info.rates_bps.begin(), out.info.rates_bps.end()},
                                  out.info.feasible});
      reward_sum += out.reward;
      if (!out.info.feasible) ++violations;
      state = out.done ? env.reset() : out.next_state;
    }
  }

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.summary = nlohmann::json{
      {"kind", "eval"},
      {"config_hash", hash_hex(rec.hash)},
      {"seed", seed},
      {"agent", cfg.agent_kind},
      {"strategy", to_string(cfg.env.strategy)},
      {"renewable", cfg.env.renewable_enabled},
      {"steps", steps},
      {"frozen", frozen},
      {"empty", steps == 0},
      {"mean_efficiency", steps > 0 ? reward_sum / steps : 0.0},
      {"mean_reward", steps > 0 ? reward_sum / steps : 0.0},
      {"violation_rate", steps > 0 ? static_cast<double>(violations) / steps : 0.0},
      {"checkpoint", checkpoint_path},
      {"wall_clock_s", wall}};
  detail::finish_run_dir(dir, rec.summary);
  return rec;
}

/// Exhaustive-search baseline over held-out frozen slots; the declared grid
/// is embedded in the outputs.
inline RunRecord run_exhaustive(const ExperimentConfig& cfg) {
  cfg.validate();
  auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = cfg.seeds.front();
  auto dir = detail::prepare_run_dir(cfg);

  EnvConfig env_cfg = cfg.env;
  env_cfg.seed = seed;
  Environment env(env_cfg);
  env.reset(seed + 1);
  auto slots = env.roll_frozen(cfg.exhaustive_slots);

  std::ofstream csv(dir / "exhaustive.csv");
  csv << "slot,best_reward,best_tau,combinations\n";

  RunRecord rec;
  rec.config = cfg;
  rec.run_dir = dir.string();
  rec.hash = config_hash(cfg);

  double reward_sum = 0.0;
  std::size_t combos = 0;
  for (int i = 0; i < cfg.exhaustive_slots; ++i) {
    ExhaustiveResult res = exhaustive_search(slots[i], cfg.env, cfg.grids);
    reward_sum += res.best_reward;
    combos = res.combinations;
    csv << i << ',' << format_double(res.best_reward) << ','
        << format_double(res.best_action.tau) << ',' << res.combinations << '\n';
    rec.slots.push_back(SlotRow{i, res.best_reward, res.best_eval.efficiency,
                                slots[i].ledger.battery,
                                {res.best_eval.rates_bps.begin(), res.best_eval.rates_bps.end()},
                                res.best_eval.feasible});
  }

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.summary = nlohmann::json{
      {"kind", "exhaustive"},
      {"config_hash", hash_hex(rec.hash)},
      {"seed", seed},
      {"strategy", to_string(cfg.env.strategy)},
      {"renewable", cfg.env.renewable_enabled},
      {"slots", cfg.exhaustive_slots},
      {"mean_efficiency", cfg.exhaustive_slots > 0 ? reward_sum / cfg.exhaustive_slots : 0.0},
      {"combinations", combos},
      {"grid",
       nlohmann::json{{"tau_levels", cfg.grids.tau_levels},
                      {"power_levels", cfg.grids.power_levels},
                      {"phase_levels", cfg.grids.phase_levels},
                      {"budget", cfg.grids.budget}}},
      {"wall_clock_s", wall}};
  detail::finish_run_dir(dir, rec.summary);
  return rec;
}

struct MatrixAxes {
  std::vector<std::string> agents;      // empty = base agent only
  std::vector<std::string> strategies;  // "ts"/"hera"
  std::vector<bool> renewables;
  std::vector<int> user_counts;
};

/// Trains (or directly evaluates, for search/random baselines) every cell of
/// the axes' cartesian product and returns the per-cell evaluation records.
/// Cells run in parallel worker threads; each owns its output directory.
/// Failures are recorded and the matrix continues.
inline std::vector<RunRecord> run_matrix(const ExperimentConfig& base, const MatrixAxes& axes,
                                         int jobs = 1) {
  base.validate();
  std::vector<ExperimentConfig> cells;
  auto agents = axes.agents.empty() ? std::vector<std::string>{base.agent_kind} : axes.agents;
  auto strategies = axes.strategies.empty()
                        ? std::vector<std::string>{std::string(to_string(base.env.strategy))}
                        : axes.strategies;
  auto renewables =
      axes.renewables.empty() ? std::vector<bool>{base.env.renewable_enabled} : axes.renewables;
  auto users = axes.user_counts.empty() ? std::vector<int>{base.env.users} : axes.user_counts;

  std::filesystem::path root(base.output_dir);
  std::filesystem::create_directories(root);

  for (const auto& agent : agents)
    for (const auto& strat : strategies)
      for (bool re : renewables)
        for (int k : users)
          for (std::uint64_t seed : base.seeds) {
            ExperimentConfig c = base;
            c.agent_kind = agent;
            c.env.strategy = strategy_from_string(strat);
            c.env.renewable_enabled = re;
            c.env.users = k;
            c.seeds = {seed};
            c.output_dir = (root / (agent + "_" + strat + (re ? "_re" : "_nore") + "_k" +
                                    std::to_string(k) + "_s" + std::to_string(seed)))
                               .string();
            cells.push_back(std::move(c));
          }

  std::vector<RunRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      RunRecord rec;
      rec.config = cells[i];
      rec.run_dir = cells[i].output_dir;
      try {
        if (cells[i].agent_kind == "exhaustive") {
          rec = run_exhaustive(cells[i]);
        } else if (cells[i].agent_kind == "random") {
          rec = run_eval(cells[i], "", /*frozen=*/false);
        } else {
          RunRecord train = run_train(cells[i]);
          ExperimentConfig eval_cfg = cells[i];
          eval_cfg.output_dir = cells[i].output_dir + "/eval";
          rec = run_eval(eval_cfg,
                         (std::filesystem::path(cells[i].output_dir) / "checkpoint_best.json")
                             .string());
          rec.episodes = std::move(train.episodes);
        }
      } catch (const std::exception& e) {
        rec.summary = nlohmann::json{{"kind", "failed"}, {"error", e.what()}};
      }
      records[i] = std::move(rec);
    }
  };
  int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // comparison table: one CSV row per cell plus a strategy-pivoted markdown
  // table per (renewable, users) combination, median across seeds
  std::ofstream csv(root / "comparison.csv");
  csv << "agent,strategy,renewable,users,seed,mean_efficiency,status,run_dir\n";
  for (const auto& rec : records) {
    bool failed = rec.summary.value("kind", "failed") == "failed";
    csv << rec.config.agent_kind << ',' << to_string(rec.config.env.strategy) << ','
        << (rec.config.env.renewable_enabled ? "on" : "off") << ',' << rec.config.env.users << ','
        << rec.config.seeds.front() << ','
        << (failed ? "" : format_double(rec.summary.value("mean_efficiency", 0.0))) << ','
        << (failed ? "failed" : "ok") << ',' << rec.run_dir << '\n';
  }

  std::ofstream md(root / "comparison.md");
  for (bool re : renewables)
    for (int k : users) {
      md << "## renewable=" << (re ? "on" : "off") << " users=" << k << "\n\n";
      md << "| algorithm |";
      for (const auto& s : strategies) md << ' ' << s << " |";
      md << "\n|---|";
      for (std::size_t i = 0; i < strategies.size(); ++i) md << "---|";
      md << '\n';
      for (const auto& agent : agents) {
        md << "| " << agent << " |";
        for (const auto& strat : strategies) {
          std::vector<double> vals;
          for (const auto& rec : records) {
            if (rec.config.agent_kind == agent &&
                std::string(to_string(rec.config.env.strategy)) == strat &&
                rec.config.env.renewable_enabled == re && rec.config.env.users == k &&
                rec.summary.value("kind", "failed") != "failed")
              vals.push_back(rec.summary.value("mean_efficiency", 0.0));
          }
          if (vals.empty()) {
            md << " - |";
          } else {
            std::sort(vals.begin(), vals.end());
            md << ' ' << format_double(vals[vals.size() / 2]) << " |";
          }
        }
        md << '\n';
      }
      md << '\n';
    }
  return records;
}

/// Long-format (series, x, y) plot data: reward-vs-episode for training
/// records and efficiency-vs-step for evaluation records.
inline void emit_plot_data(const std::vector<RunRecord>& records, const std::string& out_csv) {
  if (records.empty()) throw std::invalid_argument("emit_plot_data: no records");
  std::ofstream out(out_csv);
  if (!out) throw std::runtime_error("emit_plot_data: cannot open " + out_csv);
  out << "series,x,y\n";
  for (const auto& rec : records) {
    std::string name = std::filesystem::path(rec.run_dir).filename().string();
    for (const auto& ep : rec.episodes)
      out << name << ":reward," << ep.episode << ',' << format_double(ep.episode_return) << '\n';
    for (const auto& s : rec.slots)
      out << name << ":efficiency," << s.slot << ',' << format_double(s.efficiency) << '\n';
  }
}

/// Reloads the rows emit_plot_data needs from a finished run directory.
inline RunRecord load_run_record(const std::string& dir) {
  RunRecord rec;
  rec.run_dir = dir;
  std::filesystem::path p(dir);
  {
    std::ifstream in(p / "summary.json");
    if (!in) throw std::runtime_error("load_run_record: no summary.json in " + dir);
    in >> rec.summary;
  }
  if (std::filesystem::exists(p / "episodes.csv")) {
    std::ifstream in(p / "episodes.csv");
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      EpisodeRow row;
      if (std::sscanf(line.c_str(), "%d,%lf,%lf,%d", &row.episode, &row.episode_return,
                      &row.mean_efficiency, &row.violations) == 4)
        rec.episodes.push_back(row);
    }
  }
  if (std::filesystem::exists(p / "slots.csv")) {
    std::ifstream in(p / "slots.csv");
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      SlotRow row;
      if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &row.slot, &row.reward, &row.efficiency,
                      &row.battery_j) == 4)
        rec.slots.push_back(row);
    }
  }
  return rec;
}

}  // namespace uavris
