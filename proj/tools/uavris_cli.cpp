// Command-line experiment runner: train / eval / matrix / exhaustive /
// plotdata subcommands over the UAV-RIS harvesting simulator.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "uavris/harness.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonFlags {
  std::string config_path;
  std::string agent;
  std::string strategy;
  std::string renewable;
  std::string out;
  std::vector<std::uint64_t> seeds;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "config file (key = value sections)");
  cmd->add_option("--agent", f.agent, "agent kind: ee-ddpg|td3|ddpg|random|exhaustive");
  cmd->add_option("--strategy", f.strategy, "harvesting strategy: ts|hera");
  cmd->add_option("--re", f.renewable, "renewable harvesting: on|off");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seeds, "run seed(s)");
}

uavris::ExperimentConfig resolve(const CommonFlags& f) {
  uavris::ExperimentConfig cfg;
  if (!f.config_path.empty()) uavris::apply_config_text(cfg, read_file(f.config_path));
  if (!f.agent.empty()) cfg.agent_kind = f.agent;
  if (!f.strategy.empty()) cfg.env.strategy = uavris::strategy_from_string(f.strategy);
  if (!f.renewable.empty()) {
    if (f.renewable == "on") cfg.env.renewable_enabled = true;
    else if (f.renewable == "off") cfg.env.renewable_enabled = false;
    else throw std::invalid_argument("--re expects on|off");
  }
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (!f.seeds.empty()) cfg.seeds = f.seeds;
  cfg.validate();
  return cfg;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::size_t p = 0;
  while (p <= s.size()) {
    std::size_t c = s.find(',', p);
    std::string tok = s.substr(p, c == std::string::npos ? c : c - p);
    if (!tok.empty()) out.push_back(tok);
    if (c == std::string::npos) break;
    p = c + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV-RIS energy-harvesting simulator and DRL optimizer"};
  app.require_subcommand(1);

  CommonFlags train_f, eval_f, matrix_f, exhaustive_f;
  auto* train_cmd = app.add_subcommand("train", "train an agent, one run per seed");
  add_common(train_cmd, train_f);

  auto* eval_cmd = app.add_subcommand("eval", "greedy evaluation of a checkpoint");
  add_common(eval_cmd, eval_f);
  std::string checkpoint;
  int eval_steps = -1;
  bool frozen = false;
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint JSON to load");
  eval_cmd->add_option("--steps", eval_steps, "evaluation steps (default from config)");
  eval_cmd->add_flag("--frozen", frozen, "evaluate on held-out frozen slots");

  auto* matrix_cmd = app.add_subcommand("matrix", "cartesian experiment sweep");
  add_common(matrix_cmd, matrix_f);
  std::string ax_agents, ax_strategies, ax_re, ax_users;
  int jobs = 1;
  matrix_cmd->add_option("--agents", ax_agents, "comma list of agent kinds");
  matrix_cmd->add_option("--strategies", ax_strategies, "comma list of strategies");
  matrix_cmd->add_option("--renewables", ax_re, "comma list of on/off");
  matrix_cmd->add_option("--users", ax_users, "comma list of user counts");
  matrix_cmd->add_option("--jobs", jobs, "parallel workers");

  auto* exhaustive_cmd = app.add_subcommand("exhaustive", "grid search over frozen slots");
  add_common(exhaustive_cmd, exhaustive_f);
  int ex_slots = -1;
  exhaustive_cmd->add_option("--slots", ex_slots, "number of frozen slots");

  auto* plot_cmd = app.add_subcommand("plotdata", "emit long-format plot CSV from run dirs");
  std::string plot_runs, plot_out = "plotdata.csv";
  plot_cmd->add_option("--runs", plot_runs, "comma list of run directories")->required();
  plot_cmd->add_option("--out", plot_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      auto cfg = resolve(train_f);
      if (cfg.seeds.size() == 1) {
        auto rec = uavris::run_train(cfg);
        std::cout << rec.summary.dump(2) << '\n';
      } else {
        for (auto seed : cfg.seeds) {
          auto c = cfg;
          c.seeds = {seed};
          c.output_dir = (std::filesystem::path(cfg.output_dir) / ("s" + std::to_string(seed)))
                             .string();
          auto rec = uavris::run_train(c);
          std::cout << rec.summary.dump(2) << '\n';
        }
      }
    } else if (*eval_cmd) {
      auto cfg = resolve(eval_f);
      if (eval_steps >= 0) cfg.eval_steps = eval_steps;
      auto rec = uavris::run_eval(cfg, checkpoint, frozen);
      std::cout << rec.summary.dump(2) << '\n';
    } else if (*matrix_cmd) {
      auto cfg = resolve(matrix_f);
      uavris::MatrixAxes axes;
      axes.agents = split_csv(ax_agents);
      axes.strategies = split_csv(ax_strategies);
      for (const auto& v : split_csv(ax_re)) axes.renewables.push_back(v == "on");
      for (const auto& v : split_csv(ax_users)) axes.user_counts.push_back(std::stoi(v));
      auto records = uavris::run_matrix(cfg, axes, jobs);
      std::cout << "matrix: " << records.size() << " runs, table at " << cfg.output_dir
                << "/comparison.md\n";
    } else if (*exhaustive_cmd) {
      auto cfg = resolve(exhaustive_f);
      if (ex_slots > 0) cfg.exhaustive_slots = ex_slots;
      auto rec = uavris::run_exhaustive(cfg);
      std::cout << rec.summary.dump(2) << '\n';
    } else if (*plot_cmd) {
      std::vector<uavris::RunRecord> records;
      for (const auto& dir : split_csv(plot_runs))
        records.push_back(uavris::load_run_record(dir));
      uavris::emit_plot_data(records, plot_out);
      std::cout << "wrote " << plot_out << '\n';
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
