#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "uavris/agents.hpp"
#include "uavris/config.hpp"

namespace uavris {

namespace detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

inline nlohmann::json net_to_json(const DenseNet& net) {
  nlohmann::json j;
  j["output_act"] = net.output_act == Activation::Tanh ? "tanh" : "identity";
  j["weights"] = nlohmann::json::array();
  j["biases"] = nlohmann::json::array();
  for (int i = 0; i < net.layer_count(); ++i) {
    j["weights"].push_back(matrix_to_json(net.weights[i]));
    j["biases"].push_back(vector_to_json(net.biases[i]));
  }
  return j;
}

inline void net_from_json(DenseNet& net, const nlohmann::json& j) {
  net.output_act = j.at("output_act") == "tanh" ? Activation::Tanh : Activation::Identity;
  net.weights.clear();
  net.biases.clear();
  for (const auto& w : j.at("weights")) net.weights.push_back(matrix_from_json(w));
  for (const auto& b : j.at("biases")) net.biases.push_back(vector_from_json(b));
}

inline nlohmann::json adam_to_json(const Adam& opt) {
  nlohmann::json j;
  j["step"] = opt.step_count();
  j["mw"] = nlohmann::json::array();
  j["vw"] = nlohmann::json::array();
  j["mb"] = nlohmann::json::array();
  j["vb"] = nlohmann::json::array();
  for (const auto& m : opt.first_moments_w()) j["mw"].push_back(matrix_to_json(m));
  for (const auto& m : opt.second_moments_w()) j["vw"].push_back(matrix_to_json(m));
  for (const auto& m : opt.first_moments_b()) j["mb"].push_back(vector_to_json(m));
  for (const auto& m : opt.second_moments_b()) j["vb"].push_back(vector_to_json(m));
  return j;
}

inline void adam_from_json(Adam& opt, const nlohmann::json& j) {
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb;
  for (const auto& m : j.at("mw")) mw.push_back(matrix_from_json(m));
  for (const auto& m : j.at("vw")) vw.push_back(matrix_from_json(m));
  for (const auto& m : j.at("mb")) mb.push_back(vector_from_json(m));
  for (const auto& m : j.at("vb")) vb.push_back(vector_from_json(m));
  opt.restore(std::move(mw), std::move(vw), std::move(mb), std::move(vb),
              j.at("step").get<long>());
}

}  // namespace detail

/// Self-describing JSON checkpoint: config identity, every parameter tensor,
/// optimizer state and the agent's RNG state.
inline nlohmann::json checkpoint_to_json(Agent& agent, const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["kind"] = agent.kind();
  j["config_hash"] = hash_hex(config_hash(cfg));
  j["compat_hash"] = hash_hex(compat_hash(cfg));
  j["state_dim"] = agent.state_dim();
  j["action_dim"] = agent.action_dim();
  j["nets"] = nlohmann::json::object();
  for (auto& [name, net] : agent.named_nets()) j["nets"][name] = detail::net_to_json(*net);
  j["optimizers"] = nlohmann::json::object();
  for (auto& [name, opt] : agent.named_optimizers())
    j["optimizers"][name] = detail::adam_to_json(*opt);
  if (agent.rng()) j["rng"] = agent.rng()->serialize();
  return j;
}

inline void save_checkpoint(Agent& agent, const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << checkpoint_to_json(agent, cfg).dump();
  if (!out) throw std::runtime_error("save_checkpoint: write failure on " + path);
}

/// Restores a checkpoint into a freshly constructed agent. Refuses files whose
/// compatibility hash disagrees with the provided config.
inline void load_checkpoint(Agent& agent, const ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (j.at("compat_hash") != hash_hex(compat_hash(cfg)))
    throw std::runtime_error("load_checkpoint: config hash mismatch (checkpoint " +
                             j.at("compat_hash").get<std::string>() + ", config " +
                             hash_hex(compat_hash(cfg)) + ")");
  if (j.at("kind") != agent.kind())
    throw std::runtime_error("load_checkpoint: agent kind mismatch");
  for (auto& [name, net] : agent.named_nets()) {
    if (!j.at("nets").contains(name))
      throw std::runtime_error("load_checkpoint: missing net '" + name + "'");
    detail::net_from_json(*net, j.at("nets").at(name));
  }
  for (auto& [name, opt] : agent.named_optimizers()) {
    if (j.at("optimizers").contains(name)) detail::adam_from_json(*opt, j.at("optimizers").at(name));
  }
  if (agent.rng() && j.contains("rng")) agent.rng()->deserialize(j.at("rng").get<std::string>());
}

}  // namespace uavris
