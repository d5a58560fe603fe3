#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "uavris/core.hpp"
#include "uavris/env.hpp"
#include "uavris/net.hpp"
#include "uavris/replay.hpp"

namespace uavris {

struct AgentHyperparams {
  double gamma = 0.99;
  double rho = 0.005;          // soft-update factor
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double explore_sigma = 0.1;  // exploration noise
  double target_sigma = 0.2;   // target-action noise
  double noise_clip = 0.5;     // clip bound c
  double temperature = 1.0;    // softmax temperature
  int target_samples = 50;     // N_a
  int batch_size = 64;         // N_b
  std::size_t buffer_capacity = 100000;
  std::vector<int> hidden = {256, 256};
  int episodes = 5000;  // N_E
  int policy_delay = 2;
  int warmup_steps = 0;  // uniform-random actions before the policy takes over

  void validate() const {
    auto fail = [](const std::string& f) {
      throw std::invalid_argument("AgentHyperparams: invalid field '" + f + "'");
    };
    if (gamma < 0 || gamma > 1) fail("gamma");
    if (rho <= 0 || rho > 1) fail("rho");
    if (target_samples < 1) fail("target_samples");
    if (batch_size < 1) fail("batch_size");
    if (buffer_capacity == 0) fail("buffer_capacity");
    if (episodes < 1) fail("episodes");
    if (noise_clip < 0) fail("noise_clip");
    if (hidden.empty()) fail("hidden");
  }
};

/// Softmax-weighted average of sampled values with max-subtraction;
/// temperature 0 degenerates to the arithmetic mean.
inline double softmax_weighted_value(const Eigen::VectorXd& values, double temperature) {
  if (values.size() == 0) throw std::invalid_argument("softmax_weighted_value: empty sample");
  double m = values.maxCoeff();
  double wsum = 0.0, vsum = 0.0;
  for (int i = 0; i < values.size(); ++i) {
    double w = std::exp(temperature * (values[i] - m));
    wsum += w;
    vsum += w * values[i];
  }
  return vsum / wsum;
}

inline Eigen::MatrixXd clipped_noise(int rows, int cols, double sigma, double clip, Rng& rng) {
  Eigen::MatrixXd n(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r)
      n(r, c) = std::min(std::max(rng.normal(0.0, sigma), -clip), clip);
  return n;
}

inline Eigen::MatrixXd stack_state_action(const Eigen::MatrixXd& s, const Eigen::MatrixXd& a) {
  Eigen::MatrixXd sa(s.rows() + a.rows(), s.cols());
  sa.topRows(s.rows()) = s;
  sa.bottomRows(a.rows()) = a;
  return sa;
}

/// Softmax-weighted dual-critic targets with caller-provided noise: one
/// (actor1, actor2) noise pair per draw. Exposed so tests can pin the draws.
inline Eigen::RowVectorXd softmax_target_values_with_noise(
    const Eigen::MatrixXd& next_states, const DenseNet& target_actor1,
    const DenseNet& target_actor2, const DenseNet& target_critic1,
    const DenseNet& target_critic2,
    const std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>>& noise,
    double temperature) {
  const int n = static_cast<int>(next_states.cols());
  const int draws = static_cast<int>(noise.size());
  if (draws < 1) throw std::invalid_argument("softmax_target_values: need at least one draw");
  Eigen::MatrixXd a1 = target_actor1.forward(next_states);
  Eigen::MatrixXd a2 = target_actor2.forward(next_states);
  Eigen::MatrixXd qmin(draws, n);
  for (int j = 0; j < draws; ++j) {
    Eigen::MatrixXd q1 = target_critic1.forward(stack_state_action(next_states, a1 + noise[j].first));
    Eigen::MatrixXd q2 = target_critic2.forward(stack_state_action(next_states, a2 + noise[j].second));
    qmin.row(j) = q1.row(0).cwiseMin(q2.row(0));
  }
  Eigen::RowVectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = softmax_weighted_value(qmin.col(i), temperature);
  return out;
}

/// Per-draw perturbed target actions a_i' = mu_i'(s') + clip(N(0, sigma~), -c, c),
/// per-draw conservative Q_min, softmax-weighted expectation over the draws.
inline Eigen::RowVectorXd softmax_target_values(
    const Eigen::MatrixXd& next_states, const DenseNet& target_actor1,
    const DenseNet& target_actor2, const DenseNet& target_critic1,
    const DenseNet& target_critic2, const AgentHyperparams& hp, Rng& rng) {
  const int n = static_cast<int>(next_states.cols());
  const int adim = target_actor1.output_dim();
  std::vector<std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> noise;
  noise.reserve(hp.target_samples);
  for (int j = 0; j < hp.target_samples; ++j)
    noise.emplace_back(clipped_noise(adim, n, hp.target_sigma, hp.noise_clip, rng),
                       clipped_noise(adim, n, hp.target_sigma, hp.noise_clip, rng));
  return softmax_target_values_with_noise(next_states, target_actor1, target_actor2,
                                          target_critic1, target_critic2, noise, hp.temperature);
}

inline double softmax_target_value(const Eigen::VectorXd& next_state,
                                   const DenseNet& target_actor1, const DenseNet& target_actor2,
                                   const DenseNet& target_critic1,
                                   const DenseNet& target_critic2, const AgentHyperparams& hp,
                                   Rng& rng) {
  return softmax_target_values(Eigen::MatrixXd(next_state), target_actor1, target_actor2,
                               target_critic1, target_critic2, hp, rng)(0);
}

/// TD3 min-critic target with caller-provided smoothing noise.
inline Eigen::RowVectorXd td3_target_values_with_noise(const Eigen::MatrixXd& next_states,
                                                       const DenseNet& target_actor,
                                                       const DenseNet& target_critic1,
                                                       const DenseNet& target_critic2,
                                                       const Eigen::MatrixXd& noise) {
  Eigen::MatrixXd a = target_actor.forward(next_states) + noise;
  Eigen::MatrixXd sa = stack_state_action(next_states, a);
  Eigen::MatrixXd q1 = target_critic1.forward(sa);
  Eigen::MatrixXd q2 = target_critic2.forward(sa);
  return q1.row(0).cwiseMin(q2.row(0));
}

inline Eigen::RowVectorXd td3_target_values(const Eigen::MatrixXd& next_states,
                                            const DenseNet& target_actor,
                                            const DenseNet& target_critic1,
                                            const DenseNet& target_critic2,
                                            const AgentHyperparams& hp, Rng& rng) {
  Eigen::MatrixXd noise = clipped_noise(target_actor.output_dim(),
                                        static_cast<int>(next_states.cols()), hp.target_sigma,
                                        hp.noise_clip, rng);
  return td3_target_values_with_noise(next_states, target_actor, target_critic1, target_critic2,
                                      noise);
}

struct TrainDiagnostics {
  bool trained = false;
  double critic1_loss = 0.0;
  double critic2_loss = 0.0;
  double actor_objective = 0.0;
  double mean_target = 0.0;
  int chosen_actor = -1;
};

class Agent {
 public:
  Agent(int state_dim, int action_dim, Eigen::VectorXd obs_scale)
      : state_dim_(state_dim), action_dim_(action_dim), obs_scale_(std::move(obs_scale)) {
    if (obs_scale_.size() != state_dim_)
      throw std::invalid_argument("Agent: observation scale dimension mismatch");
  }
  virtual ~Agent() = default;

  virtual std::string kind() const = 0;
  virtual Eigen::VectorXd act(const Eigen::VectorXd& state, bool explore) = 0;
  virtual void observe(Transition) {}
  virtual TrainDiagnostics train_step() { return {}; }
  virtual bool trainable() const { return false; }

  // checkpoint hooks
  virtual std::vector<std::pair<std::string, DenseNet*>> named_nets() { return {}; }
  virtual std::vector<std::pair<std::string, Adam*>> named_optimizers() { return {}; }
  virtual Rng* rng() { return nullptr; }

  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  const Eigen::VectorXd& observation_scale() const { return obs_scale_; }

 protected:
  Eigen::VectorXd scale(const Eigen::VectorXd& s) const { return s.cwiseQuotient(obs_scale_); }

  int state_dim_;
  int action_dim_;
  Eigen::VectorXd obs_scale_;
};

/// Seeded uniform policy on [-1,1]^action_dim.
class RandomAgent : public Agent {
 public:
  RandomAgent(int state_dim, int action_dim, Eigen::VectorXd obs_scale, std::uint64_t seed)
      : Agent(state_dim, action_dim, std::move(obs_scale)), rng_(seed) {}

  std::string kind() const override { return "random"; }

  Eigen::VectorXd act(const Eigen::VectorXd&, bool) override {
    Eigen::VectorXd a(action_dim_);
    for (int i = 0; i < action_dim_; ++i) a[i] = rng_.uniform(-1.0, 1.0);
    return a;
  }

  Rng* rng() override { return &rng_; }

 private:
  Rng rng_;
};

namespace detail {

struct Batch {
  Eigen::MatrixXd states;       // scaled
  Eigen::MatrixXd actions;      // raw
  Eigen::MatrixXd next_states;  // scaled
  Eigen::RowVectorXd rewards;
  Eigen::RowVectorXd not_done;
};

}  // namespace detail

/// Shared machinery of the three actor-critic variants: replay, batching,
/// MSE critic updates and the deterministic policy gradient.
class ActorCriticBase : public Agent {
 public:
  ActorCriticBase(int state_dim, int action_dim, Eigen::VectorXd obs_scale,
                  AgentHyperparams hp, std::uint64_t seed)
      : Agent(state_dim, action_dim, std::move(obs_scale)),
        hp_(std::move(hp)),
        rng_(seed),
        buffer_(hp_.buffer_capacity, seed ^ 0x9e3779b97f4a7c15ull) {
    hp_.validate();
  }

  void observe(Transition t) override { buffer_.push(std::move(t)); }
  bool trainable() const override { return true; }
  Rng* rng() override { return &rng_; }
  const AgentHyperparams& hyperparams() const { return hp_; }
  ReplayBuffer& buffer() { return buffer_; }

 protected:
  bool batch_ready() const { return buffer_.size() >= static_cast<std::size_t>(hp_.batch_size); }

  detail::Batch sample_batch() {
    auto sample = buffer_.sample(hp_.batch_size);
    detail::Batch b;
    const int n = hp_.batch_size;
    b.states.resize(state_dim_, n);
    b.actions.resize(action_dim_, n);
    b.next_states.resize(state_dim_, n);
    b.rewards.resize(n);
    b.not_done.resize(n);
    for (int i = 0; i < n; ++i) {
      b.states.col(i) = scale(sample[i]->state);
      b.actions.col(i) = sample[i]->action;
      b.next_states.col(i) = scale(sample[i]->next_state);
      b.rewards[i] = sample[i]->reward;
      b.not_done[i] = sample[i]->done ? 0.0 : 1.0;
    }
    return b;
  }

  double update_critic(DenseNet& critic, Adam& opt, const Eigen::MatrixXd& sa,
                       const Eigen::RowVectorXd& targets) {
    DenseNet::Tape tape;
    Eigen::MatrixXd q = critic.forward(sa, &tape);
    Eigen::RowVectorXd diff = q.row(0) - targets;
    const double n = static_cast<double>(diff.size());
    double loss = diff.squaredNorm() / n;
    Eigen::MatrixXd dq = (2.0 / n) * diff;
    auto grads = critic.backward(tape, dq);
    opt.step(critic, grads);
    return loss;
  }

  /// Ascends mean Q(s, mu(s)) through the given critic; returns the mean Q.
  double update_actor(DenseNet& actor, Adam& opt, const DenseNet& critic,
                      const Eigen::MatrixXd& states) {
    const double n = static_cast<double>(states.cols());
    DenseNet::Tape atape;
    Eigen::MatrixXd a = actor.forward(states, &atape);
    DenseNet::Tape ctape;
    Eigen::MatrixXd q = critic.forward(stack_state_action(states, a), &ctape);
    Eigen::MatrixXd dq = Eigen::MatrixXd::Constant(1, states.cols(), -1.0 / n);
    auto cgrads = critic.backward(ctape, dq);
    Eigen::MatrixXd da = cgrads.input.bottomRows(action_dim_);
    auto agrads = actor.backward(atape, da);
    opt.step(actor, agrads);
    return q.row(0).mean();
  }

  Eigen::VectorXd explore_clip(Eigen::VectorXd a, bool explore) {
    if (explore && hp_.explore_sigma > 0)
      for (int i = 0; i < a.size(); ++i) a[i] += rng_.normal(0.0, hp_.explore_sigma);
    for (int i = 0; i < a.size(); ++i) a[i] = std::min(std::max(a[i], -1.0), 1.0);
    return a;
  }

  AgentHyperparams hp_;
  Rng rng_;
  ReplayBuffer buffer_;
};

/// Dual-actor, dual-critic deterministic policy gradient: the Bellman target
/// is the softmax-weighted expectation of per-draw min target-critic values,
/// and each update trains the actor whose paired critic scores its own action
/// higher.
class EeDdpgAgent : public ActorCriticBase {
 public:
  EeDdpgAgent(int state_dim, int action_dim, Eigen::VectorXd obs_scale, AgentHyperparams hp,
              std::uint64_t seed)
      : ActorCriticBase(state_dim, action_dim, std::move(obs_scale), std::move(hp), seed),
        adam_actor1_(hp_.actor_lr),
        adam_actor2_(hp_.actor_lr),
        adam_critic1_(hp_.critic_lr),
        adam_critic2_(hp_.critic_lr) {
    actor1_ = DenseNet::make(state_dim_, hp_.hidden, action_dim_, Activation::Tanh, rng_);
    actor2_ = DenseNet::make(state_dim_, hp_.hidden, action_dim_, Activation::Tanh, rng_);
    critic1_ =
        DenseNet::make(state_dim_ + action_dim_, hp_.hidden, 1, Activation::Identity, rng_);
    critic2_ =
        DenseNet::make(state_dim_ + action_dim_, hp_.hidden, 1, Activation::Identity, rng_);
    target_actor1_ = actor1_;
    target_actor2_ = actor2_;
    target_critic1_ = critic1_;
    target_critic2_ = critic2_;
  }

  std::string kind() const override { return "ee-ddpg"; }

  Eigen::VectorXd act(const Eigen::VectorXd& state, bool explore) override {
    Eigen::VectorXd s = scale(state);
    Eigen::VectorXd a1 = actor1_.forward(s);
    Eigen::VectorXd a2 = actor2_.forward(s);
    Eigen::VectorXd sa1(state_dim_ + action_dim_), sa2(state_dim_ + action_dim_);
    sa1 << s, a1;
    sa2 << s, a2;
    double q1 = critic1_.forward(sa1)(0);
    double q2 = critic2_.forward(sa2)(0);
    // ties go to actor 1, matching the >= in the selection rule
    Eigen::VectorXd a = q1 >= q2 ? a1 : a2;
    return explore_clip(std::move(a), explore);
  }

  TrainDiagnostics train_step() override {
    TrainDiagnostics diag;
    if (!batch_ready()) return diag;
    diag.trained = true;
    auto b = sample_batch();

    Eigen::RowVectorXd t = softmax_target_values(b.next_states, target_actor1_, target_actor2_,
                                                 target_critic1_, target_critic2_, hp_, rng_);
    Eigen::RowVectorXd y =
        b.rewards + hp_.gamma * b.not_done.cwiseProduct(t);
    diag.mean_target = y.mean();

    Eigen::MatrixXd sa = stack_state_action(b.states, b.actions);
    diag.critic1_loss = update_critic(critic1_, adam_critic1_, sa, y);
    diag.critic2_loss = update_critic(critic2_, adam_critic2_, sa, y);

    double q1 = critic1_.forward(stack_state_action(b.states, actor1_.forward(b.states)))
                    .row(0)
                    .mean();
    double q2 = critic2_.forward(stack_state_action(b.states, actor2_.forward(b.states)))
                    .row(0)
                    .mean();
    if (q1 >= q2) {
      diag.chosen_actor = 1;
      diag.actor_objective = update_actor(actor1_, adam_actor1_, critic1_, b.states);
    } else {
      diag.chosen_actor = 2;
      diag.actor_objective = update_actor(actor2_, adam_actor2_, critic2_, b.states);
    }

    soft_update(target_actor1_, actor1_, hp_.rho);
    soft_update(target_actor2_, actor2_, hp_.rho);
    soft_update(target_critic1_, critic1_, hp_.rho);
    soft_update(target_critic2_, critic2_, hp_.rho);
    return diag;
  }

  std::vector<std::pair<std::string, DenseNet*>> named_nets() override {
    return {{"actor1", &actor1_},
            {"actor2", &actor2_},
            {"critic1", &critic1_},
            {"critic2", &critic2_},
            {"target_actor1", &target_actor1_},
            {"target_actor2", &target_actor2_},
            {"target_critic1", &target_critic1_},
            {"target_critic2", &target_critic2_}};
  }

  std::vector<std::pair<std::string, Adam*>> named_optimizers() override {
    return {{"actor1", &adam_actor1_},
            {"actor2", &adam_actor2_},
            {"critic1", &adam_critic1_},
            {"critic2", &adam_critic2_}};
  }

  DenseNet& actor1() { return actor1_; }
  DenseNet& actor2() { return actor2_; }
  DenseNet& critic1() { return critic1_; }
  DenseNet& critic2() { return critic2_; }
  DenseNet& target_actor1() { return target_actor1_; }
  DenseNet& target_actor2() { return target_actor2_; }
  DenseNet& target_critic1() { return target_critic1_; }
  DenseNet& target_critic2() { return target_critic2_; }

 private:
  DenseNet actor1_, actor2_, critic1_, critic2_;
  DenseNet target_actor1_, target_actor2_, target_critic1_, target_critic2_;
  Adam adam_actor1_, adam_actor2_, adam_critic1_, adam_critic2_;
};

/// Twin critics, min-critic smoothed targets, delayed policy updates.
class Td3Agent : public ActorCriticBase {
 public:
  Td3Agent(int state_dim, int action_dim, Eigen::VectorXd obs_scale, AgentHyperparams hp,
           std::uint64_t seed)
      : ActorCriticBase(state_dim, action_dim, std::move(obs_scale), std::move(hp), seed),
        adam_actor_(hp_.actor_lr),
        adam_critic1_(hp_.critic_lr),
        adam_critic2_(hp_.critic_lr) {
    actor_ = DenseNet::make(state_dim_, hp_.hidden, action_dim_, Activation::Tanh, rng_);
    critic1_ =
        DenseNet::make(state_dim_ + action_dim_, hp_.hidden, 1, Activation::Identity, rng_);
    critic2_ =
        DenseNet::make(state_dim_ + action_dim_, hp_.hidden, 1, Activation::Identity, rng_);
    target_actor_ = actor_;
    target_critic1_ = critic1_;
    target_critic2_ = critic2_;
  }

  std::string kind() const override { return "td3"; }

  Eigen::VectorXd act(const Eigen::VectorXd& state, bool explore) override {
    return explore_clip(actor_.forward(scale(state)), explore);
  }

  TrainDiagnostics train_step() override {
    TrainDiagnostics diag;
    if (!batch_ready()) return diag;
    diag.trained = true;
    auto b = sample_batch();

    Eigen::RowVectorXd t =
        td3_target_values(b.next_states, target_actor_, target_critic1_, target_critic2_, hp_,
                          rng_);
    Eigen::RowVectorXd y = b.rewards + hp_.gamma * b.not_done.cwiseProduct(t);
    diag.mean_target = y.mean();

    Eigen::MatrixXd sa = stack_state_action(b.states, b.actions);
    diag.critic1_loss = update_critic(critic1_, adam_critic1_, sa, y);
    diag.critic2_loss = update_critic(critic2_, adam_critic2_, sa, y);

    if (++updates_ % hp_.policy_delay == 0) {
      diag.actor_objective = update_actor(actor_, adam_actor_, critic1_, b.states);
      soft_update(target_actor_, actor_, hp_.rho);
      soft_update(target_critic1_, critic1_, hp_.rho);
      soft_update(target_critic2_, critic2_, hp_.rho);
    }
    return diag;
  }

  std::vector<std::pair<std::string, DenseNet*>> named_nets() override {
    return {{"actor", &actor_},
            {"critic1", &critic1_},
            {"critic2", &critic2_},
            {"target_actor", &target_actor_},
            {"target_critic1", &target_critic1_},
            {"target_critic2", &target_critic2_}};
  }

  std::vector<std::pair<std::string, Adam*>> named_optimizers() override {
    return {{"actor", &adam_actor_}, {"critic1", &adam_critic1_}, {"critic2", &adam_critic2_}};
  }

 private:
  DenseNet actor_, critic1_, critic2_;
  DenseNet target_actor_, target_critic1_, target_critic2_;
  Adam adam_actor_, adam_critic1_, adam_critic2_;
  long updates_ = 0;
};

/// Single actor-critic pair with plain bootstrapped targets.
class DdpgAgent : public ActorCriticBase {
 public:
  DdpgAgent(int state_dim, int action_dim, Eigen::VectorXd obs_scale, AgentHyperparams hp,
            std::uint64_t seed)
      : ActorCriticBase(state_dim, action_dim, std::move(obs_scale), std::move(hp), seed),
        adam_actor_(hp_.actor_lr),
        adam_critic_(hp_.critic_lr) {
    actor_ = DenseNet::make(state_dim_, hp_.hidden, action_dim_, Activation::Tanh, rng_);
    critic_ =
        DenseNet::make(state_dim_ + action_dim_, hp_.hidden, 1, Activation::Identity, rng_);
    target_actor_ = actor_;
    target_critic_ = critic_;
  }

  std::string kind() const override { return "ddpg"; }

  Eigen::VectorXd act(const Eigen::VectorXd& state, bool explore) override {
    return explore_clip(actor_.forward(scale(state)), explore);
  }

  TrainDiagnostics train_step() override {
    TrainDiagnostics diag;
    if (!batch_ready()) return diag;
    diag.trained = true;
    auto b = sample_batch();

    Eigen::MatrixXd a2 = target_actor_.forward(b.next_states);
    Eigen::MatrixXd q2 = target_critic_.forward(stack_state_action(b.next_states, a2));
    Eigen::RowVectorXd y = b.rewards + hp_.gamma * b.not_done.cwiseProduct(q2.row(0));
    diag.mean_target = y.mean();

    diag.critic1_loss =
        update_critic(critic_, adam_critic_, stack_state_action(b.states, b.actions), y);
    diag.actor_objective = update_actor(actor_, adam_actor_, critic_, b.states);
    soft_update(target_actor_, actor_, hp_.rho);
    soft_update(target_critic_, critic_, hp_.rho);
    return diag;
  }

  std::vector<std::pair<std::string, DenseNet*>> named_nets() override {
    return {{"actor", &actor_},
            {"critic", &critic_},
            {"target_actor", &target_actor_},
            {"target_critic", &target_critic_}};
  }

  std::vector<std::pair<std::string, Adam*>> named_optimizers() override {
    return {{"actor", &adam_actor_}, {"critic", &adam_critic_}};
  }

 private:
  DenseNet actor_, critic_;
  DenseNet target_actor_, target_critic_;
  Adam adam_actor_, adam_critic_;
};

inline std::unique_ptr<Agent> make_agent(const std::string& kind, int state_dim, int action_dim,
                                         Eigen::VectorXd obs_scale, const AgentHyperparams& hp,
                                         std::uint64_t seed) {
  if (kind == "ee-ddpg")
    return std::make_unique<EeDdpgAgent>(state_dim, action_dim, std::move(obs_scale), hp, seed);
  if (kind == "td3")
    return std::make_unique<Td3Agent>(state_dim, action_dim, std::move(obs_scale), hp, seed);
  if (kind == "ddpg")
    return std::make_unique<DdpgAgent>(state_dim, action_dim, std::move(obs_scale), hp, seed);
  if (kind == "random")
    return std::make_unique<RandomAgent>(state_dim, action_dim, std::move(obs_scale), seed);
  throw std::invalid_argument("make_agent: unknown agent kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Exhaustive grid search over one frozen slot.

struct ExhaustiveGrids {
  int tau_levels = 5;    // evenly spaced on [0,1]
  int power_levels = 5;  // evenly spaced on (0, P_U^max]
  int phase_levels = 4;  // evenly spaced on [0, 2*pi)
  std::size_t budget = 1000000;

  std::vector<double> tau_values() const {
    std::vector<double> v(tau_levels);
    for (int i = 0; i < tau_levels; ++i)
      v[i] = tau_levels == 1 ? 0.0 : static_cast<double>(i) / (tau_levels - 1);
    return v;
  }
  std::vector<double> power_values(double p_user_max) const {
    std::vector<double> v(power_levels);
    for (int i = 0; i < power_levels; ++i)
      v[i] = p_user_max * static_cast<double>(i + 1) / power_levels;
    return v;
  }
  std::vector<double> phase_values() const {
    std::vector<double> v(phase_levels);
    for (int i = 0; i < phase_levels; ++i) v[i] = 2.0 * kPi * i / phase_levels;
    return v;
  }
};

inline std::size_t exhaustive_combination_count(const ExhaustiveGrids& g, int users,
                                                int elements) {
  long double count = g.tau_levels;
  for (int k = 0; k < users; ++k) count *= g.power_levels;
  for (int l = 0; l < elements; ++l) count *= g.phase_levels;
  for (int l = 0; l < elements; ++l) count *= users + 1;
  if (count > 1e18) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(count);
}

struct ExhaustiveResult {
  DecodedAction best_action;
  SlotEval best_eval;
  double best_reward = -1.0;
  std::size_t combinations = 0;
  ExhaustiveGrids grids;
};

/// Evaluates every grid combination through the frozen slot and returns the
/// argmax of the zero-on-violation reward. Iteration order: tau, powers,
/// phases, assignments, each an odometer with the last variable fastest;
/// ties keep the first maximizer.
inline ExhaustiveResult exhaustive_search(const FrozenSlot& slot, const EnvConfig& cfg,
                                          const ExhaustiveGrids& grids) {
  const int K = cfg.users;
  const int L = cfg.elements();
  std::size_t total = exhaustive_combination_count(grids, K, L);
  if (total > grids.budget)
    throw std::invalid_argument("exhaustive_search: " + std::to_string(total) +
                                " combinations exceed budget of " +
                                std::to_string(grids.budget));

  const auto taus = grids.tau_values();
  const auto powers = grids.power_values(cfg.p_user_max_w);
  const auto phases = grids.phase_values();

  ExhaustiveResult res;
  res.grids = grids;
  res.combinations = total;

  DecodedAction action;
  action.powers.resize(K);
  action.phases.resize(L);
  action.beta = Eigen::MatrixXi::Zero(K, L);

  std::vector<int> power_idx(K, 0), phase_idx(L, 0), beta_idx(L, 0);
  auto advance = [](std::vector<int>& idx, int base) {
    for (std::size_t i = idx.size(); i-- > 0;) {
      if (++idx[i] < base) return true;
      idx[i] = 0;
    }
    return false;
  };

  for (double tau : taus) {
    action.tau = tau;
    std::fill(power_idx.begin(), power_idx.end(), 0);
    do {
      for (int k = 0; k < K; ++k) action.powers[k] = powers[power_idx[k]];
      double ptotal = action.powers.sum();
      Eigen::VectorXd scaled = action.powers;
      if (ptotal > cfg.p_bs_max_w && ptotal > 0) scaled *= cfg.p_bs_max_w / ptotal;
      std::fill(phase_idx.begin(), phase_idx.end(), 0);
      do {
        for (int l = 0; l < L; ++l) action.phases[l] = phases[phase_idx[l]];
        std::fill(beta_idx.begin(), beta_idx.end(), 0);
        do {
          action.beta.setZero();
          for (int l = 0; l < L; ++l)
            if (beta_idx[l] > 0) action.beta(beta_idx[l] - 1, l) = 1;
          DecodedAction candidate = action;
          candidate.powers = scaled;
          SlotEval ev = evaluate_slot(slot, candidate, cfg);
          if (ev.reward > res.best_reward) {
            res.best_reward = ev.reward;
            res.best_action = candidate;
            res.best_eval = ev;
          }
        } while (advance(beta_idx, K + 1));
      } while (advance(phase_idx, grids.phase_levels));
    } while (advance(power_idx, grids.power_levels));
  }
  return res;
}

}  // namespace uavris
