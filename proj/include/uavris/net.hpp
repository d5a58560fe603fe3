#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "uavris/core.hpp"

namespace uavris {

enum class Activation { Relu, Tanh, Identity };

/// Fully connected network with a shared hidden activation and a per-network
/// output activation (tanh for actors, identity for critics). Parameters are
/// plain Eigen matrices so soft updates and finite-difference probes can walk
/// them directly.
class DenseNet {
 public:
  std::vector<Eigen::MatrixXd> weights;  // layer i: out×in
  std::vector<Eigen::VectorXd> biases;
  Activation hidden_act = Activation::Relu;
  Activation output_act = Activation::Identity;

  static DenseNet make(int input, const std::vector<int>& hidden, int output,
                       Activation output_act, Rng& rng) {
    DenseNet net;
    net.output_act = output_act;
    std::vector<int> dims;
    dims.push_back(input);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(output);
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
      int in = dims[i], out = dims[i + 1];
      Eigen::MatrixXd w(out, in);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(out);
      bool last = i + 2 == dims.size();
      if (last) {
        // small uniform head keeps initial actions/values near zero
        for (int r = 0; r < out; ++r) {
          for (int c = 0; c < in; ++c) w(r, c) = rng.uniform(-3e-3, 3e-3);
          b[r] = rng.uniform(-3e-3, 3e-3);
        }
      } else {
        double std = std::sqrt(2.0 / in);
        for (int r = 0; r < out; ++r)
          for (int c = 0; c < in; ++c) w(r, c) = rng.normal(0.0, std);
      }
      net.weights.push_back(std::move(w));
      net.biases.push_back(std::move(b));
    }
    return net;
  }

  int input_dim() const { return static_cast<int>(weights.front().cols()); }
  int output_dim() const { return static_cast<int>(weights.back().rows()); }
  int layer_count() const { return static_cast<int>(weights.size()); }

  struct Tape {
    std::vector<Eigen::MatrixXd> activations;  // [0] = input, per-layer outputs after activation
    std::vector<Eigen::MatrixXd> pre;          // per-layer pre-activations
  };

  struct Gradients {
    std::vector<Eigen::MatrixXd> w;
    std::vector<Eigen::VectorXd> b;
    Eigen::MatrixXd input;  // dLoss/dInput, same shape as the forward input
  };

  /// Columns of x are batch items.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Tape* tape = nullptr) const {
    if (x.rows() != input_dim()) throw std::invalid_argument("DenseNet::forward: shape mismatch");
    if (tape) {
      tape->activations.clear();
      tape->pre.clear();
      tape->activations.push_back(x);
    }
    Eigen::MatrixXd h = x;
    for (int i = 0; i < layer_count(); ++i) {
      Eigen::MatrixXd z = (weights[i] * h).colwise() + biases[i];
      Activation act = (i + 1 == layer_count()) ? output_act : hidden_act;
      h = apply(act, z);
      if (tape) {
        tape->pre.push_back(std::move(z));
        tape->activations.push_back(h);
      }
    }
    return h;
  }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const {
    return forward(Eigen::MatrixXd(x)).col(0);
  }

  /// Backprop of an upstream gradient dY through the taped forward pass.
  Gradients backward(const Tape& tape, const Eigen::MatrixXd& out_grad) const {
    Gradients g;
    g.w.resize(layer_count());
    g.b.resize(layer_count());
    Eigen::MatrixXd delta = out_grad;
    for (int i = layer_count() - 1; i >= 0; --i) {
      Activation act = (i + 1 == layer_count()) ? output_act : hidden_act;
      delta = delta.cwiseProduct(derivative(act, tape.pre[i], tape.activations[i + 1]));
      g.w[i] = delta * tape.activations[i].transpose();
      g.b[i] = delta.rowwise().sum();
      delta = (weights[i].transpose() * delta).eval();
    }
    g.input = delta;
    return g;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (int i = 0; i < layer_count(); ++i) n += weights[i].size() + biases[i].size();
    return n;
  }

  /// Flat-index access into the parameter vector, for probes and tests.
  double& parameter(std::size_t flat) {
    for (int i = 0; i < layer_count(); ++i) {
      if (flat < static_cast<std::size_t>(weights[i].size()))
        return weights[i].data()[flat];
      flat -= weights[i].size();
      if (flat < static_cast<std::size_t>(biases[i].size())) return biases[i].data()[flat];
      flat -= biases[i].size();
    }
    throw std::out_of_range("DenseNet::parameter: index out of range");
  }

  double gradient_entry(const Gradients& g, std::size_t flat) const {
    for (int i = 0; i < layer_count(); ++i) {
      if (flat < static_cast<std::size_t>(g.w[i].size())) return g.w[i].data()[flat];
      flat -= g.w[i].size();
      if (flat < static_cast<std::size_t>(g.b[i].size())) return g.b[i].data()[flat];
      flat -= g.b[i].size();
    }
    throw std::out_of_range("DenseNet::gradient_entry: index out of range");
  }

 private:
  static Eigen::MatrixXd apply(Activation act, const Eigen::MatrixXd& z) {
    switch (act) {
      case Activation::Relu:
        return z.cwiseMax(0.0);
      case Activation::Tanh:
        return z.array().tanh().matrix();
      case Activation::Identity:
        return z;
    }
    throw std::logic_error("unknown activation");
  }

  static Eigen::MatrixXd derivative(Activation act, const Eigen::MatrixXd& pre,
                                    const Eigen::MatrixXd& post) {
    switch (act) {
      case Activation::Relu:
        return (pre.array() > 0.0).cast<double>().matrix();
      case Activation::Tanh:
        return (1.0 - post.array().square()).matrix();
      case Activation::Identity:
        return Eigen::MatrixXd::Ones(pre.rows(), pre.cols());
    }
    throw std::logic_error("unknown activation");
  }
};

/// Output plus analytic parameter gradients for a given upstream loss
/// gradient; one-call form of the tape workflow.
inline std::pair<Eigen::MatrixXd, DenseNet::Gradients> forward_backward(
    const DenseNet& net, const Eigen::MatrixXd& input, const Eigen::MatrixXd& loss_grad) {
  DenseNet::Tape tape;
  Eigen::MatrixXd out = net.forward(input, &tape);
  if (loss_grad.rows() != out.rows() || loss_grad.cols() != out.cols())
    throw std::invalid_argument("forward_backward: loss gradient shape mismatch");
  return {out, net.backward(tape, loss_grad)};
}

/// theta_target <- rho * theta_main + (1 - rho) * theta_target.
inline void soft_update(DenseNet& target, const DenseNet& main, double rho) {
  for (int i = 0; i < main.layer_count(); ++i) {
    target.weights[i] = rho * main.weights[i] + (1.0 - rho) * target.weights[i];
    target.biases[i] = rho * main.biases[i] + (1.0 - rho) * target.biases[i];
  }
}

/// Adaptive moment estimation with the standard defaults and bias correction.
class Adam {
 public:
  explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(DenseNet& net, const DenseNet::Gradients& grads) {
    if (mw_.empty()) initialize(net);
    ++t_;
    double bc1 = 1.0 - std::pow(beta1_, t_);
    double bc2 = 1.0 - std::pow(beta2_, t_);
    for (int i = 0; i < net.layer_count(); ++i) {
      mw_[i] = beta1_ * mw_[i] + (1.0 - beta1_) * grads.w[i];
      vw_[i] = beta2_ * vw_[i] + (1.0 - beta2_) * grads.w[i].cwiseProduct(grads.w[i]);
      net.weights[i].array() -=
          lr_ * (mw_[i].array() / bc1) / ((vw_[i].array() / bc2).sqrt() + eps_);
      mb_[i] = beta1_ * mb_[i] + (1.0 - beta1_) * grads.b[i];
      vb_[i] = beta2_ * vb_[i] + (1.0 - beta2_) * grads.b[i].cwiseProduct(grads.b[i]);
      net.biases[i].array() -=
          lr_ * (mb_[i].array() / bc1) / ((vb_[i].array() / bc2).sqrt() + eps_);
    }
  }

  double learning_rate() const { return lr_; }
  long step_count() const { return t_; }

  // checkpoint support
  const std::vector<Eigen::MatrixXd>& first_moments_w() const { return mw_; }
  const std::vector<Eigen::MatrixXd>& second_moments_w() const { return vw_; }
  const std::vector<Eigen::VectorXd>& first_moments_b() const { return mb_; }
  const std::vector<Eigen::VectorXd>& second_moments_b() const { return vb_; }
  void restore(std::vector<Eigen::MatrixXd> mw, std::vector<Eigen::MatrixXd> vw,
               std::vector<Eigen::VectorXd> mb, std::vector<Eigen::VectorXd> vb, long t) {
    mw_ = std::move(mw);
    vw_ = std::move(vw);
    mb_ = std::move(mb);
    vb_ = std::move(vb);
    t_ = t;
  }

 private:
  void initialize(const DenseNet& net) {
    for (int i = 0; i < net.layer_count(); ++i) {
      mw_.push_back(Eigen::MatrixXd::Zero(net.weights[i].rows(), net.weights[i].cols()));
      vw_.push_back(Eigen::MatrixXd::Zero(net.weights[i].rows(), net.weights[i].cols()));
      mb_.push_back(Eigen::VectorXd::Zero(net.biases[i].size()));
      vb_.push_back(Eigen::VectorXd::Zero(net.biases[i].size()));
    }
  }

  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Eigen::MatrixXd> mw_, vw_;
  std::vector<Eigen::VectorXd> mb_, vb_;
};

}  // namespace uavris
