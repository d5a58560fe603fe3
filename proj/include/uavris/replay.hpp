#pragma once

#include <Eigen/Dense>
#include <vector>

#include "uavris/core.hpp"

namespace uavris {

struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;  // raw, in [-1,1]^action_dim
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool done = false;
};

/// FIFO ring of transitions with uniform without-replacement batch sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity, std::uint64_t seed = 0)
      : capacity_(capacity), rng_(seed) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  }

  void push(Transition t) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(t));
    } else {
      data_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }

  const Transition& at(std::size_t i) const { return data_[i]; }

  /// Uniform sample of `n` distinct stored transitions.
  std::vector<const Transition*> sample(std::size_t n) {
    if (n > data_.size()) throw std::invalid_argument("ReplayBuffer::sample: not enough data");
    // partial Fisher-Yates over an index pool
    indices_.resize(data_.size());
    for (std::size_t i = 0; i < indices_.size(); ++i) indices_[i] = i;
    std::vector<const Transition*> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng_.integer(indices_.size() - i));
      std::swap(indices_[i], indices_[j]);
      out.push_back(&data_[indices_[i]]);
    }
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> data_;
  std::vector<std::size_t> indices_;
  Rng rng_;
};

}  // namespace uavris
