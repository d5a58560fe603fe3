#pragma once

#include <Eigen/Dense>
#include <vector>

#include "uavris/channel.hpp"
#include "uavris/core.hpp"

namespace uavris {

/// Per-user BS precoding vectors; ||V_k||^2 = p_k.
struct Precoder {
  Eigen::MatrixXcd vectors;  // A×K, column k = V_k
  Eigen::VectorXd powers;    // K, p_k

  int users() const { return static_cast<int>(vectors.cols()); }

  Eigen::MatrixXcd covariance() const {
    return vectors * vectors.adjoint();  // sum_k V_k V_k^H
  }
};

/// RIS reflection state; amplitudes fixed at 1 (fully reflective elements).
struct ReflectionConfig {
  Eigen::VectorXd phases;  // L values in [0, 2*pi]

  Eigen::VectorXcd coefficients() const {
    Eigen::VectorXcd c(phases.size());
    for (int l = 0; l < phases.size(); ++l)
      c[l] = Complex{std::cos(phases[l]), std::sin(phases[l])};
    return c;
  }
};

/// Binary element-to-user assignment; column sums at most 1 so each element
/// reflects for at most one user.
struct AssignmentMatrix {
  Eigen::MatrixXi beta;  // K×L, entries in {0,1}

  void validate() const {
    for (int l = 0; l < beta.cols(); ++l) {
      int s = 0;
      for (int k = 0; k < beta.rows(); ++k) {
        if (beta(k, l) != 0 && beta(k, l) != 1)
          throw std::invalid_argument("AssignmentMatrix: entries must be binary");
        s += beta(k, l);
      }
      if (s > 1) throw std::invalid_argument("AssignmentMatrix: element assigned to multiple users");
    }
  }
};

struct LinkReport {
  Eigen::VectorXd snr;        // per user
  Eigen::VectorXd rate_bps;   // per user
  Eigen::VectorXcd effective_gain;
};

/// Scalar cascaded channel of user k under the assignment mask:
/// w_k = sum_l beta_l^k * g_ru[k,l] * e^{j theta_l} * (g1 col l)^H V_k.
inline Complex effective_gain(const ChannelState& cs, const ReflectionConfig& reflection,
                              const AssignmentMatrix& assignment, const Precoder& precoder,
                              int user, bool use_estimated = false) {
  const auto& g1 = use_estimated ? cs.g1_est : cs.g1_true;
  const auto& g_ru = use_estimated ? cs.g_ru_est : cs.g_ru_true;
  const int L = static_cast<int>(g1.cols());
  if (assignment.beta.cols() != L || reflection.phases.size() != L ||
      precoder.vectors.rows() != g1.rows())
    throw std::invalid_argument("effective_gain: shape mismatch");
  const Eigen::VectorXcd v = precoder.vectors.col(user);
  Complex w{0.0, 0.0};
  for (int l = 0; l < L; ++l) {
    if (assignment.beta(user, l) == 0) continue;
    Complex phase{std::cos(reflection.phases[l]), std::sin(reflection.phases[l])};
    Complex bs_hop = (g1.col(l).adjoint() * v).value();
    w += g_ru(user, l) * phase * bs_hop;
  }
  return w;
}

/// SNR under hardware impairments: the distortion power scales with the same
/// cascaded gain, capping the SNR at 1/psi^2.
inline double snr(Complex effective, double hi_level, double noise_power) {
  if (noise_power <= 0) throw std::invalid_argument("snr: noise power must be positive");
  double w2 = std::norm(effective);
  return w2 / (w2 * hi_level * hi_level + noise_power);
}

/// Shannon rates over the transmission phase: R_k = (1 - tau) * B * log2(1 + snr_k).
inline Eigen::VectorXd rates(const Eigen::VectorXd& snrs, double tau, double bandwidth_hz) {
  if (tau < 0 || tau > 1) throw std::invalid_argument("rates: tau out of [0,1]");
  Eigen::VectorXd r(snrs.size());
  for (int k = 0; k < snrs.size(); ++k)
    r[k] = (1.0 - tau) * bandwidth_hz * std::log2(1.0 + snrs[k]);
  return r;
}

/// Unit-norm precoding direction maximizing |w_k| for fixed p_k, i.e. matched
/// to the masked cascade h_k = sum_l beta_l^k conj(g_ru[k,l] e^{j theta_l}) g1_l.
/// Falls back to a uniform unit vector when the cascade vanishes.
inline Eigen::VectorXcd max_ratio_direction(const ChannelState& cs,
                                            const ReflectionConfig& reflection,
                                            const AssignmentMatrix& assignment, int user,
                                            bool use_estimated = true) {
  const auto& g1 = use_estimated ? cs.g1_est : cs.g1_true;
  const auto& g_ru = use_estimated ? cs.g_ru_est : cs.g_ru_true;
  const int A = static_cast<int>(g1.rows());
  const int L = static_cast<int>(g1.cols());
  Eigen::VectorXcd h = Eigen::VectorXcd::Zero(A);
  for (int l = 0; l < L; ++l) {
    if (assignment.beta(user, l) == 0) continue;
    Complex phase{std::cos(reflection.phases[l]), std::sin(reflection.phases[l])};
    h += std::conj(g_ru(user, l) * phase) * g1.col(l);
  }
  double n = h.norm();
  if (n <= 0.0) {
    Eigen::VectorXcd u = Eigen::VectorXcd::Constant(A, Complex{1.0, 0.0});
    return u / u.norm();
  }
  return h / n;
}

}  // namespace uavris
