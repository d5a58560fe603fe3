#pragma once

#include <Eigen/Dense>

#include "uavris/core.hpp"
#include "uavris/geometry.hpp"

namespace uavris {

/// Large-scale propagation constants for both hops plus the small-scale
/// fading parameters.
struct PathLossParams {
  double alpha = 3.0;        // BS-RIS path loss exponent
  double nu = 2.5;           // RIS-user path loss exponent
  double upsilon_db = -30.0; // reference loss at 1 m, dB
  double phi_nlos_db = 20.0; // excess NLoS attenuation, dB
  double c_x = 9.61;         // LoS environment constants
  double c_y = 0.16;
  double k_rician = 10.0;
  double carrier_wavelength = 0.1;  // meters, fixes the Rician LoS phase
};

/// True and estimated channels for one slot. Estimated entries are the true
/// ones plus independent CN(0, zeta^2) error.
struct ChannelState {
  Eigen::MatrixXcd g1_true;    // A×L, BS → RIS
  Eigen::MatrixXcd g1_est;
  Eigen::MatrixXcd g_ru_true;  // K×L, RIS → users
  Eigen::MatrixXcd g_ru_est;
  double csi_error_std = 0.0;  // zeta
  double hi_level = 0.0;       // psi
  double noise_power = 0.0;    // sigma_k^2, watts

  int antennas() const { return static_cast<int>(g1_true.rows()); }
  int elements() const { return static_cast<int>(g1_true.cols()); }
  int users() const { return static_cast<int>(g_ru_true.rows()); }
};

/// Probability of a LoS connection at elevation angle theta (degrees):
/// 1 / (1 + C_X exp(-C_Y (theta - C_X))).
inline double los_probability(double theta_deg, const PathLossParams& p) {
  return 1.0 / (1.0 + p.c_x * std::exp(-p.c_y * (theta_deg - p.c_x)));
}

/// Air-to-ground path gain of the BS→element link, linear scale:
/// (Pr_LoS + (1 - Pr_LoS) * phi) * d^(-alpha).
inline double bs_ris_pathloss(const Position3D& bs, const Position3D& element,
                              const PathLossParams& p) {
  double d = distance(bs, element);
  if (d <= 0.0) throw std::invalid_argument("bs_ris_pathloss: zero distance");
  double pr_los = los_probability(elevation_angle_deg(bs, element), p);
  double phi_lin = db_to_linear(-p.phi_nlos_db);
  return (pr_los + (1.0 - pr_los) * phi_lin) * std::pow(d, -p.alpha);
}

/// Element→user path gain, linear scale: upsilon * (d / 1m)^(-nu).
inline double ris_user_pathloss(const Position3D& element, const Position3D& user,
                                const PathLossParams& p) {
  double d = distance(element, user);
  if (d <= 0.0) throw std::invalid_argument("ris_user_pathloss: zero distance");
  return db_to_linear(p.upsilon_db) * std::pow(d, -p.nu);
}

/// Draws one slot's channels. BS→RIS entries are Rayleigh, RIS→user entries
/// Rician with a planar-wavefront LoS phase. The estimation error can be
/// restricted to either hop.
inline ChannelState sample_channels(const Layout& layout, int antennas,
                                    const PathLossParams& params, double zeta,
                                    double hi_level, double noise_power, Rng& rng,
                                    bool error_on_bs_ris = true,
                                    bool error_on_ris_user = true) {
  const int A = antennas;
  const int L = layout.element_count();
  const int K = static_cast<int>(layout.users.size());
  if (A <= 0 || L <= 0) throw std::invalid_argument("sample_channels: empty system");

  ChannelState cs;
  cs.csi_error_std = zeta;
  cs.hi_level = hi_level;
  cs.noise_power = noise_power;
  cs.g1_true.resize(A, L);
  cs.g_ru_true.resize(K, L);

  for (int l = 0; l < L; ++l) {
    double gain = bs_ris_pathloss(layout.bs, layout.ris_elements[l], params);
    double amp = std::sqrt(gain);
    for (int a = 0; a < A; ++a) cs.g1_true(a, l) = amp * rng.cnormal(1.0);
  }

  const double kr = params.k_rician;
  const double los_w = std::sqrt(kr / (1.0 + kr));
  const double nlos_w = std::sqrt(1.0 / (1.0 + kr));
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      double gain = ris_user_pathloss(layout.ris_elements[l], layout.users[k], params);
      double d = distance(layout.ris_elements[l], layout.users[k]);
      double phase = -2.0 * kPi * d / params.carrier_wavelength;
      Complex los{std::cos(phase), std::sin(phase)};
      cs.g_ru_true(k, l) = std::sqrt(gain) * (los_w * los + nlos_w * rng.cnormal(1.0));
    }
  }

  cs.g1_est = cs.g1_true;
  cs.g_ru_est = cs.g_ru_true;
  if (zeta > 0.0) {
    const double var = zeta * zeta;
    if (error_on_bs_ris) {
      for (int l = 0; l < L; ++l)
        for (int a = 0; a < A; ++a) cs.g1_est(a, l) += rng.cnormal(var);
    }
    if (error_on_ris_user) {
      for (int k = 0; k < K; ++k)
        for (int l = 0; l < L; ++l) cs.g_ru_est(k, l) += rng.cnormal(var);
    }
  }
  return cs;
}

}  // namespace uavris
