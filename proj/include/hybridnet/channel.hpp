#pragma once

#include <vector>

#include "hybridnet/config.hpp"
#include "hybridnet/util.hpp"

namespace hybridnet {

// Per-element RIS phase configuration. The derived unit-modulus entry for
// element m is exp(j*theta[m]); it multiplies the reflective channel entry
// directly (unconjugated) in the combined channel sum.
struct ReflectionState {
  enum class Mode { Discrete, Continuous };

  RVec theta;  // radians, one per element
  Mode mode = Mode::Discrete;

  int num_elements() const { return static_cast<int>(theta.size()); }

  CVec phase_vector() const {
    CVec v(theta.size());
    for (Eigen::Index m = 0; m < theta.size(); ++m)
      v[m] = std::polar(1.0, theta[m]);
    return v;
  }
};

// One draw of small-scale fading plus the geometry-derived scalings.
struct ChannelRealization {
  CVec g;                       // BS-RIS fading, length M
  std::vector<CVec> h;          // user-RIS fading, per user
  double d0 = 0;                // RIS-BS distance
  std::vector<double> d;        // RIS-user distances
  std::vector<CVec> phi;        // conj(g) .* h_i
  std::vector<CVec> phi_scaled; // sqrt(L0*Li) * phi_i
  std::uint64_t seed = 0;

  int num_elements() const { return static_cast<int>(g.size()); }
  int num_users() const { return static_cast<int>(h.size()); }
  std::string hash_hex() const;
};

// Distance-dependent large-scale gain ref * d^(-alpha). Throws
// std::domain_error for non-positive distances.
double path_loss(double distance_m, const NetworkConfig& cfg);

// Draws Rician fading for every link and derives the scaled reflective
// channels. Deterministic given (cfg, seed); cfg must hold user positions.
ChannelRealization sample_channels(const NetworkConfig& cfg, std::uint64_t seed);

// Combined channel per user for a given reflection: sum_m e^{j theta_m} *
// phi_scaled[i][m]. Throws std::invalid_argument on length mismatch.
CVec combined_channel(const ChannelRealization& rel, const ReflectionState& refl);

inline RVec channel_gains(const CVec& hbar) { return hbar.cwiseAbs2(); }

// Decode-order constraint: every aggregation-user gain at or below the first
// communication user, and communication gains ascending.
bool ordering_satisfied(const RVec& gains, int num_airfl, int num_noma);

// Per-user fields permuted so that position i holds input user perm[i].
ChannelRealization reorder_users(const ChannelRealization& rel, const std::vector<int>& perm);

}  // namespace hybridnet
