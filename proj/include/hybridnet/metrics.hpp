#pragma once

#include <string>
#include <vector>

#include "hybridnet/channel.hpp"
#include "hybridnet/config.hpp"

namespace hybridnet {

// Transmit amplitudes plus the receive scalar. p[i] >= 0 is the amplitude
// (watts^1/2); aggregation users additionally pre-rotate their transmit phase
// against arg(a*hbar_k), so the effective receive product is |a*hbar_k|*p_k.
struct TransceiverState {
  RVec p;            // size num_users()
  cplx a{1.0, 0.0};  // BS receive scalar; nonzero whenever aggregation users exist

  cplx a_bar() const { return 1.0 / a; }
};

struct RateBreakdown {
  RVec sinr;             // per communication user, decode order
  RVec rate_noma_user;   // bit/s per communication user
  double rate_noma_sum = 0.0;
  double mse = 0.0;
  double signal_power = 0.0;  // E|s_hat|^2
  double rate_airfl = 0.0;
  double rate_hybrid = 0.0;
  bool airfl_rate_clamped = false;  // aggregation error exceeded received power

  std::string csv_row() const;
  static std::string csv_header();
};

// SINR of communication user n (0-based global index in [K, K+N)); the
// interference sum spans every lower-indexed user, aggregation users included.
double noma_sinr(int n, const RVec& p, const RVec& gains, double noise_w, int num_airfl, int num_noma);

double noma_rate(int n, const RVec& p, const RVec& gains, double noise_w, int num_airfl, int num_noma,
                 double bandwidth_hz);

double noma_sum_rate(const RVec& p, const RVec& gains, double noise_w, int num_airfl, int num_noma,
                     double bandwidth_hz);

// Algebraically equal to the per-user sum: one log of the grouped ratio.
double noma_sum_rate_grouped(const RVec& p, const RVec& gains, double noise_w, int num_airfl, int num_noma,
                             double bandwidth_hz);

// Aggregation distortion with literal complex products a*hbar_k*p_k.
// Throws std::domain_error when there are no aggregation users.
double aggregation_mse(const CVec& airfl_channels, const RVec& p_airfl, cplx a, double noise_w);

// E|s_hat|^2 companion of the distortion above.
double aggregation_signal_power(const CVec& airfl_channels, const RVec& p_airfl, cplx a, double noise_w);

struct AirflRate {
  double rate = 0.0;  // bit/s, clamped at zero
  bool clamped = false;
  double mse = 0.0;
  double signal_power = 0.0;
};

// Computation rate B*log2(signal/MSE) evaluated on literal complex products.
AirflRate airfl_rate(const CVec& airfl_channels, const RVec& p_airfl, cplx a, double noise_w,
                     double bandwidth_hz);

// Full evaluation used by the optimization pipeline. Assumes channels are in
// decode order; aggregation products are phase-compensated (|a*hbar_k|*p_k).
RateBreakdown hybrid_rate(const TransceiverState& state, const CVec& channels, const NetworkConfig& cfg);

// Same evaluation when only channel gains are available (the compensated
// products depend on magnitudes alone).
RateBreakdown hybrid_rate_from_gains(const TransceiverState& state, const RVec& gains,
                                     const NetworkConfig& cfg);

// Permutation putting communication users in ascending-gain decode order
// (aggregation users keep indices 0..K-1). Applies to any per-user array.
std::vector<int> decode_order(const RVec& gains, int num_airfl, int num_noma);

}  // namespace hybridnet
