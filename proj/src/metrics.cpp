#include "hybridnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace hybridnet {

namespace {

void check_noma_index(int n, int num_airfl, int num_noma) {
  if (n < num_airfl || n >= num_airfl + num_noma)
    throw std::out_of_range("noma index outside communication-user range");
}

double log2_rate(double bandwidth_hz, double ratio) { return bandwidth_hz * std::log2(ratio); }

}  // namespace

double noma_sinr(int n, const RVec& p, const RVec& gains, double noise_w, int num_airfl, int num_noma) {
  check_noma_index(n, num_airfl, num_noma);
  double interference = noise_w;
  for (int i = 0; i < n; ++i) interference += p[i] * p[i] * gains[i];
  return p[n] * p[n] * gains[n] / interference;
}

double noma_rate(int n, const RVec& p, const RVec& gains, double noise_w, int num_airfl, int num_noma,
                 double bandwidth_hz) {
  return log2_rate(bandwidth_hz, 1.0 + noma_sinr(n, p, gains, noise_w, num_airfl, num_noma));
}

double noma_sum_rate(const RVec& p, const RVec& gains, double noise_w, int num_airfl, int num_noma,
                     double bandwidth_hz) {
  double sum = 0.0;
  for (int n = num_airfl; n < num_airfl + num_noma; ++n)
    sum += noma_rate(n, p, gains, noise_w, num_airfl, num_noma, bandwidth_hz);
  return sum;
}

double noma_sum_rate_grouped(const RVec& p, const RVec& gains, double noise_w, int num_airfl, int num_noma,
                             double bandwidth_hz) {
  double signal = 0.0, base = noise_w;
  for (int k = 0; k < num_airfl; ++k) base += p[k] * p[k] * gains[k];
  for (int n = num_airfl; n < num_airfl + num_noma; ++n) signal += p[n] * p[n] * gains[n];
  return log2_rate(bandwidth_hz, 1.0 + signal / base);
}

double aggregation_mse(const CVec& airfl_channels, const RVec& p_airfl, cplx a, double noise_w) {
  const int K = static_cast<int>(airfl_channels.size());
  if (K < 1) throw std::domain_error("aggregation_mse: no aggregation users");
  double align = 0.0;
  for (int k = 0; k < K; ++k) align += std::norm(a * airfl_channels[k] * p_airfl[k] - 1.0);
  return (align + std::norm(a) * noise_w) / (static_cast<double>(K) * K);
}

double aggregation_signal_power(const CVec& airfl_channels, const RVec& p_airfl, cplx a, double noise_w) {
  const int K = static_cast<int>(airfl_channels.size());
  if (K < 1) throw std::domain_error("aggregation_signal_power: no aggregation users");
  double sig = 0.0;
  for (int k = 0; k < K; ++k) sig += std::norm(a * airfl_channels[k] * p_airfl[k]);
  return (sig + std::norm(a) * noise_w) / (static_cast<double>(K) * K);
}

AirflRate airfl_rate(const CVec& airfl_channels, const RVec& p_airfl, cplx a, double noise_w,
                     double bandwidth_hz) {
  AirflRate out;
  out.mse = aggregation_mse(airfl_channels, p_airfl, a, noise_w);
  out.signal_power = aggregation_signal_power(airfl_channels, p_airfl, a, noise_w);
  if (!(out.mse > 0.0)) {
    if (!(out.signal_power > 0.0))
      throw std::domain_error("airfl_rate: zero distortion with zero signal");
    out.rate = std::numeric_limits<double>::infinity();
    return out;
  }
  const double raw = log2_rate(bandwidth_hz, out.signal_power / out.mse);
  // Distortion above received power would give a negative rate; such an
  // operating point is worthless and reported as zero.
  if (raw < 0.0) {
    out.rate = 0.0;
    out.clamped = true;
  } else {
    out.rate = raw;
  }
  return out;
}

RateBreakdown hybrid_rate(const TransceiverState& state, const CVec& channels, const NetworkConfig& cfg) {
  const int K = cfg.num_airfl, N = cfg.num_noma;
  if (channels.size() != K + N || state.p.size() != K + N)
    throw std::invalid_argument("hybrid_rate: dimension mismatch");

  RateBreakdown out;
  const RVec gains = channel_gains(channels);
  out.sinr.resize(N);
  out.rate_noma_user.resize(N);
  for (int j = 0; j < N; ++j) {
    out.sinr[j] = noma_sinr(K + j, state.p, gains, cfg.noise_power_w, K, N);
    out.rate_noma_user[j] = log2_rate(cfg.bandwidth_hz, 1.0 + out.sinr[j]);
  }
  out.rate_noma_sum = out.rate_noma_user.sum();

  if (K > 0) {
    // Phase-compensated products: each aggregation user aligns its transmit
    // phase, so only |a*hbar_k| matters. Fold |a| into the channel magnitude
    // and into the noise term so the literal formula applies unchanged.
    CVec effective(K);
    for (int k = 0; k < K; ++k) effective[k] = std::abs(state.a * channels[k]);
    const AirflRate ar = airfl_rate(effective, state.p.head(K), cplx(1.0, 0.0),
                                    cfg.noise_power_w * std::norm(state.a), cfg.bandwidth_hz);
    out.mse = ar.mse;
    out.signal_power = ar.signal_power;
    out.rate_airfl = ar.rate;
    out.airfl_rate_clamped = ar.clamped;
  }

  out.rate_hybrid = (1.0 - cfg.weight_lambda) * out.rate_noma_sum + cfg.weight_lambda * out.rate_airfl;
  return out;
}

RateBreakdown hybrid_rate_from_gains(const TransceiverState& state, const RVec& gains,
                                     const NetworkConfig& cfg) {
  return hybrid_rate(state, gains.cwiseSqrt().cast<cplx>(), cfg);
}

std::vector<int> decode_order(const RVec& gains, int num_airfl, int num_noma) {
  std::vector<int> perm(static_cast<std::size_t>(num_airfl + num_noma));
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin() + num_airfl, perm.end(),
                   [&](int a, int b) { return gains[a] < gains[b]; });
  return perm;
}

std::string RateBreakdown::csv_header() {
  return "rate_hybrid,rate_noma_sum,rate_airfl,mse,signal_power,airfl_rate_clamped,sinr,rate_noma_user";
}

std::string RateBreakdown::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << rate_hybrid << ',' << rate_noma_sum << ',' << rate_airfl << ',' << mse << ',' << signal_power << ','
     << (airfl_rate_clamped ? 1 : 0) << ',';
  for (Eigen::Index i = 0; i < sinr.size(); ++i) os << (i ? ";" : "") << sinr[i];
  os << ',';
  for (Eigen::Index i = 0; i < rate_noma_user.size(); ++i) os << (i ? ";" : "") << rate_noma_user[i];
  return os.str();
}

}  // namespace hybridnet
