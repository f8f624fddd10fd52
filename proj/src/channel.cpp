#include "hybridnet/channel.hpp"

#include <stdexcept>

namespace hybridnet {

std::string ChannelRealization::hash_hex() const {
  Fnv1a f;
  f.add(g);
  for (const auto& hi : h) f.add(hi);
  f.add(d0);
  for (double di : d) f.add(di);
  return f.hex();
}

double path_loss(double distance_m, const NetworkConfig& cfg) {
  if (!(distance_m > 0)) throw std::domain_error("path_loss: distance must be positive");
  return cfg.path_loss_ref * std::pow(distance_m, -cfg.path_loss_exp);
}

namespace {

// Rician entry: sqrt(k/(1+k)) * LoS + sqrt(1/(1+k)) * CN(0,1). The LoS
// component is the all-ones vector; no array steering structure is assumed.
CVec rician_vector(int m, double kappa, Rng& rng) {
  double los, nlos;
  if (std::isinf(kappa)) {
    los = 1.0;
    nlos = 0.0;
  } else {
    los = std::sqrt(kappa / (1.0 + kappa));
    nlos = std::sqrt(1.0 / (1.0 + kappa));
  }
  CVec v(m);
  for (int i = 0; i < m; ++i) v[i] = los + nlos * rng.cgauss();
  return v;
}

}  // namespace

ChannelRealization sample_channels(const NetworkConfig& cfg, std::uint64_t seed) {
  NetworkConfig c = cfg;
  c.validate();
  if (static_cast<int>(c.user_pos.size()) != c.num_users())
    throw std::invalid_argument("sample_channels: user positions not placed");

  const int M = c.num_elements;
  const int I = c.num_users();
  Rng rng(seed);

  ChannelRealization rel;
  rel.seed = seed;
  rel.g = rician_vector(M, c.rician_factor, rng);
  rel.h.reserve(I);
  for (int i = 0; i < I; ++i) rel.h.push_back(rician_vector(M, c.rician_factor, rng));

  rel.d0 = distance(c.ris_pos, c.bs_pos);
  rel.d.resize(I);
  rel.phi.resize(I);
  rel.phi_scaled.resize(I);
  const double l0 = path_loss(rel.d0, c);
  for (int i = 0; i < I; ++i) {
    rel.d[i] = distance(c.ris_pos, c.user_pos[static_cast<std::size_t>(i)]);
    const double li = path_loss(rel.d[i], c);
    rel.phi[i] = rel.g.conjugate().cwiseProduct(rel.h[static_cast<std::size_t>(i)]);
    rel.phi_scaled[i] = std::sqrt(l0 * li) * rel.phi[i];
  }
  return rel;
}

CVec combined_channel(const ChannelRealization& rel, const ReflectionState& refl) {
  if (refl.num_elements() != rel.num_elements())
    throw std::invalid_argument("combined_channel: reflection length mismatch");
  const CVec v = refl.phase_vector();
  CVec hbar(rel.num_users());
  for (int i = 0; i < rel.num_users(); ++i)
    hbar[i] = v.transpose() * rel.phi_scaled[static_cast<std::size_t>(i)];
  return hbar;
}

ChannelRealization reorder_users(const ChannelRealization& rel, const std::vector<int>& perm) {
  ChannelRealization out = rel;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    out.h[i] = rel.h[static_cast<std::size_t>(perm[i])];
    out.d[i] = rel.d[static_cast<std::size_t>(perm[i])];
    out.phi[i] = rel.phi[static_cast<std::size_t>(perm[i])];
    out.phi_scaled[i] = rel.phi_scaled[static_cast<std::size_t>(perm[i])];
  }
  return out;
}

bool ordering_satisfied(const RVec& gains, int num_airfl, int num_noma) {
  if (gains.size() != num_airfl + num_noma)
    throw std::invalid_argument("ordering_satisfied: gains length mismatch");
  double airfl_max = 0.0;
  for (int k = 0; k < num_airfl; ++k) airfl_max = std::max(airfl_max, gains[k]);
  double prev = num_airfl > 0 ? airfl_max : 0.0;
  for (int n = 0; n < num_noma; ++n) {
    const double gn = gains[num_airfl + n];
    if (gn < prev) return false;
    prev = gn;
  }
  return true;
}

}  // namespace hybridnet
