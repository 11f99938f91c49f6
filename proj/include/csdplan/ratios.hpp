#pragma once

#include <cmath>

#include "csdplan/model.hpp"

namespace csdplan {

// Dimensionless parameters of the ratio-form break-even function.
//   r_tx   = t_ssd_tx / t_csd_tx         (internal over external bandwidth)
//   r_comp = t_ssd_comp(n) / t_csd_comp  (host n-core over CSD compute time)
//   r_ssd  = t_ssd_tx / t_ssd_comp(n)    (host transfer over compute time)
struct RatioSet {
  double r_tx = 1.0;
  double r_comp = 1.0;
  double r_ssd = 1.0;
  Count cores = 1;

  bool operator==(const RatioSet&) const = default;
};

inline void validate(const RatioSet& r) {
  auto check = [](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError(detail::concat(name, " must be finite and > 0, got ", v));
  };
  check("r_tx", r.r_tx);
  check("r_comp", r.r_comp);
  check("r_ssd", r.r_ssd);
  if (r.cores < 1) throw DomainError(detail::concat("ratio cores must be >= 1, got ", r.cores));
}

inline RatioSet ratios_from_profiles(const HostProfile& host, const CsdProfile& csd, Count cores) {
  validate(host);
  validate(csd);
  validate_cores(host, cores);
  const double comp_n = host_compute_time(host, cores);
  RatioSet r{host.t_ssd_tx / csd.t_csd_tx, comp_n / csd.t_csd_comp, host.t_ssd_tx / comp_n, cores};
  validate(r);
  return r;
}

// Optional bandwidth form of r_tx; empty unless both bandwidths are known.
inline std::optional<double> bandwidth_ratio(const CsdProfile& csd) {
  if (!csd.bw_internal || !csd.bw_external) return std::nullopt;
  return *csd.bw_internal / *csd.bw_external;
}

}  // namespace csdplan
