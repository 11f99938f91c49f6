#pragma once

// Execution-time model of single-device and array systems.
//
// An SSD system runs the kernel on the host: its transfer term is fixed by the
// block device(s) and its compute term scales 1/cores. An array of SSDs divides
// the transfer term by the device count until the shared bus saturates at
// k_limit devices. A CSD array divides both terms by the device count with no
// cap, and is never affected by host slow-down.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>

#include "csdplan/errors.hpp"

namespace csdplan {

using Count = std::int64_t;

struct WorkloadProfile {
  std::string name;
  double working_set_bytes = 0.0;
  std::string description;

  bool operator==(const WorkloadProfile&) const = default;
};

// Host characterisation for one workload. Times are seconds for the whole working set.
struct HostProfile {
  double t_ssd_tx = 0.0;
  double t_ssd_comp_single = 0.0;
  Count max_cores = 1;
  Count k_limit = 1;
};

// CSD characterisation for one workload. t_csd_comp is measured at the device's
// best parallel configuration (CUs / threads).
struct CsdProfile {
  std::string name;
  double t_csd_tx = 0.0;
  double t_csd_comp = 0.0;
  std::optional<double> bw_internal;
  std::optional<double> bw_external;
};

struct SlowdownFactors {
  double sd_tx = 1.0;
  double sd_comp = 1.0;

  static constexpr SlowdownFactors normal() { return {1.0, 1.0}; }
  bool is_normal() const { return sd_tx == 1.0 && sd_comp == 1.0; }
  bool operator==(const SlowdownFactors&) const = default;
};

struct SystemTime {
  double transfer = 0.0;
  double compute = 0.0;
  double total = 0.0;

  bool operator==(const SystemTime&) const = default;
};

namespace detail {

template <typename... Parts>
std::string concat(const Parts&... parts) {
  std::ostringstream os;
  os.precision(17);
  (os << ... << parts);
  return os.str();
}

inline SystemTime make_time(double transfer, double compute) {
  return {transfer, compute, transfer + compute};
}

}  // namespace detail

inline void validate(const HostProfile& host) {
  if (!(host.t_ssd_tx >= 0.0) || !std::isfinite(host.t_ssd_tx))
    throw DomainError(detail::concat("host t_ssd_tx must be finite and >= 0, got ", host.t_ssd_tx));
  if (!(host.t_ssd_comp_single > 0.0) || !std::isfinite(host.t_ssd_comp_single))
    throw DomainError(detail::concat("host t_ssd_comp_single must be finite and > 0, got ",
                                     host.t_ssd_comp_single));
  if (host.max_cores < 1) throw DomainError(detail::concat("host max_cores must be >= 1, got ", host.max_cores));
  if (host.k_limit < 1) throw DomainError(detail::concat("host k_limit must be >= 1, got ", host.k_limit));
}

inline void validate(const CsdProfile& csd) {
  if (!(csd.t_csd_tx >= 0.0) || !std::isfinite(csd.t_csd_tx))
    throw DomainError(detail::concat("csd '", csd.name, "' t_csd_tx must be finite and >= 0, got ", csd.t_csd_tx));
  if (!(csd.t_csd_comp > 0.0) || !std::isfinite(csd.t_csd_comp))
    throw DomainError(
        detail::concat("csd '", csd.name, "' t_csd_comp must be finite and > 0, got ", csd.t_csd_comp));
}

inline void validate(const SlowdownFactors& sd) {
  if (!(sd.sd_tx >= 1.0) || !std::isfinite(sd.sd_tx))
    throw DomainError(detail::concat("sd_tx must be >= 1, got ", sd.sd_tx));
  if (!(sd.sd_comp >= 1.0) || !std::isfinite(sd.sd_comp))
    throw DomainError(detail::concat("sd_comp must be >= 1, got ", sd.sd_comp));
}

inline void validate_cores(const HostProfile& host, Count cores) {
  if (cores < 1) throw DomainError(detail::concat("cores must be >= 1, got ", cores));
  if (cores > host.max_cores)
    throw DomainError(detail::concat("cores = ", cores, " exceeds max_cores = ", host.max_cores));
}

// Host compute time on `cores` cores (Amdahl split of the single-core time).
inline double host_compute_time(const HostProfile& host, Count cores) {
  return host.t_ssd_comp_single / static_cast<double>(cores);
}

inline SystemTime ssd_system_time(const HostProfile& host, Count cores, const SlowdownFactors& sd) {
  validate(host);
  validate(sd);
  validate_cores(host, cores);
  return detail::make_time(sd.sd_tx * host.t_ssd_tx, sd.sd_comp * host_compute_time(host, cores));
}

constexpr Count effective_ssd_count(Count m, Count k_limit) { return m < k_limit ? m : k_limit; }

inline SystemTime ssd_array_time(const HostProfile& host, Count cores, Count m, const SlowdownFactors& sd) {
  validate(host);
  validate(sd);
  validate_cores(host, cores);
  if (m < 1) throw DomainError(detail::concat("device count must be >= 1, got ", m));
  const auto devices = static_cast<double>(effective_ssd_count(m, host.k_limit));
  return detail::make_time(sd.sd_tx * host.t_ssd_tx / devices, sd.sd_comp * host_compute_time(host, cores));
}

// Takes no SlowdownFactors: CSDs run the kernel on-device and do not see host load.
inline SystemTime csd_array_time(const CsdProfile& csd, Count m) {
  validate(csd);
  if (m < 1) throw DomainError(detail::concat("device count must be >= 1, got ", m));
  const auto devices = static_cast<double>(m);
  return detail::make_time(csd.t_csd_tx / devices, csd.t_csd_comp / devices);
}

// Bytes per second.
inline double throughput(const WorkloadProfile& workload, const SystemTime& time) {
  if (!(time.total > 0.0))
    throw DomainError(detail::concat("throughput needs a positive total time, got ", time.total));
  return workload.working_set_bytes / time.total;
}

}  // namespace csdplan
