#pragma once

// Break-even point (BEP) solver: the smallest device count m at which the CSD
// array is strictly faster than the SSD array on the same host.
//
// Below k_limit both array times are a/m-shaped except the host compute term,
// so "T_ssd(m) > T_csd(m)" rearranges to m > q with
//   q = (t_csd_tx + t_csd_comp - sd_tx * t_ssd_tx) / (sd_comp * t_ssd_comp(n)).
// Past k_limit the host time is the constant floor
//   T_floor = sd_tx * t_ssd_tx / k_limit + sd_comp * t_ssd_comp(n),
// and the condition becomes m > (t_csd_tx + t_csd_comp) / T_floor.
// Both forms need the smallest integer strictly greater than a real value;
// the brute-force enumeration is kept alongside as an independent oracle.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>

#include "csdplan/model.hpp"
#include "csdplan/ratios.hpp"

namespace csdplan {

enum class BepMethod { closed_form, closed_form_saturated, brute_force };

constexpr std::string_view to_string(BepMethod m) {
  switch (m) {
    case BepMethod::closed_form: return "closed_form";
    case BepMethod::closed_form_saturated: return "closed_form_saturated";
    case BepMethod::brute_force: return "brute_force";
  }
  return "unknown";
}

struct BepIntermediates {
  double numerator = 0.0;
  double denominator = 0.0;
  double real_value = 0.0;  // numerator / denominator, before the ceiling

  bool operator==(const BepIntermediates&) const = default;
};

struct BepResult {
  Count bep = 0;  // >= 1 unless infeasible
  BepMethod method = BepMethod::closed_form;
  bool saturated = false;
  std::optional<BepIntermediates> intermediates;
  bool infeasible = false;
  Count searched_bound = 0;  // brute force only

  bool operator==(const BepResult&) const = default;
};

// Values this close to an integer are treated as that integer.
inline constexpr double kIntegerSnap = 1e-9;

// Largest break-even count the closed forms report; beyond it the result is infeasible.
inline constexpr double kMaxRepresentableBep = 9007199254740992.0;  // 2^53

// Smallest integer strictly greater than v, clamped below at 1. Empty when v
// is not finite or too large to represent.
inline std::optional<Count> strict_ceiling(double v) {
  if (std::isnan(v) || v >= kMaxRepresentableBep) return std::nullopt;
  if (v < 0.0) return Count{1};
  const double nearest = std::round(v);
  const double base = std::abs(v - nearest) <= kIntegerSnap ? nearest : std::floor(v);
  return std::max<Count>(static_cast<Count>(base) + 1, 1);
}

constexpr Count default_search_bound(Count k_limit) { return 4 * k_limit + 64; }

inline BepResult bep_closed_form(const HostProfile& host, const CsdProfile& csd, Count cores,
                                 const SlowdownFactors& sd) {
  validate(host);
  validate(csd);
  validate(sd);
  validate_cores(host, cores);

  const double denominator = sd.sd_comp * host_compute_time(host, cores);
  if (!(denominator > 0.0)) throw DomainError("zero computation-time denominator");
  const double csd_total = csd.t_csd_tx + csd.t_csd_comp;
  const double numerator = csd_total - sd.sd_tx * host.t_ssd_tx;
  const double real_value = numerator / denominator;

  BepResult r;
  r.method = BepMethod::closed_form;
  r.intermediates = BepIntermediates{numerator, denominator, real_value};
  const auto unsaturated = strict_ceiling(real_value);
  if (unsaturated && *unsaturated <= host.k_limit) {
    r.bep = *unsaturated;
    return r;
  }

  // Host transfer is capped at k_limit devices for every m beyond it.
  const double floor_time = sd.sd_tx * host.t_ssd_tx / static_cast<double>(host.k_limit) + denominator;
  const double saturated_value = csd_total / floor_time;
  r.method = BepMethod::closed_form_saturated;
  r.saturated = true;
  r.intermediates = BepIntermediates{csd_total, floor_time, saturated_value};
  if (const auto m = strict_ceiling(saturated_value)) {
    r.bep = *m;
  } else {
    r.bep = 0;
    r.infeasible = true;
  }
  return r;
}

inline BepResult bep_bruteforce(const HostProfile& host, const CsdProfile& csd, Count cores,
                                const SlowdownFactors& sd, Count m_max) {
  if (m_max < 1) throw DomainError(detail::concat("m_max must be >= 1, got ", m_max));
  BepResult r;
  r.method = BepMethod::brute_force;
  r.searched_bound = m_max;
  for (Count m = 1; m <= m_max; ++m) {
    if (ssd_array_time(host, cores, m, sd).total > csd_array_time(csd, m).total) {
      r.bep = m;
      r.saturated = m > host.k_limit;
      return r;
    }
  }
  r.infeasible = true;
  return r;
}

inline BepResult bep_bruteforce(const HostProfile& host, const CsdProfile& csd, Count cores,
                                const SlowdownFactors& sd) {
  return bep_bruteforce(host, csd, cores, sd, default_search_bound(host.k_limit));
}

// Pre-ceiling value of the overloaded ratio-form function.
inline double s_overload_value(const RatioSet& ratios, const SlowdownFactors& sd) {
  validate(ratios);
  validate(sd);
  return ((1.0 / ratios.r_tx - sd.sd_tx) * ratios.r_ssd + 1.0 / ratios.r_comp) / sd.sd_comp;
}

// With sd = (1, 1) this is bit-identical to the normal-condition value.
inline double s_normal_value(const RatioSet& ratios) { return s_overload_value(ratios, SlowdownFactors::normal()); }

inline Count s_overload(const RatioSet& ratios, const SlowdownFactors& sd) {
  const double v = s_overload_value(ratios, sd);
  const auto m = strict_ceiling(v);
  if (!m) throw DomainError(detail::concat("break-even value not representable: ", v));
  return *m;
}

inline Count s_normal(const RatioSet& ratios) { return s_overload(ratios, SlowdownFactors::normal()); }

}  // namespace csdplan
