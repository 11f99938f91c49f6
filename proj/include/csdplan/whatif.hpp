#pragma once

// What-if exploration: throughput curves over device counts, BEP surfaces over
// two swept parameters, iso-BEP contours and BEP-difference series.

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "csdplan/bep.hpp"
#include "csdplan/calibration.hpp"
#include "csdplan/model.hpp"
#include "csdplan/ratios.hpp"

namespace csdplan {

enum class AxisParameter { r_tx_multiplier, r_comp_multiplier, sd_tx, sd_comp, cores, k_limit };

constexpr std::string_view to_string(AxisParameter p) {
  switch (p) {
    case AxisParameter::r_tx_multiplier: return "r_tx_multiplier";
    case AxisParameter::r_comp_multiplier: return "r_comp_multiplier";
    case AxisParameter::sd_tx: return "sd_tx";
    case AxisParameter::sd_comp: return "sd_comp";
    case AxisParameter::cores: return "cores";
    case AxisParameter::k_limit: return "k_limit";
  }
  return "unknown";
}

// Accepts the full names and the short forms r_tx / r_comp.
inline AxisParameter parse_axis_parameter(std::string_view s) {
  if (s == "r_tx" || s == "r_tx_multiplier") return AxisParameter::r_tx_multiplier;
  if (s == "r_comp" || s == "r_comp_multiplier") return AxisParameter::r_comp_multiplier;
  if (s == "sd_tx") return AxisParameter::sd_tx;
  if (s == "sd_comp") return AxisParameter::sd_comp;
  if (s == "cores") return AxisParameter::cores;
  if (s == "k_limit") return AxisParameter::k_limit;
  throw DomainError("unknown axis parameter '" + std::string(s) + "'");
}

// Points within this distance past `stop` still count as landing on it.
inline constexpr double kAxisStopTolerance = 1e-9;

struct AxisSpec {
  AxisParameter parameter = AxisParameter::r_tx_multiplier;
  double start = 1.0;
  double stop = 1.0;
  double step = 1.0;
  std::vector<double> values;  // explicit list; overrides start/stop/step when non-empty

  static AxisSpec range(AxisParameter p, double start, double stop, double step) {
    return {p, start, stop, step, {}};
  }
  static AxisSpec list(AxisParameter p, std::vector<double> values) {
    AxisSpec a{p, 0.0, 0.0, 1.0, std::move(values)};
    if (!a.values.empty()) {
      a.start = *std::min_element(a.values.begin(), a.values.end());
      a.stop = *std::max_element(a.values.begin(), a.values.end());
    }
    return a;
  }

  void validate() const {
    if (!values.empty()) {
      for (double v : values)
        if (!std::isfinite(v)) throw DomainError("axis " + std::string(to_string(parameter)) + ": non-finite value");
      return;
    }
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
      throw DomainError("axis " + std::string(to_string(parameter)) + ": non-finite bound");
    if (!(start <= stop))
      throw DomainError("axis " + std::string(to_string(parameter)) + ": start " + detail::concat(start) +
                        " > stop " + detail::concat(stop));
    if (!(step > 0.0)) throw DomainError("axis " + std::string(to_string(parameter)) + ": step must be > 0");
  }

  // Number of points, computed without materialising them.
  std::size_t size() const {
    validate();
    if (!values.empty()) return values.size();
    const double n = std::floor((stop - start + kAxisStopTolerance) / step);
    if (n >= static_cast<double>(std::numeric_limits<std::size_t>::max() / 4)) return std::numeric_limits<std::size_t>::max() / 4;
    return static_cast<std::size_t>(n) + 1;
  }

  std::vector<double> points() const {
    if (!values.empty()) {
      validate();
      return values;
    }
    const std::size_t n = size();
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
};

// Compact form "param:start:stop:step" or "param:v1,v2,...".
inline AxisSpec parse_axis(std::string_view text) {
  const auto fail = [&](const std::string& why) -> AxisSpec {
    throw DomainError("bad axis '" + std::string(text) + "': " + why);
  };
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  const auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      fail("'" + s + "' is not a number");
    }
    if (used != s.size()) fail("'" + s + "' is not a number");
    return v;
  };
  if (parts.size() == 2) {
    std::vector<double> vals;
    std::string item;
    for (char ch : parts[1] + ",") {
      if (ch == ',') {
        if (item.empty()) fail("empty list item");
        vals.push_back(to_double(item));
        item.clear();
      } else {
        item += ch;
      }
    }
    AxisSpec a = AxisSpec::list(parse_axis_parameter(parts[0]), std::move(vals));
    a.validate();
    return a;
  }
  if (parts.size() != 4) return fail("expected param:start:stop:step or param:v1,v2,...");
  AxisSpec a = AxisSpec::range(parse_axis_parameter(parts[0]), to_double(parts[1]), to_double(parts[2]),
                               to_double(parts[3]));
  a.validate();
  return a;
}

enum class SweepMode { hardware, overload, system };

constexpr std::string_view to_string(SweepMode m) {
  switch (m) {
    case SweepMode::hardware: return "hardware";
    case SweepMode::overload: return "overload";
    case SweepMode::system: return "system";
  }
  return "unknown";
}

inline SweepMode parse_sweep_mode(std::string_view s) {
  if (s == "hardware") return SweepMode::hardware;
  if (s == "overload") return SweepMode::overload;
  if (s == "system") return SweepMode::system;
  throw DomainError("unknown sweep mode '" + std::string(s) + "' (hardware, overload, system)");
}

// values[i * y_points.size() + j] is the BEP at (x_points[i], y_points[j]).
struct BepSurface {
  SweepMode mode = SweepMode::hardware;
  AxisSpec x_axis;
  AxisSpec y_axis;
  std::vector<double> x_points;
  std::vector<double> y_points;
  std::vector<Count> values;
  RatioSet base;
  SlowdownFactors base_sd;

  Count at(std::size_t i, std::size_t j) const { return values.at(i * y_points.size() + j); }
};

struct GridPoint {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const GridPoint&) const = default;
};

struct SweepOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
};

namespace whatif_detail {

// Fills surface.values by evaluating cell(i, j) over contiguous row blocks.
// Each worker writes a disjoint range, so the result is independent of scheduling.
inline void evaluate_rows(BepSurface& surface, const std::function<Count(std::size_t, std::size_t)>& cell,
                          const SweepOptions& opts) {
  const std::size_t nx = surface.x_points.size();
  const std::size_t ny = surface.y_points.size();
  surface.values.assign(nx * ny, 0);
  if (nx == 0 || ny == 0) return;

  unsigned threads = opts.threads != 0 ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, nx));
  std::vector<std::exception_ptr> errors(threads);
  const auto run_block = [&](unsigned t) {
    const std::size_t begin = nx * t / threads;
    const std::size_t end = nx * (t + 1) / threads;
    try {
      for (std::size_t i = begin; i < end; ++i)
        for (std::size_t j = 0; j < ny; ++j) surface.values[i * ny + j] = cell(i, j);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  if (threads == 1) {
    run_block(0);
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) workers.emplace_back(run_block, t);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::string cell_name(const BepSurface& s, std::size_t i, std::size_t j) {
  return detail::concat("cell (", i, ", ", j, ") at ", to_string(s.x_axis.parameter), "=", s.x_points[i], ", ",
                        to_string(s.y_axis.parameter), "=", s.y_points[j]);
}

inline BepSurface make_surface(SweepMode mode, const AxisSpec& x, const AxisSpec& y) {
  if (x.parameter == y.parameter)
    throw DomainError("both axes sweep " + std::string(to_string(x.parameter)));
  BepSurface s;
  s.mode = mode;
  s.x_axis = x;
  s.y_axis = y;
  s.x_points = x.points();
  s.y_points = y.points();
  return s;
}

inline void require_family(const AxisSpec& axis, std::initializer_list<AxisParameter> allowed, std::string_view sweep) {
  for (auto p : allowed)
    if (axis.parameter == p) return;
  throw DomainError("axis " + std::string(to_string(axis.parameter)) + " is not valid for a " + std::string(sweep) +
                    " sweep");
}

}  // namespace whatif_detail

// Applies one axis value to the ratio/slow-down pair used by hardware and overload sweeps.
inline void apply_axis(AxisParameter p, double value, RatioSet& ratios, SlowdownFactors& sd) {
  switch (p) {
    case AxisParameter::r_tx_multiplier: ratios.r_tx *= value; break;
    case AxisParameter::r_comp_multiplier: ratios.r_comp *= value; break;
    case AxisParameter::sd_tx: sd.sd_tx = value; break;
    case AxisParameter::sd_comp: sd.sd_comp = value; break;
    default: throw DomainError("axis " + std::string(to_string(p)) + " does not apply to a ratio set");
  }
}

// Scales r_tx and/or r_comp; r_ssd stays fixed (the host is unchanged).
inline BepSurface sweep_bep_hardware(const RatioSet& ratios, const AxisSpec& x, const AxisSpec& y,
                                     const SweepOptions& opts = {}) {
  using whatif_detail::require_family;
  validate(ratios);
  require_family(x, {AxisParameter::r_tx_multiplier, AxisParameter::r_comp_multiplier}, "hardware");
  require_family(y, {AxisParameter::r_tx_multiplier, AxisParameter::r_comp_multiplier}, "hardware");
  BepSurface s = whatif_detail::make_surface(SweepMode::hardware, x, y);
  s.base = ratios;
  s.base_sd = SlowdownFactors::normal();

  const auto scaled = [&](std::size_t i, std::size_t j) {
    RatioSet r = ratios;
    SlowdownFactors sd = SlowdownFactors::normal();
    apply_axis(x.parameter, s.x_points[i], r, sd);
    apply_axis(y.parameter, s.y_points[j], r, sd);
    return r;
  };
  for (std::size_t i = 0; i < s.x_points.size(); ++i)
    for (std::size_t j = 0; j < s.y_points.size(); ++j) {
      const RatioSet r = scaled(i, j);
      if (!(r.r_tx > 0.0) || !(r.r_comp > 0.0) || !std::isfinite(r.r_tx) || !std::isfinite(r.r_comp))
        throw DomainError("nonpositive scaled ratio at " + whatif_detail::cell_name(s, i, j));
    }
  whatif_detail::evaluate_rows(s, [&](std::size_t i, std::size_t j) { return s_normal(scaled(i, j)); }, opts);
  return s;
}

inline BepSurface sweep_bep_overload(const RatioSet& ratios, const AxisSpec& x, const AxisSpec& y,
                                     const SweepOptions& opts = {}) {
  using whatif_detail::require_family;
  validate(ratios);
  require_family(x, {AxisParameter::sd_tx, AxisParameter::sd_comp}, "overload");
  require_family(y, {AxisParameter::sd_tx, AxisParameter::sd_comp}, "overload");
  BepSurface s = whatif_detail::make_surface(SweepMode::overload, x, y);
  s.base = ratios;
  s.base_sd = SlowdownFactors::normal();
  for (const auto* axis : {&s.x_points, &s.y_points})
    for (std::size_t k = 0; k < axis->size(); ++k)
      if (!((*axis)[k] >= 1.0))
        throw DomainError(detail::concat("slow-down axis value ", (*axis)[k], " < 1 at index ", k));

  whatif_detail::evaluate_rows(
      s,
      [&](std::size_t i, std::size_t j) {
        RatioSet r = ratios;
        SlowdownFactors sd = SlowdownFactors::normal();
        apply_axis(x.parameter, s.x_points[i], r, sd);
        apply_axis(y.parameter, s.y_points[j], r, sd);
        return s_overload(r, sd);
      },
      opts);
  return s;
}

// Time-form solver per cell; accepts every axis parameter. Multipliers scale the
// CSD side (r_tx multiplier divides t_csd_tx, r_comp multiplier divides t_csd_comp).
inline BepSurface sweep_bep_system(const HostProfile& host, const CsdProfile& csd, Count cores,
                                   const SlowdownFactors& sd, const AxisSpec& x, const AxisSpec& y,
                                   const SweepOptions& opts = {}) {
  BepSurface s = whatif_detail::make_surface(SweepMode::system, x, y);
  s.base = ratios_from_profiles(host, csd, cores);
  s.base_sd = sd;
  validate(sd);

  struct Scenario {
    HostProfile host;
    CsdProfile csd;
    Count cores;
    SlowdownFactors sd;
  };
  const auto apply = [](Scenario& sc, AxisParameter p, double v) {
    switch (p) {
      case AxisParameter::r_tx_multiplier: sc.csd.t_csd_tx /= v; break;
      case AxisParameter::r_comp_multiplier: sc.csd.t_csd_comp /= v; break;
      case AxisParameter::sd_tx: sc.sd.sd_tx = v; break;
      case AxisParameter::sd_comp: sc.sd.sd_comp = v; break;
      case AxisParameter::cores: sc.cores = static_cast<Count>(v); break;
      case AxisParameter::k_limit: sc.host.k_limit = static_cast<Count>(v); break;
    }
  };
  const auto scenario = [&](std::size_t i, std::size_t j) {
    Scenario sc{host, csd, cores, sd};
    apply(sc, x.parameter, s.x_points[i]);
    apply(sc, y.parameter, s.y_points[j]);
    return sc;
  };
  const auto check_axis = [](const AxisSpec& a, const std::vector<double>& pts) {
    for (double v : pts) {
      const bool integral = a.parameter == AxisParameter::cores || a.parameter == AxisParameter::k_limit;
      if (integral && std::floor(v) != v)
        throw DomainError(detail::concat("axis ", to_string(a.parameter), " needs integer values, got ", v));
      if ((a.parameter == AxisParameter::r_tx_multiplier || a.parameter == AxisParameter::r_comp_multiplier) &&
          !(v > 0.0))
        throw DomainError(detail::concat("axis ", to_string(a.parameter), " needs multipliers > 0, got ", v));
    }
  };
  check_axis(x, s.x_points);
  check_axis(y, s.y_points);
  // Surface preconditions (cores range, sd >= 1, k_limit >= 1) are checked up front, naming the cell.
  for (std::size_t i = 0; i < s.x_points.size(); ++i)
    for (std::size_t j = 0; j < s.y_points.size(); ++j) {
      const Scenario sc = scenario(i, j);
      try {
        validate(sc.host);
        validate(sc.csd);
        validate(sc.sd);
        validate_cores(sc.host, sc.cores);
      } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + " at " + whatif_detail::cell_name(s, i, j));
      }
    }

  whatif_detail::evaluate_rows(
      s,
      [&](std::size_t i, std::size_t j) {
        const Scenario sc = scenario(i, j);
        const BepResult r = bep_closed_form(sc.host, sc.csd, sc.cores, sc.sd);
        if (r.infeasible) throw DomainError("no representable break-even point at " + whatif_detail::cell_name(s, i, j));
        return r.bep;
      },
      opts);
  return s;
}

// Exact-match cells, row-major.
inline std::vector<GridPoint> iso_bep_contour(const BepSurface& surface, Count c) {
  if (c < 1) throw DomainError(detail::concat("contour value must be >= 1, got ", c));
  std::vector<GridPoint> out;
  for (std::size_t i = 0; i < surface.x_points.size(); ++i)
    for (std::size_t j = 0; j < surface.y_points.size(); ++j)
      if (surface.at(i, j) == c) out.push_back({surface.x_points[i], surface.y_points[j]});
  return out;
}

struct DiffPoint {
  double sd_comp = 1.0;
  Count bep = 1;
  Count diff = 0;
};

// BEP as the host CPU slows down (sd_tx fixed at 1), relative to the normal-condition BEP.
inline std::vector<DiffPoint> bep_diff_series(const RatioSet& ratios, const std::vector<double>& sd_comp_values) {
  const Count base = s_normal(ratios);
  std::vector<DiffPoint> out;
  out.reserve(sd_comp_values.size());
  for (double v : sd_comp_values) {
    const Count bep = s_overload(ratios, {1.0, v});
    out.push_back({v, bep, base - bep});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Throughput curves

struct SystemDescriptor {
  enum class Kind { host, csd };
  Kind kind = Kind::csd;
  std::string name;
  Count cores = 1;                // host only
  std::optional<Count> k_limit;   // host only; overrides the calibration value

  static SystemDescriptor host(std::string name, Count cores, std::optional<Count> k_limit = std::nullopt) {
    return {Kind::host, std::move(name), cores, k_limit};
  }
  static SystemDescriptor csd(std::string name) { return {Kind::csd, std::move(name), 1, std::nullopt}; }

  std::string label() const {
    if (kind == Kind::csd) return name;
    std::string l = name + "(" + std::to_string(cores) + ")";
    if (k_limit) l += "[k=" + std::to_string(*k_limit) + "]";
    return l;
  }
};

// "host:<name>:<cores>[:<k_limit>]" or "csd:<name>".
inline SystemDescriptor parse_descriptor(std::string_view text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  const auto to_count = [&](const std::string& s) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size())
      throw DomainError("bad system descriptor '" + std::string(text) + "': '" + s + "' is not an integer");
    return static_cast<Count>(v);
  };
  if (parts.size() == 2 && parts[0] == "csd" && !parts[1].empty()) return SystemDescriptor::csd(parts[1]);
  if ((parts.size() == 3 || parts.size() == 4) && parts[0] == "host" && !parts[1].empty()) {
    std::optional<Count> k;
    if (parts.size() == 4) k = to_count(parts[3]);
    return SystemDescriptor::host(parts[1], to_count(parts[2]), k);
  }
  throw DomainError("bad system descriptor '" + std::string(text) + "' (host:<name>:<cores>[:<k_limit>] or csd:<name>)");
}

struct CurvePoint {
  Count devices = 1;
  double throughput_norm = 0.0;
};

struct CurveSeries {
  std::string label;
  std::vector<CurvePoint> points;
};

struct CurveSet {
  std::vector<CurveSeries> series;
  std::string normalization_reference;
};

// Time of one system descriptor at m devices under normal conditions.
inline SystemTime system_time(const CalibrationSet& cal, std::string_view workload, const SystemDescriptor& d,
                              Count m) {
  if (d.kind == SystemDescriptor::Kind::csd) return csd_array_time(cal.csd_profile(workload, d.name), m);
  HostProfile host = cal.host_profile(workload, d.name);
  if (d.k_limit) host.k_limit = *d.k_limit;
  return ssd_array_time(host, d.cores, m, SlowdownFactors::normal());
}

inline CurveSet throughput_curves(const CalibrationSet& cal, std::string_view workload,
                                  const std::vector<SystemDescriptor>& configs, Count m_max,
                                  const SystemDescriptor& normalization) {
  if (m_max < 1) throw DomainError(detail::concat("m_max must be >= 1, got ", m_max));
  const auto& w = cal.workload(workload);
  const double reference = throughput(w, system_time(cal, workload, normalization, 1));
  CurveSet out;
  out.normalization_reference = normalization.label();
  for (const auto& d : configs) {
    CurveSeries series;
    series.label = d.label();
    series.points.reserve(static_cast<std::size_t>(m_max));
    for (Count m = 1; m <= m_max; ++m)
      series.points.push_back({m, throughput(w, system_time(cal, workload, d, m)) / reference});
    out.series.push_back(std::move(series));
  }
  return out;
}

}  // namespace csdplan
