#pragma once

// Request/response layer shared by the CLI and the HTTP service. Both front
// ends parse into these request structs, call the same functions and emit the
// same JSON, so their numeric results cannot drift apart.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csdplan/bep.hpp"
#include "csdplan/calibration.hpp"
#include "csdplan/json_reader.hpp"
#include "csdplan/tco.hpp"
#include "csdplan/whatif.hpp"

namespace csdplan {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Solve

struct SolveRequest {
  std::string workload;
  std::string host;
  std::string csd;
  Count cores = 1;
  std::optional<double> sd_tx;
  std::optional<double> sd_comp;
  std::optional<std::uint64_t> overload_memory_bytes;  // fit sd from calibration records
  std::optional<Count> k_limit;                        // overrides the host's value
  std::optional<Count> m_max;                          // oracle bound
};

struct SolveOutcome {
  SolveRequest request;
  HostProfile host;
  CsdProfile csd;
  SlowdownFactors sd;
  std::vector<std::string> warnings;
  BepResult closed;
  BepResult oracle;
  bool consistent = true;
};

inline SlowdownFactors resolve_slowdown(const CalibrationSet& cal, const SolveRequest& req,
                                        std::vector<std::string>* warnings = nullptr) {
  SlowdownFactors sd;
  if (req.overload_memory_bytes) {
    auto fit = fit_slowdown(cal, req.workload, req.host, *req.overload_memory_bytes);
    sd = fit.factors;
    if (warnings) warnings->insert(warnings->end(), fit.warnings.begin(), fit.warnings.end());
  }
  if (req.sd_tx) sd.sd_tx = *req.sd_tx;
  if (req.sd_comp) sd.sd_comp = *req.sd_comp;
  validate(sd);
  return sd;
}

// Closed form and brute-force oracle on the same inputs. The two agree when
// they report the same count, or when the closed form lies past the oracle's
// bound and the oracle is therefore infeasible.
inline SolveOutcome solve_scenario(const CalibrationSet& cal, const SolveRequest& req) {
  SolveOutcome out;
  out.request = req;
  out.host = cal.host_profile(req.workload, req.host);
  if (req.k_limit) out.host.k_limit = *req.k_limit;
  out.csd = cal.csd_profile(req.workload, req.csd);
  out.sd = resolve_slowdown(cal, req, &out.warnings);
  out.closed = bep_closed_form(out.host, out.csd, req.cores, out.sd);
  const Count bound = req.m_max.value_or(default_search_bound(out.host.k_limit));
  out.oracle = bep_bruteforce(out.host, out.csd, req.cores, out.sd, bound);
  if (out.oracle.infeasible)
    out.consistent = out.closed.infeasible || out.closed.bep > bound;
  else
    out.consistent = !out.closed.infeasible && out.closed.bep == out.oracle.bep &&
                     out.closed.saturated == out.oracle.saturated;
  return out;
}

inline json to_json(const BepResult& r) {
  json j;
  j["bep"] = r.infeasible ? json(nullptr) : json(r.bep);
  j["method"] = std::string(to_string(r.method));
  j["saturated"] = r.saturated;
  j["infeasible"] = r.infeasible;
  if (r.intermediates)
    j["intermediates"] = {{"numerator", r.intermediates->numerator},
                          {"denominator", r.intermediates->denominator},
                          {"real_value", r.intermediates->real_value}};
  if (r.method == BepMethod::brute_force) j["searched_bound"] = r.searched_bound;
  return j;
}

inline json to_json(const SolveOutcome& o) {
  json j = to_json(o.closed);
  j["workload"] = o.request.workload;
  j["host"] = o.request.host;
  j["csd"] = o.request.csd;
  j["cores"] = o.request.cores;
  j["k_limit"] = o.host.k_limit;
  j["sd_tx"] = o.sd.sd_tx;
  j["sd_comp"] = o.sd.sd_comp;
  j["oracle"] = to_json(o.oracle);
  j["consistent"] = o.consistent;
  if (!o.warnings.empty()) j["warnings"] = o.warnings;
  return j;
}

// ---------------------------------------------------------------------------
// Request parsing (JSON bodies)

namespace planner_detail {

using json_detail::ObjectReader;

inline Count count_field(ObjectReader& r, std::string_view key) { return r.integer(key); }

inline std::optional<std::uint64_t> optional_bytes(ObjectReader& r, std::string_view key) {
  const auto v = r.optional_integer(key);
  if (!v) return std::nullopt;
  if (*v < 0) throw ParseError(r.field_path(key), "must be >= 0");
  return static_cast<std::uint64_t>(*v);
}

}  // namespace planner_detail

inline SolveRequest parse_solve_request(const json& body) {
  planner_detail::ObjectReader r(body, "");
  SolveRequest req;
  req.workload = r.string("workload");
  req.host = r.string("host");
  req.csd = r.string("csd");
  req.cores = planner_detail::count_field(r, "cores");
  req.sd_tx = r.optional_number("sd_tx");
  req.sd_comp = r.optional_number("sd_comp");
  req.overload_memory_bytes = planner_detail::optional_bytes(r, "overload_memory_bytes");
  req.k_limit = r.optional_integer("k_limit");
  req.m_max = r.optional_integer("m_max");
  r.done();
  return req;
}

// An axis is either the compact string form or
// {"parameter", "start", "stop", "step"} / {"parameter", "values"}.
inline AxisSpec parse_axis_json(const json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return parse_axis(j.get<std::string>());
    } catch (const DomainError& e) {
      throw ParseError(path, e.what());
    }
  }
  planner_detail::ObjectReader r(j, path);
  const std::string name = r.string("parameter");
  AxisParameter p;
  try {
    p = parse_axis_parameter(name);
  } catch (const DomainError& e) {
    throw ParseError(r.field_path("parameter"), e.what());
  }
  AxisSpec a;
  if (const json* vals = r.optional("values")) {
    const auto& arr = json_detail::as_array(*vals, r.field_path("values"));
    std::vector<double> v;
    for (std::size_t i = 0; i < arr.size(); ++i)
      v.push_back(json_detail::as_number(arr[i], json_detail::index_path(r.field_path("values"), i)));
    if (v.empty()) throw ParseError(r.field_path("values"), "must not be empty");
    a = AxisSpec::list(p, std::move(v));
  } else {
    a = AxisSpec::range(p, r.number("start"), r.number("stop"), r.number("step"));
  }
  r.done();
  try {
    a.validate();
  } catch (const DomainError& e) {
    throw ParseError(path, e.what());
  }
  return a;
}

inline json axis_to_json(const AxisSpec& a) {
  json j = {{"parameter", std::string(to_string(a.parameter))}};
  if (!a.values.empty()) {
    j["values"] = a.values;
  } else {
    j["start"] = a.start;
    j["stop"] = a.stop;
    j["step"] = a.step;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Sweep

struct SweepRequest {
  std::string workload;
  std::string host;
  std::string csd;
  Count cores = 1;
  SweepMode mode = SweepMode::hardware;
  AxisSpec axis_x;
  AxisSpec axis_y;
  std::optional<double> sd_tx;  // system mode base slow-down
  std::optional<double> sd_comp;
  std::optional<Count> k_limit;
};

inline SweepRequest parse_sweep_fields(planner_detail::ObjectReader& r) {
  SweepRequest req;
  req.workload = r.string("workload");
  req.host = r.string("host");
  req.csd = r.string("csd");
  req.cores = planner_detail::count_field(r, "cores");
  if (auto m = r.optional_string("mode")) {
    try {
      req.mode = parse_sweep_mode(*m);
    } catch (const DomainError& e) {
      throw ParseError(r.field_path("mode"), e.what());
    }
  }
  req.axis_x = parse_axis_json(r.required("axis_x"), r.field_path("axis_x"));
  req.axis_y = parse_axis_json(r.required("axis_y"), r.field_path("axis_y"));
  req.sd_tx = r.optional_number("sd_tx");
  req.sd_comp = r.optional_number("sd_comp");
  req.k_limit = r.optional_integer("k_limit");
  return req;
}

inline SweepRequest parse_sweep_request(const json& body) {
  planner_detail::ObjectReader r(body, "");
  SweepRequest req = parse_sweep_fields(r);
  r.done();
  return req;
}

inline std::size_t sweep_cell_count(const SweepRequest& req) {
  const std::size_t nx = req.axis_x.size();
  const std::size_t ny = req.axis_y.size();
  if (nx != 0 && ny > std::numeric_limits<std::size_t>::max() / nx) return std::numeric_limits<std::size_t>::max();
  return nx * ny;
}

// Throws TooLargeError when the grid exceeds `max_cells` (0 = unlimited).
inline BepSurface run_sweep(const CalibrationSet& cal, const SweepRequest& req, std::size_t max_cells = 0,
                            const SweepOptions& opts = {}) {
  if (max_cells != 0) {
    const std::size_t cells = sweep_cell_count(req);
    if (cells > max_cells)
      throw TooLargeError(detail::concat("sweep grid has ", cells, " cells; the limit is ", max_cells));
  }
  HostProfile host = cal.host_profile(req.workload, req.host);
  if (req.k_limit) host.k_limit = *req.k_limit;
  const CsdProfile csd = cal.csd_profile(req.workload, req.csd);
  if (req.mode == SweepMode::system) {
    SlowdownFactors sd{req.sd_tx.value_or(1.0), req.sd_comp.value_or(1.0)};
    return sweep_bep_system(host, csd, req.cores, sd, req.axis_x, req.axis_y, opts);
  }
  if (req.sd_tx || req.sd_comp)
    throw DomainError("sd_tx/sd_comp base values only apply to system sweeps; use sd axes in overload mode");
  const RatioSet ratios = ratios_from_profiles(host, csd, req.cores);
  if (req.mode == SweepMode::hardware) return sweep_bep_hardware(ratios, req.axis_x, req.axis_y, opts);
  return sweep_bep_overload(ratios, req.axis_x, req.axis_y, opts);
}

inline json to_json(const BepSurface& s) {
  return {{"mode", std::string(to_string(s.mode))},
          {"x_axis", axis_to_json(s.x_axis)},
          {"y_axis", axis_to_json(s.y_axis)},
          {"x_points", s.x_points},
          {"y_points", s.y_points},
          {"values", s.values},
          {"base",
           {{"r_tx", s.base.r_tx},
            {"r_comp", s.base.r_comp},
            {"r_ssd", s.base.r_ssd},
            {"cores", s.base.cores},
            {"sd_tx", s.base_sd.sd_tx},
            {"sd_comp", s.base_sd.sd_comp}}}};
}

// Shortest round-trip formatting, so CSV and JSON carry identical numbers.
inline std::string format_number(double v) { return json(v).dump(); }

inline std::string to_csv(const BepSurface& s) {
  std::string out = "x,y,bep\n";
  for (std::size_t i = 0; i < s.x_points.size(); ++i)
    for (std::size_t j = 0; j < s.y_points.size(); ++j)
      out += format_number(s.x_points[i]) + "," + format_number(s.y_points[j]) + "," + std::to_string(s.at(i, j)) +
             "\n";
  return out;
}

struct IsoRequest {
  SweepRequest sweep;
  Count c = 1;
};

inline IsoRequest parse_iso_request(const json& body) {
  planner_detail::ObjectReader r(body, "");
  IsoRequest req;
  req.sweep = parse_sweep_fields(r);
  req.c = r.integer("c");
  r.done();
  return req;
}

inline json contour_to_json(const BepSurface& s, Count c, const std::vector<GridPoint>& points) {
  json pts = json::array();
  for (const auto& p : points) pts.push_back({{"x", p.x}, {"y", p.y}});
  return {{"c", c},
          {"x_parameter", std::string(to_string(s.x_axis.parameter))},
          {"y_parameter", std::string(to_string(s.y_axis.parameter))},
          {"points", pts}};
}

inline std::string contour_to_csv(const std::vector<GridPoint>& points) {
  std::string out = "x,y\n";
  for (const auto& p : points) out += format_number(p.x) + "," + format_number(p.y) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Slow-down difference series

struct DiffRequest {
  std::string workload;
  std::string host;
  std::string csd;
  Count cores = 1;
  std::vector<double> sd_comp_values;
};

inline DiffRequest parse_diff_request(const json& body) {
  planner_detail::ObjectReader r(body, "");
  DiffRequest req;
  req.workload = r.string("workload");
  req.host = r.string("host");
  req.csd = r.string("csd");
  req.cores = planner_detail::count_field(r, "cores");
  const auto& arr = json_detail::as_array(r.required("sd_comp_values"), r.field_path("sd_comp_values"));
  for (std::size_t i = 0; i < arr.size(); ++i)
    req.sd_comp_values.push_back(
        json_detail::as_number(arr[i], json_detail::index_path(r.field_path("sd_comp_values"), i)));
  r.done();
  return req;
}

inline std::vector<DiffPoint> run_diff(const CalibrationSet& cal, const DiffRequest& req) {
  return bep_diff_series(derive_ratios(cal, req.workload, req.host, req.csd, req.cores), req.sd_comp_values);
}

inline json to_json(const std::vector<DiffPoint>& series) {
  json pts = json::array();
  for (const auto& p : series) pts.push_back({{"sd_comp", p.sd_comp}, {"bep", p.bep}, {"diff", p.diff}});
  return {{"points", pts}};
}

inline std::string to_csv(const std::vector<DiffPoint>& series) {
  std::string out = "sd_comp,bep,diff\n";
  for (const auto& p : series)
    out += format_number(p.sd_comp) + "," + std::to_string(p.bep) + "," + std::to_string(p.diff) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Curves

struct CurvesRequest {
  std::string workload;
  std::vector<SystemDescriptor> configs;
  Count m_max = 16;
  SystemDescriptor normalize_to;
};

// Strings use the compact descriptor form; objects are {kind, name, cores?, k_limit?}.
inline SystemDescriptor parse_descriptor_json(const json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return parse_descriptor(j.get<std::string>());
    } catch (const DomainError& e) {
      throw ParseError(path, e.what());
    }
  }
  planner_detail::ObjectReader r(j, path);
  const std::string kind = r.string("kind");
  SystemDescriptor d;
  if (kind == "csd") {
    d = SystemDescriptor::csd(r.string("name"));
  } else if (kind == "host") {
    d.kind = SystemDescriptor::Kind::host;
    d.name = r.string("name");
    d.cores = r.optional_integer("cores").value_or(1);
    d.k_limit = r.optional_integer("k_limit");
  } else {
    throw ParseError(r.field_path("kind"), "expected \"host\" or \"csd\", got \"" + kind + "\"");
  }
  r.done();
  return d;
}

inline CurvesRequest parse_curves_request(const json& body) {
  planner_detail::ObjectReader r(body, "");
  CurvesRequest req;
  req.workload = r.string("workload");
  const auto& arr = json_detail::as_array(r.required("configs"), r.field_path("configs"));
  for (std::size_t i = 0; i < arr.size(); ++i)
    req.configs.push_back(parse_descriptor_json(arr[i], json_detail::index_path(r.field_path("configs"), i)));
  req.m_max = r.integer("m_max");
  req.normalize_to = parse_descriptor_json(r.required("normalize_to"), r.field_path("normalize_to"));
  r.done();
  return req;
}

inline CurveSet run_curves(const CalibrationSet& cal, const CurvesRequest& req) {
  return throughput_curves(cal, req.workload, req.configs, req.m_max, req.normalize_to);
}

inline json to_json(const CurveSet& c) {
  json series = json::array();
  for (const auto& s : c.series) {
    json pts = json::array();
    for (const auto& p : s.points) pts.push_back({{"devices", p.devices}, {"throughput_norm", p.throughput_norm}});
    series.push_back({{"label", s.label}, {"points", pts}});
  }
  return {{"normalization_reference", c.normalization_reference}, {"series", series}};
}

inline std::string to_csv(const CurveSet& c) {
  std::string out = "series,devices,throughput_norm\n";
  for (const auto& s : c.series)
    for (const auto& p : s.points)
      out += s.label + "," + std::to_string(p.devices) + "," + format_number(p.throughput_norm) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// TCO

struct TcoRequest {
  BaselineSystem baseline;
  std::vector<CandidateSystem> candidates;
  CostModel cost_model;
};

inline TcoRequest parse_tco_request(const json& body) {
  planner_detail::ObjectReader r(body, "");
  TcoRequest req;
  {
    planner_detail::ObjectReader b(r.required("baseline"), r.field_path("baseline"));
    req.baseline.cpu = b.string("cpu");
    req.baseline.ssd_count = b.integer("ssd_count");
    if (auto n = b.optional_string("name")) req.baseline.name = *n;
    b.done();
  }
  const auto& arr = json_detail::as_array(r.required("candidates"), r.field_path("candidates"));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    planner_detail::ObjectReader c(arr[i], json_detail::index_path(r.field_path("candidates"), i));
    CandidateSystem cand;
    cand.cpu = c.string("cpu");
    cand.csd_count = c.integer("csd_count");
    cand.name = c.optional_string("name").value_or("");
    c.done();
    req.candidates.push_back(std::move(cand));
  }
  req.cost_model = parse_cost_model(r.required("cost_model"), r.field_path("cost_model"));
  r.done();
  return req;
}

inline TcoReport run_tco(const TcoRequest& req) { return compare_tco(req.baseline, req.candidates, req.cost_model); }

// ---------------------------------------------------------------------------
// Calibration summary

inline json calibration_summary(const CalibrationSet& cal) {
  json workloads = json::array();
  for (const auto& w : cal.workloads) {
    json classes = json::array();
    for (const auto& h : cal.hosts) {
      if (!cal.find_measurement(w.name, h.name)) continue;
      const auto c = classify_workload(cal, w.name, h.name);
      classes.push_back({{"host", h.name}, {"ctr", c.ctr}, {"kind", std::string(to_string(c.kind))}});
    }
    workloads.push_back({{"name", w.name},
                         {"working_set_bytes", w.working_set_bytes},
                         {"description", w.description},
                         {"classes", classes}});
  }
  json hosts = json::array();
  for (const auto& h : cal.hosts) hosts.push_back({{"name", h.name}, {"max_cores", h.max_cores}, {"k_limit", h.k_limit}});
  json csds = json::array();
  for (const auto& c : cal.csds) {
    json e = {{"name", c.name}};
    if (c.bw_internal_bps && c.bw_external_bps) e["bandwidth_ratio"] = *c.bw_internal_bps / *c.bw_external_bps;
    csds.push_back(e);
  }
  return {{"schema_version", cal.schema_version}, {"workloads", workloads}, {"hosts", hosts}, {"csds", csds}};
}

// One row per (workload, host) pair with a normal record.
inline json classification_table(const CalibrationSet& cal) {
  json rows = json::array();
  for (const auto& w : cal.workloads)
    for (const auto& h : cal.hosts) {
      if (!cal.find_measurement(w.name, h.name)) continue;
      const auto c = classify_workload(cal, w.name, h.name);
      rows.push_back({{"workload", w.name}, {"host", h.name}, {"ctr", c.ctr}, {"kind", std::string(to_string(c.kind))}});
    }
  return rows;
}

inline std::string classification_csv(const CalibrationSet& cal) {
  std::string out = "workload,host,ctr,kind\n";
  for (const auto& row : classification_table(cal))
    out += row["workload"].get<std::string>() + "," + row["host"].get<std::string>() + "," +
           format_number(row["ctr"].get<double>()) + "," + row["kind"].get<std::string>() + "\n";
  return out;
}

}  // namespace csdplan
