#pragma once

// Measured characterisation data: workloads, hosts, CSDs and the per-target
// timing records they are bound to. Host records carry the single-core
// computation time; overloaded host records are only used to fit slow-down
// factors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "csdplan/errors.hpp"
#include "csdplan/json_reader.hpp"
#include "csdplan/model.hpp"
#include "csdplan/ratios.hpp"

namespace csdplan {

inline constexpr int kCalibrationSchemaVersion = 1;

// Relative tolerance between the bandwidth and time forms of r_tx.
inline constexpr double kBandwidthConsistencyTolerance = 0.10;

struct Condition {
  // Empty for the normal condition; otherwise the memory left to the kernel.
  std::optional<std::uint64_t> overloaded_memory_bytes;

  static Condition normal() { return {}; }
  static Condition overloaded(std::uint64_t available_memory_bytes) { return {available_memory_bytes}; }

  bool is_normal() const { return !overloaded_memory_bytes.has_value(); }
  std::string to_string() const {
    return is_normal() ? "normal" : "overloaded(" + std::to_string(*overloaded_memory_bytes) + " B)";
  }
  auto operator<=>(const Condition&) const = default;
};

struct MeasurementRecord {
  std::string workload;
  std::string target;
  Condition condition;
  double t_tx = 0.0;
  double t_comp = 0.0;

  bool operator==(const MeasurementRecord&) const = default;
};

struct HostSpec {
  std::string name;
  Count max_cores = 1;
  Count k_limit = 1;

  bool operator==(const HostSpec&) const = default;
};

struct CsdSpec {
  std::string name;
  std::optional<double> bw_internal_bps;
  std::optional<double> bw_external_bps;

  bool operator==(const CsdSpec&) const = default;
};

enum class WorkloadKind { io_intensive, compute_intensive };

constexpr std::string_view to_string(WorkloadKind k) {
  return k == WorkloadKind::io_intensive ? "io_intensive" : "compute_intensive";
}

struct WorkloadClass {
  double ctr = 0.0;
  WorkloadKind kind = WorkloadKind::compute_intensive;
};

// Workloads with CTR strictly below this are I/O-intensive.
inline constexpr double kCtrThreshold = 0.5;

class CalibrationSet {
 public:
  int schema_version = kCalibrationSchemaVersion;
  std::vector<WorkloadProfile> workloads;
  std::vector<HostSpec> hosts;
  std::vector<CsdSpec> csds;
  std::vector<MeasurementRecord> measurements;

  bool operator==(const CalibrationSet&) const = default;

  const WorkloadProfile& workload(std::string_view name) const {
    for (const auto& w : workloads)
      if (w.name == name) return w;
    throw LookupError("unknown workload '" + std::string(name) + "'");
  }

  const HostSpec& host(std::string_view name) const {
    for (const auto& h : hosts)
      if (h.name == name) return h;
    throw LookupError("unknown host '" + std::string(name) + "'");
  }

  const CsdSpec& csd(std::string_view name) const {
    for (const auto& c : csds)
      if (c.name == name) return c;
    throw LookupError("unknown csd '" + std::string(name) + "'");
  }

  bool is_host(std::string_view name) const {
    for (const auto& h : hosts)
      if (h.name == name) return true;
    return false;
  }

  bool is_csd(std::string_view name) const {
    for (const auto& c : csds)
      if (c.name == name) return true;
    return false;
  }

  const MeasurementRecord* find_measurement(std::string_view workload, std::string_view target,
                                            const Condition& condition = Condition::normal()) const {
    for (const auto& m : measurements)
      if (m.workload == workload && m.target == target && m.condition == condition) return &m;
    return nullptr;
  }

  const MeasurementRecord& measurement(std::string_view workload, std::string_view target,
                                       const Condition& condition = Condition::normal()) const {
    if (const auto* m = find_measurement(workload, target, condition)) return *m;
    throw LookupError("no measurement for (workload '" + std::string(workload) + "', target '" +
                      std::string(target) + "', " + condition.to_string() + ")");
  }

  // Overloaded host conditions recorded for a workload, ascending by available memory.
  std::vector<Condition> overloaded_conditions(std::string_view workload, std::string_view host_name) const {
    std::vector<Condition> out;
    for (const auto& m : measurements)
      if (m.workload == workload && m.target == host_name && !m.condition.is_normal()) out.push_back(m.condition);
    std::sort(out.begin(), out.end());
    return out;
  }

  HostProfile host_profile(std::string_view workload_name, std::string_view host_name) const {
    workload(workload_name);
    const auto& h = host(host_name);
    const auto& m = measurement(workload_name, host_name);
    return {m.t_tx, m.t_comp, h.max_cores, h.k_limit};
  }

  CsdProfile csd_profile(std::string_view workload_name, std::string_view csd_name) const {
    workload(workload_name);
    const auto& c = csd(csd_name);
    const auto& m = measurement(workload_name, csd_name);
    return {c.name, m.t_tx, m.t_comp, c.bw_internal_bps, c.bw_external_bps};
  }

  // Every violated invariant, in file order. Empty when the set is valid.
  std::vector<std::string> issues() const;
};

namespace calibration_detail {

inline std::string num(double v) { return detail::concat(v); }

inline std::string record_label(std::size_t i, const MeasurementRecord& m) {
  return "measurements[" + std::to_string(i) + "] (" + m.workload + ", " + m.target + ", " +
         m.condition.to_string() + ")";
}

}  // namespace calibration_detail

inline std::vector<std::string> CalibrationSet::issues() const {
  using calibration_detail::num;
  std::vector<std::string> out;

  if (schema_version != kCalibrationSchemaVersion)
    out.push_back("schema_version must be " + std::to_string(kCalibrationSchemaVersion) + ", got " +
                  std::to_string(schema_version));

  std::set<std::string> names;
  for (std::size_t i = 0; i < workloads.size(); ++i) {
    const auto& w = workloads[i];
    const std::string where = "workloads[" + std::to_string(i) + "] ('" + w.name + "')";
    if (w.name.empty()) out.push_back(where + ": name must not be empty");
    if (!names.insert(w.name).second) out.push_back(where + ": duplicate workload name '" + w.name + "'");
    if (!(w.working_set_bytes > 0.0))
      out.push_back(where + ": working_set_bytes must be > 0, got " + num(w.working_set_bytes));
  }

  std::set<std::string> targets;
  for (std::size_t i = 0; i < hosts.size(); ++i) {
    const auto& h = hosts[i];
    const std::string where = "hosts[" + std::to_string(i) + "] ('" + h.name + "')";
    if (h.name.empty()) out.push_back(where + ": name must not be empty");
    if (!targets.insert(h.name).second) out.push_back(where + ": duplicate target name '" + h.name + "'");
    if (h.max_cores < 1) out.push_back(where + ": max_cores must be >= 1, got " + std::to_string(h.max_cores));
    if (h.k_limit < 1) out.push_back(where + ": k_limit must be >= 1, got " + std::to_string(h.k_limit));
  }
  for (std::size_t i = 0; i < csds.size(); ++i) {
    const auto& c = csds[i];
    const std::string where = "csds[" + std::to_string(i) + "] ('" + c.name + "')";
    if (c.name.empty()) out.push_back(where + ": name must not be empty");
    if (!targets.insert(c.name).second) out.push_back(where + ": duplicate target name '" + c.name + "'");
    if (c.bw_internal_bps && !(*c.bw_internal_bps > 0.0))
      out.push_back(where + ": bw_internal_bps must be > 0, got " + num(*c.bw_internal_bps));
    if (c.bw_external_bps && !(*c.bw_external_bps > 0.0))
      out.push_back(where + ": bw_external_bps must be > 0, got " + num(*c.bw_external_bps));
  }

  std::set<std::tuple<std::string, std::string, Condition>> seen;
  for (std::size_t i = 0; i < measurements.size(); ++i) {
    const auto& m = measurements[i];
    const std::string where = calibration_detail::record_label(i, m);
    if (!names.count(m.workload)) out.push_back(where + ": unknown workload '" + m.workload + "'");
    if (!targets.count(m.target)) out.push_back(where + ": unknown target '" + m.target + "'");
    if (!seen.insert({m.workload, m.target, m.condition}).second)
      out.push_back(where + ": duplicate measurement for this (workload, target, condition)");
    if (m.condition.overloaded_memory_bytes && *m.condition.overloaded_memory_bytes == 0)
      out.push_back(where + ": available_memory_bytes must be > 0");
    if (!(m.t_tx >= 0.0)) out.push_back(where + ": t_tx_s must be >= 0, got " + num(m.t_tx));
    if (!(m.t_comp >= 0.0)) out.push_back(where + ": t_comp_s must be >= 0, got " + num(m.t_comp));
    if (m.t_tx >= 0.0 && m.t_comp >= 0.0 && !(m.t_tx + m.t_comp > 0.0))
      out.push_back(where + ": t_tx_s + t_comp_s must be > 0");
    // Normal host and CSD records become HostProfile / CsdProfile, which need compute time.
    if (m.condition.is_normal() && m.t_comp == 0.0 && (is_host(m.target) || is_csd(m.target)))
      out.push_back(where + ": t_comp_s must be > 0 for a normal-condition record");
  }

  // Bandwidth form of r_tx must agree with the time form for every paired host record.
  for (const auto& c : csds) {
    if (!c.bw_internal_bps || !c.bw_external_bps || !(*c.bw_internal_bps > 0.0) || !(*c.bw_external_bps > 0.0))
      continue;
    const double bw_ratio = *c.bw_internal_bps / *c.bw_external_bps;
    for (const auto& cm : measurements) {
      if (cm.target != c.name || !cm.condition.is_normal() || !(cm.t_tx > 0.0)) continue;
      for (const auto& h : hosts) {
        const auto* hm = find_measurement(cm.workload, h.name);
        if (!hm || !(hm->t_tx > 0.0)) continue;
        const double time_ratio = hm->t_tx / cm.t_tx;
        if (std::abs(bw_ratio - time_ratio) > kBandwidthConsistencyTolerance * time_ratio)
          out.push_back("csd '" + c.name + "': bandwidth ratio " + num(bw_ratio) +
                        " disagrees with time ratio t_ssd_tx/t_csd_tx = " + num(time_ratio) + " for workload '" +
                        cm.workload + "' on host '" + h.name + "' (tolerance 10%)");
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// File format

namespace calibration_detail {

using json_detail::json;
using json_detail::ObjectReader;

inline Condition parse_condition(const json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "normal") return Condition::normal();
    throw ParseError(path, "expected \"normal\" or {\"overloaded\": {...}}, got " + j.dump());
  }
  ObjectReader outer(j, path);
  ObjectReader inner(outer.required("overloaded"), outer.field_path("overloaded"));
  const auto bytes = inner.integer("available_memory_bytes");
  inner.done();
  outer.done();
  if (bytes < 0) throw ParseError(inner.field_path("available_memory_bytes"), "must be >= 0");
  return Condition::overloaded(static_cast<std::uint64_t>(bytes));
}

inline json condition_to_json(const Condition& c) {
  if (c.is_normal()) return "normal";
  return json{{"overloaded", {{"available_memory_bytes", *c.overloaded_memory_bytes}}}};
}

}  // namespace calibration_detail

// Parses without semantic validation; structural problems raise ParseError.
inline CalibrationSet parse_calibration_unchecked(std::string_view text) {
  using namespace calibration_detail;
  using json_detail::as_array;
  using json_detail::index_path;

  const json root = json_detail::parse_text(text);
  ObjectReader r(root, "");
  CalibrationSet cal;
  cal.schema_version = static_cast<int>(r.integer("schema_version"));

  const json& workloads = as_array(r.required("workloads"), "workloads");
  for (std::size_t i = 0; i < workloads.size(); ++i) {
    ObjectReader w(workloads[i], index_path("workloads", i));
    WorkloadProfile p;
    p.name = w.string("name");
    p.working_set_bytes = w.number("working_set_bytes");
    p.description = w.optional_string("description").value_or("");
    w.done();
    cal.workloads.push_back(std::move(p));
  }

  const json& hosts = as_array(r.required("hosts"), "hosts");
  for (std::size_t i = 0; i < hosts.size(); ++i) {
    ObjectReader h(hosts[i], index_path("hosts", i));
    HostSpec spec;
    spec.name = h.string("name");
    spec.max_cores = h.integer("max_cores");
    spec.k_limit = h.integer("k_limit");
    h.done();
    cal.hosts.push_back(std::move(spec));
  }

  const json& csds = as_array(r.required("csds"), "csds");
  for (std::size_t i = 0; i < csds.size(); ++i) {
    ObjectReader c(csds[i], index_path("csds", i));
    CsdSpec spec;
    spec.name = c.string("name");
    spec.bw_internal_bps = c.optional_number("bw_internal_bps");
    spec.bw_external_bps = c.optional_number("bw_external_bps");
    c.done();
    cal.csds.push_back(std::move(spec));
  }

  const json& records = as_array(r.required("measurements"), "measurements");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string path = index_path("measurements", i);
    ObjectReader m(records[i], path);
    MeasurementRecord rec;
    rec.workload = m.string("workload");
    rec.target = m.string("target");
    rec.condition = parse_condition(m.required("condition"), m.field_path("condition"));
    rec.t_tx = m.number("t_tx_s");
    rec.t_comp = m.number("t_comp_s");
    m.done();
    cal.measurements.push_back(std::move(rec));
  }
  r.done();
  return cal;
}

inline CalibrationSet parse_calibration(std::string_view text) {
  CalibrationSet cal = parse_calibration_unchecked(text);
  if (auto issues = cal.issues(); !issues.empty()) throw ValidationError(std::move(issues));
  return cal;
}

inline CalibrationSet load_calibration(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_calibration(text);
}

inline CalibrationSet load_calibration_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LookupError("cannot open calibration file '" + path + "'");
  return load_calibration(in);
}

inline json_detail::json calibration_to_json(const CalibrationSet& cal) {
  using json_detail::json;
  json root;
  root["schema_version"] = cal.schema_version;
  json workloads = json::array();
  for (const auto& w : cal.workloads) {
    json j{{"name", w.name}, {"working_set_bytes", w.working_set_bytes}};
    if (!w.description.empty()) j["description"] = w.description;
    workloads.push_back(std::move(j));
  }
  root["workloads"] = std::move(workloads);
  json hosts = json::array();
  for (const auto& h : cal.hosts) hosts.push_back({{"name", h.name}, {"max_cores", h.max_cores}, {"k_limit", h.k_limit}});
  root["hosts"] = std::move(hosts);
  json csds = json::array();
  for (const auto& c : cal.csds) {
    json j{{"name", c.name}};
    if (c.bw_internal_bps) j["bw_internal_bps"] = *c.bw_internal_bps;
    if (c.bw_external_bps) j["bw_external_bps"] = *c.bw_external_bps;
    csds.push_back(std::move(j));
  }
  root["csds"] = std::move(csds);
  json records = json::array();
  for (const auto& m : cal.measurements)
    records.push_back({{"workload", m.workload},
                       {"target", m.target},
                       {"condition", calibration_detail::condition_to_json(m.condition)},
                       {"t_tx_s", m.t_tx},
                       {"t_comp_s", m.t_comp}});
  root["measurements"] = std::move(records);
  return root;
}

inline std::string save_calibration(const CalibrationSet& cal) { return calibration_to_json(cal).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Derivations

inline RatioSet derive_ratios(const CalibrationSet& cal, std::string_view workload, std::string_view host,
                              std::string_view csd, Count cores) {
  return ratios_from_profiles(cal.host_profile(workload, host), cal.csd_profile(workload, csd), cores);
}

// CTR against the host's normal single-core record.
inline WorkloadClass classify_workload(const CalibrationSet& cal, std::string_view workload,
                                       std::string_view host_ref) {
  cal.workload(workload);
  cal.host(host_ref);
  const auto& m = cal.measurement(workload, host_ref);
  WorkloadClass c;
  c.ctr = m.t_comp / (m.t_tx + m.t_comp);
  c.kind = c.ctr < kCtrThreshold ? WorkloadKind::io_intensive : WorkloadKind::compute_intensive;
  return c;
}

struct SlowdownFit {
  SlowdownFactors factors;
  bool clamped_tx = false;
  bool clamped_comp = false;
  std::vector<std::string> warnings;
};

inline SlowdownFit fit_slowdown(const MeasurementRecord& normal, const MeasurementRecord& overloaded) {
  if (normal.workload != overloaded.workload || normal.target != overloaded.target)
    throw DomainError("slow-down fit needs records for the same (workload, host); got (" + normal.workload + ", " +
                      normal.target + ") and (" + overloaded.workload + ", " + overloaded.target + ")");
  if (!normal.condition.is_normal()) throw DomainError("first record must be a normal-condition measurement");
  if (!(normal.t_tx > 0.0) || !(normal.t_comp > 0.0))
    throw DomainError("normal record needs t_tx > 0 and t_comp > 0 to fit slow-down factors");

  SlowdownFit fit;
  const auto ratio = [&](double over, double base, const char* name, bool& clamped) {
    const double raw = over / base;
    if (raw >= 1.0) return raw;
    clamped = true;
    fit.warnings.push_back(std::string(name) + " ratio " + detail::concat(raw) + " < 1 for (" + normal.workload +
                           ", " + normal.target + ", " + overloaded.condition.to_string() + "); clamped to 1");
    return 1.0;
  };
  fit.factors.sd_tx = ratio(overloaded.t_tx, normal.t_tx, "sd_tx", fit.clamped_tx);
  fit.factors.sd_comp = ratio(overloaded.t_comp, normal.t_comp, "sd_comp", fit.clamped_comp);
  return fit;
}

inline SlowdownFit fit_slowdown(const CalibrationSet& cal, std::string_view workload, std::string_view host,
                                std::uint64_t available_memory_bytes) {
  cal.host(host);
  return fit_slowdown(cal.measurement(workload, host),
                      cal.measurement(workload, host, Condition::overloaded(available_memory_bytes)));
}

}  // namespace csdplan
