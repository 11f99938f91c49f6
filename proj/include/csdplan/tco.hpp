#pragma once

// Capital-cost comparison of an SSD-system baseline against CSD-system
// candidates sized for the same throughput. Money is carried in integer cents.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "csdplan/bep.hpp"
#include "csdplan/json_reader.hpp"

namespace csdplan {

using Cents = std::int64_t;

inline Cents to_cents(double dollars) {
  if (!std::isfinite(dollars)) throw DomainError("price must be finite");
  return static_cast<Cents>(std::llround(dollars * 100.0));
}

inline double to_dollars(Cents c) { return static_cast<double>(c) / 100.0; }

struct CpuModel {
  std::string name;
  double benchmark_mark = 0.0;
  Cents price = 0;
  double slowdown_vs_baseline = 1.0;

  bool operator==(const CpuModel&) const = default;
};

struct CostModel {
  Cents ssd_unit_price = 0;
  Cents csd_unit_price = 0;
  std::vector<CpuModel> cpu_catalog;

  const CpuModel& cpu(std::string_view name) const {
    for (const auto& c : cpu_catalog)
      if (c.name == name) return c;
    throw LookupError("unknown CPU '" + std::string(name) + "'");
  }

  void validate() const {
    if (ssd_unit_price <= 0) throw DomainError("ssd_unit_price must be > 0");
    if (csd_unit_price <= 0) throw DomainError("csd_unit_price must be > 0");
    for (const auto& c : cpu_catalog) {
      if (c.price <= 0) throw DomainError("CPU '" + c.name + "' price must be > 0");
      if (!(c.benchmark_mark > 0.0)) throw DomainError("CPU '" + c.name + "' benchmark_mark must be > 0");
      if (!(c.slowdown_vs_baseline >= 1.0))
        throw DomainError(detail::concat("CPU '", c.name, "' slowdown_vs_baseline must be >= 1, got ",
                                         c.slowdown_vs_baseline));
    }
  }

  bool operator==(const CostModel&) const = default;
};

struct BaselineSystem {
  std::string cpu;
  Count ssd_count = 1;
  std::string name = "SSD-system";
};

struct CandidateSystem {
  std::string cpu;
  Count csd_count = 1;
  std::string name;
};

enum class DeviceKind { ssd, csd };

constexpr std::string_view to_string(DeviceKind k) { return k == DeviceKind::ssd ? "ssd" : "csd"; }

struct TcoRow {
  std::string system_name;
  std::string cpu_name;
  Cents cpu_cost = 0;
  Count device_count = 0;
  DeviceKind device_kind = DeviceKind::ssd;
  Cents storage_cost = 0;
  Cents total_cost = 0;
  double mark_per_dollar = 0.0;
  double saved_fraction = 0.0;  // 1 - total / baseline total

  // Display form, rounded to the nearest whole percent.
  long saved_percent() const { return std::lround(saved_fraction * 100.0); }
};

struct TcoReport {
  std::vector<TcoRow> rows;  // baseline first
};

// mark_per_dollar uses the baseline CPU's mark in every row: candidates are sized to
// match baseline throughput, so the delivered performance is the baseline's.
inline TcoReport compare_tco(const BaselineSystem& baseline, const std::vector<CandidateSystem>& candidates,
                             const CostModel& costs) {
  costs.validate();
  const CpuModel& base_cpu = costs.cpu(baseline.cpu);
  if (base_cpu.slowdown_vs_baseline != 1.0)
    throw DomainError("baseline CPU '" + base_cpu.name + "' must have slowdown 1");
  if (baseline.ssd_count < 1) throw DomainError(detail::concat("ssd_count must be >= 1, got ", baseline.ssd_count));

  TcoReport report;
  const auto make_row = [&](const std::string& name, const CpuModel& cpu, Count count, DeviceKind kind,
                            Cents unit) {
    TcoRow row;
    row.system_name = name;
    row.cpu_name = cpu.name;
    row.cpu_cost = cpu.price;
    row.device_count = count;
    row.device_kind = kind;
    row.storage_cost = count * unit;
    row.total_cost = row.cpu_cost + row.storage_cost;
    row.mark_per_dollar = base_cpu.benchmark_mark / to_dollars(row.total_cost);
    return row;
  };
  report.rows.push_back(
      make_row(baseline.name, base_cpu, baseline.ssd_count, DeviceKind::ssd, costs.ssd_unit_price));
  const Cents base_total = report.rows.front().total_cost;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (c.csd_count < 1)
      throw DomainError(detail::concat("candidate ", i, " csd_count must be >= 1, got ", c.csd_count));
    TcoRow row = make_row(c.name.empty() ? "CSD-system " + std::to_string(i + 1) : c.name, costs.cpu(c.cpu),
                          c.csd_count, DeviceKind::csd, costs.csd_unit_price);
    row.saved_fraction = 1.0 - static_cast<double>(row.total_cost) / static_cast<double>(base_total);
    report.rows.push_back(std::move(row));
  }
  return report;
}

struct CandidateSizing {
  Count csd_count = 1;
  Count diff = 0;  // base_bep - csd_count
};

// CSD count needed when the candidate's host CPU is `cpu_slowdown` times slower.
inline CandidateSizing candidate_from_bep(const RatioSet& ratios, double cpu_slowdown, Count base_bep) {
  if (!(cpu_slowdown >= 1.0)) throw DomainError(detail::concat("cpu_slowdown must be >= 1, got ", cpu_slowdown));
  const Count n = s_overload(ratios, {1.0, cpu_slowdown});
  return {n, base_bep - n};
}

// ---------------------------------------------------------------------------
// JSON

inline CostModel parse_cost_model(const json_detail::json& j, const std::string& path = "") {
  using namespace json_detail;
  ObjectReader r(j, path);
  CostModel m;
  m.ssd_unit_price = to_cents(r.number("ssd_unit_price"));
  m.csd_unit_price = to_cents(r.number("csd_unit_price"));
  const auto& cat = as_array(r.required("cpu_catalog"), r.field_path("cpu_catalog"));
  for (std::size_t i = 0; i < cat.size(); ++i) {
    ObjectReader c(cat[i], index_path(r.field_path("cpu_catalog"), i));
    CpuModel cpu;
    cpu.name = c.string("name");
    cpu.benchmark_mark = c.number("benchmark_mark");
    cpu.price = to_cents(c.number("price"));
    cpu.slowdown_vs_baseline = c.optional_number("slowdown_vs_baseline").value_or(1.0);
    c.done();
    m.cpu_catalog.push_back(std::move(cpu));
  }
  r.done();
  return m;
}

inline CostModel parse_cost_model_text(std::string_view text) { return parse_cost_model(json_detail::parse_text(text)); }

inline json_detail::json cost_model_to_json(const CostModel& m) {
  json_detail::json cat = json_detail::json::array();
  for (const auto& c : m.cpu_catalog)
    cat.push_back({{"name", c.name},
                   {"benchmark_mark", c.benchmark_mark},
                   {"price", to_dollars(c.price)},
                   {"slowdown_vs_baseline", c.slowdown_vs_baseline}});
  return {{"ssd_unit_price", to_dollars(m.ssd_unit_price)},
          {"csd_unit_price", to_dollars(m.csd_unit_price)},
          {"cpu_catalog", cat}};
}

inline json_detail::json to_json(const TcoReport& report) {
  json_detail::json rows = json_detail::json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"system_name", r.system_name},
                    {"cpu_name", r.cpu_name},
                    {"cpu_cost", to_dollars(r.cpu_cost)},
                    {"device_count", r.device_count},
                    {"device_kind", to_string(r.device_kind)},
                    {"storage_cost", to_dollars(r.storage_cost)},
                    {"total_cost", to_dollars(r.total_cost)},
                    {"mark_per_dollar", r.mark_per_dollar},
                    {"saved_fraction", r.saved_fraction},
                    {"saved_vs_baseline_percent", r.saved_percent()}});
  return {{"rows", rows}};
}

inline std::string to_csv(const TcoReport& report) {
  std::string out =
      "system_name,cpu_name,cpu_cost,device_count,device_kind,storage_cost,total_cost,mark_per_dollar,"
      "saved_vs_baseline_percent\n";
  char buf[64];
  const auto money = [&](Cents c) {
    std::snprintf(buf, sizeof buf, "%lld.%02lld", static_cast<long long>(c / 100), static_cast<long long>(c % 100));
    return std::string(buf);
  };
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%.1f", r.mark_per_dollar);
    const std::string mpd = buf;
    out += r.system_name + "," + r.cpu_name + "," + money(r.cpu_cost) + "," + std::to_string(r.device_count) + "," +
           std::string(to_string(r.device_kind)) + "," + money(r.storage_cost) + "," + money(r.total_cost) + "," +
           mpd + "," + std::to_string(r.saved_percent()) + "\n";
  }
  return out;
}

}  // namespace csdplan
