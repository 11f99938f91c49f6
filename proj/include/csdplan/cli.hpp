#pragma once

// Command-line front end. run() is callable in-process for tests; the
// executable in tools/ only forwards argv to it.
//
// Exit codes: 0 ok, 1 usage or argument error, 2 calibration invalid,
// 3 no break-even point within the oracle bound, 4 closed form and oracle disagree.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csdplan/planner.hpp"
#include "csdplan/service.hpp"

namespace csdplan::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kCalibrationInvalid = 2, kInfeasible = 3, kInconsistent = 4 };

namespace cli_detail {

struct CalibrationFailure {
  std::string message;
};

inline CalibrationSet load(const std::string& path) {
  try {
    return load_calibration_file(path);
  } catch (const ValidationError& e) {
    throw CalibrationFailure{path + ": " + e.what()};
  } catch (const ParseError& e) {
    throw CalibrationFailure{path + ": " + e.what()};
  } catch (const LookupError& e) {
    throw CalibrationFailure{e.what()};
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LookupError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace cli_detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Capacity planner for computational storage drives", "csdplan"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string format = "json";
  std::string output_path;
  const auto add_output = [&](CLI::App* sub, bool tabular) {
    auto* opt = sub->add_option("--format", format, "Output format")->capture_default_str();
    opt->check(tabular ? CLI::IsMember({"json", "csv"}) : CLI::IsMember({"json"}));
    sub->add_option("-o,--output", output_path, "Write results to this file instead of standard output");
  };

  std::string cal_path;
  const auto add_calibration = [&](CLI::App* sub) {
    sub->add_option("calibration", cal_path, "Calibration file (default: $CSDPLAN_CALIBRATION)")
        ->envname("CSDPLAN_CALIBRATION")
        ->required();
  };

  SolveRequest solve;
  std::optional<double> sd_tx;
  std::optional<double> sd_comp;
  std::optional<std::uint64_t> overload_memory;
  std::optional<Count> k_limit;
  std::optional<Count> m_max;
  const auto add_scenario = [&](CLI::App* sub) {
    sub->add_option("--workload", solve.workload, "Workload name")->required();
    sub->add_option("--host", solve.host, "Host name")->required();
    sub->add_option("--csd", solve.csd, "CSD name")->required();
    sub->add_option("--cores", solve.cores, "Host cores")->required();
    sub->add_option("--k-limit", k_limit, "Override the host's SSD saturation count");
  };

  auto* validate_cmd = app.add_subcommand("validate", "Check a calibration file");
  add_calibration(validate_cmd);
  add_output(validate_cmd, false);

  auto* classify_cmd = app.add_subcommand("classify", "CTR class of every (workload, host) pair");
  add_calibration(classify_cmd);
  add_output(classify_cmd, true);

  auto* solve_cmd = app.add_subcommand("solve", "Break-even CSD count for one scenario");
  add_calibration(solve_cmd);
  add_scenario(solve_cmd);
  solve_cmd->add_option("--sd-tx", sd_tx, "Host transfer slow-down (>= 1)");
  solve_cmd->add_option("--sd-comp", sd_comp, "Host compute slow-down (>= 1)");
  solve_cmd->add_option("--overload-memory", overload_memory,
                        "Fit slow-down from the overloaded record at this available memory (bytes)");
  solve_cmd->add_option("--m-max", m_max, "Oracle search bound (default 4*k_limit+64)");
  add_output(solve_cmd, true);

  std::vector<std::string> configs;
  std::string normalize_to;
  Count curve_m_max = 16;
  auto* curves_cmd = app.add_subcommand("curves", "Normalized throughput against device count");
  add_calibration(curves_cmd);
  curves_cmd->add_option("--workload", solve.workload, "Workload name")->required();
  curves_cmd->add_option("--config", configs, "host:<name>:<cores>[:<k_limit>] or csd:<name>; repeatable")
      ->required();
  curves_cmd->add_option("--normalize-to", normalize_to, "Descriptor whose m=1 throughput is 1.0")->required();
  curves_cmd->add_option("--m-max", curve_m_max, "Largest device count")->capture_default_str();
  add_output(curves_cmd, true);

  std::string mode = "hardware";
  std::string axis_x;
  std::string axis_y;
  unsigned threads = 0;
  const auto add_sweep = [&](CLI::App* sub) {
    add_calibration(sub);
    add_scenario(sub);
    sub->add_option("--mode", mode, "hardware, overload or system")
        ->check(CLI::IsMember({"hardware", "overload", "system"}))
        ->capture_default_str();
    sub->add_option("--axis-x", axis_x, "param:start:stop:step or param:v1,v2,...")->required();
    sub->add_option("--axis-y", axis_y, "param:start:stop:step or param:v1,v2,...")->required();
    sub->add_option("--sd-tx", sd_tx, "Base host transfer slow-down (system mode)");
    sub->add_option("--sd-comp", sd_comp, "Base host compute slow-down (system mode)");
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
    add_output(sub, true);
  };
  auto* sweep_cmd = app.add_subcommand("sweep", "BEP surface over two parameters");
  add_sweep(sweep_cmd);
  Count contour_value = 1;
  auto* iso_cmd = app.add_subcommand("iso", "Grid points of a sweep whose BEP equals a value");
  add_sweep(iso_cmd);
  iso_cmd->add_option("--c", contour_value, "BEP value to extract")->required();

  std::vector<double> sd_comp_values;
  auto* diff_cmd = app.add_subcommand("diff", "BEP and its drop from the base as the host CPU slows down");
  add_calibration(diff_cmd);
  add_scenario(diff_cmd);
  diff_cmd->add_option("--sd-comp-values", sd_comp_values, "Comma-separated sd_comp values")
      ->delimiter(',')
      ->required();
  add_output(diff_cmd, true);

  std::string tco_path;
  auto* tco_cmd = app.add_subcommand("tco", "Cost comparison of a baseline and candidate systems");
  tco_cmd->add_option("request", tco_path, "JSON file with baseline, candidates and cost_model")->required();
  add_output(tco_cmd, true);

  ServerConfig server;
  std::string serve_cal;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
  serve_cmd->add_option("--calibration", serve_cal, "Calibration file")->envname("CSDPLAN_CALIBRATION")->required();
  serve_cmd->add_option("--port", server.port, "Port (0 picks a free one)")->capture_default_str();
  serve_cmd->add_option("--bind", server.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--static-root", server.static_root, "Directory served under /");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = nullptr;
    for (const auto* s : app.get_subcommands()) sub = s;
    err << (sub ? sub->help() : app.help());
    return kUsage;
  }

  const auto emit = [&](const std::string& text) -> bool {
    if (output_path.empty()) {
      out << text;
      return true;
    }
    std::ofstream f(output_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << output_path << "'\n";
      return false;
    }
    f << text;
    return static_cast<bool>(f);
  };
  const auto emit_json = [&](const json& j) { return emit(j.dump(2) + "\n"); };
  const bool csv = format == "csv";
  solve.k_limit = k_limit;

  try {
    if (validate_cmd->parsed()) {
      const CalibrationSet cal = cli_detail::load(cal_path);
      json warnings = json::array();
      for (const auto& w : cal.workloads)
        for (const auto& h : cal.hosts)
          for (const auto& c : cal.overloaded_conditions(w.name, h.name))
            for (const auto& msg : fit_slowdown(cal, w.name, h.name, *c.overloaded_memory_bytes).warnings)
              warnings.push_back(msg);
      for (const auto& msg : warnings) err << "warning: " << msg.get<std::string>() << "\n";
      return emit_json({{"valid", true},
                        {"workloads", cal.workloads.size()},
                        {"hosts", cal.hosts.size()},
                        {"csds", cal.csds.size()},
                        {"measurements", cal.measurements.size()},
                        {"warnings", warnings}})
                 ? kOk
                 : kUsage;
    }
    if (classify_cmd->parsed()) {
      const CalibrationSet cal = cli_detail::load(cal_path);
      return emit(csv ? classification_csv(cal) : classification_table(cal).dump(2) + "\n") ? kOk : kUsage;
    }
    if (solve_cmd->parsed()) {
      const CalibrationSet cal = cli_detail::load(cal_path);
      solve.sd_tx = sd_tx;
      solve.sd_comp = sd_comp;
      solve.overload_memory_bytes = overload_memory;
      solve.m_max = m_max;
      const SolveOutcome o = solve_scenario(cal, solve);
      for (const auto& w : o.warnings) err << "warning: " << w << "\n";
      bool written = false;
      if (csv) {
        std::string text = "bep,method,saturated,infeasible,oracle_bep,consistent\n";
        text += (o.closed.infeasible ? "" : std::to_string(o.closed.bep)) + "," + std::string(to_string(o.closed.method)) +
                "," + (o.closed.saturated ? "true" : "false") + "," + (o.closed.infeasible ? "true" : "false") + "," +
                (o.oracle.infeasible ? "" : std::to_string(o.oracle.bep)) + "," + (o.consistent ? "true" : "false") +
                "\n";
        written = emit(text);
      } else {
        written = emit_json(to_json(o));
      }
      if (!written) return kUsage;
      if (!o.consistent) {
        err << "error: closed form (" << (o.closed.infeasible ? std::string("infeasible") : std::to_string(o.closed.bep))
            << ") and oracle (" << (o.oracle.infeasible ? std::string("infeasible") : std::to_string(o.oracle.bep))
            << ") disagree\n";
        return kInconsistent;
      }
      if (o.oracle.infeasible) {
        err << "error: no break-even point within m <= " << o.oracle.searched_bound << "\n";
        return kInfeasible;
      }
      return kOk;
    }
    if (curves_cmd->parsed()) {
      const CalibrationSet cal = cli_detail::load(cal_path);
      CurvesRequest req;
      req.workload = solve.workload;
      for (const auto& c : configs) req.configs.push_back(parse_descriptor(c));
      req.normalize_to = parse_descriptor(normalize_to);
      req.m_max = curve_m_max;
      const CurveSet curves = run_curves(cal, req);
      return emit(csv ? to_csv(curves) : to_json(curves).dump(2) + "\n") ? kOk : kUsage;
    }
    if (sweep_cmd->parsed() || iso_cmd->parsed()) {
      const CalibrationSet cal = cli_detail::load(cal_path);
      SweepRequest req;
      req.workload = solve.workload;
      req.host = solve.host;
      req.csd = solve.csd;
      req.cores = solve.cores;
      req.mode = parse_sweep_mode(mode);
      req.axis_x = parse_axis(axis_x);
      req.axis_y = parse_axis(axis_y);
      req.sd_tx = sd_tx;
      req.sd_comp = sd_comp;
      req.k_limit = k_limit;
      const BepSurface s = run_sweep(cal, req, 0, SweepOptions{threads});
      if (sweep_cmd->parsed()) return emit(csv ? to_csv(s) : to_json(s).dump(2) + "\n") ? kOk : kUsage;
      const auto points = iso_bep_contour(s, contour_value);
      return emit(csv ? contour_to_csv(points) : contour_to_json(s, contour_value, points).dump(2) + "\n") ? kOk
                                                                                                          : kUsage;
    }
    if (diff_cmd->parsed()) {
      const CalibrationSet cal = cli_detail::load(cal_path);
      if (k_limit) throw DomainError("--k-limit does not apply to diff");
      const auto series = run_diff(cal, {solve.workload, solve.host, solve.csd, solve.cores, sd_comp_values});
      return emit(csv ? to_csv(series) : to_json(series).dump(2) + "\n") ? kOk : kUsage;
    }
    if (tco_cmd->parsed()) {
      const TcoReport report = run_tco(parse_tco_request(json_detail::parse_text(cli_detail::read_file(tco_path))));
      return emit(csv ? to_csv(report) : to_json(report).dump(2) + "\n") ? kOk : kUsage;
    }
    if (serve_cmd->parsed()) {
      Session session(cli_detail::load(serve_cal), serve_cal);
      Server srv(session, server);
      const int port = srv.bind();
      err << "listening on http://" << server.host << ":" << port << "\n" << std::flush;
      return srv.listen() ? kOk : kUsage;
    }
  } catch (const cli_detail::CalibrationFailure& f) {
    err << "error: calibration invalid: " << f.message << "\n";
    return kCalibrationInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  err << app.help();
  return kUsage;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace csdplan::cli
