#pragma once

// `sagsim run|sweep|contacts|validate`. Command bodies take explicit output
// streams so they can be exercised without a process boundary.

#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sagsim/config.hpp"
#include "sagsim/contacts.hpp"
#include "sagsim/errors.hpp"
#include "sagsim/io.hpp"
#include "sagsim/matching.hpp"
#include "sagsim/simulation.hpp"
#include "sagsim/validate.hpp"

namespace sagsim::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int config = 2;
inline constexpr int io = 3;
inline constexpr int validation = 4;
}  // namespace exit_code

struct Invocation {
  std::string subcommand;
  std::filesystem::path config_path;
  std::filesystem::path output_path;
  std::vector<std::string> overrides;
  std::optional<std::string> param;
  std::optional<std::string> values;
  std::optional<int> replications;
};

namespace detail {

inline bool wants_json(const std::filesystem::path& p) { return p.extension() == ".json"; }

/// Writes to `path` atomically, or to `out` when no path was given.
inline void emit(const std::filesystem::path& path, const std::string& contents,
                 std::ostream& out) {
  if (path.empty()) {
    out << contents;
  } else {
    write_file_atomic(path, contents);
  }
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::config;
  } catch (const InvalidParameter& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::config;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return exit_code::io;
  }
}

}  // namespace detail

inline int cmd_run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto settings = parse_settings(inv.config_path, inv.overrides);
    const auto series = run_scenario(settings.scenario);
    if (detail::wants_json(inv.output_path)) {
      write_file_atomic(inv.output_path, run_json(series).dump(2) + "\n");
    } else {
      detail::emit(inv.output_path, run_summary_csv(series), out);
      if (!inv.output_path.empty()) {
        auto steps = inv.output_path;
        steps += ".steps.csv";
        write_file_atomic(steps, run_steps_csv(series));
      }
    }
    return exit_code::ok;
  });
}

inline int cmd_sweep(const Invocation& inv, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    auto settings = parse_settings(inv.config_path, inv.overrides);
    if (inv.param) settings.sweep.param = *inv.param;
    if (inv.values) settings.sweep.values = parse_range("--values", *inv.values);
    if (inv.replications) settings.sweep.replications = *inv.replications;
    const auto& sw = settings.sweep;
    if (sw.param != "beam_cap" && sw.param != "num_haps")
      throw ConfigError("--param", "unknown sweep parameter '" + sw.param +
                                       "'; supported: " + kSupportedSweepParams);
    const auto result = sweep(settings.scenario, sw.param, sw.values, sw.replications);
    const std::string text =
        detail::wants_json(inv.output_path) ? sweep_json(result).dump(2) + "\n" : sweep_csv(result);
    detail::emit(inv.output_path, text, out);
    return exit_code::ok;
  });
}

inline int cmd_contacts(const Invocation& inv, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const auto settings = parse_settings(inv.config_path, inv.overrides);
    const auto& scenario = settings.scenario;
    const auto terg = build_terg(scenario, scenario.effective_horizon_s());
    const std::string text = detail::wants_json(inv.output_path)
                                 ? contact_plan_json(terg).dump(2) + "\n"
                                 : contact_plan_csv(terg);
    detail::emit(inv.output_path, text, out);
    return exit_code::ok;
  });
}

inline int cmd_validate(const Invocation& inv, std::ostream& out, std::ostream& err,
                        const Solver& solver = [](const VisibilityGraph& g, int cap) {
                          return optimal_assignment(g, cap);
                        }) {
  return detail::guarded(err, [&] {
    const auto settings = parse_settings(inv.config_path, inv.overrides);
    const auto report = validate_solver(solver, settings.validate.instances, settings.validate.seed);
    std::string text = "validate seed=" + std::to_string(report.seed) + ": " +
                       std::to_string(report.passed) + "/" +
                       std::to_string(report.passed + report.failed) + " passed\n";
    for (const auto& f : report.failures)
      text += "FAIL seed=" + std::to_string(report.seed) + " instance=" + std::to_string(f.index) +
              ": " + f.reason + "\n";
    detail::emit(inv.output_path, text, out);
    if (!report.ok()) err << report.failed << " validation failure(s)\n";
    return report.ok() ? exit_code::ok : exit_code::validation;
  });
}

inline int dispatch(const Invocation& inv, std::ostream& out, std::ostream& err) {
  if (inv.subcommand == "run") return cmd_run(inv, out, err);
  if (inv.subcommand == "sweep") return cmd_sweep(inv, out, err);
  if (inv.subcommand == "contacts") return cmd_contacts(inv, out, err);
  if (inv.subcommand == "validate") return cmd_validate(inv, out, err);
  err << "unknown subcommand '" << inv.subcommand << "' (expected run, sweep, contacts, validate)\n";
  return exit_code::usage;
}

inline int run_cli(int argc, char** argv) {
  CLI::App app{"Satellite-HAP link coordination simulator"};
  app.require_subcommand(1);
  Invocation inv;

  auto common = [&inv](CLI::App* sub) {
    sub->add_option("--config", inv.config_path, "key = value configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", inv.output_path,
                    "output file (written atomically; .json selects the structured export)");
    sub->add_option("--set", inv.overrides, "override a config key, key=value (repeatable)");
  };
  auto* run = app.add_subcommand("run", "evaluate every enabled scheme over one scenario");
  auto* sw = app.add_subcommand("sweep", "sweep beam_cap or num_haps with replications");
  auto* contacts = app.add_subcommand("contacts", "export the contact plan (TERG windows)");
  auto* validate = app.add_subcommand("validate", "check the optimal solver against enumeration");
  for (auto* sub : {run, sw, contacts, validate}) common(sub);
  sw->add_option("--param", inv.param, "swept parameter: beam_cap or num_haps");
  sw->add_option("--values", inv.values,
                 "values: a:b (inclusive), a:b:step, or a comma list such as 10,20,30");
  sw->add_option("--replications", inv.replications, "placement replications per value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_code::ok : exit_code::usage;
  }
  for (auto* sub : {run, sw, contacts, validate})
    if (sub->parsed()) inv.subcommand = sub->get_name();
  return dispatch(inv, std::cout, std::cerr);
}

}  // namespace sagsim::cli
