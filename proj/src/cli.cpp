#include "crystality/cli.hpp"

#include "crystality/checker.hpp"
#include "crystality/parser.hpp"
#include "crystality/printer.hpp"
#include "crystality/scenario.hpp"
#include "crystality/serialize.hpp"

#include <fstream>
#include <sstream>

namespace crystality {

namespace {

struct InputError {
  std::string kind;  // "io", "parse", "scenario", "check"
  std::string message;
  Json detail;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError{"io", "cannot read " + path, nullptr};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ContractDecl load_contract(const std::string& path) {
  std::string source = read_file(path);
  try {
    return parse_contract(source);
  } catch (const ParseError& e) {
    throw InputError{"parse", path + ":" + e.what(), Json{{"line", e.line()}, {"column", e.column()}}};
  }
}

int report(const CliConfig& cfg, const InputError& e, std::ostream& out, std::ostream& err) {
  if (cfg.format == OutputFormat::Json) {
    Json error{{"kind", e.kind}, {"message", e.message}};
    if (!e.detail.is_null()) error["detail"] = e.detail;
    out << Json{{"ok", false}, {"exit_code", 2}, {"error", error}}.dump() << "\n";
  } else {
    err << "error " << e.kind << " " << e.message << "\n";
  }
  return 2;
}

}  // namespace

int cmd_check(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    ContractDecl c = load_contract(cfg.contract_path);
    CheckResult r = check_contract(c);
    int code = r.ok() ? 0 : 1;
    if (cfg.format == OutputFormat::Json) {
      out << Json{{"ok", r.ok()}, {"exit_code", code}, {"diagnostics", to_json(r.diagnostics)}}.dump() << "\n";
    } else {
      for (const auto& d : r.diagnostics) out << format(d) << "\n";
    }
    return code;
  } catch (const InputError& e) {
    return report(cfg, e, out, err);
  }
}

int cmd_dump_ast(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    ContractDecl c = load_contract(cfg.contract_path);
    if (cfg.format == OutputFormat::Json) {
      out << to_json(c).dump(2) << "\n";
    } else {
      out << pretty_print(c);
    }
    return 0;
  } catch (const InputError& e) {
    return report(cfg, e, out, err);
  }
}

int cmd_run(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (!cfg.scenario_path) throw InputError{"scenario", "run needs a scenario file", nullptr};
    ContractDecl c = load_contract(cfg.contract_path);
    CheckResult checked = check_contract(c);
    if (!checked.ok()) {
      std::string msg = cfg.contract_path + " does not pass the checker";
      for (const auto& d : checked.diagnostics) {
        if (d.severity == Severity::Error) msg += "\n" + format(d);
      }
      throw InputError{"check", msg, to_json(checked.diagnostics)};
    }

    std::string scenario_text = read_file(*cfg.scenario_path);
    ScenarioResult result;
    SystemParams params;
    try {
      Scenario scenario = parse_scenario(scenario_text);
      params = effective_params(scenario, SystemParams{cfg.engines, cfg.addresses, cfg.seed});
      ChainOptions opts;
      opts.level = cfg.trace_level;
      result = run_scenario(c, *checked.registry, scenario, params, opts);
    } catch (const ScenarioError& e) {
      throw InputError{"scenario", *cfg.scenario_path + ": " + e.what(), nullptr};
    }

    std::optional<std::ofstream> trace_file;
    if (cfg.trace_path) {
      trace_file.emplace(*cfg.trace_path);
      if (!*trace_file) throw InputError{"io", "cannot write " + *cfg.trace_path, nullptr};
      for (const auto& r : result.trace.records) *trace_file << to_json(r).dump() << "\n";
    }

    int code = result.passed() ? 0 : 1;
    if (cfg.format == OutputFormat::Json) {
      Json doc{{"ok", result.passed()}, {"exit_code", code}};
      doc["params"] = Json{{"n", params.n}, {"k", params.k}, {"seed", params.seed}};
      doc["failures"] = result.failures;
      if (!cfg.trace_path) {
        Json lines = Json::array();
        for (const auto& r : result.trace.records) lines.push_back(to_json(r));
        doc["trace"] = lines;
      }
      doc["final"] = to_json(result.trace.final);
      out << doc.dump() << "\n";
    } else {
      if (!cfg.trace_path) {
        for (const auto& r : result.trace.records) out << to_json(r).dump() << "\n";
      }
      for (const auto& f : result.failures) out << "FAIL " << f << "\n";
      out << (result.passed() ? "PASS" : "FAIL") << " " << *cfg.scenario_path << " (n=" << params.n
          << ", k=" << params.k << ", seed=" << params.seed << ", " << result.failures.size() << " failure(s))\n";
    }
    return code;
  } catch (const InputError& e) {
    return report(cfg, e, out, err);
  }
}

int run_command(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  switch (cfg.command) {
    case CliConfig::Command::Check: return cmd_check(cfg, out, err);
    case CliConfig::Command::Run: return cmd_run(cfg, out, err);
    case CliConfig::Command::DumpAst: return cmd_dump_ast(cfg, out, err);
  }
  return 2;
}

}  // namespace crystality
