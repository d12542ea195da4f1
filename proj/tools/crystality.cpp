#include "crystality/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>

using crystality::CliConfig;
using crystality::OutputFormat;

int main(int argc, char** argv) {
  CLI::App app{"Parser, checker and multi-engine simulator for Crystality contracts"};
  app.require_subcommand(1);

  CliConfig cfg;
  std::map<std::string, OutputFormat> formats{{"text", OutputFormat::Text}, {"json", OutputFormat::Json}};
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "Output format")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  };

  auto* check = app.add_subcommand("check", "Parse and statically check a contract");
  check->add_option("contract", cfg.contract_path, "Contract source file")->required();
  add_format(check);

  auto* run = app.add_subcommand("run", "Deploy a contract and run a scenario against it");
  run->add_option("contract", cfg.contract_path, "Contract source file")->required();
  std::string scenario;
  run->add_option("scenario", scenario, "Scenario JSON file")->required();
  run->add_option("--engines", cfg.engines, "Number of engines (n)")->check(CLI::PositiveNumber);
  run->add_option("--addresses", cfg.addresses, "Addresses per engine (k)")->check(CLI::PositiveNumber);
  run->add_option("--seed", cfg.seed, "Scheduler seed");
  std::string trace;
  run->add_option("--trace", trace, "Write trace JSON lines to this file instead of stdout");
  add_format(run);

  auto* dump = app.add_subcommand("dump-ast", "Print the parsed contract");
  dump->add_option("contract", cfg.contract_path, "Contract source file")->required();
  add_format(dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (const char* level = std::getenv("CRYSTALITY_TRACE_LEVEL"); level && *level) {
    auto parsed = crystality::trace_level_from_string(level);
    if (!parsed) {
      std::cerr << "error env CRYSTALITY_TRACE_LEVEL must be off, tx or step\n";
      return 2;
    }
    cfg.trace_level = *parsed;
  }

  if (check->parsed()) {
    cfg.command = CliConfig::Command::Check;
  } else if (run->parsed()) {
    cfg.command = CliConfig::Command::Run;
    cfg.scenario_path = scenario;
    if (!trace.empty()) cfg.trace_path = trace;
  } else {
    cfg.command = CliConfig::Command::DumpAst;
  }
  return crystality::run_command(cfg, std::cout, std::cerr);
}
