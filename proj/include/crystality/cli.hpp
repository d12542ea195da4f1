#pragma once

#include "crystality/chain.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace crystality {

enum class OutputFormat { Text, Json };

struct CliConfig {
  enum class Command { Check, Run, DumpAst };

  Command command = Command::Check;
  std::string contract_path;
  std::optional<std::string> scenario_path;  // required by run
  std::uint64_t engines = 2;
  std::uint64_t addresses = 2;
  std::uint64_t seed = 0;
  std::optional<std::string> trace_path;
  OutputFormat format = OutputFormat::Text;
  TraceLevel trace_level = TraceLevel::Tx;
};

// Exit codes: 0 success, 1 checker errors or failed run, 2 unreadable or
// malformed input.
int cmd_check(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_run(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_dump_ast(const CliConfig& cfg, std::ostream& out, std::ostream& err);

int run_command(const CliConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace crystality
