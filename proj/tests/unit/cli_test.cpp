#include "crystality/cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace crystality;
using nlohmann::json;

namespace {

std::string src(const std::string& rel) { return std::string(CRYSTALITY_SOURCE_DIR) + "/" + rel; }

struct Invocation {
  int code = 0;
  std::string out;
  std::string err;
};

Invocation invoke_cli(CliConfig cfg) {
  std::ostringstream out, err;
  Invocation r;
  r.code = run_command(cfg, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

CliConfig check(const std::string& contract, OutputFormat f = OutputFormat::Text) {
  CliConfig c;
  c.command = CliConfig::Command::Check;
  c.contract_path = src(contract);
  c.format = f;
  return c;
}

CliConfig run_cfg(const std::string& contract, const std::string& scenario, OutputFormat f = OutputFormat::Text) {
  CliConfig c;
  c.command = CliConfig::Command::Run;
  c.contract_path = src(contract);
  c.scenario_path = src(scenario);
  c.format = f;
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Every JSON-mode invocation prints exactly one parseable document.
json single_document(const Invocation& r) {
  EXPECT_TRUE(json::accept(r.out)) << r.out;
  EXPECT_TRUE(r.err.empty()) << r.err;
  return json::parse(r.out);
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  auto p = std::filesystem::temp_directory_path() / ("crystality_cli_test_" + name);
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST(Cli, CheckCleanContract) {
  Invocation r = invoke_cli(check("contracts/my_token.crys"));
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, CheckReportsAccessError) {
  Invocation r = invoke_cli(check("contracts/engine_reads_address.crys"));
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out.rfind("error access-read 6:14 ", 0), 0u) << r.out;

  json doc = single_document(invoke_cli(check("contracts/engine_reads_address.crys", OutputFormat::Json)));
  EXPECT_EQ(doc["ok"], false);
  EXPECT_EQ(doc["exit_code"], 1);
  ASSERT_EQ(doc["diagnostics"].size(), 1u);
  EXPECT_EQ(doc["diagnostics"][0]["code"], "access-read");
}

TEST(Cli, MissingFile) {
  Invocation r = invoke_cli(check("contracts/nope.crys"));
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error io ", 0), 0u);

  json doc = single_document(invoke_cli(check("contracts/nope.crys", OutputFormat::Json)));
  EXPECT_EQ(doc["exit_code"], 2);
  EXPECT_EQ(doc["error"]["kind"], "io");
}

TEST(Cli, ParseErrorCarriesPosition) {
  json doc = single_document(invoke_cli(check("tests/cli/malformed.crys", OutputFormat::Json)));
  EXPECT_EQ(doc["error"]["kind"], "parse");
  EXPECT_TRUE(doc["error"]["detail"].contains("line"));
  Invocation text = invoke_cli(check("tests/cli/malformed.crys"));
  EXPECT_EQ(text.code, 2);
  EXPECT_EQ(text.err.rfind("error parse ", 0), 0u);
}

TEST(Cli, RunTextOutput) {
  Invocation r = invoke_cli(run_cfg("contracts/my_token.crys", "scenarios/my_token_transfer.json"));
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  auto ls = lines(r.out);
  ASSERT_FALSE(ls.empty());
  EXPECT_EQ(ls.back().rfind("PASS ", 0), 0u);
  EXPECT_NE(ls.back().find("n=2, k=2, seed=7"), std::string::npos);
  for (std::size_t i = 0; i + 1 < ls.size(); ++i) {
    ASSERT_TRUE(json::accept(ls[i])) << ls[i];
    EXPECT_TRUE(json::parse(ls[i]).contains("type"));
  }
}

TEST(Cli, RunFailureLines) {
  Invocation r = invoke_cli(run_cfg("contracts/my_token.crys", "scenarios/my_token_tampered.json"));
  EXPECT_EQ(r.code, 1);
  auto ls = lines(r.out);
  ASSERT_GE(ls.size(), 2u);
  EXPECT_EQ(ls[ls.size() - 2].rfind("FAIL expect balance", 0), 0u);
  EXPECT_EQ(ls.back().rfind("FAIL ", 0), 0u);
}

TEST(Cli, RunJsonDocument) {
  json doc = single_document(invoke_cli(run_cfg("contracts/global_counter.crys", "scenarios/global_counter.json",
                                         OutputFormat::Json)));
  EXPECT_EQ(doc["ok"], true);
  EXPECT_EQ(doc["exit_code"], 0);
  EXPECT_EQ(doc["params"]["seed"], 3);
  EXPECT_TRUE(doc["failures"].empty());
  EXPECT_TRUE(doc["trace"].is_array());
  EXPECT_TRUE(doc["final"].is_object());

  json failed = single_document(invoke_cli(run_cfg("contracts/my_token.crys", "scenarios/my_token_tampered.json",
                                            OutputFormat::Json)));
  EXPECT_EQ(failed["exit_code"], 1);
  EXPECT_EQ(failed["failures"].size(), 1u);
}

TEST(Cli, RunRejectsUncheckedContract) {
  Invocation r = invoke_cli(run_cfg("contracts/engine_reads_address.crys", "scenarios/my_token_transfer.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error check ", 0), 0u);
  json doc = single_document(invoke_cli(run_cfg("contracts/engine_reads_address.crys", "scenarios/my_token_transfer.json",
                                         OutputFormat::Json)));
  EXPECT_EQ(doc["error"]["kind"], "check");
  EXPECT_TRUE(doc["error"]["detail"].is_array());
}

TEST(Cli, RunWithoutScenario) {
  CliConfig c = run_cfg("contracts/my_token.crys", "x");
  c.scenario_path.reset();
  EXPECT_EQ(invoke_cli(c).code, 2);
}

TEST(Cli, RunWithMalformedScenario) {
  auto bad = temp_file("bad.json", "{\"steps\": [{\"warp\": 1}]}");
  CliConfig c = run_cfg("contracts/my_token.crys", "x", OutputFormat::Json);
  c.scenario_path = bad.string();
  Invocation r = invoke_cli(c);
  EXPECT_EQ(r.code, 2);
  json doc = single_document(r);
  EXPECT_EQ(doc["error"]["kind"], "scenario");
  std::filesystem::remove(bad);
}

TEST(Cli, CommandLineParamsAreDefaults) {
  auto scenario = temp_file("params.json", R"({"steps": [
    {"expect": {"engine": 3, "address": 4, "var": "balance", "value": 0}}
  ]})");
  CliConfig c = run_cfg("contracts/my_token.crys", "x", OutputFormat::Json);
  c.scenario_path = scenario.string();
  EXPECT_EQ(invoke_cli(c).code, 1);
  c.engines = 3;
  c.addresses = 4;
  c.seed = 11;
  Invocation r = invoke_cli(c);
  EXPECT_EQ(r.code, 0);
  json doc = single_document(r);
  EXPECT_EQ(doc["params"], (json{{"n", 3}, {"k", 4}, {"seed", 11}}));
  std::filesystem::remove(scenario);
}

TEST(Cli, TraceFile) {
  auto path = std::filesystem::temp_directory_path() / "crystality_cli_test_trace.jsonl";
  CliConfig c = run_cfg("contracts/my_token.crys", "scenarios/my_token_transfer.json");
  c.trace_path = path.string();
  c.trace_level = TraceLevel::Step;
  Invocation r = invoke_cli(c);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out).size(), 1u);
  std::ifstream in(path);
  std::size_t steps = 0, total = 0;
  for (std::string line; std::getline(in, line); ++total) {
    ASSERT_TRUE(json::accept(line)) << line;
    if (json::parse(line)["type"] == "step") ++steps;
  }
  EXPECT_GT(steps, 0u);
  EXPECT_GT(total, steps);
  std::filesystem::remove(path);

  c.trace_path = "/nonexistent-dir/trace.jsonl";
  EXPECT_EQ(invoke_cli(c).code, 2);
}

TEST(Cli, TraceLevelOff) {
  CliConfig c = run_cfg("contracts/my_token.crys", "scenarios/my_token_transfer.json", OutputFormat::Json);
  c.trace_level = TraceLevel::Off;
  json doc = single_document(invoke_cli(c));
  EXPECT_TRUE(doc["trace"].empty());
}

TEST(Cli, DumpAst) {
  CliConfig c = check("contracts/my_token.crys", OutputFormat::Json);
  c.command = CliConfig::Command::DumpAst;
  json doc = single_document(invoke_cli(c));
  EXPECT_EQ(doc["contract"], "MyToken");

  c.format = OutputFormat::Text;
  Invocation text = invoke_cli(c);
  EXPECT_EQ(text.code, 0);
  EXPECT_EQ(text.out.rfind("contract MyToken {", 0), 0u);

  c.contract_path = src("tests/cli/malformed.crys");
  EXPECT_EQ(invoke_cli(c).code, 2);
}
