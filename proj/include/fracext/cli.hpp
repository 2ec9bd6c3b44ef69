#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "fracext/types.hpp"

namespace fracext::cli {

using json = nlohmann::json;

/// Names accepted by `command`.
const std::vector<std::string>& commands();

/// One invocation: a command, its flat parameter object, optional sweep
/// ranges (parameter -> list of values) and output location.
struct RunConfig {
  std::string command;
  json params = json::object();
  json sweep = json::object();
  std::string output;  // path prefix; empty writes the record to stdout
  std::uint64_t seed = 0;
  int threads = 0;  // sweep parallelism, 0 = core count

  void validate() const;
};

/// Resolves {"fn": name, ...parameters} into a function. `s` is used by
/// power-stationary.
HolderFunction resolve_function(const json& params, const std::string& prefix = "");

/// A command's output: the JSON record plus named CSV tables.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

struct RunResult {
  json record;
  std::vector<std::pair<std::string, Table>> tables;
  int exit_code = 0;
};

/// Dispatches a single (non-sweep) run. Errors are caught and recorded;
/// exit codes: 0 ok, 2 invalid configuration, 3 computation failed.
RunResult run(const RunConfig& config);

/// Cartesian-product sweep over config.sweep; one table with a row per point
/// in lexicographic parameter order.
RunResult sweep(const RunConfig& config);

/// Builds a config from argv: `fracext <command> [--config file.json] [--key value ...]`.
/// Flags override values from the file.
RunConfig parse_arguments(int argc, const char* const* argv);

/// RFC-4180 CSV with 17 significant digits.
std::string to_csv(const Table& table);

/// Writes the record (and tables next to it) or prints the record to stdout.
void emit(const RunConfig& config, const RunResult& result);

/// Full program: parse, run or sweep, emit. Returns the exit code.
int main_entry(int argc, const char* const* argv);

}  // namespace fracext::cli
