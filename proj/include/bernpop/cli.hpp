#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bernpop/bnb.hpp"
#include "bernpop/relax.hpp"

namespace bernpop {

enum class Mode { Relax, Bnb, Lyapunov, Bench };
enum class Arithmetic { Float, Rational };
enum class OutputFormat { Text, Json };

Mode parse_mode(const std::string& text);
std::string to_string(Mode mode);

struct RunSpec {
  Mode mode = Mode::Relax;
  /// Defaults: 2 for relax (every level up to it is reported), 0 otherwise.
  std::optional<Level> level;
  /// One entry elevates every axis; otherwise one entry per axis.
  std::vector<std::uint32_t> degree;
  /// Overrides the problem file's epsilon (default 1e-9).
  std::optional<double> epsilon;
  std::size_t max_boxes = 1000000;
  std::optional<SplitStrategy> split;
  Arithmetic arithmetic = Arithmetic::Float;
  OutputFormat output = OutputFormat::Text;
  unsigned jobs = 1;
  /// Problem files; in bench mode a directory (default fixture directory when empty).
  std::vector<std::string> inputs;
  /// Include the "timings" section in JSON reports.
  bool timings = true;
};

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotConverged = 2;

/// Executes the run and writes the report to `out`, diagnostics to `err`.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// Canonical serialisation used for every JSON report.
std::string dump_report(const nlohmann::ordered_json& report);

}  // namespace bernpop
