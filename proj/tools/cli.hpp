#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kwising/lattice.hpp"

namespace kwising::cli {

inline constexpr std::string_view kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kNumericalFailure = 3 };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// start:stop:steps, endpoints included. A bare number is the one-point range.
struct Range {
  double start = 0.0;
  double stop = 0.0;
  int steps = 1;

  std::vector<double> values() const;
};

/// Throws ConfigError naming `flag` on malformed input, steps < 1, or
/// start >= stop with steps > 1.
Range parse_range(std::string_view text, std::string_view flag);

/// "a,b,c" with three finite reals.
Couplings parse_couplings(std::string_view text);

enum class Command { FreeEnergy, Cylinder, Critical, Quantum, Verify };
enum class Format { Csv, Json };

std::string_view command_name(Command c) noexcept;

struct RunConfig {
  Command command = Command::FreeEnergy;
  Couplings couplings{1.0, 1.0, 1.0};
  Range beta{1.0, 1.0, 1};
  std::optional<int> M;
  std::optional<Range> J3;
  std::optional<Range> h;
  std::optional<int> trotter_n;
  double quad_tol = 1e-10;
  Format format = Format::Csv;
  std::optional<std::string> output_path;
  std::uint64_t seed = 7;
  bool reproducible = false;

  /// Throws ConfigError when the fields are inconsistent with `command`.
  void validate() const;
};

/// Empty cell: the quantity does not exist for this row (no critical point,
/// Trotter route not admissible).
using Cell = std::variant<std::monostate, double, std::int64_t, bool, std::string>;

struct RowError {
  std::size_t row = 0;
  std::string message;
  int exit_code = kNumericalFailure;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;  // only rows before the first failure
  std::optional<RowError> error;
  bool verification_failed = false;
};

/// Rows are computed in parallel and kept in index order; on the first
/// failing row the remaining rows are dropped and the failure recorded.
Table run_command(const RunConfig& cfg);

/// %.17g; non-finite values as nan, inf, -inf.
std::string format_real(double x);

void write_csv(std::ostream& os, const Table& t, const RunConfig& cfg);
void write_json(std::ostream& os, const Table& t, const RunConfig& cfg);

int exit_code(const Table& t) noexcept;

/// Full command-line entry point. Parse errors go to `err` with exit code 2.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kwising::cli
