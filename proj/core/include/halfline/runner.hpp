#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "halfline/bc.hpp"
#include "halfline/fixtures.hpp"
#include "halfline/jordan.hpp"
#include "halfline/potential.hpp"
#include "halfline/solver.hpp"

namespace halfline {

/// Process exit code for a library error kind.
int exit_code_for(ErrorKind kind);
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitFixtureMismatch = 4;

enum class OutputFormat { csv, json };
std::string to_string(OutputFormat f);
OutputFormat output_format_from_string(const std::string& s);

struct KGrid {
  double k_min = 0.0;
  double k_max = 0.0;
  int steps = 1;  // number of grid points; linear spacing, k_max reached when steps > 1
  std::vector<double> points() const;
};

struct OutputSink {
  OutputFormat format = OutputFormat::csv;
  std::string path;
};

/// Boundary pair as written in a config, before validation.
struct BCInput {
  Matrix a, b;                 // for A/B input (kostrykin: A1, B1)
  Formulation formulation = Formulation::general_ab;
  std::optional<std::vector<double>> angles;
  std::optional<UnitaryBC> unitary;

  /// Validates and builds the pair; ValidationError on violations.
  BoundaryCondition build() const;
};

struct JobConfig {
  Potential potential = Potential::zero(1);
  BCInput bc_input;
  BoundaryCondition bc = from_angles(std::vector<double>{3.141592653589793});
  std::optional<KGrid> kgrid;
  std::optional<double> a;  // nullopt means "auto" (a = x_max)
  std::vector<OutputSink> outputs;
  SolverConfig tolerances;
  JordanMode mode = JordanMode::numeric;

  double resolved_a() const;
  SolverConfig solver() const;
};

/// Parses and validates a JSON job description. Unknown keys are rejected;
/// errors carry the JSON path of the offending field.
/// require_kgrid: the job is a sweep (k_min > 0 enforced).
JobConfig parse_config(std::string_view text, bool require_kgrid = false);

/// Only the "bc" object of a config, without validating the pair.
BCInput parse_bc_input(std::string_view text);

struct CommandResult {
  int exit_code = kExitSuccess;
  std::string output;
};

// bc -------------------------------------------------------------------------

CommandResult run_bc_validate(std::string_view text);
CommandResult run_bc_convert(std::string_view text);

// sweep ----------------------------------------------------------------------

struct SweepRow {
  double k = 0.0;
  Matrix s;
  double unitarity_residual = 0.0;
  double det_j_abs = 0.0;
  std::string error;  // empty on success
};

/// Evaluates S(k) on the grid, concurrently (HALFLINE_NUM_THREADS caps the
/// thread count). Rows come back in grid order.
std::vector<SweepRow> sweep_rows(const JobConfig& cfg);
std::string format_sweep(const std::vector<SweepRow>& rows, Eigen::Index n, OutputFormat fmt);
CommandResult run_sweep(const JobConfig& cfg, OutputFormat fmt = OutputFormat::csv);

// s0 -------------------------------------------------------------------------

CommandResult run_s0(const JobConfig& cfg);

// verify ---------------------------------------------------------------------

struct CheckItem {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

std::vector<CheckItem> verify_items(const JobConfig& cfg);
CommandResult run_verify(const JobConfig& cfg);

// example --------------------------------------------------------------------

struct ExampleReport {
  std::string id;
  std::string title;
  JordanMode mode = JordanMode::exact;
  std::vector<CheckItem> items;
  /// Printed entries that disagree with the printed boundary pair; reported
  /// but not counted as failures.
  std::vector<CheckItem> discrepancies;
  Matrix s0;
  Matrix s0_oracle;
  Matrix s0_printed;
  bool pass() const;
};

ExampleReport example_report(const std::string& id, JordanMode mode, const FixtureParams& params);
ExampleReport example_report(const std::string& id, JordanMode mode);
CommandResult run_example(const std::string& id, JordanMode mode, const FixtureParams& params);

std::string to_json(const ExampleReport& r);
std::string to_json(const std::vector<CheckItem>& items);

/// Thread count for parallel work: HALFLINE_NUM_THREADS if set and positive,
/// otherwise the hardware concurrency.
unsigned num_threads();

}  // namespace halfline
