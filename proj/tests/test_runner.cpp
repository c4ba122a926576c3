#include <cstdlib>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "halfline/runner.hpp"
#include "halfline/scattering.hpp"

using namespace halfline;
using json = nlohmann::json;

namespace {

std::string error_of(const std::string& text, bool require_kgrid = false) {
  try {
    parse_config(text, require_kgrid);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

Matrix matrix_from_json(const json& j) {
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(r, c) = Complex(j[r][c][0].get<double>(), j[r][c][1].get<double>());
  return m;
}

struct ThreadEnv {
  explicit ThreadEnv(const char* v) { setenv("HALFLINE_NUM_THREADS", v, 1); }
  ~ThreadEnv() { unsetenv("HALFLINE_NUM_THREADS"); }
};

const char* kWellSweep = R"({
  "bc": {"U": [[[0.6, 0.8], [0, 0]], [[0, 0], [0, 1]]], "convention": "harmer"},
  "potential": {"pieces": [{"x_lo": 0, "x_hi": 0.7, "V": [[-2, [0.5, 0.5]], [[0.5, -0.5], 1]]},
                           {"x_lo": 0.7, "x_hi": 1.2, "V": [[1, 0], [0, -1]]}]},
  "kgrid": {"k_min": 0.2, "k_max": 4.0, "steps": 17}
})";

}  // namespace

TEST(Config, ParsesFullConfig) {
  const auto cfg = parse_config(R"({
    "n": 2,
    "bc": {"A": [[1, 0], [0, 0]], "B": [[0, 0], [0, 1]], "formulation": "general_ab"},
    "potential": {"n": 2, "pieces": [{"x_lo": 0, "x_hi": 1, "V": [[1, 0], [0, 2]]}]},
    "kgrid": {"k_min": 0.5, "k_max": 2, "steps": 4},
    "a": 0.5,
    "outputs": [{"format": "json", "path": "out.json"}],
    "tolerances": {"abs_tol": 1e-12, "rel_tol": 1e-11, "max_step": 0.1},
    "mode": "numeric"
  })", true);
  EXPECT_EQ(cfg.bc.n(), 2);
  EXPECT_DOUBLE_EQ(cfg.resolved_a(), 0.5);
  ASSERT_TRUE(cfg.kgrid.has_value());
  EXPECT_EQ(cfg.kgrid->points(), (std::vector<double>{0.5, 1.0, 1.5, 2.0}));
  ASSERT_EQ(cfg.outputs.size(), 1u);
  EXPECT_EQ(cfg.outputs[0].format, OutputFormat::json);
  EXPECT_DOUBLE_EQ(cfg.solver().max_step, 0.1);
  EXPECT_EQ(cfg.mode, JordanMode::numeric);
}

TEST(Config, AutoFreePointIsSupportEnd) {
  const auto cfg = parse_config(R"({"bc": {"angles": [1.0]},
    "potential": {"pieces": [{"x_lo": 0, "x_hi": 2.5, "V": [[1]]}]}, "a": "auto"})");
  EXPECT_DOUBLE_EQ(cfg.resolved_a(), 2.5);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_NE(error_of(R"({"bc": {"angles": [1.0]}, "colour": 1})").find("colour"), std::string::npos);
  EXPECT_NE(error_of(R"({"potential": {}})").find("/bc"), std::string::npos);
  EXPECT_NE(error_of(R"({"bc": {"angles": [1.0]}, "kgrid": {"k_min": 0, "k_max": 1, "steps": 2}})", true)
                .find("/kgrid/k_min"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"bc": {"angles": [1.0]}, "kgrid": {"k_min": 1, "k_max": 2, "steps": 0}})", true)
                .find("/kgrid/steps"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"bc": {"angles": [1.0]}, "tolerances": {"abs_tol": -1}})").find("/tolerances"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"bc": {"angles": [1.0]}, "mode": "fast"})").find("/mode"), std::string::npos);
  EXPECT_NE(error_of(R"({"bc": {"angles": [1.0]}, "a": "far"})").find("/a"), std::string::npos);
  EXPECT_NE(error_of(R"({"bc": {"angles": [1.0]},
    "potential": {"pieces": [{"x_lo": 0, "x_hi": 1, "V": [[1, 2]]}]}})").find("/potential"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"bc": {"angles": [1.0], "U": [[[1, 0]]]}})").find("/bc"), std::string::npos);
  EXPECT_NE(error_of("[1, 2]"), "");
  EXPECT_NE(error_of("{ not json"), "");
}

TEST(Config, SweepNeedsGrid) {
  EXPECT_NE(error_of(R"({"bc": {"angles": [1.0]}})", true), "");
}

TEST(Config, RejectsInvalidBoundaryPair) {
  EXPECT_NE(error_of(R"({"bc": {"A": [[1, 0], [0, 1]], "B": [[0, 1], [0, 0]]}})"), "");
}

TEST(Runner, ExitCodes) {
  EXPECT_EQ(exit_code_for(ErrorKind::validation), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::numerical), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::fixture_mismatch), 4);
}

TEST(Runner, SweepIsDeterministicAcrossThreadCounts) {
  const auto cfg = parse_config(kWellSweep, true);
  std::string one, four;
  {
    ThreadEnv env("1");
    one = run_sweep(cfg).output;
  }
  {
    ThreadEnv env("4");
    four = run_sweep(cfg).output;
    EXPECT_EQ(run_sweep(cfg).output, four);
  }
  EXPECT_EQ(one, four);
  EXPECT_EQ(run_sweep(cfg, OutputFormat::json).exit_code, kExitSuccess);
}

TEST(Runner, SweepRowsMatchSMatrix) {
  const auto cfg = parse_config(kWellSweep, true);
  const auto rows = sweep_rows(cfg);
  ASSERT_EQ(rows.size(), 17u);
  for (const auto& row : rows) {
    EXPECT_TRUE(row.error.empty());
    EXPECT_LT((row.s - smatrix(cfg.potential, cfg.bc, row.k, cfg.solver()).s).norm(), 1e-14);
    EXPECT_LT(row.unitarity_residual, 1e-9);
  }
  EXPECT_DOUBLE_EQ(rows.front().k, 0.2);
  EXPECT_DOUBLE_EQ(rows.back().k, 4.0);
}

TEST(Runner, SweepCsvLayout) {
  const auto cfg = parse_config(kWellSweep, true);
  const std::string csv = run_sweep(cfg).output;
  const std::string header = csv.substr(0, csv.find('\n'));
  EXPECT_EQ(header,
            "k,S1_1_re,S1_1_im,S1_2_re,S1_2_im,S2_1_re,S2_1_im,S2_2_re,S2_2_im,unitarity_residual,det_J_abs,error");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 18);
}

TEST(Runner, SweepJsonRoundTrip) {
  const auto cfg = parse_config(kWellSweep, true);
  const json out = json::parse(run_sweep(cfg, OutputFormat::json).output);
  ASSERT_EQ(out["rows"].size(), 17u);
  const Matrix s = matrix_from_json(out["rows"][3]["S"]);
  EXPECT_LT((s - sweep_rows(cfg)[3].s).norm(), 1e-15);
}

TEST(Runner, SZeroReport) {
  const auto cfg = parse_config(R"({"bc": {"angles": [1.5707963267948966, 3.141592653589793]}, "mode": "exact"})");
  const auto res = run_s0(cfg);
  ASSERT_EQ(res.exit_code, kExitSuccess);
  const json out = json::parse(res.output);
  EXPECT_EQ(out["mu"], 1);
  EXPECT_EQ(out["nu"], 1);
  const Matrix s0 = matrix_from_json(out["S0"]);
  EXPECT_LT(std::abs(s0(0, 0) - 1.0), 1e-12);
  EXPECT_LT(std::abs(s0(1, 1) + 1.0), 1e-12);
  for (const char* key : {"kappa", "eigenvalues", "chain_lengths", "involution_residual", "unitarity_residual",
                          "continuity_probes", "P1", "P2", "A1", "B1", "C1", "D0", "L_minus1"})
    EXPECT_TRUE(out.contains(key)) << key;
}

TEST(Runner, VerifyPassesForFreeAndWell) {
  for (const char* text :
       {R"({"bc": {"U": [[[0, 1], [0, 0]], [[0, 0], [-1, 0]]]}})",
        R"({"bc": {"angles": [3.141592653589793]}, "potential": {"pieces": [{"x_lo": 0, "x_hi": 1, "V": [[-1.5]]}]}})",
        kWellSweep}) {
    const auto cfg = parse_config(text);
    const auto items = verify_items(cfg);
    EXPECT_GE(items.size(), 12u);
    for (const auto& it : items) EXPECT_TRUE(it.pass) << it.name << " residual " << it.residual << " " << it.note;
    EXPECT_EQ(run_verify(cfg).exit_code, kExitSuccess);
  }
}

TEST(Runner, BcValidateReportsViolations) {
  const auto bad = run_bc_validate(R"({"bc": {"A": [[1, 0], [0, 1]], "B": [[0, 1], [0, 0]]}})");
  EXPECT_EQ(bad.exit_code, kExitValidation);
  const json j = json::parse(bad.output);
  EXPECT_FALSE(j["ok"].get<bool>());
  EXPECT_EQ(j["violations"][0]["rule"], "selfadjoint");
  const auto good = run_bc_validate(R"({"bc": {"angles": [1.0, 2.0]}})");
  EXPECT_EQ(good.exit_code, kExitSuccess);
}

TEST(Runner, BcConvertRoundTrips) {
  const std::string text = R"({"bc": {"A": [[0, 0, 1], [0, 0, 1], [0, 0, 1]], "B": [[-1, 0, 0], [1, -1, 0], [0, 1, 0]]}})";
  const auto res = run_bc_convert(text);
  ASSERT_EQ(res.exit_code, kExitSuccess);
  const json out = json::parse(res.output);
  const auto original = parse_config(text).bc;
  const auto from_u = from_unitary({matrix_from_json(out["harmer_unitary"]["U"]), UnitaryConvention::harmer});
  EXPECT_TRUE(bc_subspace_equal(original, from_u));
  const auto kos = BoundaryCondition::from_kostrykin(matrix_from_json(out["kostrykin_ab"]["A1"]),
                                                     matrix_from_json(out["kostrykin_ab"]["B1"]));
  EXPECT_TRUE(bc_subspace_equal(original, kos));
  const auto norm = BoundaryCondition::from_ab(matrix_from_json(out["normalized"]["A"]),
                                               matrix_from_json(out["normalized"]["B"]));
  EXPECT_LT(block_unitarity_residual(norm), 1e-12);
}

TEST(Runner, ExamplesPassInBothModes) {
  for (const auto& id : example_ids())
    for (auto mode : {JordanMode::exact, JordanMode::numeric}) {
      const auto rep = example_report(id, mode);
      EXPECT_TRUE(rep.pass()) << id << " " << to_string(mode) << "\n" << to_json(rep);
    }
}

TEST(Runner, ExampleDiscrepanciesAreReported) {
  EXPECT_FALSE(example_report("7.2", JordanMode::exact).discrepancies.empty());
  EXPECT_FALSE(example_report("7.3", JordanMode::exact).discrepancies.empty());
  EXPECT_TRUE(example_report("7.1", JordanMode::exact).discrepancies.empty());
  EXPECT_TRUE(example_report("7.4", JordanMode::exact).discrepancies.empty());
}

TEST(Runner, ExamplesWithOtherParameters) {
  EXPECT_TRUE(example_report("7.1", JordanMode::exact, {3.0, 1.0, 1.0}).pass());
  EXPECT_TRUE(example_report("7.3", JordanMode::exact, {0.5, 1.0, 1.0}).pass());
  EXPECT_TRUE(example_report("7.4", JordanMode::numeric, {-1.0, 0.25, 3.0}).pass());
  EXPECT_THROW(example_report("7.4", JordanMode::exact, {1.0, 0.0, 1.0}), ValidationError);
  EXPECT_THROW(example_report("8.1", JordanMode::exact), ValidationError);
}

TEST(Runner, RunExampleEmitsJson) {
  const auto res = run_example("7.1", JordanMode::exact, default_fixture_params("7.1"));
  EXPECT_EQ(res.exit_code, kExitSuccess);
  const json out = json::parse(res.output);
  EXPECT_EQ(out["id"], "7.1");
  EXPECT_DOUBLE_EQ(out["params"]["a"].get<double>(), 2.0);
}
