#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "halfline/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw halfline::ValidationError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw halfline::ValidationError("cannot write output file '" + path + "'");
  out << text;
}

struct Options {
  std::string config;
  std::string out;
  std::string format;
  std::string mode;
};

// --out wins; otherwise the config's output sinks; otherwise stdout.
// JSON-only commands skip CSV sinks.
void emit(const Options& opt, const std::vector<halfline::OutputSink>& sinks,
          const std::function<std::string(halfline::OutputFormat)>& render, halfline::OutputFormat fallback) {
  const halfline::OutputFormat fmt = opt.format.empty() ? fallback : halfline::output_format_from_string(opt.format);
  if (!opt.out.empty()) {
    write_file(opt.out, render(fmt));
    return;
  }
  bool written = false;
  for (const auto& s : sinks) {
    if (fallback == halfline::OutputFormat::json && s.format != halfline::OutputFormat::json) continue;
    write_file(s.path, render(s.format));
    written = true;
  }
  if (!written) std::cout << render(fmt);
}

std::function<std::string(halfline::OutputFormat)> json_only(const std::string& text) {
  return [text](halfline::OutputFormat f) {
    if (f != halfline::OutputFormat::json) throw halfline::ValidationError("this command only writes json");
    return text;
  };
}

halfline::JobConfig load(const Options& opt, bool sweep) {
  auto cfg = halfline::parse_config(read_file(opt.config), sweep);
  if (!opt.mode.empty()) cfg.mode = halfline::jordan_mode_from_string(opt.mode);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix Schrodinger scattering on the half line"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    sub->add_option("--config", opt.config, "job configuration (JSON)")->required(config_required);
    sub->add_option("--out", opt.out, "output path (default: config outputs or stdout)");
    sub->add_option("--format", opt.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* bc = app.add_subcommand("bc", "boundary condition utilities");
  bc->require_subcommand(1);
  auto* bc_validate = bc->add_subcommand("validate", "check a boundary condition");
  auto* bc_convert = bc->add_subcommand("convert", "print every equivalent formulation");
  add_common(bc_validate, true);
  add_common(bc_convert, true);

  auto* sweep = app.add_subcommand("sweep", "S(k) on a k grid");
  add_common(sweep, true);

  auto* s0 = app.add_subcommand("s0", "zero-energy scattering matrix");
  add_common(s0, true);
  s0->add_option("--mode", opt.mode, "exact|numeric")->check(CLI::IsMember({"exact", "numeric"}));

  auto* verify = app.add_subcommand("verify", "run the identity and property checks");
  add_common(verify, true);
  verify->add_option("--mode", opt.mode, "exact|numeric")->check(CLI::IsMember({"exact", "numeric"}));

  auto* example = app.add_subcommand("example", "reproduce a worked example");
  std::string example_id;
  halfline::FixtureParams params;
  bool have_a = false;
  example->add_option("id", example_id, "7.1, 7.2, 7.3 or 7.4")->required();
  add_common(example, false);
  example->add_option("--mode", opt.mode, "exact|numeric")->check(CLI::IsMember({"exact", "numeric"}));
  auto* opt_a = example->add_option("--a", params.a, "parameter a");
  example->add_option("--b", params.b, "parameter b");
  example->add_option("--c", params.c, "parameter c");

  CLI11_PARSE(app, argc, argv);

  try {
    int code = halfline::kExitSuccess;
    if (bc_validate->parsed() || bc_convert->parsed()) {
      const std::string text = read_file(opt.config);
      const auto res = bc_validate->parsed() ? halfline::run_bc_validate(text) : halfline::run_bc_convert(text);
      emit(opt, {}, json_only(res.output), halfline::OutputFormat::json);
      code = res.exit_code;
    } else if (sweep->parsed()) {
      const auto cfg = load(opt, true);
      const auto rows = halfline::sweep_rows(cfg);
      emit(opt, cfg.outputs, [&](halfline::OutputFormat f) { return halfline::format_sweep(rows, cfg.bc.n(), f); },
           halfline::OutputFormat::csv);
      for (const auto& r : rows)
        if (!r.error.empty()) {
          std::cerr << "k = " << r.k << ": " << r.error << "\n";
          code = halfline::kExitNumerical;
        }
    } else if (s0->parsed()) {
      const auto cfg = load(opt, false);
      const auto res = halfline::run_s0(cfg);
      emit(opt, cfg.outputs, json_only(res.output), halfline::OutputFormat::json);
      code = res.exit_code;
    } else if (verify->parsed()) {
      const auto cfg = load(opt, false);
      const auto res = halfline::run_verify(cfg);
      emit(opt, cfg.outputs, json_only(res.output), halfline::OutputFormat::json);
      code = res.exit_code;
    } else if (example->parsed()) {
      have_a = opt_a->count() > 0;
      halfline::FixtureParams p = params;
      if (!have_a) p.a = halfline::default_fixture_params(example_id).a;
      const auto mode = opt.mode.empty() ? halfline::JordanMode::exact : halfline::jordan_mode_from_string(opt.mode);
      const auto res = halfline::run_example(example_id, mode, p);
      emit(opt, {}, json_only(res.output), halfline::OutputFormat::json);
      code = res.exit_code;
    }
    return code;
  } catch (const halfline::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return halfline::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
