// Command-line front end: design, sweep, table1, validate, lloyd-max.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "splinecomp/commands.hpp"
#include "splinecomp/errors.hpp"

namespace cmd = splinecomp::commands;

namespace {

std::optional<double> parse_x1(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw splinecomp::DomainError("--x1 must be a number or 'auto'");
  return value;
}

int emit(const cmd::CommandOutput& output, const std::string& out_path) {
  auto manifest = output.manifest;
  if (out_path.empty()) {
    std::cout << output.body;
    manifest["outputs"].push_back("-");
    std::cerr << manifest.dump() << "\n";
    return output.exit_code;
  }
  const std::string manifest_path = out_path + ".manifest.json";
  manifest["outputs"] = {out_path, manifest_path};
  std::ofstream data(out_path, std::ios::binary);
  std::ofstream meta(manifest_path, std::ios::binary);
  if (!data || !meta) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return cmd::kExitUsage;
  }
  data << output.body;
  meta << manifest.dump(2) << "\n";
  return output.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Companding quantizer design from quadratic spline approximations of the optimal compressor"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cmd::kToolVersion));

  int levels = 16;
  std::string x1_text = "auto";
  double grid_step = 0.01;
  std::size_t samples = 10'000'000;
  std::uint64_t seed = 42;
  std::string format_text = "json";
  std::string out_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format_text, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", out_path, "Output file (manifest goes to <out>.manifest.json)");
  };
  auto add_levels = [&](CLI::App* sub) { sub->add_option("--levels", levels, "Number of output levels N"); };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--grid-step", grid_step, "Segment threshold sweep resolution")->check(CLI::PositiveNumber);
  };

  auto* design = app.add_subcommand("design", "Design the quantizer for one segment threshold");
  add_levels(design);
  design->add_option("--x1", x1_text, "Segment threshold, or 'auto' to sweep");
  add_grid(design);
  add_common(design);

  auto* sweep = app.add_subcommand("sweep", "SQNR as a function of the segment threshold");
  add_levels(sweep);
  add_grid(sweep);
  add_common(sweep);

  auto* table1 = app.add_subcommand("table1", "Midpoint, swept and Lloyd-Max SQNR for N = 16 and 32");
  add_grid(table1);
  add_common(table1);

  auto* validate = app.add_subcommand("validate", "Monte-Carlo check of the analytic distortion");
  add_levels(validate);
  validate->add_option("--x1", x1_text, "Segment threshold, or 'auto' to sweep");
  add_grid(validate);
  validate->add_option("--samples", samples, "Monte-Carlo sample count")->check(CLI::PositiveNumber);
  validate->add_option("--seed", seed, "Random seed");
  add_common(validate);

  auto* lloyd = app.add_subcommand("lloyd-max", "Lloyd-Max reference quantizer");
  add_levels(lloyd);
  add_common(lloyd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cmd::kExitUsage;
  }

  const auto format = format_text == "csv" ? cmd::Format::csv : cmd::Format::json;
  try {
    cmd::CommandOutput output;
    if (*design) {
      output = cmd::run_design({levels, parse_x1(x1_text), grid_step, format});
    } else if (*sweep) {
      output = cmd::run_sweep({levels, grid_step, format});
    } else if (*table1) {
      output = cmd::run_table1({grid_step, format});
    } else if (*validate) {
      output = cmd::run_validate({levels, parse_x1(x1_text), grid_step, samples, seed, format});
    } else {
      output = cmd::run_lloyd_max({levels, format});
    }
    return emit(output, out_path);
  } catch (const splinecomp::DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return cmd::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "design failure: " << e.what() << "\n";
    return cmd::kExitDesignFailure;
  }
}
