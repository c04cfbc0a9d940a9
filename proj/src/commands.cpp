#include "splinecomp/commands.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "splinecomp/errors.hpp"
#include "splinecomp/gauss.hpp"
#include "splinecomp/optimizer.hpp"
#include "splinecomp/oracles.hpp"
#include "splinecomp/quantizer.hpp"

namespace splinecomp::commands {

using nlohmann::json;

namespace {

std::string format_name(Format f) { return f == Format::json ? "json" : "csv"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) { row(header); }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_field(fields[i]);
    }
    out_ << "\r\n";
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

json rounded(const std::vector<double>& values) {
  json arr = json::array();
  for (double v : values) arr.push_back(round6(v));
  return arr;
}

json report_json(const DistortionReport& r) {
  return {{"granular", round6(r.granular)},
          {"overload", round6(r.overload)},
          {"overload_exact", round6(r.overload_exact)},
          {"total", round6(r.total)},
          {"sqnr_db", round6(r.sqnr_db)}};
}

json manifest(const std::string& command, json parameters) {
  return {{"command", command},
          {"parameters", std::move(parameters)},
          {"tool_version", kToolVersion},
          {"outputs", json::array()}};
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

void require_design_levels(int levels) {
  if (levels < 8 || levels % 2 != 0) {
    throw DomainError("--levels must be an even number >= 8, got " + std::to_string(levels));
  }
}

struct ResolvedThreshold {
  double x1;
  bool from_sweep;
};

ResolvedThreshold resolve_x1(int levels, const std::optional<double>& x1, double grid_step) {
  if (x1) {
    const double x_max = support_threshold({}, levels);
    if (!(*x1 > 0.0 && *x1 < x_max)) {
      throw DomainError("--x1 must lie in (0, " + format_number(x_max) + ")");
    }
    return {*x1, false};
  }
  return {sweep(levels, grid_step).best_x1, true};
}

std::string x1_parameter(const std::optional<double>& x1) {
  return x1 ? format_number(*x1) : std::string("auto");
}

}  // namespace

double round6(double value) {
  if (!std::isfinite(value) || value == 0.0) return value;
  return std::stod(format_number(value));
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

CommandOutput run_design(const DesignOptions& options) {
  require_design_levels(options.levels);
  const auto threshold = resolve_x1(options.levels, options.x1, options.grid_step);
  const auto config = two_segment_config(options.levels, threshold.x1);
  const auto result = design(config);
  const auto& q = result.quantizer;
  const auto jumps = knot_jumps(q.spline);

  CommandOutput out;
  out.manifest = manifest("design", {{"levels", options.levels},
                                     {"x1", x1_parameter(options.x1)},
                                     {"grid_step", options.grid_step},
                                     {"format", format_name(options.format)}});
  if (options.format == Format::json) {
    json segments = json::array();
    for (std::size_t i = 0; i < q.spline.size(); ++i) {
      const auto& s = q.spline[i];
      segments.push_back({{"lo", round6(s.lo)},
                          {"hi", round6(s.hi)},
                          {"r", round6(s.r)},
                          {"p", round6(s.p)},
                          {"q", round6(s.q)},
                          {"condition_number", round6(result.fit.condition_numbers[i])}});
    }
    json doc = {{"command", "design"},
                {"levels", options.levels},
                {"x_max", round6(config.x_max())},
                {"x1", round6(threshold.x1)},
                {"x1_from_sweep", threshold.from_sweep},
                {"step", round6(q.step)},
                {"spline", {{"segments", segments}, {"knot_jumps", rounded(jumps)}}},
                {"counts", q.counts},
                {"thresholds", rounded(q.thresholds)},
                {"reproduction_levels", rounded(q.levels)},
                {"y_max", round6(q.y_max)},
                {"distortion", report_json(result.report)}};
    out.body = dump(doc);
  } else {
    CsvWriter csv({"field", "index", "value"});
    auto put = [&](const std::string& f, std::size_t i, double v) {
      csv.row({f, std::to_string(i), format_number(v)});
    };
    put("levels", 0, options.levels);
    put("x_max", 0, config.x_max());
    put("x1", 0, threshold.x1);
    put("step", 0, q.step);
    for (std::size_t i = 0; i < q.spline.size(); ++i) {
      const auto& s = q.spline[i];
      put("segment_lo", i, s.lo);
      put("segment_hi", i, s.hi);
      put("r", i, s.r);
      put("p", i, s.p);
      put("q", i, s.q);
      put("condition_number", i, result.fit.condition_numbers[i]);
    }
    for (std::size_t i = 0; i < jumps.size(); ++i) put("knot_jump", i, jumps[i]);
    for (std::size_t i = 0; i < q.counts.size(); ++i) put("count", i, q.counts[i]);
    for (std::size_t i = 0; i < q.thresholds.size(); ++i) put("threshold", i, q.thresholds[i]);
    for (std::size_t i = 0; i < q.levels.size(); ++i) put("reproduction_level", i, q.levels[i]);
    put("y_max", 0, q.y_max);
    put("granular", 0, result.report.granular);
    put("overload", 0, result.report.overload);
    put("overload_exact", 0, result.report.overload_exact);
    put("total", 0, result.report.total);
    put("sqnr_db", 0, result.report.sqnr_db);
    out.body = csv.str();
  }
  return out;
}

CommandOutput run_sweep(const SweepOptions& options) {
  require_design_levels(options.levels);
  const auto result = sweep(options.levels, options.grid_step);

  CommandOutput out;
  out.manifest = manifest("sweep", {{"levels", options.levels},
                                    {"grid_step", options.grid_step},
                                    {"format", format_name(options.format)}});
  if (options.format == Format::json) {
    json rows = json::array();
    for (std::size_t i = 0; i < result.candidates.size(); ++i) {
      const auto& c = result.candidates[i];
      json row = {{"x1", round6(c.x1)}, {"valid", c.valid}, {"best", i == result.best_index}};
      if (c.valid) {
        row["sqnr_db"] = round6(c.sqnr_db);
        row["distortion"] = report_json(c.report);
      } else {
        row["failure"] = c.failure;
      }
      rows.push_back(std::move(row));
    }
    json doc = {{"command", "sweep"},
                {"levels", options.levels},
                {"x_max", round6(result.x_max)},
                {"grid_step", options.grid_step},
                {"best_x1", round6(result.best_x1)},
                {"best_sqnr_db", round6(result.best_sqnr_db)},
                {"spurious_peaks", rounded(result.spurious_peaks)},
                {"candidates", rows}};
    out.body = dump(doc);
  } else {
    CsvWriter csv({"x1", "sqnr_db", "granular", "overload", "total", "valid", "best"});
    for (std::size_t i = 0; i < result.candidates.size(); ++i) {
      const auto& c = result.candidates[i];
      if (c.valid) {
        csv.row({format_number(c.x1), format_number(c.sqnr_db), format_number(c.report.granular),
                 format_number(c.report.overload), format_number(c.report.total), "1",
                 i == result.best_index ? "1" : "0"});
      } else {
        csv.row({format_number(c.x1), "", "", "", "", "0", "0"});
      }
    }
    out.body = csv.str();
  }
  return out;
}

CommandOutput run_table1(const Table1Options& options) {
  struct Row {
    int levels;
    double x_max;
    double equ;
    double x1_num;
    double num;
    double opt;
  };
  std::vector<Row> rows;
  for (int levels : {16, 32}) {
    const double x_max = support_threshold({}, levels);
    const auto equ = design(two_segment_config(levels, x_max / 2)).report.sqnr_db;
    const auto swept = sweep(levels, options.grid_step);
    const auto opt = lloyd_max({}, levels).sqnr_db;
    rows.push_back({levels, x_max, equ, swept.best_x1, swept.best_sqnr_db, opt});
  }

  CommandOutput out;
  out.manifest = manifest("table1", {{"grid_step", options.grid_step}, {"format", format_name(options.format)}});
  if (options.format == Format::json) {
    json table = json::array();
    json series = json::array();
    for (const auto& r : rows) {
      const double bits = std::log2(static_cast<double>(r.levels));
      table.push_back({{"levels", r.levels},
                       {"x_max", round6(r.x_max)},
                       {"sqnr_equ_db", round6(r.equ)},
                       {"x1_num", round6(r.x1_num)},
                       {"sqnr_num_db", round6(r.num)},
                       {"sqnr_opt_db", round6(r.opt)}});
      series.push_back({{"bits", bits}, {"variant", "equ"}, {"sqnr_db", round6(r.equ)}});
      series.push_back({{"bits", bits}, {"variant", "num"}, {"sqnr_db", round6(r.num)}});
      series.push_back({{"bits", bits}, {"variant", "opt"}, {"sqnr_db", round6(r.opt)}});
    }
    out.body = dump({{"command", "table1"}, {"grid_step", options.grid_step}, {"table", table}, {"series", series}});
  } else {
    CsvWriter csv({"levels", "bits", "x_max", "sqnr_equ_db", "x1_num", "sqnr_num_db", "sqnr_opt_db"});
    for (const auto& r : rows) {
      csv.row({std::to_string(r.levels), format_number(std::log2(static_cast<double>(r.levels))),
               format_number(r.x_max), format_number(r.equ), format_number(r.x1_num), format_number(r.num),
               format_number(r.opt)});
    }
    out.body = csv.str();
  }
  return out;
}

CommandOutput run_validate(const ValidateOptions& options) {
  require_design_levels(options.levels);
  if (options.samples < 1) throw DomainError("--samples must be at least 1");
  const auto threshold = resolve_x1(options.levels, options.x1, options.grid_step);
  const auto result = design(two_segment_config(options.levels, threshold.x1));
  const auto exact = distortion_by_cells(result.quantizer);
  const auto mc = mc_distortion(result.quantizer, options.samples, options.seed);
  const double z = (mc.mean_distortion - exact.total) / mc.std_error;
  const bool pass = std::abs(z) <= 3.0;

  CommandOutput out;
  out.exit_code = pass ? kExitOk : kExitValidationFailed;
  out.manifest = manifest("validate", {{"levels", options.levels},
                                       {"x1", x1_parameter(options.x1)},
                                       {"grid_step", options.grid_step},
                                       {"samples", options.samples},
                                       {"seed", options.seed},
                                       {"format", format_name(options.format)}});
  const std::string verdict = pass ? "PASS" : "FAIL";
  if (options.format == Format::json) {
    json doc = {{"command", "validate"},
                {"levels", options.levels},
                {"x1", round6(threshold.x1)},
                {"samples", options.samples},
                {"seed", options.seed},
                {"analytic_distortion", round6(exact.total)},
                {"analytic_granular", round6(exact.granular)},
                {"analytic_overload", round6(exact.overload)},
                {"formula_distortion", round6(result.report.total)},
                {"mc_distortion", round6(mc.mean_distortion)},
                {"mc_std_error", round6(mc.std_error)},
                {"z_score", round6(z)},
                {"verdict", verdict}};
    out.body = dump(doc);
  } else {
    CsvWriter csv({"levels", "x1", "samples", "seed", "analytic_distortion", "formula_distortion",
                   "mc_distortion", "mc_std_error", "z_score", "verdict"});
    csv.row({std::to_string(options.levels), format_number(threshold.x1), std::to_string(options.samples),
             std::to_string(options.seed), format_number(exact.total), format_number(result.report.total),
             format_number(mc.mean_distortion), format_number(mc.std_error), format_number(z), verdict});
    out.body = csv.str();
  }
  return out;
}

CommandOutput run_lloyd_max(const LloydMaxOptions& options) {
  const auto result = lloyd_max({}, options.levels);
  CommandOutput out;
  out.manifest = manifest("lloyd-max", {{"levels", options.levels}, {"format", format_name(options.format)}});
  if (options.format == Format::json) {
    json doc = {{"command", "lloyd-max"},
                {"levels", options.levels},
                {"reproduction_levels", rounded(result.levels)},
                {"thresholds", rounded(result.thresholds)},
                {"distortion", round6(result.distortion)},
                {"sqnr_db", round6(result.sqnr_db)},
                {"iterations", result.iterations}};
    out.body = dump(doc);
  } else {
    CsvWriter csv({"index", "reproduction_level", "upper_threshold", "sqnr_db"});
    for (std::size_t i = 0; i < result.levels.size(); ++i) {
      csv.row({std::to_string(i), format_number(result.levels[i]),
               i < result.thresholds.size() ? format_number(result.thresholds[i]) : "inf",
               format_number(result.sqnr_db)});
    }
    out.body = csv.str();
  }
  return out;
}

}  // namespace splinecomp::commands
