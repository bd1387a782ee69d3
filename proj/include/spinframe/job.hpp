#pragma once
#include <map>
#include <optional>
#include <string>

#include "spinframe/json_io.hpp"

namespace spinframe {

// One batch job loaded from a JSON file. Construction validates the
// schema; anything malformed raises SchemaError.
struct JobSpec {
  std::string command;  // verify|extract|curvature|gcr|compose|immerse|example
  std::optional<SpinFieldSpec> field;
  std::vector<Vec4> points;
  std::optional<GridSpec> grid;
  FDConfig fd{};
  std::map<std::string, double> tolerances;
  std::string out_path;
  std::string format = "json";
  int threads = 0;

  // immerse
  std::optional<VielbeinField> vielbein;
  std::optional<PathSpec> path;
  std::array<double, 10> init_q{};
  std::string init_frame = "from_field";
  std::string cloud_path;
  std::string cloud_format = "csv";
  int steps_per_edge = 32;
  std::array<int, 3> obj_projection{1, 2, 3};
  std::optional<std::array<double, 10>> cloud_q;  // base q at the grid corner

  Json raw;  // echoed into the report header

  double tolerance(const std::string& name, double fallback) const {
    auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
  }
};

JobSpec job_from_json(const Json& j);
JobSpec load_job(const std::string& file_path);

struct JobResult {
  int exit_code = 0;  // 0 pass, 1 tolerance failure
  Json report;
  std::string rendered;  // report in the requested output format
};

// Runs the job; evaluation and domain failures propagate as exceptions
// (the CLI maps them to exit code 3, schema errors to 2).
JobResult run_job(const JobSpec& job);

// Writes `rendered` to job.out_path if set, else returns it for stdout.
void write_report(const JobSpec& job, const JobResult& result);

// JSON Schema document for the job file format.
std::string job_schema_text();

}  // namespace spinframe
