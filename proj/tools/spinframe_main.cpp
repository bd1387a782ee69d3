#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "spinframe/job.hpp"

int main(int argc, char** argv) {
  CLI::App app{"spinframe: spin-field submanifold toolkit"};
  app.require_subcommand(1);

  std::string job_path, out_override, format_override;
  int threads_override = 0;

  CLI::App* run = app.add_subcommand("run", "run a JSON job file");
  run->add_option("job", job_path, "path to the job file")->required();
  run->add_option("--out", out_override, "override the report output path");
  run->add_option("--format", format_override, "override the report format (json|csv)")
      ->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--threads", threads_override, "worker threads for point sweeps");

  CLI::App* schema = app.add_subcommand("schema", "print the job file JSON schema");

  CLI11_PARSE(app, argc, argv);

  if (schema->parsed()) {
    std::fputs(spinframe::job_schema_text().c_str(), stdout);
    return 0;
  }

  try {
    spinframe::JobSpec job = spinframe::load_job(job_path);
    if (!out_override.empty()) job.out_path = out_override;
    if (!format_override.empty()) job.format = format_override;
    if (threads_override > 0) job.threads = threads_override;

    spinframe::JobResult result = spinframe::run_job(job);
    spinframe::write_report(job, result);
    if (job.out_path.empty())
      std::fputs(result.rendered.c_str(), stdout);
    else
      std::fprintf(stdout, "report written to %s (exit %d)\n", job.out_path.c_str(),
                   result.exit_code);
    return result.exit_code;
  } catch (const spinframe::SchemaError& e) {
    std::fprintf(stderr, "schema error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
