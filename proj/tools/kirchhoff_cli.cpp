#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kirchhoff/cli_io.hpp"
#include "kirchhoff/parallel.hpp"

using namespace kirchhoff;

namespace {

void print_config_error(const ConfigError& e) {
  std::cerr << "configuration rejected (" << e.violations().size() << " problem"
            << (e.violations().size() == 1 ? "" : "s") << "):\n";
  for (const std::string& v : e.violations()) std::cerr << "  " << v << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kirchhoff-type equation toolkit"};
  app.set_version_flag("--version", std::string(kToolkitVersion));
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: KIRCHHOFF_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  std::string run_path;
  std::string output_dir;
  std::string prefix;
  CLI::App* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("config", run_path, "Scenario JSON")->required();
  run->add_option("-o,--output-dir", output_dir, "Override output.directory");
  run->add_option("-p,--prefix", prefix, "Override output.prefix");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "Check a scenario file and print it normalized");
  validate->add_option("config", validate_path, "Scenario JSON")->required();

  std::string artifact;
  std::string plot_out;
  CLI::App* plot = app.add_subcommand("plotdata", "Convert an artifact to whitespace-separated columns");
  plot->add_option("artifact", artifact, "Trajectory CSV, sweep JSON, iterations JSON or inclusion CSV")
      ->required();
  plot->add_option("-o,--output", plot_out, "Output path (default: artifact with .dat extension)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  parallel::set_thread_count(threads > 0 ? threads : parallel::thread_count_from_env());

  try {
    if (*validate) {
      const ScenarioConfig c = load_config(validate_path);
      std::cout << c.to_json().dump(2) << '\n';
      return 0;
    }
    if (*run) {
      ScenarioConfig c = load_config(run_path);
      if (!output_dir.empty()) c.output_dir = output_dir;
      if (!prefix.empty()) c.prefix = prefix;
      const RunResult r = run_scenario(c);
      for (const std::string& a : r.artifacts) std::cout << a << '\n';
      if (r.exit_code != 0) std::cerr << "run failed: " << r.manifest.value("error", "error") << '\n';
      return r.exit_code;
    }
    if (*plot) {
      std::cout << emit_plotdata(artifact, plot_out) << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    print_config_error(e);
    return 1;
  } catch (const FileNotFoundError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const InvalidArgumentError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
