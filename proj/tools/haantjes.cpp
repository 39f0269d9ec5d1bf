#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hj/cli.hpp"

namespace {

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::optional<hj::Model> load(const std::string& path) {
  auto text = slurp(path);
  if (!text) {
    std::cerr << path << ": cannot read file\n";
    return std::nullopt;
  }
  try {
    return hj::parse_model(*text);
  } catch (const hj::ParseError& e) {
    std::cerr << path << ": error: " << e.what();
    if (!e.expected.empty()) {
      std::cerr << " (expected ";
      for (std::size_t i = 0; i < e.expected.size(); ++i) std::cerr << (i ? ", " : "") << e.expected[i];
      std::cerr << ")";
    }
    std::cerr << "\n";
    return std::nullopt;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Haantjes and Jacobi structure checker"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hj::kToolVersion);

  std::string model;
  std::uint64_t seed = 0;
  int samples = 16;
  double tol = 1e-9;
  std::string json_path;
  bool fail_fast = false, no_timing = false, quiet = false;
  int jobs = 0;

  auto* check = app.add_subcommand("check", "Run the check directives of a model");
  check->add_option("model", model, "Model file")->required();
  check->add_option("--seed", seed, "Seed for sampled zero tests");
  check->add_option("--samples", samples, "Sample points per zero test")->check(CLI::PositiveNumber);
  check->add_option("--tol", tol, "Relative tolerance for sampled zero tests")->check(CLI::PositiveNumber);
  check->add_option("--json", json_path, "Write the JSON report to this path ('-' for stdout)");
  check->add_flag("--fail-fast", fail_fast, "Stop at the first failing directive");
  check->add_flag("--no-timing", no_timing, "Omit wall times from the reports");
  check->add_option("--jobs", jobs, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
  check->add_flag("--quiet", quiet, "Do not print the table");

  auto* fmt = app.add_subcommand("fmt", "Print a model in canonical form");
  fmt->add_option("model", model, "Model file")->required();

  CLI11_PARSE(app, argc, argv);

  auto m = load(model);
  if (!m) return 2;
  if (fmt->parsed()) {
    std::cout << hj::format_model(*m);
    return 0;
  }

  hj::RunOptions opts;
  opts.sample = {seed, samples, tol};
  opts.fail_fast = fail_fast;
  opts.jobs = jobs;
  hj::RunReport rep = hj::run_checks(*m, opts);
  const bool timing = !no_timing;
  if (!quiet && json_path != "-") std::cout << hj::report_table(rep, timing);
  if (!json_path.empty()) {
    std::string body = hj::report_json(rep, std::filesystem::path(model).filename().string(), timing);
    if (json_path == "-") {
      std::cout << body;
    } else {
      std::ofstream out(json_path, std::ios::binary);
      if (!out) {
        std::cerr << json_path << ": cannot write report\n";
        return 2;
      }
      out << body;
    }
  }
  return rep.exit_code();
}
