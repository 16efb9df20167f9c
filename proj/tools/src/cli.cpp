#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "output.hpp"
#include "sjl/errors.hpp"
#include "sjlab/cli.hpp"

namespace sjl::cli {
namespace {

namespace fs = std::filesystem;

struct Failure {
  int code;
  std::string kind;
};

Failure classify_error(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return {kExitConfig, "ConfigError"};
  if (dynamic_cast<const PrecisionError*>(&e)) return {kExitPrecision, "PrecisionError"};
  if (dynamic_cast<const PreconditionError*>(&e)) return {kExitPrecondition, "PreconditionError"};
  return {kExitInternal, "InternalError"};
}

std::string guidance(const std::string& command, int code) {
  if (code == kExitPrecision) return "raise config.precision_bits or lower config.depth";
  if (code == kExitPrecondition && command == "equidist")
    return "set sweep.ensemble_size to at least 16; the standard errors need a real ensemble";
  if (code == kExitConfig) return "check the manifest against the schema in README.md";
  return "";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sjlab: transfer matrices, Pruefer angles and spectral phases of sparse Jacobi matrices"};
  app.name(args.empty() ? "sjlab" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);

  std::string manifest_path;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"trajectory", "Pruefer trajectory of one disorder sample with its equidistribution report"},
      {"phase-diagram", "SC / PP classification over the (beta, p, lambda) grid"},
      {"equidist", "Monte Carlo Weyl-sum and discrepancy diagnostics over an ensemble"},
      {"regimes", "verdicts and measured signatures for stretched-exponential sparsity"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--manifest", manifest_path, "YAML experiment manifest")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--workers", workers, "worker threads (overrides workers)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "disorder seed (overrides seed)");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::optional<fs::path> target;
  std::optional<Manifest> manifest;
  const auto start = std::chrono::steady_clock::now();
  try {
    manifest = load_manifest(manifest_path);
    if (seed) {
      manifest->seed = *seed;
      manifest->config.disorder.seed = *seed;
    }
    if (workers) manifest->workers = *workers;
    target = out_dir ? fs::path(*out_dir) : fs::path(manifest->output_dir);
    fs::create_directories(*target);

    std::vector<fs::path> written;
    if (command == "trajectory") written = cmd_trajectory(*manifest, *target);
    else if (command == "phase-diagram") written = cmd_phase_diagram(*manifest, *target);
    else if (command == "equidist") written = cmd_equidist(*manifest, *target);
    else written = cmd_regimes(*manifest, *target);

    for (const auto& p : written) out << p.string() << '\n';
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    err << "sjlab " << command << ": " << written.size() << " files in " << elapsed.count() << " s\n";
    return kExitOk;
  } catch (const std::exception& e) {
    const Failure f = classify_error(e);
    err << "sjlab " << command << ": " << f.kind << ": " << e.what() << '\n';
    const std::string hint = guidance(command, f.code);
    if (!hint.empty()) err << "  hint: " << hint << '\n';
    if (!target && out_dir) target = fs::path(*out_dir);
    if (target) {
      nlohmann::json j{{"command", command},
                       {"error", f.kind},
                       {"message", e.what()},
                       {"exit_code", f.code},
                       {"hint", hint},
                       {"schema_version", kSchemaVersion}};
      if (manifest) {
        j["manifest_hash"] = manifest_hash(*manifest);
        j["seed"] = manifest->seed;
      }
      try {
        detail::write_json(*target / "error.json", j);
      } catch (const std::exception& write_error) {
        err << "sjlab: could not write error.json: " << write_error.what() << '\n';
      }
    }
    return f.code;
  }
}

}  // namespace sjl::cli
