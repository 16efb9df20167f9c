#pragma once

// The sjlab command-line tool as a library, so tests can drive it in-process.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sjl/model.hpp"

namespace sjl::cli {

inline constexpr int kSchemaVersion = 1;

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPrecision = 3;
inline constexpr int kExitPrecondition = 4;

struct Sweep {
  std::vector<double> lambda_grid;
  std::vector<double> p_grid;
  std::vector<double> beta_list;
  std::vector<double> gamma;
  std::size_t ensemble_size = 64;
};

struct EquidistSettings {
  std::vector<std::int64_t> h_list{1, 2, 3, 5, 8};
  std::vector<std::size_t> n_list{128, 512, 2048};
  // varphi / pi of the rational control energy, if one is requested.
  std::optional<Rational> control = Rational{1, 3};
};

struct RegimeSettings {
  std::size_t depth = 300;
  double c = 1.0;
  double p = 0.5;
  std::vector<double> alpha_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  bool decaying = true;
  double c1 = 1.0;
  double delta = 1.5;
};

struct Manifest {
  int schema_version = kSchemaVersion;
  SpectralConfig config;
  Sweep sweep;
  EquidistSettings equidist;
  RegimeSettings regimes;
  std::uint64_t seed = 0;
  std::string output_dir = "sjlab-out";
  std::size_t workers = 1;
};

// Throws ConfigError on malformed input, unknown keys or a schema mismatch.
Manifest parse_manifest(std::string_view yaml_text);
Manifest load_manifest(const std::filesystem::path& path);

// Canonical JSON of everything that influences results. The worker count and
// the output directory are left out, since neither changes any output.
std::string canonical_manifest(const Manifest& manifest);
// SHA-256 of canonical_manifest, hex encoded.
std::string manifest_hash(const Manifest& manifest);

// Each command writes its files into `out` and returns the paths written.
std::vector<std::filesystem::path> cmd_trajectory(const Manifest& manifest,
                                                  const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_phase_diagram(const Manifest& manifest,
                                                     const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_equidist(const Manifest& manifest,
                                                const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_regimes(const Manifest& manifest,
                                               const std::filesystem::path& out);

// Full command line including the program name. Errors are reported on `err`
// and, when the output directory is known, in error.json.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sjl::cli
