#pragma once

// CSV and JSON writers shared by the subcommands.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace sjl::cli::detail {

struct Meta {
  std::string command;
  std::string manifest_hash;
  std::uint64_t seed = 0;
  int schema_version = 0;
  // Unset when the command performs no angle reductions.
  std::optional<std::size_t> min_certified_bits;
};

// 17 significant digits, so every double round-trips; inf and nan spelled out.
std::string fmt(double x);
std::string fmt(bool b);
std::string fmt(std::size_t n);
std::string fmt(std::int64_t n);

using Row = std::vector<std::string>;

// Metadata as '# key: value' lines, then the header row and the data rows.
void write_csv(const std::filesystem::path& path, const Meta& meta, const Row& header,
               const std::vector<Row>& rows);

nlohmann::json meta_json(const Meta& meta);

// A finite double as a JSON number, anything else as a string.
nlohmann::json number(double x);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace sjl::cli::detail
