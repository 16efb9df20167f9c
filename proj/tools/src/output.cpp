#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "sjl/errors.hpp"

namespace sjl::cli::detail {
namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(bool b) { return b ? "true" : "false"; }
std::string fmt(std::size_t n) { return std::to_string(n); }
std::string fmt(std::int64_t n) { return std::to_string(n); }

void write_csv(const std::filesystem::path& path, const Meta& meta, const Row& header,
               const std::vector<Row>& rows) {
  auto out = open_for_write(path);
  out << "# command: " << meta.command << '\n'
      << "# manifest_hash: " << meta.manifest_hash << '\n'
      << "# seed: " << meta.seed << '\n'
      << "# schema_version: " << meta.schema_version << '\n'
      << "# min_certified_bits: "
      << (meta.min_certified_bits ? std::to_string(*meta.min_certified_bits) : std::string("n/a"))
      << '\n';
  auto line = [&](const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_field(r[i]);
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw Error("write_csv: row width does not match the header");
    line(r);
  }
  if (!out) throw Error("write failed for " + path.string());
}

nlohmann::json meta_json(const Meta& meta) {
  nlohmann::json j{{"command", meta.command},
                   {"manifest_hash", meta.manifest_hash},
                   {"seed", meta.seed},
                   {"schema_version", meta.schema_version}};
  j["min_certified_bits"] =
      meta.min_certified_bits ? nlohmann::json(*meta.min_certified_bits) : nlohmann::json("n/a");
  return j;
}

nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return fmt(x);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  auto out = open_for_write(path);
  out << value.dump(2) << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace sjl::cli::detail
