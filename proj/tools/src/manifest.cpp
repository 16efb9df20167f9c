#include <yaml-cpp/yaml.h>

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sjl/errors.hpp"
#include "sjlab/cli.hpp"

namespace sjl::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("manifest: " + where + ": " + what);
}

void check_keys(const YAML::Node& node, const std::string& where, std::set<std::string> allowed) {
  if (!node.IsMap()) fail(where, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) fail(where, "unknown key '" + key + "'");
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& where) {
  if (!node.IsScalar()) fail(where, "expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(where, "cannot read '" + node.Scalar() + "'");
  }
}

template <class T>
T scalar_or(const YAML::Node& parent, const char* key, const std::string& where, T fallback) {
  const YAML::Node node = parent[key];
  if (!node) return fallback;
  return scalar<T>(node, where + "." + key);
}

template <class T>
std::vector<T> list(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) fail(where, "expected a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < node.size(); ++i)
    out.push_back(scalar<T>(node[i], where + "[" + std::to_string(i) + "]"));
  if (out.empty()) fail(where, "must not be empty");
  return out;
}

// A list of values or {from, to, count} with evenly spaced points.
std::vector<double> grid(const YAML::Node& node, const std::string& where) {
  if (node.IsSequence()) return list<double>(node, where);
  check_keys(node, where, {"from", "to", "count"});
  if (!node["from"] || !node["to"] || !node["count"]) fail(where, "needs from, to and count");
  const double from = scalar<double>(node["from"], where + ".from");
  const double to = scalar<double>(node["to"], where + ".to");
  const auto count = scalar<std::size_t>(node["count"], where + ".count");
  if (count == 0) fail(where, "count must be positive");
  std::vector<double> out;
  if (count == 1) return {from};
  // Weighted form keeps a range symmetric about 0 exactly symmetric.
  const auto last = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const auto k = static_cast<double>(i);
    out.push_back(((last - k) * from + k * to) / last);
  }
  out.front() = from;
  out.back() = to;
  return out;
}

SparsityLaw read_sparsity(const YAML::Node& node) {
  const std::string where = "config.sparsity";
  const auto law = scalar<std::string>(node["law"], where + ".law");
  if (law == "exponential") {
    check_keys(node, where, {"law", "beta"});
    return ExponentialSparsity{scalar_or<std::uint64_t>(node, "beta", where, 2)};
  }
  if (law == "stretched") {
    check_keys(node, where, {"law", "c", "gamma"});
    return StretchedSparsity{scalar_or<double>(node, "c", where, 1.0),
                             scalar_or<double>(node, "gamma", where, 1.0)};
  }
  fail(where, "law must be 'exponential' or 'stretched'");
}

CouplingLaw read_coupling(const YAML::Node& node) {
  const std::string where = "config.coupling";
  const auto law = scalar<std::string>(node["law"], where + ".law");
  if (law == "constant") {
    check_keys(node, where, {"law", "p"});
    return ConstantCoupling{scalar_or<double>(node, "p", where, 0.5)};
  }
  if (law == "decaying") {
    check_keys(node, where, {"law", "c", "gamma", "c1", "delta"});
    DecayingCoupling d;
    d.c = scalar_or(node, "c", where, d.c);
    d.gamma = scalar_or(node, "gamma", where, d.gamma);
    d.c1 = scalar_or(node, "c1", where, d.c1);
    d.delta = scalar_or(node, "delta", where, d.delta);
    return d;
  }
  fail(where, "law must be 'constant' or 'decaying'");
}

DisorderLaw read_disorder(const YAML::Node& node) {
  const std::string where = "config.disorder";
  DisorderLaw out;
  const auto envelope = scalar<std::string>(node["envelope"], where + ".envelope");
  if (envelope == "linear") {
    check_keys(node, where, {"envelope"});
    out.envelope = LinearEnvelope{};
  } else if (envelope == "power") {
    check_keys(node, where, {"envelope", "epsilon"});
    out.envelope = PowerEnvelope{scalar_or<double>(node, "epsilon", where, 1.0)};
  } else {
    fail(where, "envelope must be 'linear' or 'power'");
  }
  return out;
}

Rational read_ratio(const YAML::Node& node, const std::string& where) {
  const auto v = list<std::int64_t>(node, where);
  if (v.size() != 2) fail(where, "expected [numerator, denominator]");
  return Rational{v[0], v[1]};
}

EnergyPoint read_energy(const YAML::Node& node) {
  const std::string where = "config.energy";
  check_keys(node, where, {"lambda", "varphi", "varphi_over_pi"});
  if (node.size() != 1) fail(where, "give exactly one of lambda, varphi, varphi_over_pi");
  try {
    if (node["lambda"]) return EnergyPoint::from_lambda(scalar<double>(node["lambda"], where + ".lambda"));
    if (node["varphi"]) return EnergyPoint::from_varphi(scalar<double>(node["varphi"], where + ".varphi"));
    const Rational r = read_ratio(node["varphi_over_pi"], where + ".varphi_over_pi");
    return EnergyPoint::rational_multiple(r.num, r.den);
  } catch (const PreconditionError& e) {
    fail(where, e.what());
  }
}

json to_json(const SparsityLaw& law) {
  if (const auto* e = std::get_if<ExponentialSparsity>(&law)) return {{"law", "exponential"}, {"beta", e->beta}};
  const auto& s = std::get<StretchedSparsity>(law);
  return {{"law", "stretched"}, {"c", s.c}, {"gamma", s.gamma}};
}

json to_json(const CouplingLaw& law) {
  if (const auto* c = std::get_if<ConstantCoupling>(&law)) return {{"law", "constant"}, {"p", c->p}};
  const auto& d = std::get<DecayingCoupling>(law);
  return {{"law", "decaying"}, {"c", d.c}, {"gamma", d.gamma}, {"c1", d.c1}, {"delta", d.delta}};
}

json to_json(const DisorderLaw& law) {
  if (const auto* p = std::get_if<PowerEnvelope>(&law.envelope))
    return {{"envelope", "power"}, {"epsilon", p->epsilon}, {"seed", law.seed}};
  return {{"envelope", "linear"}, {"seed", law.seed}};
}

json to_json(const EnergyPoint& e) {
  json out{{"lambda", e.lambda()}, {"varphi", e.varphi()}};
  if (e.exact_ratio()) out["varphi_over_pi"] = {e.exact_ratio()->num, e.exact_ratio()->den};
  return out;
}

}  // namespace

Manifest parse_manifest(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("manifest: not valid YAML: ") + e.what());
  }
  if (!root || !root.IsMap()) throw ConfigError("manifest: top level must be a mapping");
  check_keys(root, "manifest",
             {"schema_version", "seed", "workers", "output_dir", "config", "sweep", "equidist", "regimes"});

  Manifest m;
  if (!root["schema_version"]) fail("manifest", "schema_version is required");
  m.schema_version = scalar<int>(root["schema_version"], "schema_version");
  if (m.schema_version != kSchemaVersion)
    fail("schema_version", "unsupported version " + std::to_string(m.schema_version) + " (expected " +
                               std::to_string(kSchemaVersion) + ")");
  m.seed = scalar_or<std::uint64_t>(root, "seed", "manifest", 0);
  m.workers = scalar_or<std::size_t>(root, "workers", "manifest", 1);
  if (m.workers == 0) fail("workers", "must be at least 1");
  m.output_dir = scalar_or<std::string>(root, "output_dir", "manifest", m.output_dir);

  if (const YAML::Node c = root["config"]) {
    check_keys(c, "config",
               {"sparsity", "coupling", "disorder", "energy", "boundary_phase", "depth", "precision_bits"});
    if (c["sparsity"]) m.config.sparsity = read_sparsity(c["sparsity"]);
    if (c["coupling"]) m.config.coupling = read_coupling(c["coupling"]);
    if (c["disorder"]) m.config.disorder = read_disorder(c["disorder"]);
    if (c["energy"]) m.config.energy = read_energy(c["energy"]);
    m.config.boundary_phase = scalar_or(c, "boundary_phase", "config", m.config.boundary_phase);
    m.config.depth = scalar_or(c, "depth", "config", m.config.depth);
    m.config.precision_bits = scalar_or(c, "precision_bits", "config", m.config.precision_bits);
  }
  m.config.disorder.seed = m.seed;

  // Grid defaults: the single point described by config.
  m.sweep.lambda_grid = {m.config.energy.lambda()};
  if (const auto* c = std::get_if<ConstantCoupling>(&m.config.coupling)) m.sweep.p_grid = {c->p};
  else m.sweep.p_grid = {0.5};
  if (const auto* e = std::get_if<ExponentialSparsity>(&m.config.sparsity))
    m.sweep.beta_list = {static_cast<double>(e->beta)};
  else m.sweep.beta_list = {2.0};
  m.sweep.gamma = {0.5, 1.0, 2.0};

  if (const YAML::Node s = root["sweep"]) {
    check_keys(s, "sweep", {"lambda_grid", "p_grid", "beta_list", "gamma", "ensemble_size"});
    if (s["lambda_grid"]) m.sweep.lambda_grid = grid(s["lambda_grid"], "sweep.lambda_grid");
    if (s["p_grid"]) m.sweep.p_grid = grid(s["p_grid"], "sweep.p_grid");
    if (s["beta_list"]) m.sweep.beta_list = list<double>(s["beta_list"], "sweep.beta_list");
    if (s["gamma"]) m.sweep.gamma = list<double>(s["gamma"], "sweep.gamma");
    m.sweep.ensemble_size = scalar_or(s, "ensemble_size", "sweep", m.sweep.ensemble_size);
  }

  if (const YAML::Node e = root["equidist"]) {
    check_keys(e, "equidist", {"h_list", "n_list", "control"});
    if (e["h_list"]) m.equidist.h_list = list<std::int64_t>(e["h_list"], "equidist.h_list");
    if (e["n_list"]) m.equidist.n_list = list<std::size_t>(e["n_list"], "equidist.n_list");
    if (const YAML::Node c = e["control"]) {
      if (c.IsNull() || (c.IsScalar() && c.Scalar() == "false")) m.equidist.control.reset();
      else m.equidist.control = read_ratio(c, "equidist.control");
    }
    for (auto h : m.equidist.h_list)
      if (h == 0) fail("equidist.h_list", "h must be nonzero");
    for (auto n : m.equidist.n_list)
      if (n == 0) fail("equidist.n_list", "N must be positive");
  }

  if (const YAML::Node r = root["regimes"]) {
    check_keys(r, "regimes", {"depth", "c", "p", "alpha_grid", "decaying"});
    m.regimes.depth = scalar_or(r, "depth", "regimes", m.regimes.depth);
    m.regimes.c = scalar_or(r, "c", "regimes", m.regimes.c);
    m.regimes.p = scalar_or(r, "p", "regimes", m.regimes.p);
    if (r["alpha_grid"]) m.regimes.alpha_grid = grid(r["alpha_grid"], "regimes.alpha_grid");
    if (const YAML::Node d = r["decaying"]) {
      if (d.IsScalar()) {
        m.regimes.decaying = scalar<bool>(d, "regimes.decaying");
      } else {
        check_keys(d, "regimes.decaying", {"c1", "delta"});
        m.regimes.decaying = true;
        m.regimes.c1 = scalar_or(d, "c1", "regimes.decaying", m.regimes.c1);
        m.regimes.delta = scalar_or(d, "delta", "regimes.decaying", m.regimes.delta);
      }
    }
  }

  try {
    validate(m.config);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("manifest: config: ") + e.what());
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("manifest: cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_manifest(text.str());
}

std::string canonical_manifest(const Manifest& m) {
  json j;
  j["schema_version"] = m.schema_version;
  j["seed"] = m.seed;
  j["config"] = {{"sparsity", to_json(m.config.sparsity)},
                 {"coupling", to_json(m.config.coupling)},
                 {"disorder", to_json(m.config.disorder)},
                 {"energy", to_json(m.config.energy)},
                 {"boundary_phase", m.config.boundary_phase},
                 {"depth", m.config.depth},
                 {"precision_bits", m.config.precision_bits}};
  j["sweep"] = {{"lambda_grid", m.sweep.lambda_grid},
                {"p_grid", m.sweep.p_grid},
                {"beta_list", m.sweep.beta_list},
                {"gamma", m.sweep.gamma},
                {"ensemble_size", m.sweep.ensemble_size}};
  j["equidist"] = {{"h_list", m.equidist.h_list}, {"n_list", m.equidist.n_list}};
  if (m.equidist.control)
    j["equidist"]["control"] = {m.equidist.control->num, m.equidist.control->den};
  j["regimes"] = {{"depth", m.regimes.depth},   {"c", m.regimes.c},         {"p", m.regimes.p},
                  {"alpha_grid", m.regimes.alpha_grid}, {"decaying", m.regimes.decaying},
                  {"c1", m.regimes.c1},         {"delta", m.regimes.delta}};
  return j.dump();
}

std::string manifest_hash(const Manifest& m) {
  const std::string text = canonical_manifest(m);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error("manifest_hash: SHA-256 failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

}  // namespace sjl::cli
