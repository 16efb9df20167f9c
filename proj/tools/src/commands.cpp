#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <variant>

#include "output.hpp"
#include "sjl/angle_reduction.hpp"
#include "sjl/equidist.hpp"
#include "sjl/errors.hpp"
#include "sjl/parallel.hpp"
#include "sjl/pruefer.hpp"
#include "sjl/spectral.hpp"
#include "sjl/transfer.hpp"
#include "sjlab/cli.hpp"

namespace sjl::cli {
namespace {

namespace fs = std::filesystem;
using detail::fmt;
using detail::number;
using detail::Row;
using nlohmann::json;

detail::Meta make_meta(const Manifest& m, std::string command, std::optional<std::size_t> bits) {
  return {std::move(command), manifest_hash(m), m.seed, m.schema_version, bits};
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

json realization_json(const DisorderRealization& r) {
  json positions = json::array();
  json gaps = json::array();
  for (const auto& a : r.positions) positions.push_back(a.get_str());
  for (const auto& g : r.gaps) gaps.push_back(g.get_str());
  return {{"seed", r.seed},           {"sample_index", r.sample_index}, {"omega", r.omega},
          {"positions", positions},   {"gaps", gaps},                   {"rejections", r.rejections}};
}

json energy_json(const EnergyPoint& e) {
  json j{{"lambda", e.lambda()}, {"varphi", e.varphi()}, {"rationality", describe(e.rationality())}};
  if (e.exact_ratio()) j["varphi_over_pi"] = {e.exact_ratio()->num, e.exact_ratio()->den};
  return j;
}

std::optional<double> constant_p(const CouplingLaw& law) {
  if (const auto* c = std::get_if<ConstantCoupling>(&law)) return c->p;
  return std::nullopt;
}

json weyl_json(const WeylReport& w) {
  json points = json::array();
  for (const auto& p : w.points) {
    points.push_back({{"n", p.n},
                      {"i_h", p.i_h},
                      {"standard_error", p.standard_error},
                      {"bound", number(p.bound)},
                      {"within_bound", p.within_bound},
                      {"partial_sum", p.partial_sum}});
  }
  return {{"h", w.h},
          {"resonant", w.resonant},
          {"decay_slope", number(w.decay_slope)},
          {"verdict", to_string(w.verdict)},
          {"points", points}};
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<fs::path> cmd_trajectory(const Manifest& m, const fs::path& out) {
  const SpectralConfig& config = m.config;
  const DisorderRealization realization = realize(config, 0);
  const PrueferTrajectory t = run_trajectory(config, realization);
  const auto meta = make_meta(m, "trajectory", t.min_certified_bits());

  std::vector<Row> rows;
  rows.reserve(t.size());
  for (std::size_t k = 0; k < t.size(); ++k)
    rows.push_back({fmt(k + 1), fmt(t.theta[k]), fmt(t.log_R2[k]), fmt(t.f_values[k]),
                    fmt(t.certified_bits[k])});
  const fs::path csv = out / "trajectory.csv";
  detail::write_csv(csv, meta, {"k", "theta", "log_R2", "f", "certified_bits"}, rows);

  const double n = static_cast<double>(t.size());
  json j;
  j["meta"] = detail::meta_json(meta);
  j["point"] = {{"energy", energy_json(config.energy)},
                {"sparsity", describe(config.sparsity)},
                {"coupling", describe(config.coupling)},
                {"boundary_phase", config.boundary_phase},
                {"theta0", t.theta0},
                {"depth", t.size()},
                {"precision_bits", t.precision_bits},
                {"excluded_energy", t.excluded_energy}};
  j["realization"] = realization_json(realization);

  double total_variation = 0.0;
  if (const auto p = constant_p(config.coupling)) {
    const ErgodicConstants e = ergodic_constants(*p, config.energy.varphi());
    total_variation = e.total_variation;
    const double growth = std::exp(t.log_R2.back() / n);
    j["ergodic"] = {{"r", e.r},
                    {"log_integral", e.log_integral},
                    {"total_variation", e.total_variation},
                    {"mean_f", t.mean_f()},
                    {"growth_rate_estimate", growth},
                    {"growth_rate_relative_error", std::abs(growth - e.r) / e.r}};
  }
  const DiscrepancyReport d = star_discrepancy(t.theta, total_variation);
  j["discrepancy"] = {{"n", d.n},
                      {"d_star", d.d_star},
                      {"koksma_bound", d.d_star * total_variation},
                      {"koksma_c_n", d.koksma_c_n},
                      {"koksma_c_n_root", d.koksma_c_n_root}};

  std::vector<std::size_t> ns;
  for (std::size_t v : m.equidist.n_list)
    if (v <= t.size()) ns.push_back(v);
  if (ns.empty()) ns.push_back(t.size());
  const std::vector<PrueferTrajectory> single{t};
  j["weyl"] = json::array();
  for (std::int64_t h : m.equidist.h_list)
    j["weyl"].push_back(weyl_json(weyl_report(single, config.energy, h, ns)));

  const fs::path sidecar = out / "trajectory.json";
  detail::write_json(sidecar, j);
  return {csv, sidecar};
}

// ---------------------------------------------------------------------------

namespace {

struct PhaseRow {
  double beta = 0.0, p = 0.0, lambda = 0.0;
  PhaseVerdict verdict;
};

}  // namespace

std::vector<fs::path> cmd_phase_diagram(const Manifest& m, const fs::path& out) {
  const auto betas = sorted_unique(m.sweep.beta_list);
  const auto ps = sorted_unique(m.sweep.p_grid);
  const auto lambdas = sorted_unique(m.sweep.lambda_grid);
  for (double l : lambdas)
    if (!(std::abs(l) <= 2.0)) throw ConfigError("phase-diagram: lambda_grid must lie in [-2, 2]");

  std::vector<PhaseRow> points;
  for (double b : betas)
    for (double p : ps)
      for (double l : lambdas) {
        PhaseRow row;
        row.beta = b;
        row.p = p;
        row.lambda = l;
        points.push_back(row);
      }

  auto rows = parallel_map(points.size(), m.workers, [&](std::size_t i) {
    PhaseRow row = points[i];
    if (std::abs(row.lambda) == 2.0) {
      // Band edges stay in the table as exclusions.
      row.verdict.phase = Phase::Excluded;
      row.verdict.reason = Exclusion::BandEdge;
      row.verdict.formula_phase = Phase::Excluded;
      row.verdict.forms_agree = true;
      row.verdict.diagnostics = {{"lambda", row.lambda},
                                 {"v", intensity_from_p(row.p)},
                                 {"beta", row.beta},
                                 {"r", std::numeric_limits<double>::infinity()},
                                 {"i1_value", 0.0},
                                 {"beta_over_r", 0.0}};
    } else {
      row.verdict = classify(row.lambda, OffDiagonal{row.p}, row.beta);
    }
    return row;
  });

  std::map<std::string, std::size_t> counts;
  std::vector<Row> csv_rows;
  for (const auto& r : rows) {
    const auto& v = r.verdict;
    const auto& d = v.diagnostics;
    const std::string label = v.phase == Phase::Excluded ? "Excluded(" + to_string(v.reason) + ")"
                                                         : to_string(v.phase);
    ++counts[label];
    csv_rows.push_back({fmt(r.beta), fmt(r.p), fmt(r.lambda), to_string(v.phase), to_string(v.reason),
                        fmt(v.dimension), to_string(v.formula_phase), fmt(v.formula_dimension),
                        fmt(d.at("v")), fmt(d.at("r")), fmt(d.at("beta_over_r")), fmt(d.at("i1_value")),
                        fmt(v.forms_agree)});
  }
  const auto meta = make_meta(m, "phase-diagram", std::nullopt);
  const fs::path csv = out / "phase_diagram.csv";
  detail::write_csv(csv, meta,
                    {"beta", "p", "lambda", "phase", "reason", "dimension", "formula_phase",
                     "formula_dimension", "v", "r", "beta_over_r", "i1_value", "forms_agree"},
                    csv_rows);

  json j;
  j["meta"] = detail::meta_json(meta);
  j["rows"] = rows.size();
  j["counts"] = counts;
  j["caveat"] = kMeasureZeroCaveat;
  j["critical_energies"] = json::array();
  for (double b : betas)
    for (double p : ps) {
      const CriticalEnergies ce = critical_energy(OffDiagonal{p}, b);
      j["critical_energies"].push_back(
          {{"beta", b}, {"p", p}, {"empty", ce.empty}, {"minus", ce.minus}, {"plus", ce.plus}});
    }
  const fs::path sidecar = out / "phase_diagram.json";
  detail::write_json(sidecar, j);
  return {csv, sidecar};
}

// ---------------------------------------------------------------------------

std::vector<fs::path> cmd_equidist(const Manifest& m, const fs::path& out) {
  struct Labelled {
    std::string label;
    EnergyPoint energy;
    DelReport report;
  };
  std::vector<Labelled> runs;
  runs.push_back({"main", m.config.energy,
                  del_series_diagnostic(m.config, m.sweep.ensemble_size, m.equidist.h_list,
                                        m.equidist.n_list, m.workers)});
  if (m.equidist.control) {
    SpectralConfig control = m.config;
    control.energy = EnergyPoint::rational_multiple(m.equidist.control->num, m.equidist.control->den);
    runs.push_back({"control", control.energy,
                    del_series_diagnostic(control, m.sweep.ensemble_size, m.equidist.h_list,
                                          m.equidist.n_list, m.workers)});
  }

  std::size_t bits = std::numeric_limits<std::size_t>::max();
  for (const auto& r : runs) bits = std::min(bits, r.report.min_certified_bits);
  const auto meta = make_meta(m, "equidist", bits);

  std::vector<Row> weyl_rows, disc_rows;
  json j;
  j["meta"] = detail::meta_json(meta);
  j["energies"] = json::array();
  for (const auto& r : runs) {
    json e;
    e["label"] = r.label;
    e["energy"] = energy_json(r.energy);
    e["ensemble_size"] = r.report.ensemble_size;
    e["total_variation"] = r.report.total_variation;
    e["all_within_bound"] = r.report.all_within_bound();
    e["per_h"] = json::array();
    for (const auto& w : r.report.per_h) {
      e["per_h"].push_back(weyl_json(w));
      for (const auto& p : w.points)
        weyl_rows.push_back({r.label, fmt(w.h), fmt(p.n), fmt(p.i_h), fmt(p.standard_error), fmt(p.bound),
                             fmt(p.within_bound), fmt(p.partial_sum), fmt(w.resonant),
                             to_string(w.verdict)});
    }
    e["discrepancy"] = json::array();
    for (const auto& d : r.report.discrepancy) {
      e["discrepancy"].push_back(
          {{"n", d.n}, {"median_d_star", d.median_d_star}, {"median_c_n_root", d.median_c_n_root}});
      disc_rows.push_back({r.label, fmt(d.n), fmt(d.median_d_star), fmt(d.median_c_n_root)});
    }
    j["energies"].push_back(e);
  }

  const fs::path weyl_csv = out / "equidist.csv";
  detail::write_csv(weyl_csv, meta,
                    {"energy", "h", "N", "I_h", "standard_error", "bound", "within_bound", "partial_sum",
                     "resonant", "verdict"},
                    weyl_rows);
  const fs::path disc_csv = out / "equidist_discrepancy.csv";
  detail::write_csv(disc_csv, meta, {"energy", "N", "median_d_star", "median_c_n_root"}, disc_rows);
  const fs::path sidecar = out / "equidist.json";
  detail::write_json(sidecar, j);
  return {weyl_csv, disc_csv, sidecar};
}

// ---------------------------------------------------------------------------

namespace {

// Stretched gaps are capped at this many bits when choosing the regime depth.
constexpr double kRegimeGapBitBudget = 262144.0;

struct RegimeRow {
  double gamma = 0.0;
  CouplingLaw coupling = ConstantCoupling{};
  RegimeVerdict verdict;
  std::size_t depth = 0;
  std::size_t min_certified_bits = 0;
  double position_ratio_3 = 0.0;
  double npp_last_increment = 0.0;
  double npp_tail_ratio = 0.0;
  std::optional<ScalingReport> scaling;
  std::string scaling_note;
  std::optional<Phase> deferred_phase;
  std::optional<double> coefficient_identity_residual;
};

std::size_t regime_depth(const RegimeSettings& s, double gamma) {
  const double n_max = std::floor(std::pow(kRegimeGapBitBudget * std::numbers::ln2 / s.c, 1.0 / gamma));
  return std::max<std::size_t>(4, std::min<std::size_t>(s.depth, static_cast<std::size_t>(n_max)));
}

// max |a^2 - b^2 - c^2 - q^4| over k = 1..50 for the f_k coefficients.
double coefficient_identity_residual(const CouplingLaw& law, double varphi) {
  double worst = 0.0;
  for (std::size_t k = 1; k <= 50; ++k) {
    const double q = coupling_at(law, k);
    const FCoefficients f = f_coefficients(q, varphi);
    const double q4 = q * q * q * q;
    worst = std::max(worst, std::abs(f.a * f.a - f.b * f.b - f.c * f.c - q4) / std::max(1.0, f.a * f.a));
  }
  return worst;
}

std::string opt(const std::optional<double>& x) { return x ? fmt(*x) : std::string("n/a"); }

}  // namespace

std::vector<fs::path> cmd_regimes(const Manifest& m, const fs::path& out) {
  const RegimeSettings& s = m.regimes;
  std::vector<RegimeRow> plan;
  for (double gamma : sorted_unique(m.sweep.gamma)) {
    if (!(gamma > 0.0)) throw ConfigError("regimes: gamma values must be positive");
    RegimeRow row;
    row.gamma = gamma;
    row.coupling = ConstantCoupling{s.p};
    plan.push_back(row);
    if (s.decaying && gamma > 1.0) {
      row.coupling = DecayingCoupling{s.c, gamma, s.c1, s.delta};
      plan.push_back(row);
    }
  }

  auto rows = parallel_map(plan.size(), m.workers, [&](std::size_t i) {
    RegimeRow row = plan[i];
    const StretchedSparsity sparsity{s.c, row.gamma};
    try {
      row.verdict = regime_classify(sparsity, row.coupling);
    } catch (const ConfigError& e) {
      row.verdict.regime = Regime::Unsupported;
      row.verdict.detail = e.what();
      return row;
    } catch (const PreconditionError& e) {
      row.verdict.regime = Regime::Unsupported;
      row.verdict.detail = e.what();
      return row;
    }
    if (row.verdict.regime == Regime::Unsupported) return row;

    const auto unperturbed = generate_positions(sparsity, 4);
    row.position_ratio_3 = std::exp(log_big(unperturbed[2]) - log_big(unperturbed[3]));

    SpectralConfig config = m.config;
    config.sparsity = sparsity;
    config.coupling = row.coupling;
    config.depth = regime_depth(s, row.gamma);
    config.precision_bits = 0;
    row.depth = config.depth;
    const DisorderRealization realization = realize(config, 0);
    const NormSequence norms = block_norms(config, realization);
    row.min_certified_bits = norms.min_certified_bits;

    const LastSimonReport ls = last_simon_diagnostics(norms.log_t2, realization.gaps);
    row.npp_last_increment = ls.npp_relative_increment.back();
    row.npp_tail_ratio = ls.tail_ratio;
    try {
      row.scaling = scaling_exponents(norms.log_t2, realization.gaps, s.alpha_grid);
    } catch (const PreconditionError& e) {
      row.scaling_note = e.what();
    }
    if (row.verdict.regime == Regime::DeferToClassify) {
      const double beta = std::exp(s.c);
      if (beta >= 2.0) row.deferred_phase = classify(config.energy, OffDiagonal{s.p}, beta).phase;
    }
    if (std::holds_alternative<DecayingCoupling>(row.coupling))
      row.coefficient_identity_residual = coefficient_identity_residual(row.coupling, config.energy.varphi());
    return row;
  });

  std::optional<std::size_t> bits;
  for (const auto& r : rows)
    if (r.depth > 0) bits = std::min(bits.value_or(r.min_certified_bits), r.min_certified_bits);
  const auto meta = make_meta(m, "regimes", bits);

  std::vector<Row> table, dnor;
  json j;
  j["meta"] = detail::meta_json(meta);
  j["energy"] = energy_json(m.config.energy);
  j["rows"] = json::array();
  for (const auto& r : rows) {
    const std::string coupling = describe(r.coupling);
    const auto& sc = r.scaling;
    table.push_back(
        {fmt(r.gamma), coupling, to_string(r.verdict.regime), fmt(r.verdict.dimension), fmt(r.depth),
         fmt(r.verdict.sc_edge), fmt(r.verdict.pp_edge), fmt(r.verdict.c_lower), fmt(r.verdict.c_upper),
         fmt(r.position_ratio_3), fmt(r.npp_last_increment), fmt(r.npp_tail_ratio),
         sc ? fmt(sc->kappa_t) : "n/a", sc ? fmt(sc->local_dimension) : "n/a",
         sc ? opt(sc->largest_continuous_alpha) : "n/a", sc ? opt(sc->smallest_singular_alpha) : "n/a",
         r.deferred_phase ? to_string(*r.deferred_phase) : "n/a", opt(r.coefficient_identity_residual),
         r.verdict.detail});
    json row{{"gamma", r.gamma},
             {"coupling", coupling},
             {"regime", to_string(r.verdict.regime)},
             {"dimension", r.verdict.dimension},
             {"detail", r.verdict.detail},
             {"depth", r.depth}};
    if (r.verdict.regime == Regime::SplitBand) {
      row["sc_edge"] = r.verdict.sc_edge;
      row["pp_edge"] = r.verdict.pp_edge;
    }
    if (r.depth > 0) {
      row["position_ratio_3"] = r.position_ratio_3;
      row["npp_last_increment"] = number(r.npp_last_increment);
      row["npp_tail_ratio"] = number(r.npp_tail_ratio);
    }
    if (sc) {
      json alphas = json::array();
      for (const auto& a : sc->rows) {
        alphas.push_back({{"alpha", a.alpha},
                          {"dnor_slope", a.dnor_slope},
                          {"dnor_bounded", a.dnor_bounded},
                          {"c45_slope", a.c45_slope},
                          {"c45_vanishing", a.c45_vanishing}});
        dnor.push_back({fmt(r.gamma), coupling, fmt(a.alpha), fmt(a.dnor_slope), fmt(a.dnor_bounded),
                        fmt(a.c45_slope), fmt(a.c45_vanishing)});
      }
      row["scaling"] = {{"kappa_t", sc->kappa_t},
                        {"kappa_u", sc->kappa_u},
                        {"local_dimension", sc->local_dimension},
                        {"alphas", alphas}};
    } else if (!r.scaling_note.empty()) {
      row["scaling"] = r.scaling_note;
    }
    if (r.deferred_phase) row["deferred_phase"] = to_string(*r.deferred_phase);
    if (r.coefficient_identity_residual) row["coefficient_identity_residual"] = *r.coefficient_identity_residual;
    j["rows"].push_back(row);
  }

  const fs::path csv = out / "regimes.csv";
  detail::write_csv(csv, meta,
                    {"gamma", "coupling", "regime", "dimension", "depth", "sc_edge", "pp_edge", "c_lower",
                     "c_upper", "position_ratio_3", "npp_last_increment", "npp_tail_ratio", "kappa_t",
                     "local_dimension", "largest_continuous_alpha", "smallest_singular_alpha",
                     "deferred_phase", "coefficient_identity_residual", "detail"},
                    table);
  const fs::path dnor_csv = out / "regimes_dnor.csv";
  detail::write_csv(dnor_csv, meta,
                    {"gamma", "coupling", "alpha", "dnor_slope", "dnor_bounded", "c45_slope", "c45_vanishing"},
                    dnor);
  const fs::path sidecar = out / "regimes.json";
  detail::write_json(sidecar, j);
  return {csv, dnor_csv, sidecar};
}

}  // namespace sjl::cli
