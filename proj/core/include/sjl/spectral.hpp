#pragma once

// Spectral phase of the sparse model and the series diagnostics behind it.
//
// For constant coupling p the transfer norms grow like r^n per block with
// r = 1 + v^2 / (4 - lambda^2), v = (1 - p^2) / p, while the blocks grow like
// beta^n. Singular continuous spectrum of local dimension 1 - ln r / ln beta
// holds where beta >= r, pure point where beta < r.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sjl/bigint.hpp"
#include "sjl/model.hpp"

namespace sjl {

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

// Off-diagonal coupling p, or the intensity v of the diagonal model.
struct OffDiagonal {
  double p = 0.5;
};
struct Diagonal {
  double v = 1.5;
};
using Strength = std::variant<OffDiagonal, Diagonal>;

// v = (1 - p^2) / p, the single parameter all formulas below depend on.
double intensity(const Strength& s);
double intensity_from_p(double p);

// r = 1 + v^2 / (4 - lambda^2)
double growth_rate(double lambda, double v);

enum class Phase { SingularContinuous, PurePoint, Excluded };
enum class Exclusion { None, RationalEnergy, BandEdge, BoundaryTie };

std::string to_string(Phase p);
std::string to_string(Exclusion e);

// Relative width of the band around beta = r treated as a tie.
inline constexpr double kTieTolerance = 1e-12;

inline constexpr const char* kMeasureZeroCaveat =
    "up to the Lebesgue-null exceptional energy sets A' and A_1, which are not computable";

struct PhaseVerdict {
  Phase phase = Phase::Excluded;
  Exclusion reason = Exclusion::None;
  double dimension = 0.0;  // meaningful when phase is SingularContinuous

  // What the beta-versus-r formula says, ignoring the rationality exclusion.
  Phase formula_phase = Phase::Excluded;
  double formula_dimension = 0.0;

  bool forms_agree = true;  // I1 form and beta/r form give the same answer
  std::map<std::string, double> diagnostics;
  std::string caveat = kMeasureZeroCaveat;
};

// Throws PreconditionError for |lambda| >= 2, beta < 2 or a non-positive strength.
PhaseVerdict classify(const EnergyPoint& energy, const Strength& strength, double beta);
PhaseVerdict classify(double lambda, const Strength& strength, double beta);

// Verdicts of the two algebraically equivalent boundary forms on their own:
// (beta - 1)(4 - lambda^2) / v^2 >= 1 and beta / r >= 1.
Phase i1_form_phase(double lambda, double v, double beta);
Phase ratio_form_phase(double lambda, double v, double beta);

// 1 - ln(1 + v^2 / (4 - lambda^2)) / ln beta. Requires v^2 < 4 (beta - 1) and
// |lambda| inside the critical interval (its endpoints give 0).
double hausdorff_dimension(double lambda, double v, double beta);

struct CriticalEnergies {
  bool empty = false;  // v^2 > 4 (beta - 1): the whole band is pure point
  double minus = 0.0;
  double plus = 0.0;
};

CriticalEnergies critical_energy(const Strength& strength, double beta);

// ---------------------------------------------------------------------------
// Series diagnostics
// ---------------------------------------------------------------------------

enum class SeriesVerdict { Convergent, Divergent, Inconclusive };
std::string to_string(SeriesVerdict v);

inline constexpr double kRatioDeadBand = 1e-3;
inline constexpr std::size_t kMinSeriesTerms = 8;

struct SeriesDiagnostic {
  std::vector<double> log_terms;
  std::vector<double> log_partial_sums;
  double ratio_estimate = 0.0;  // exp of the fitted slope of the log terms
  SeriesVerdict verdict = SeriesVerdict::Inconclusive;
};

// Verdict of a ratio estimate with the dead band around 1.
SeriesVerdict ratio_verdict(double ratio);

// Geometric ratio fitted to a sequence of log terms: exp of the least-squares
// slope over the last quarter of the terms (at least four).
double fitted_tail_ratio(std::span<const double> log_terms);

// Summarizes a series given by its log terms. The ratio is fitted over the
// second half of the terms.
SeriesDiagnostic series_diagnostic(std::vector<double> log_terms);

struct LemmaL2Report {
  SeriesDiagnostic alpha;  // sum beta^n t_n^-2
  SeriesDiagnostic beta;   // sum beta^n t_n^2 (sum_{m >= n} t_m^-2)^2
  double tail_ratio = 0.0;  // fitted ratio of t_m^-2 used to complete the inner sums
};

// log_t2[n - 1] = ln t_n^2 for n = 1..N. Throws PreconditionError with fewer
// than kMinSeriesTerms usable terms.
LemmaL2Report lemma_l2_diagnostic(std::span<const double> log_t2, double beta);

// Both series convergent.
bool lemma_l2_predicts_pure_point(const LemmaL2Report& report);

// Last-Simon partial sums with site norms replaced by their block plateaus.
// Stretch 0 covers sites 0..a_1 with norm 1; stretch m >= 1 covers the g_{m+1}
// sites after a_m at the level t_m. Values are natural logs.
struct LastSimonReport {
  std::vector<double> log_site;         // ln of the last site of each stretch
  std::vector<double> log_eac_average;  // ln((1/l) sum_{n<=l} ||T(n)||^2)
  std::vector<double> log_esc_partial;  // ln(sum_{n<=l} ||T(n)||^-2)
  std::vector<double> log_npp_terms;    // ln of each stretch's contribution to N_pp
  std::vector<double> log_npp_partial;
  std::vector<double> npp_relative_increment;  // term_m / partial_m
  double tail_ratio = 0.0;  // fitted ratio used to complete the N_pp inner sums
};

// log_t2 as from block_norms; gaps as in DisorderRealization (gaps[0] = a_1^w).
LastSimonReport last_simon_diagnostics(std::span<const double> log_t2,
                                       std::span<const BigInt> gaps);

// ---------------------------------------------------------------------------
// Regimes of the stretched sparsity law
// ---------------------------------------------------------------------------

enum class Regime {
  PurePointEverywhere,
  SingularContinuousDim1,
  SingularContinuousDim0,
  SplitBand,
  DeferToClassify,
  Unsupported
};
std::string to_string(Regime r);

struct RegimeVerdict {
  Regime regime = Regime::Unsupported;
  double dimension = 0.0;
  std::string detail;
  // Split band: SC (dimension 0) for |lambda| < sc_edge, PP for |lambda| > pp_edge.
  double sc_edge = 0.0;
  double pp_edge = 0.0;
  double c_lower = 0.0;
  double c_upper = 0.0;
};

RegimeVerdict regime_classify(const SparsityLaw& sparsity, const CouplingLaw& coupling);

// Split-band phase of lambda under a SplitBand verdict; Excluded with no
// reason between the two edges, where neither bound decides.
Phase split_band_phase(const RegimeVerdict& verdict, double lambda);

// ---------------------------------------------------------------------------
// Continuity and singularity exponents
// ---------------------------------------------------------------------------

struct AlphaRow {
  double alpha = 0.0;
  double dnor_slope = 0.0;   // slope of the upper envelope of ln W(l) - (2 - alpha) ln l
  bool dnor_bounded = false;
  double c45_slope = 0.0;    // slope of the lower envelope of ln U(l) - alpha ln l
  bool c45_vanishing = false;
};

struct ScalingReport {
  double kappa_t = 0.0;     // W(l) ~ l^kappa_t
  double kappa_u = 0.0;     // U(l) ~ l^kappa_u
  double local_dimension = 0.0;  // 2 - kappa_t
  std::vector<AlphaRow> rows;
  std::optional<double> largest_continuous_alpha;
  std::optional<double> smallest_singular_alpha;
};

inline constexpr double kEnvelopeSlopeTolerance = 0.02;

// W(l) = sum_{n<=l} ||T(n)||^2 and U(l) = sum_{n<=l} ||T(n)||^-2 evaluated at
// log-spaced points inside every stretch from the plateau closed form. The fits
// use the upper half of the stretches. Throws PreconditionError when the data
// span less than two decades of l.
ScalingReport scaling_exponents(std::span<const double> log_t2, std::span<const BigInt> gaps,
                                std::span<const double> alpha_grid);

// ln of a positive big integer.
double log_big(const BigInt& x);

}  // namespace sjl
