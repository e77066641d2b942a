// harness.hpp: config-driven h-sweeps, log–log rate fits, the limit oracles
// for propagated wave packets and resonant plane waves, and report emission.
//
// A run directory holds results.csv (one row per (h, quantity) cell) and
// summary.json (one entry per quantity series plus an environment
// fingerprint). Both are deterministic for a fixed config.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reswig/io.hpp"

namespace reswig {

enum class Quantity {
  NormSq,
  WignerPair,
  TimeAveragedPair,
  ResonantTerm,
  RemainderTerm,
  RemainderRatio,
  LemmaMainResidual,
  DecompositionDefect,
  MainFormulaPair,
  MainFormulaGap,
  NearHyperplaneMass,
  PositionPair,
  WavePacketOracleGap,
  AveragedDensityOracleGap,
  MainFormulaOracleGap,
  ClassicalLimitGap,
  ClassicalPointGap,
  LiouvilleGap,
  TracePair,
  TraceNormBoundGap,
  DominationGap,
};

std::string quantity_name(Quantity q);
std::optional<Quantity> quantity_from_name(const std::string& s);

struct QuantitySpec {
  Quantity kind = Quantity::NormSq;
  std::string label;  // defaults to the quantity name
  std::string symbol_id;
  std::string window_id;
  std::string multiplier_id;
  std::optional<CoefficientFn> b;
  std::optional<LatticePoint> direction;
  double t = 1.0;
  double n_cut = 5.0;

  // Pass criteria; all optional. Magnitudes are |value|.
  bool fit = false;
  std::optional<double> slope_min;
  std::optional<double> r2_min;
  bool accept_identically_zero = false;
  std::optional<double> max_abs;  // at the smallest h
  std::optional<double> min_abs;  // at every h
  bool decreasing = false;        // strictly, along the schedule
};

struct Tolerances {
  double slope_min = 0.9;
  double r2_min = 0.98;
  double tail_flag_ratio = 0.01;
};

template <class T>
struct Named {
  std::string id;
  T value;
};

struct ExperimentConfig {
  std::size_t d = 2;
  StateFamily family = RandomFamily{};
  std::vector<double> h_schedule;
  std::vector<Named<Symbol>> symbols;
  std::vector<Named<TimeWindow>> windows;
  std::vector<Named<ModeMap>> multipliers;
  std::vector<QuantitySpec> quantities;
  Tolerances tolerances;
  std::string out_dir = "run";
  unsigned workers = 1;
  std::uint64_t seed = 0;
  Json source;  // the parsed document, echoed into reports
};

/// Throws ConfigError listing every offending field.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

enum class FitStatus { Ok, IdenticallyZero, Mixed, TooFewPoints };

struct RateFit {
  FitStatus status = FitStatus::TooFewPoints;
  double slope = 0.0;
  double r_squared = 0.0;
};

std::string fit_status_name(FitStatus s);

/// Least squares of log(value) against log(h). Needs ≥ 3 points, all values
/// > 0; otherwise IdenticallyZero (every value ≤ 1e-12) or Mixed.
RateFit fit_rate(std::span<const std::pair<double, double>> series);

struct CellResult {
  double h = 0.0;
  cplx value{};
  double tail_bound = 0.0;
  bool flagged = false;  // tail_bound > tail_flag_ratio · |value|
};

struct SeriesReport {
  QuantitySpec spec;
  std::vector<CellResult> points;
  std::optional<RateFit> fit;
  bool pass = true;
  std::vector<std::string> failures;
};

struct ConvergenceReport {
  std::string family;
  std::size_t d = 0;
  std::vector<SeriesReport> series;
  bool pass = true;
  Json environment;
};

struct RunOptions {
  unsigned threads = 0;   // 0: take the config's worker count
  double tol_scale = 1.0;  // multiplies max_abs thresholds
  bool fit_all = false;    // fit every series (the converge command)
};

ConvergenceReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

/// Columns: family, d, h, quantity, symbol_id, window_id, value_re, value_im,
/// tail_bound; floats with 17 significant digits.
std::string render_csv(const ConvergenceReport& r);
Json summary_json(const ConvergenceReport& r);
/// Rebuilds the report (labels, points, fits, verdicts) from summary.json.
ConvergenceReport report_from_summary(const Json& j);
void write_run(const ConvergenceReport& r, const ExperimentConfig& cfg, const std::filesystem::path& dir);
void print_summary(const ConvergenceReport& r, std::ostream& os);

Json environment_fingerprint();

/// ∫φ ∫ m ⟨|e^{itΔ/2}ρ_per|²⟩_{ξ0} dx dt for a resonant plane wave with
/// direction K: the sum over q ⟂ K of m̂(-q) Σ_k ρ̂(k+q) conj(ρ̂(k))
/// φ̂((|k+q|² - |k|²)/2).
cplx averaged_density_oracle(const ModeMap& profile, const LatticePoint& K, const ModeMap& m_modes,
                             const TimeWindow& phi);

/// ∫φ · ‖ρ‖² · m̂(0), the pairing of the equidistributed limit.
cplx wave_packet_limit_oracle(const ModeMap& m_modes, const TimeWindow& phi, double rho_norm_sq, std::size_t d);

/// Randomized property checks over the library; one line per property.
bool run_property_suite(std::ostream& os, std::uint64_t seed = 20240611);

}  // namespace reswig
