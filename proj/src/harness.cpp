#include "reswig/harness.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "reswig/resonant.hpp"
#include "reswig/wigner.hpp"

namespace reswig {

namespace {

constexpr double kZeroLevel = 1e-12;

const std::vector<std::pair<Quantity, const char*>>& quantity_table() {
  static const std::vector<std::pair<Quantity, const char*>> table = {
      {Quantity::NormSq, "norm_sq"},
      {Quantity::WignerPair, "wigner_pair"},
      {Quantity::TimeAveragedPair, "time_averaged_pair"},
      {Quantity::ResonantTerm, "resonant_term"},
      {Quantity::RemainderTerm, "remainder_term"},
      {Quantity::RemainderRatio, "remainder_ratio"},
      {Quantity::LemmaMainResidual, "lemma_main_residual"},
      {Quantity::DecompositionDefect, "decomposition_defect"},
      {Quantity::MainFormulaPair, "main_formula_pair"},
      {Quantity::MainFormulaGap, "main_formula_gap"},
      {Quantity::NearHyperplaneMass, "near_hyperplane_mass"},
      {Quantity::PositionPair, "position_pair"},
      {Quantity::WavePacketOracleGap, "wave_packet_oracle_gap"},
      {Quantity::AveragedDensityOracleGap, "averaged_density_oracle_gap"},
      {Quantity::MainFormulaOracleGap, "main_formula_oracle_gap"},
      {Quantity::ClassicalLimitGap, "classical_limit_gap"},
      {Quantity::ClassicalPointGap, "classical_point_gap"},
      {Quantity::LiouvilleGap, "liouville_gap"},
      {Quantity::TracePair, "trace_pair"},
      {Quantity::TraceNormBoundGap, "trace_norm_bound_gap"},
      {Quantity::DominationGap, "domination_gap"},
  };
  return table;
}

struct Needs {
  bool symbol = false, window = false, multiplier = false, b = false, direction = false, zero_mean = false;
  const char* family = nullptr;  // required family kind
};

Needs needs_of(Quantity q) {
  Needs n;
  switch (q) {
    case Quantity::NormSq:
      break;
    case Quantity::WignerPair:
      n.symbol = true;
      break;
    case Quantity::TimeAveragedPair:
    case Quantity::MainFormulaPair:
    case Quantity::MainFormulaGap:
      n.symbol = n.window = true;
      break;
    case Quantity::ResonantTerm:
    case Quantity::RemainderTerm:
    case Quantity::RemainderRatio:
    case Quantity::LemmaMainResidual:
    case Quantity::DecompositionDefect:
      n.symbol = n.window = n.zero_mean = true;
      break;
    case Quantity::NearHyperplaneMass:
      n.direction = true;
      break;
    case Quantity::PositionPair:
      n.multiplier = n.window = true;
      break;
    case Quantity::WavePacketOracleGap:
      n.multiplier = n.window = true;
      n.family = "wave_packet";
      break;
    case Quantity::AveragedDensityOracleGap:
    case Quantity::MainFormulaOracleGap:
      n.multiplier = n.window = true;
      n.family = "resonant_plane_wave";
      break;
    case Quantity::ClassicalLimitGap:
      n.symbol = true;
      break;
    case Quantity::ClassicalPointGap:
      n.symbol = true;
      n.family = "wave_packet";
      break;
    case Quantity::LiouvilleGap:
      n.b = true;
      break;
    case Quantity::TracePair:
    case Quantity::TraceNormBoundGap:
    case Quantity::DominationGap:
      n.b = n.direction = true;
      break;
  }
  return n;
}

std::string sub(const std::string& path, const std::string& key) { return path + "." + key; }
std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::optional<double> opt_number(const Json& j, const char* key, const std::string& path, Issues& issues) {
  if (!j.contains(key)) return std::nullopt;
  if (!j.at(key).is_number()) {
    issues.push_back(sub(path, key) + ": expected a number");
    return std::nullopt;
  }
  return j.at(key).get<double>();
}

bool opt_bool(const Json& j, const char* key, const std::string& path, Issues& issues, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) {
    issues.push_back(sub(path, key) + ": expected a boolean");
    return fallback;
  }
  return j.at(key).get<bool>();
}

std::string opt_string(const Json& j, const char* key, const std::string& path, Issues& issues) {
  if (!j.contains(key)) return {};
  if (!j.at(key).is_string()) {
    issues.push_back(sub(path, key) + ": expected a string");
    return {};
  }
  return j.at(key).get<std::string>();
}

std::vector<double> parse_schedule(const Json& j, Issues& issues) {
  std::vector<double> hs;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) {
        issues.push_back(idx("h_schedule", i) + ": expected a number");
        continue;
      }
      hs.push_back(j[i].get<double>());
    }
  } else if (j.is_object()) {
    reject_unknown(j, "h_schedule", {"dyadic", "inverse"}, issues);
    if (j.contains("dyadic") == j.contains("inverse")) {
      issues.push_back("h_schedule: give exactly one of 'dyadic' or 'inverse'");
      return hs;
    }
    if (j.contains("dyadic")) {
      const Json& r = j.at("dyadic");
      if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer() ||
          r[0].get<int>() > r[1].get<int>() || r[0].get<int>() < 0 || r[1].get<int>() > 60) {
        issues.push_back("h_schedule.dyadic: expected [first, last] exponents, 0 <= first <= last <= 60");
        return hs;
      }
      for (int e = r[0].get<int>(); e <= r[1].get<int>(); ++e) hs.push_back(std::ldexp(1.0, -e));
    } else {
      const Json& r = j.at("inverse");
      if (!r.is_array()) {
        issues.push_back("h_schedule.inverse: expected an array of positive integers");
        return hs;
      }
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (!r[i].is_number_integer() || r[i].get<std::int64_t>() < 1) {
          issues.push_back(idx("h_schedule.inverse", i) + ": expected a positive integer");
          continue;
        }
        hs.push_back(1.0 / static_cast<double>(r[i].get<std::int64_t>()));
      }
    }
  } else {
    issues.push_back("h_schedule: expected an array or {dyadic|inverse}");
  }
  return hs;
}

template <class T>
const T* find_named(const std::vector<Named<T>>& v, const std::string& id) {
  for (const auto& n : v) {
    if (n.id == id) return &n.value;
  }
  return nullptr;
}

template <class T, class Parse>
std::vector<Named<T>> parse_named_list(const Json& root, const char* key, Issues& issues, Parse&& parse) {
  std::vector<Named<T>> out;
  if (!root.contains(key)) return out;
  const Json& arr = root.at(key);
  if (!arr.is_array()) {
    issues.push_back(std::string(key) + ": expected an array");
    return out;
  }
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = idx(key, i);
    if (!arr[i].is_object()) {
      issues.push_back(path + ": expected an object");
      continue;
    }
    if (!arr[i].contains("id") || !arr[i].at("id").is_string() || arr[i].at("id").get<std::string>().empty()) {
      issues.push_back(path + ".id: expected a nonempty string");
      continue;
    }
    const std::string id = arr[i].at("id").get<std::string>();
    if (std::any_of(out.begin(), out.end(), [&](const auto& n) { return n.id == id; })) {
      issues.push_back(path + ".id: duplicate id '" + id + "'");
      continue;
    }
    if (auto v = parse(arr[i], path)) out.push_back({id, std::move(*v)});
  }
  return out;
}

}  // namespace

std::string quantity_name(Quantity q) {
  for (const auto& [k, name] : quantity_table()) {
    if (k == q) return name;
  }
  return "unknown";
}

std::optional<Quantity> quantity_from_name(const std::string& s) {
  for (const auto& [k, name] : quantity_table()) {
    if (s == name) return k;
  }
  return std::nullopt;
}

std::string fit_status_name(FitStatus s) {
  switch (s) {
    case FitStatus::Ok:
      return "ok";
    case FitStatus::IdenticallyZero:
      return "identically-zero";
    case FitStatus::Mixed:
      return "identically-zero-or-mixed";
    case FitStatus::TooFewPoints:
      return "too-few-points";
  }
  return "unknown";
}

ExperimentConfig parse_config(const Json& j) {
  Issues issues;
  if (!j.is_object()) throw ConfigError({"config: expected a JSON object"});
  reject_unknown(j, "config",
                 {"d", "family", "h_schedule", "symbols", "windows", "multipliers", "quantities", "tolerances",
                  "output", "workers", "seed"},
                 issues);
  ExperimentConfig cfg;
  cfg.source = j;

  if (!j.contains("d") || !j.at("d").is_number_integer() || j.at("d").get<std::int64_t>() < 1 ||
      j.at("d").get<std::int64_t>() > static_cast<std::int64_t>(kMaxDim)) {
    issues.push_back("d: expected an integer in [1, " + std::to_string(kMaxDim) + "]");
    throw ConfigError(issues);
  }
  cfg.d = j.at("d").get<std::size_t>();

  if (j.contains("seed")) {
    if (j.at("seed").is_number_unsigned()) {
      cfg.seed = j.at("seed").get<std::uint64_t>();
    } else {
      issues.push_back("seed: expected a nonnegative integer");
    }
  }
  if (j.contains("workers")) {
    if (j.at("workers").is_number_unsigned() && j.at("workers").get<unsigned>() >= 1) {
      cfg.workers = j.at("workers").get<unsigned>();
    } else {
      issues.push_back("workers: expected a positive integer");
    }
  }
  if (j.contains("output")) {
    const Json& o = j.at("output");
    if (!o.is_object()) {
      issues.push_back("output: expected an object");
    } else {
      reject_unknown(o, "output", {"dir"}, issues);
      if (o.contains("dir")) {
        if (o.at("dir").is_string()) {
          cfg.out_dir = o.at("dir").get<std::string>();
        } else {
          issues.push_back("output.dir: expected a string");
        }
      }
    }
  }
  if (j.contains("tolerances")) {
    const Json& t = j.at("tolerances");
    if (!t.is_object()) {
      issues.push_back("tolerances: expected an object");
    } else {
      reject_unknown(t, "tolerances", {"slope_min", "r2_min", "tail_flag_ratio"}, issues);
      if (auto v = opt_number(t, "slope_min", "tolerances", issues)) cfg.tolerances.slope_min = *v;
      if (auto v = opt_number(t, "r2_min", "tolerances", issues)) cfg.tolerances.r2_min = *v;
      if (auto v = opt_number(t, "tail_flag_ratio", "tolerances", issues)) cfg.tolerances.tail_flag_ratio = *v;
    }
  }

  if (!j.contains("family")) {
    issues.push_back("family: missing");
  } else if (auto f = parse_family(j.at("family"), "family", cfg.d, cfg.seed, issues)) {
    cfg.family = std::move(*f);
  }

  if (j.contains("h_schedule")) {
    cfg.h_schedule = parse_schedule(j.at("h_schedule"), issues);
  } else {
    for (int e = 3; e <= 9; ++e) cfg.h_schedule.push_back(std::ldexp(1.0, -e));
  }
  for (std::size_t i = 0; i < cfg.h_schedule.size(); ++i) {
    if (!(cfg.h_schedule[i] > 0.0)) issues.push_back(idx("h_schedule", i) + ": must be positive");
    if (i > 0 && !(cfg.h_schedule[i] < cfg.h_schedule[i - 1])) {
      issues.push_back(idx("h_schedule", i) + ": schedule must be strictly decreasing");
    }
  }

  cfg.symbols = parse_named_list<Symbol>(j, "symbols", issues, [&](const Json& e, const std::string& p) {
    return parse_symbol(e, p, cfg.d, issues);
  });
  cfg.windows = parse_named_list<TimeWindow>(j, "windows", issues, [&](const Json& e, const std::string& p) {
    return parse_window(e, p, issues);
  });
  cfg.multipliers = parse_named_list<ModeMap>(j, "multipliers", issues, [&](const Json& e, const std::string& p) {
    reject_unknown(e, p, {"id", "modes"}, issues);
    if (!e.contains("modes")) {
      issues.push_back(p + ".modes: missing");
      return std::optional<ModeMap>{};
    }
    return parse_mode_map(e.at("modes"), p + ".modes", cfg.d, "q", issues);
  });

  if (j.contains("quantities")) {
    const Json& arr = j.at("quantities");
    if (!arr.is_array()) {
      issues.push_back("quantities: expected an array");
    } else {
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = idx("quantities", i);
        const Json& q = arr[i];
        if (!q.is_object()) {
          issues.push_back(path + ": expected an object");
          continue;
        }
        reject_unknown(q, path,
                       {"name", "label", "symbol", "window", "multiplier", "b", "direction", "t", "n_cut", "fit",
                        "slope_min", "r2_min", "accept_identically_zero", "max_abs", "min_abs", "decreasing"},
                       issues);
        const std::size_t before = issues.size();
        QuantitySpec s;
        const std::string name = opt_string(q, "name", path, issues);
        const auto kind = quantity_from_name(name);
        if (!kind) {
          issues.push_back(sub(path, "name") + ": unknown quantity '" + name + "'");
          continue;
        }
        s.kind = *kind;
        s.label = opt_string(q, "label", path, issues);
        if (s.label.empty()) s.label = name;
        s.symbol_id = opt_string(q, "symbol", path, issues);
        s.window_id = opt_string(q, "window", path, issues);
        s.multiplier_id = opt_string(q, "multiplier", path, issues);
        if (q.contains("b")) s.b = parse_coefficient(q.at("b"), sub(path, "b"), cfg.d, issues);
        if (q.contains("direction")) {
          if (auto p = parse_lattice_point(q.at("direction"), sub(path, "direction"), cfg.d, issues)) {
            if (p->is_zero()) {
              issues.push_back(sub(path, "direction") + ": must be nonzero");
            } else {
              s.direction = *p;
            }
          }
        }
        if (auto v = opt_number(q, "t", path, issues)) s.t = *v;
        if (auto v = opt_number(q, "n_cut", path, issues)) s.n_cut = *v;
        s.fit = opt_bool(q, "fit", path, issues, false);
        s.slope_min = opt_number(q, "slope_min", path, issues);
        s.r2_min = opt_number(q, "r2_min", path, issues);
        s.accept_identically_zero = opt_bool(q, "accept_identically_zero", path, issues, false);
        s.max_abs = opt_number(q, "max_abs", path, issues);
        s.min_abs = opt_number(q, "min_abs", path, issues);
        s.decreasing = opt_bool(q, "decreasing", path, issues, false);
        if (!(s.n_cut > 0.0)) issues.push_back(sub(path, "n_cut") + ": must be positive");

        const Needs need = needs_of(s.kind);
        const Symbol* sym = find_named(cfg.symbols, s.symbol_id);
        if (need.symbol && !sym) issues.push_back(sub(path, "symbol") + ": unknown or missing symbol id");
        if (need.zero_mean && sym && sym->has_mean_mode()) {
          issues.push_back(sub(path, "symbol") + ": " + name + " needs a symbol without a zero mode");
        }
        if (need.window && !find_named(cfg.windows, s.window_id)) {
          issues.push_back(sub(path, "window") + ": unknown or missing window id");
        }
        if (need.multiplier && !find_named(cfg.multipliers, s.multiplier_id)) {
          issues.push_back(sub(path, "multiplier") + ": unknown or missing multiplier id");
        }
        if (need.b && !s.b && !q.contains("b")) issues.push_back(sub(path, "b") + ": missing");
        if (need.direction && !s.direction && !q.contains("direction")) {
          issues.push_back(sub(path, "direction") + ": missing");
        }
        if (need.family && j.contains("family") && j.at("family").is_object() &&
            j.at("family").value("kind", "") != need.family) {
          issues.push_back(path + ": " + name + " needs a " + need.family + " family");
        }
        if (s.kind == Quantity::DominationGap && s.b && !s.b->is_nonnegative()) {
          issues.push_back(sub(path, "b") + ": domination_gap needs a nonnegative coefficient");
        }
        if (s.fit && cfg.h_schedule.size() < 3) issues.push_back(path + ": a rate fit needs at least 3 h values");
        if (issues.size() == before) cfg.quantities.push_back(std::move(s));
      }
    }
  }

  if (std::holds_alternative<ResonantPlaneWaveFamily>(cfg.family)) {
    for (std::size_t i = 0; i < cfg.h_schedule.size(); ++i) {
      try {
        (void)inverse_scale_index(cfg.h_schedule[i]);
      } catch (const std::exception&) {
        issues.push_back(idx("h_schedule", i) + ": resonant plane waves need h = 1/n");
      }
    }
  }
  if (!issues.empty()) throw ConfigError(issues);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open"});
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  return parse_config(j);
}

RateFit fit_rate(std::span<const std::pair<double, double>> series) {
  RateFit r;
  if (series.size() < 3) return r;
  if (std::all_of(series.begin(), series.end(), [](const auto& p) { return p.second <= kZeroLevel; })) {
    r.status = FitStatus::IdenticallyZero;
    return r;
  }
  if (std::any_of(series.begin(), series.end(), [](const auto& p) { return !(p.second > 0.0 && p.first > 0.0); })) {
    r.status = FitStatus::Mixed;
    return r;
  }
  const auto n = static_cast<Eigen::Index>(series.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [h, v] = series[static_cast<std::size_t>(i)];
    A(i, 0) = std::log(h);
    A(i, 1) = 1.0;
    y(i) = std::log(v);
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - A * coef;
  const double ss_res = resid.squaredNorm();
  const double ss_tot = (y.array() - y.mean()).square().sum();
  r.slope = coef(0);
  r.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  r.status = FitStatus::Ok;
  return r;
}

cplx averaged_density_oracle(const ModeMap& profile, const LatticePoint& K, const ModeMap& m_modes,
                             const TimeWindow& phi) {
  if (K.is_zero()) throw std::invalid_argument("averaged_density_oracle: K must be nonzero");
  cplx acc{};
  for (const auto& [k1, r1] : profile) {
    for (const auto& [k2, r2] : profile) {
      const LatticePoint q = k1 - k2;
      if (q.dot(K) != 0) continue;
      auto it = m_modes.find(-q);
      if (it == m_modes.end()) continue;
      const double s = 0.5 * static_cast<double>(k1.norm_sq() - k2.norm_sq());
      acc += it->second * r1 * std::conj(r2) * phi.transform(s);
    }
  }
  return acc;
}

cplx wave_packet_limit_oracle(const ModeMap& m_modes, const TimeWindow& phi, double rho_norm_sq, std::size_t d) {
  auto it = m_modes.find(LatticePoint(d));
  const cplx mean = it == m_modes.end() ? cplx{} : it->second;
  return phi.integral() * rho_norm_sq * mean;
}

namespace {

struct CellOut {
  cplx value{};
  double tail = 0.0;
  std::string error;
};

CellOut compute_cell(const ExperimentConfig& cfg, const QuantitySpec& q, const FourierState& u, double h) {
  CellOut out;
  const Symbol* a = find_named(cfg.symbols, q.symbol_id);
  const TimeWindow* phi = find_named(cfg.windows, q.window_id);
  const ModeMap* m = find_named(cfg.multipliers, q.multiplier_id);
  const double nrm = norm_sq(u);
  const double dropped = u.dropped_mass();
  auto window_tail = [&](const Symbol& s) {
    return truncation_bound(pairing_form_bound(s) * phi->transform_sup(), nrm, dropped);
  };
  auto position_tail = [&]() {
    double mabs = 0.0;
    for (const auto& [k, v] : *m) mabs += std::abs(v);
    return truncation_bound(mabs * phi->transform_sup(), nrm, dropped);
  };
  switch (q.kind) {
    case Quantity::NormSq:
      out.value = nrm;
      out.tail = dropped;
      break;
    case Quantity::WignerPair: {
      const PairingResult r = wigner_pair(u, h, *a);
      out.value = r.value;
      out.tail = r.truncation_tail_bound;
      break;
    }
    case Quantity::TimeAveragedPair: {
      const PairingResult r = time_averaged_pair(u, h, *a, *phi);
      out.value = r.value;
      out.tail = r.truncation_tail_bound;
      break;
    }
    case Quantity::ResonantTerm:
      out.value = resonant_term(u, h, *a, *phi);
      out.tail = window_tail(*a);
      break;
    case Quantity::RemainderTerm:
      out.value = remainder_term(u, h, *a, *phi);
      out.tail = 2.0 * window_tail(*a);
      break;
    case Quantity::RemainderRatio: {
      const double scale = remainder_constant(*a, *phi) * h * nrm;
      out.value = std::abs(remainder_term(u, h, *a, *phi)) / scale;
      out.tail = 2.0 * window_tail(*a) / scale;
      break;
    }
    case Quantity::LemmaMainResidual:
      out.value = lemma_main_residual(u, h, *a, *phi);
      out.tail = 2.0 * window_tail(*a);
      break;
    case Quantity::DecompositionDefect: {
      const cplx full = time_averaged_pair(u, h, *a, *phi).value;
      out.value = std::abs(full - resonant_term(u, h, *a, *phi) - remainder_term(u, h, *a, *phi));
      break;
    }
    case Quantity::MainFormulaPair:
      out.value = main_formula_pair(u, h, *a, *phi);
      out.tail = window_tail(*a);
      break;
    case Quantity::MainFormulaGap:
      out.value = std::abs(time_averaged_pair(u, h, *a, *phi).value - main_formula_pair(u, h, *a, *phi));
      out.tail = 2.0 * window_tail(*a);
      break;
    case Quantity::NearHyperplaneMass:
      out.value = near_hyperplane_mass(u, primitive_direction(*q.direction), q.n_cut);
      out.tail = dropped;
      break;
    case Quantity::PositionPair: {
      const PairingResult r = time_averaged_position_pair(u, *m, *phi);
      out.value = r.value;
      out.tail = r.truncation_tail_bound;
      break;
    }
    case Quantity::WavePacketOracleGap:
      out.value = std::abs(time_averaged_position_pair(u, *m, *phi).value -
                           wave_packet_limit_oracle(*m, *phi, 1.0, cfg.d));
      out.tail = position_tail();
      break;
    case Quantity::AveragedDensityOracleGap: {
      const auto& f = std::get<ResonantPlaneWaveFamily>(cfg.family);
      out.value = std::abs(time_averaged_position_pair(u, *m, *phi).value -
                           averaged_density_oracle(f.profile, f.direction, *m, *phi));
      out.tail = position_tail();
      break;
    }
    case Quantity::MainFormulaOracleGap: {
      const auto& f = std::get<ResonantPlaneWaveFamily>(cfg.family);
      const Symbol sm = Symbol::from_multiplier(cfg.d, *m);
      out.value = std::abs(main_formula_pair(u, h, sm, *phi) - averaged_density_oracle(f.profile, f.direction, *m, *phi));
      out.tail = window_tail(sm);
      break;
    }
    case Quantity::ClassicalLimitGap:
      out.value = classical_limit_gap(u, h, *a, q.t);
      out.tail = 2.0 * truncation_bound(pairing_form_bound(*a), nrm, dropped);
      break;
    case Quantity::ClassicalPointGap: {
      const auto& f = std::get<WavePacketFamily>(cfg.family);
      std::vector<double> x(cfg.d);
      for (std::size_t i = 0; i < cfg.d; ++i) x[i] = f.x0[i] + q.t * f.xi0[i];
      const cplx quantum = wigner_pair(evolve(u, h * q.t), h, *a).value;
      out.value = std::abs(quantum - eval_symbol(*a, x, f.xi0));
      out.tail = truncation_bound(pairing_form_bound(*a), nrm, dropped);
      break;
    }
    case Quantity::LiouvilleGap:
      out.value = liouville_invariance_gap(u, h, *q.b, q.t);
      out.tail = 2.0 * q.b->sup_norm() * dropped;
      break;
    case Quantity::TracePair:
      out.value = trace_pair(build_resonant(u, h, primitive_direction(*q.direction)), *q.b);
      out.tail = q.b->sup_norm() * dropped;
      break;
    case Quantity::TraceNormBoundGap:
      out.value = trace_norm_bound_gap(build_resonant(u, h, primitive_direction(*q.direction)), *q.b);
      out.tail = q.b->sup_norm() * dropped;
      break;
    case Quantity::DominationGap:
      out.value = domination_gap(u, h, primitive_direction(*q.direction), *q.b);
      out.tail = 2.0 * q.b->sup_norm() * dropped;
      break;
  }
  return out;
}

void judge(SeriesReport& s, const Tolerances& tol, const RunOptions& opt) {
  s.pass = true;
  std::vector<std::pair<double, double>> pts;
  for (const CellResult& c : s.points) pts.emplace_back(c.h, std::abs(c.value));
  if (!s.failures.empty()) s.pass = false;
  if (s.spec.fit || opt.fit_all) s.fit = fit_rate(pts);
  if (s.spec.fit && s.fit) {
    const double slope_min = s.spec.slope_min.value_or(tol.slope_min);
    const double r2_min = s.spec.r2_min.value_or(tol.r2_min);
    if (s.fit->status == FitStatus::Ok) {
      if (s.fit->slope < slope_min) s.failures.push_back("slope below " + std::to_string(slope_min));
      if (s.fit->r_squared < r2_min) s.failures.push_back("R^2 below " + std::to_string(r2_min));
    } else if (!(s.fit->status == FitStatus::IdenticallyZero && s.spec.accept_identically_zero)) {
      s.failures.push_back("no rate: " + fit_status_name(s.fit->status));
    }
  }
  if (!opt.fit_all && !pts.empty()) {
    if (s.spec.max_abs && !(pts.back().second <= *s.spec.max_abs * opt.tol_scale)) {
      s.failures.push_back("value at smallest h exceeds " + std::to_string(*s.spec.max_abs * opt.tol_scale));
    }
    if (s.spec.min_abs) {
      for (const auto& [h, v] : pts) {
        if (!(v >= *s.spec.min_abs)) {
          s.failures.push_back("value below " + std::to_string(*s.spec.min_abs));
          break;
        }
      }
    }
    if (s.spec.decreasing) {
      for (std::size_t i = 1; i < pts.size(); ++i) {
        if (!(pts[i].second < pts[i - 1].second)) {
          s.failures.push_back("not strictly decreasing");
          break;
        }
      }
    }
  }
  s.pass = s.failures.empty();
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Json spec_to_json(const QuantitySpec& q) {
  Json j = {{"kind", quantity_name(q.kind)}, {"label", q.label}};
  if (!q.symbol_id.empty()) j["symbol"] = q.symbol_id;
  if (!q.window_id.empty()) j["window"] = q.window_id;
  if (!q.multiplier_id.empty()) j["multiplier"] = q.multiplier_id;
  return j;
}

std::string symbol_column(const QuantitySpec& q) { return q.symbol_id.empty() ? q.multiplier_id : q.symbol_id; }

}  // namespace

ConvergenceReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  ConvergenceReport report;
  report.family = family_name(cfg.family);
  report.d = cfg.d;
  report.environment = environment_fingerprint();
  const std::size_t nh = cfg.h_schedule.size();
  const std::size_t nq = cfg.quantities.size();
  if (nq == 0) return report;

  // Cells are (h, quantity), h-major. States are generated once per h and
  // released when the last cell at that h finishes.
  struct Slot {
    std::once_flag once;
    std::shared_ptr<const FourierState> state;
    std::string error;
    std::atomic<std::size_t> remaining{0};
  };
  std::vector<std::unique_ptr<Slot>> slots(nh);
  for (auto& s : slots) {
    s = std::make_unique<Slot>();
    s->remaining = nq;
  }
  std::vector<CellOut> cells(nh * nq);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      const std::size_t ih = c / nq, iq = c % nq;
      Slot& slot = *slots[ih];
      std::call_once(slot.once, [&] {
        try {
          slot.state = std::make_shared<const FourierState>(generate(cfg.family, cfg.h_schedule[ih]));
        } catch (const std::exception& e) {
          slot.error = e.what();
        }
      });
      if (slot.state) {
        std::shared_ptr<const FourierState> u = slot.state;
        try {
          cells[c] = compute_cell(cfg, cfg.quantities[iq], *u, cfg.h_schedule[ih]);
        } catch (const std::exception& e) {
          cells[c].error = e.what();
        }
      } else {
        cells[c].error = "state generation failed: " + slot.error;
      }
      if (--slot.remaining == 0) slot.state.reset();
    }
  };
  const unsigned threads = std::max(1u, opt.threads ? opt.threads : cfg.workers);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t iq = 0; iq < nq; ++iq) {
    SeriesReport s;
    s.spec = cfg.quantities[iq];
    for (std::size_t ih = 0; ih < nh; ++ih) {
      const CellOut& c = cells[ih * nq + iq];
      if (!c.error.empty()) {
        s.failures.push_back("h=" + format_double(cfg.h_schedule[ih]) + ": " + c.error);
        continue;
      }
      CellResult r{cfg.h_schedule[ih], c.value, c.tail,
                   c.tail > cfg.tolerances.tail_flag_ratio * std::abs(c.value)};
      s.points.push_back(r);
    }
    judge(s, cfg.tolerances, opt);
    report.pass = report.pass && s.pass;
    report.series.push_back(std::move(s));
  }
  return report;
}

std::string render_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "family,d,h,quantity,symbol_id,window_id,value_re,value_im,tail_bound\n";
  // schedule order: all quantities at the first h, then the next h
  std::vector<double> hs;
  for (const auto& s : r.series) {
    for (const auto& p : s.points) hs.push_back(p.h);
  }
  std::sort(hs.begin(), hs.end(), std::greater<>());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  for (double h : hs) {
    for (const auto& s : r.series) {
      for (const auto& p : s.points) {
        if (p.h != h) continue;
        os << csv_field(r.family) << ',' << r.d << ',' << format_double(p.h) << ',' << csv_field(s.spec.label) << ','
           << csv_field(symbol_column(s.spec)) << ',' << csv_field(s.spec.window_id) << ','
           << format_double(p.value.real()) << ',' << format_double(p.value.imag()) << ','
           << format_double(p.tail_bound) << '\n';
      }
    }
  }
  return os.str();
}

Json summary_json(const ConvergenceReport& r) {
  Json series = Json::array();
  for (const auto& s : r.series) {
    Json pts = Json::array();
    for (const auto& p : s.points) {
      pts.push_back({{"h", p.h},
                     {"value_re", p.value.real()},
                     {"value_im", p.value.imag()},
                     {"tail_bound", p.tail_bound},
                     {"flagged", p.flagged}});
    }
    Json e = {{"series", s.spec.label}, {"quantity", spec_to_json(s.spec)}, {"points", pts}, {"pass", s.pass},
              {"failures", s.failures}};
    if (s.fit) {
      e["fit_status"] = fit_status_name(s.fit->status);
      e["slope"] = s.fit->status == FitStatus::Ok ? Json(s.fit->slope) : Json(nullptr);
      e["r_squared"] = s.fit->status == FitStatus::Ok ? Json(s.fit->r_squared) : Json(nullptr);
    } else {
      e["slope"] = nullptr;
      e["r_squared"] = nullptr;
    }
    series.push_back(std::move(e));
  }
  return {{"family", r.family}, {"d", r.d}, {"pass", r.pass}, {"series", series}, {"environment", r.environment}};
}

ConvergenceReport report_from_summary(const Json& j) {
  ConvergenceReport r;
  try {
    r.family = j.at("family").get<std::string>();
    r.d = j.at("d").get<std::size_t>();
    r.pass = j.at("pass").get<bool>();
    r.environment = j.value("environment", Json::object());
    for (const Json& e : j.at("series")) {
      SeriesReport s;
      const Json& q = e.at("quantity");
      const auto kind = quantity_from_name(q.at("kind").get<std::string>());
      if (!kind) throw ConfigError({"summary: unknown quantity kind"});
      s.spec.kind = *kind;
      s.spec.label = q.at("label").get<std::string>();
      s.spec.symbol_id = q.value("symbol", "");
      s.spec.window_id = q.value("window", "");
      s.spec.multiplier_id = q.value("multiplier", "");
      for (const Json& p : e.at("points")) {
        s.points.push_back({p.at("h").get<double>(), {p.at("value_re").get<double>(), p.at("value_im").get<double>()},
                            p.at("tail_bound").get<double>(), p.at("flagged").get<bool>()});
      }
      if (e.contains("fit_status")) {
        RateFit f;
        const std::string st = e.at("fit_status").get<std::string>();
        for (FitStatus cand : {FitStatus::Ok, FitStatus::IdenticallyZero, FitStatus::Mixed, FitStatus::TooFewPoints}) {
          if (fit_status_name(cand) == st) f.status = cand;
        }
        if (!e.at("slope").is_null()) f.slope = e.at("slope").get<double>();
        if (!e.at("r_squared").is_null()) f.r_squared = e.at("r_squared").get<double>();
        s.fit = f;
      }
      s.pass = e.at("pass").get<bool>();
      s.failures = e.value("failures", std::vector<std::string>{});
      r.series.push_back(std::move(s));
    }
  } catch (const Json::exception& ex) {
    throw ConfigError({std::string("summary.json: ") + ex.what()});
  }
  return r;
}

void write_run(const ConvergenceReport& r, const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "results.csv", std::ios::binary);
    out << render_csv(r);
  }
  {
    std::ofstream out(dir / "summary.json", std::ios::binary);
    out << summary_json(r).dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "config.json", std::ios::binary);
    out << cfg.source.dump(2) << '\n';
  }
}

void print_summary(const ConvergenceReport& r, std::ostream& os) {
  os << "family " << r.family << ", d = " << r.d << '\n';
  for (const auto& s : r.series) {
    os << (s.pass ? "[PASS] " : "[FAIL] ") << s.spec.label;
    if (!s.points.empty()) {
      os << "  |value| at h=" << format_double(s.points.back().h) << ": "
         << std::setprecision(6) << std::abs(s.points.back().value);
    }
    if (s.fit) {
      os << "  fit=" << fit_status_name(s.fit->status);
      if (s.fit->status == FitStatus::Ok) os << " slope=" << s.fit->slope << " R2=" << s.fit->r_squared;
    }
    std::size_t flagged = 0;
    for (const auto& p : s.points) flagged += p.flagged ? 1 : 0;
    if (flagged) os << "  tail-flagged=" << flagged;
    os << '\n';
    for (const auto& f : s.failures) os << "    " << f << '\n';
  }
  os << (r.pass ? "PASS" : "FAIL") << '\n';
}

Json environment_fingerprint() {
  Json env;
#if defined(__clang__)
  env["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  env["compiler"] = std::string("gcc ") + __VERSION__;
#else
  env["compiler"] = "unknown";
#endif
  env["cplusplus"] = static_cast<long>(__cplusplus);
  env["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
#ifdef NDEBUG
  env["assertions"] = false;
#else
  env["assertions"] = true;
#endif
  env["double_digits"] = std::numeric_limits<double>::digits;
  env["library"] = "reswig 0.1.0";
  return env;
}

}  // namespace reswig
