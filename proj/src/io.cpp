#include "reswig/io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace reswig {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream os;
  os << "invalid input";
  for (const std::string& s : issues) os << "\n  " << s;
  return os.str();
}

std::string sub(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

bool expect_object(const Json& j, const std::string& path, Issues& issues) {
  if (j.is_object()) return true;
  issues.push_back(path + ": expected an object");
  return false;
}

std::optional<double> get_number(const Json& j, const std::string& key, const std::string& path, Issues& issues,
                                 std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return fallback;
    issues.push_back(sub(path, key) + ": missing");
    return std::nullopt;
  }
  const Json& v = j.at(key);
  if (!v.is_number() || !std::isfinite(v.get<double>())) {
    issues.push_back(sub(path, key) + ": expected a finite number");
    return std::nullopt;
  }
  return v.get<double>();
}

std::optional<std::vector<double>> get_reals(const Json& j, const std::string& key, const std::string& path,
                                             std::size_t d, Issues& issues) {
  if (!j.contains(key)) {
    issues.push_back(sub(path, key) + ": missing");
    return std::nullopt;
  }
  const Json& v = j.at(key);
  if (!v.is_array() || v.size() != d ||
      !std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_number(); })) {
    issues.push_back(sub(path, key) + ": expected " + std::to_string(d) + " numbers");
    return std::nullopt;
  }
  return v.get<std::vector<double>>();
}

std::optional<cplx> get_complex(const Json& j, const std::string& path, Issues& issues) {
  const auto re = get_number(j, "re", path, issues, 0.0);
  const auto im = get_number(j, "im", path, issues, 0.0);
  if (!re || !im) return std::nullopt;
  return cplx{*re, *im};
}

template <class T>
std::optional<T> get_integer(const Json& j, const std::string& key, const std::string& path, Issues& issues,
                             std::optional<T> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return fallback;
    issues.push_back(sub(path, key) + ": missing");
    return std::nullopt;
  }
  const Json& v = j.at(key);
  if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<std::int64_t>() < 0)) {
    issues.push_back(sub(path, key) + ": expected " + (std::is_unsigned_v<T> ? "a nonnegative" : "an") + " integer");
    return std::nullopt;
  }
  return v.get<T>();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

void reject_unknown(const Json& j, const std::string& path, std::initializer_list<const char*> allowed,
                    Issues& issues) {
  if (!j.is_object()) return;
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) issues.push_back(sub(path, key) + ": unknown field");
  }
}

std::optional<LatticePoint> parse_lattice_point(const Json& j, const std::string& path, std::size_t d,
                                                Issues& issues) {
  if (!j.is_array() || j.size() != d ||
      !std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_number_integer(); })) {
    issues.push_back(path + ": expected " + std::to_string(d) + " integers");
    return std::nullopt;
  }
  LatticePoint k(d);
  for (std::size_t i = 0; i < d; ++i) k[i] = j[i].get<std::int64_t>();
  return k;
}

Json state_to_json(const FourierState& u) {
  Json modes = Json::array();
  for (const Mode& m : u.modes()) {
    const auto c = m.k.coords();
    modes.push_back({{"k", std::vector<std::int64_t>(c.begin(), c.end())}, {"re", m.amp.real()}, {"im", m.amp.imag()}});
  }
  return {{"d", u.dim()}, {"modes", modes}};
}

FourierState state_from_json(const Json& j) {
  Issues issues;
  if (!expect_object(j, "state", issues)) throw ConfigError(issues);
  reject_unknown(j, "state", {"d", "modes"}, issues);
  const auto d = get_integer<std::size_t>(j, "d", "state", issues);
  if (d && (*d == 0 || *d > kMaxDim)) issues.push_back("state.d: out of range");
  if (!issues.empty()) throw ConfigError(issues);
  if (!j.contains("modes") || !j.at("modes").is_array()) throw ConfigError({"state.modes: expected an array"});
  std::vector<Mode> modes;
  const Json& arr = j.at("modes");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = idx("state.modes", i);
    if (!expect_object(arr[i], path, issues)) continue;
    reject_unknown(arr[i], path, {"k", "re", "im"}, issues);
    auto k = arr[i].contains("k") ? parse_lattice_point(arr[i].at("k"), sub(path, "k"), *d, issues) : std::nullopt;
    if (!arr[i].contains("k")) issues.push_back(sub(path, "k") + ": missing");
    auto amp = get_complex(arr[i], path, issues);
    if (k && amp) modes.push_back({*k, *amp});
  }
  if (!issues.empty()) throw ConfigError(issues);
  return FourierState(*d, std::move(modes));
}

Json resonant_to_json(const ResonantMeasure& R) {
  const auto p = R.omega.vector().coords();
  Json atoms = Json::array();
  for (const ResonantAtom& a : R.atoms) {
    Json entries = Json::array();
    for (const auto& [n, z] : a.v) entries.push_back({{"n", n}, {"re", z.real()}, {"im", z.imag()}});
    const auto r = a.r_scaled.coords();
    atoms.push_back({{"r_scaled", std::vector<std::int64_t>(r.begin(), r.end())}, {"entries", entries}});
  }
  return {{"omega", std::vector<std::int64_t>(p.begin(), p.end())}, {"h", R.h}, {"atoms", atoms}};
}

std::optional<CoefficientFn> parse_coefficient(const Json& j, const std::string& path, std::size_t d,
                                               Issues& issues) {
  if (!expect_object(j, path, issues)) return std::nullopt;
  if (!j.contains("family") || !j.at("family").is_string()) {
    issues.push_back(sub(path, "family") + ": expected one of constant, gaussian, poly_gaussian");
    return std::nullopt;
  }
  const std::string family = j.at("family").get<std::string>();
  const std::size_t before = issues.size();
  if (family == "constant") {
    reject_unknown(j, path, {"family", "re", "im"}, issues);
    auto c = get_complex(j, path, issues);
    if (issues.size() != before) return std::nullopt;
    return CoefficientFn::constant(*c);
  }
  if (family != "gaussian" && family != "poly_gaussian") {
    issues.push_back(sub(path, "family") + ": unknown family '" + family + "'");
    return std::nullopt;
  }
  reject_unknown(j, path, {"family", "re", "im", "center", "width", "terms"}, issues);
  auto c = get_complex(j, path, issues);
  auto center = get_reals(j, "center", path, d, issues);
  auto width = get_number(j, "width", path, issues);
  if (width && !(*width > 0.0)) issues.push_back(sub(path, "width") + ": must be positive");
  std::vector<Monomial> terms;
  if (family == "poly_gaussian") {
    if (!j.contains("terms") || !j.at("terms").is_array() || j.at("terms").empty()) {
      issues.push_back(sub(path, "terms") + ": expected a nonempty array");
    } else {
      const Json& arr = j.at("terms");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string tp = idx(sub(path, "terms"), i);
        if (!expect_object(arr[i], tp, issues)) continue;
        reject_unknown(arr[i], tp, {"coef", "powers"}, issues);
        auto coef = get_number(arr[i], "coef", tp, issues, 1.0);
        const Json* pw = arr[i].contains("powers") ? &arr[i].at("powers") : nullptr;
        if (!pw || !pw->is_array() || pw->size() != d ||
            !std::all_of(pw->begin(), pw->end(), [](const Json& e) { return e.is_number_integer() && e.get<int>() >= 0; })) {
          issues.push_back(sub(tp, "powers") + ": expected " + std::to_string(d) + " nonnegative integers");
          continue;
        }
        if (coef) terms.push_back({*coef, pw->get<std::vector<int>>()});
      }
    }
  } else if (j.contains("terms")) {
    issues.push_back(sub(path, "terms") + ": only valid for poly_gaussian");
  }
  if (issues.size() != before) return std::nullopt;
  if (family == "gaussian") return CoefficientFn::gaussian(*c, *center, *width);
  return CoefficientFn::poly_gaussian(*c, *center, *width, std::move(terms));
}

std::optional<ModeMap> parse_mode_map(const Json& j, const std::string& path, std::size_t d, const char* key,
                                      Issues& issues) {
  if (!j.is_array()) {
    issues.push_back(path + ": expected an array of modes");
    return std::nullopt;
  }
  const std::size_t before = issues.size();
  ModeMap out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string mp = idx(path, i);
    if (!expect_object(j[i], mp, issues)) continue;
    reject_unknown(j[i], mp, {key, "re", "im"}, issues);
    if (!j[i].contains(key)) {
      issues.push_back(sub(mp, key) + ": missing");
      continue;
    }
    auto q = parse_lattice_point(j[i].at(key), sub(mp, key), d, issues);
    auto c = get_complex(j[i], mp, issues);
    if (!q || !c) continue;
    if (!out.emplace(*q, *c).second) issues.push_back(mp + ": duplicate mode");
  }
  if (issues.size() != before) return std::nullopt;
  return out;
}

std::optional<Symbol> parse_symbol(const Json& j, const std::string& path, std::size_t d, Issues& issues) {
  if (!expect_object(j, path, issues)) return std::nullopt;
  reject_unknown(j, path, {"id", "hermitian", "form", "modes", "multiplier"}, issues);
  const std::size_t before = issues.size();
  bool hermitian = false;
  if (j.contains("hermitian")) {
    if (j.at("hermitian").is_boolean()) {
      hermitian = j.at("hermitian").get<bool>();
    } else {
      issues.push_back(sub(path, "hermitian") + ": expected a boolean");
    }
  }
  if (j.contains("multiplier")) {
    if (j.contains("modes") || j.contains("form")) {
      issues.push_back(path + ": 'multiplier' excludes 'modes' and 'form'");
      return std::nullopt;
    }
    auto m = parse_mode_map(j.at("multiplier"), sub(path, "multiplier"), d, "q", issues);
    if (!m) return std::nullopt;
    Symbol s = Symbol::from_multiplier(d, *m);
    s.set_hermitian(hermitian);
    return s;
  }
  std::string form = "psi";
  if (j.contains("form")) {
    if (j.at("form").is_string()) form = j.at("form").get<std::string>();
    if (form != "psi" && form != "plane_wave") issues.push_back(sub(path, "form") + ": expected psi or plane_wave");
  }
  if (!j.contains("modes") || !j.at("modes").is_array()) {
    issues.push_back(sub(path, "modes") + ": expected an array");
    return std::nullopt;
  }
  const Json& arr = j.at("modes");
  std::vector<std::pair<LatticePoint, CoefficientFn>> modes;
  std::vector<bool> pairs;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string mp = idx(sub(path, "modes"), i);
    if (!expect_object(arr[i], mp, issues)) continue;
    reject_unknown(arr[i], mp, {"k", "coef", "real_pair"}, issues);
    auto k = arr[i].contains("k") ? parse_lattice_point(arr[i].at("k"), sub(mp, "k"), d, issues) : std::nullopt;
    if (!arr[i].contains("k")) issues.push_back(sub(mp, "k") + ": missing");
    auto f = arr[i].contains("coef") ? parse_coefficient(arr[i].at("coef"), sub(mp, "coef"), d, issues)
                                     : std::nullopt;
    if (!arr[i].contains("coef")) issues.push_back(sub(mp, "coef") + ": missing");
    bool real_pair = false;
    if (arr[i].contains("real_pair")) {
      if (arr[i].at("real_pair").is_boolean()) {
        real_pair = arr[i].at("real_pair").get<bool>();
      } else {
        issues.push_back(sub(mp, "real_pair") + ": expected a boolean");
      }
    }
    if (k && f) {
      modes.emplace_back(*k, *f);
      pairs.push_back(real_pair);
    }
  }
  if (issues.size() != before) return std::nullopt;
  const double scale = form == "plane_wave" ? std::pow(2.0 * std::acos(-1.0), static_cast<double>(d) / 2.0) : 1.0;
  Symbol s(d, hermitian);
  try {
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const CoefficientFn f = modes[i].second.scaled(scale);
      if (pairs[i]) {
        s.set_real_pair(modes[i].first, f);
      } else {
        s.set_mode(modes[i].first, f);
      }
    }
  } catch (const std::exception& e) {
    issues.push_back(path + ": " + e.what());
    return std::nullopt;
  }
  return s;
}

std::optional<TimeWindow> parse_window(const Json& j, const std::string& path, Issues& issues) {
  if (!expect_object(j, path, issues)) return std::nullopt;
  reject_unknown(j, path, {"id", "amplitude", "width", "center"}, issues);
  const std::size_t before = issues.size();
  auto a = get_number(j, "amplitude", path, issues, 1.0);
  auto w = get_number(j, "width", path, issues);
  auto c = get_number(j, "center", path, issues, 0.0);
  if (w && !(*w > 0.0)) issues.push_back(sub(path, "width") + ": must be positive");
  if (issues.size() != before) return std::nullopt;
  return TimeWindow{*a, *w, *c};
}

std::optional<StateFamily> parse_family(const Json& j, const std::string& path, std::size_t d,
                                        std::uint64_t default_seed, Issues& issues) {
  if (!expect_object(j, path, issues)) return std::nullopt;
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    issues.push_back(sub(path, "kind") + ": expected a string");
    return std::nullopt;
  }
  const std::string kind = j.at("kind").get<std::string>();
  const std::size_t before = issues.size();
  if (kind == "wave_packet") {
    reject_unknown(j, path, {"kind", "x0", "xi0", "sigma", "trunc"}, issues);
    WavePacketFamily f;
    auto x0 = get_reals(j, "x0", path, d, issues);
    auto xi0 = get_reals(j, "xi0", path, d, issues);
    auto sigma = get_number(j, "sigma", path, issues, 0.2);
    auto trunc = get_number(j, "trunc", path, issues, 1e-12);
    if (sigma && !(*sigma > 0.0)) issues.push_back(sub(path, "sigma") + ": must be positive");
    if (trunc && !(*trunc > 0.0 && *trunc < 1.0)) issues.push_back(sub(path, "trunc") + ": must lie in (0, 1)");
    if (issues.size() != before) return std::nullopt;
    f.x0 = *x0;
    f.xi0 = *xi0;
    f.sigma = *sigma;
    f.trunc = *trunc;
    return f;
  }
  if (kind == "resonant_plane_wave") {
    reject_unknown(j, path, {"kind", "profile", "direction", "trunc"}, issues);
    ResonantPlaneWaveFamily f;
    auto profile = j.contains("profile") ? parse_mode_map(j.at("profile"), sub(path, "profile"), d, "k", issues)
                                         : std::nullopt;
    if (!j.contains("profile")) issues.push_back(sub(path, "profile") + ": missing");
    auto dir = j.contains("direction") ? parse_lattice_point(j.at("direction"), sub(path, "direction"), d, issues)
                                       : std::nullopt;
    if (!j.contains("direction")) issues.push_back(sub(path, "direction") + ": missing");
    if (dir && dir->is_zero()) issues.push_back(sub(path, "direction") + ": must be nonzero");
    auto trunc = get_number(j, "trunc", path, issues, 0.0);
    if (issues.size() != before) return std::nullopt;
    f.profile = *profile;
    f.direction = *dir;
    f.trunc = *trunc;
    return f;
  }
  if (kind == "shell") {
    reject_unknown(j, path, {"kind", "radius", "seed"}, issues);
    auto radius = get_number(j, "radius", path, issues);
    auto seed = get_integer<std::uint64_t>(j, "seed", path, issues, default_seed);
    if (radius && !(*radius > 0.0)) issues.push_back(sub(path, "radius") + ": must be positive");
    if (issues.size() != before) return std::nullopt;
    return ShellFamily{d, *radius, *seed};
  }
  if (kind == "random") {
    reject_unknown(j, path, {"kind", "count", "box", "seed"}, issues);
    auto count = get_integer<std::size_t>(j, "count", path, issues);
    auto box = get_integer<std::int64_t>(j, "box", path, issues);
    auto seed = get_integer<std::uint64_t>(j, "seed", path, issues, default_seed);
    if (box && *box < 0) issues.push_back(sub(path, "box") + ": must be nonnegative");
    if (count && box && *box >= 0) {
      const double cells = std::pow(2.0 * static_cast<double>(*box) + 1.0, static_cast<double>(d));
      if (static_cast<double>(*count) > cells) issues.push_back(sub(path, "count") + ": exceeds the box size");
    }
    if (issues.size() != before) return std::nullopt;
    return RandomFamily{d, *count, *box, *seed};
  }
  if (kind == "superposition") {
    reject_unknown(j, path, {"kind", "parts"}, issues);
    if (!j.contains("parts") || !j.at("parts").is_array() || j.at("parts").empty()) {
      issues.push_back(sub(path, "parts") + ": expected a nonempty array");
      return std::nullopt;
    }
    auto sup = std::make_shared<SuperpositionFamily>();
    const Json& arr = j.at("parts");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string pp = idx(sub(path, "parts"), i);
      if (!expect_object(arr[i], pp, issues)) continue;
      reject_unknown(arr[i], pp, {"re", "im", "family"}, issues);
      auto w = get_complex(arr[i], pp, issues);
      if (!arr[i].contains("family")) {
        issues.push_back(sub(pp, "family") + ": missing");
        continue;
      }
      auto part = parse_family(arr[i].at("family"), sub(pp, "family"), d, default_seed, issues);
      if (w && part) sup->parts.emplace_back(*w, std::move(*part));
    }
    if (issues.size() != before) return std::nullopt;
    return std::shared_ptr<const SuperpositionFamily>(std::move(sup));
  }
  issues.push_back(sub(path, "kind") + ": unknown family '" + kind + "'");
  return std::nullopt;
}

}  // namespace reswig
