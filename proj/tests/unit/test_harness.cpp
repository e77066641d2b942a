#include "doctest.h"
#include "oracles.hpp"
#include "reswig/harness.hpp"
#include "reswig/wigner.hpp"

#include <algorithm>
#include <random>
#include <sstream>

using namespace reswig;

namespace {

constexpr double kPi = oracle::kPi;

std::vector<std::pair<double, double>> series_of(double (*f)(double, int)) {
  std::vector<std::pair<double, double>> s;
  for (int e = 3; e <= 10; ++e) {
    const double h = std::ldexp(1.0, -e);
    s.emplace_back(h, f(h, e));
  }
  return s;
}

Json base_config() {
  return Json::parse(R"({
    "d": 2,
    "family": {"kind": "random", "count": 12, "box": 4, "seed": 5},
    "h_schedule": {"dyadic": [2, 5]},
    "symbols": [{"id": "a", "modes": [
      {"k": [1, 0], "coef": {"family": "gaussian", "re": 1.0, "center": [0.2, 0.0], "width": 0.6}}]}],
    "windows": [{"id": "w", "amplitude": 1.0, "width": 0.8, "center": 0.1}],
    "multipliers": [{"id": "m", "modes": [{"q": [0, 0], "re": 1.0}, {"q": [1, 1], "re": 0.3}]}],
    "quantities": [
      {"name": "norm_sq"},
      {"name": "time_averaged_pair", "symbol": "a", "window": "w"},
      {"name": "lemma_main_residual", "symbol": "a", "window": "w"},
      {"name": "position_pair", "multiplier": "m", "window": "w"}
    ]
  })");
}

std::vector<std::string> issues_of(const Json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool mentions(const std::vector<std::string>& issues, const std::string& needle) {
  return std::any_of(issues.begin(), issues.end(), [&](const std::string& s) { return s.find(needle) != s.npos; });
}

}  // namespace

TEST_CASE("fit_rate on synthetic series") {
  const RateFit one = fit_rate(series_of([](double h, int) { return h; }));
  CHECK(one.status == FitStatus::Ok);
  CHECK(std::abs(one.slope - 1.0) < 1e-12);
  CHECK(std::abs(one.r_squared - 1.0) < 1e-12);

  const RateFit two = fit_rate(series_of([](double h, int) { return 5.0 * h * h; }));
  CHECK(std::abs(two.slope - 2.0) < 1e-12);

  const RateFit noisy = fit_rate(series_of([](double h, int e) { return h * (1.0 + 0.1 * (e % 2 ? 1.0 : -1.0)); }));
  CHECK(noisy.slope >= 0.9);
  CHECK(noisy.slope <= 1.1);
  CHECK(noisy.r_squared < 1.0);
}

TEST_CASE("fit_rate status markers") {
  CHECK(fit_rate(series_of([](double, int) { return 0.0; })).status == FitStatus::IdenticallyZero);
  CHECK(fit_rate(series_of([](double h, int e) { return e == 5 ? 0.0 : h; })).status == FitStatus::Mixed);
  CHECK(fit_rate(series_of([](double h, int e) { return e == 5 ? -h : h; })).status == FitStatus::Mixed);
  const std::vector<std::pair<double, double>> two = {{0.5, 0.5}, {0.25, 0.25}};
  CHECK(fit_rate(two).status == FitStatus::TooFewPoints);
  CHECK(fit_status_name(FitStatus::Mixed) == "identically-zero-or-mixed");
}

TEST_CASE("quantity names round-trip") {
  for (int i = 0; i <= static_cast<int>(Quantity::DominationGap); ++i) {
    const auto q = static_cast<Quantity>(i);
    CHECK(quantity_from_name(quantity_name(q)) == q);
  }
  CHECK_FALSE(quantity_from_name("no_such_quantity").has_value());
}

TEST_CASE("averaged_density_oracle closed cases") {
  const TimeWindow phi{1.0, 0.6, 0.2};
  const ModeMap profile = {{LatticePoint{0, 0}, 1.0}, {LatticePoint{0, 1}, cplx{0.5, 0.5}}};
  const ModeMap one = {{LatticePoint{0, 0}, 1.0}};
  CHECK(std::abs(averaged_density_oracle(profile, {1, 0}, one, phi) - phi.integral() * 1.5) < 1e-14);

  const ModeMap single = {{LatticePoint{2, 1}, cplx{0.0, 2.0}}};
  const ModeMap m = {{LatticePoint{0, 0}, cplx{0.3, 0.1}}, {LatticePoint{0, 1}, 0.7}};
  CHECK(std::abs(averaged_density_oracle(single, {1, 0}, m, phi) - phi.integral() * 4.0 * cplx{0.3, 0.1}) < 1e-14);
}

TEST_CASE("averaged_density_oracle two-beat example against time quadrature") {
  // multiplier modes orthogonal to K: the beat phases do not depend on n, so
  // the oracle equals the windowed position pairing of the evolved profile
  const TimeWindow phi{1.0, 0.7, 0.3};
  const ModeMap profile = {{LatticePoint{0, 0}, 1.0}, {LatticePoint{0, 1}, cplx{0.6, 0.2}}};
  const ModeMap m = {{LatticePoint{0, 1}, cplx{0.3, 0.1}}, {LatticePoint{0, -1}, cplx{0.3, -0.1}}};
  const cplx closed = averaged_density_oracle(profile, {1, 0}, m, phi);
  CHECK(std::abs(closed) > 1e-3);
  const FourierState rho(2, {{{0, 0}, 1.0}, {{0, 1}, cplx{0.6, 0.2}}});
  const cplx quad =
      oracle::window_quadrature(phi, [&](double t) { return oracle::grid_position_pair_2d(evolve(rho, t), m, 8); }, 2000);
  CHECK(std::abs(quad - closed) < 1e-10);
  for (std::int64_t n : {4, 16}) {
    const FourierState u = resonant_plane_wave(profile, {1, 0}, n).state;
    const cplx q =
        oracle::window_quadrature(phi, [&](double t) { return oracle::grid_position_pair_2d(evolve(u, t), m, 40); }, 2000);
    CHECK(std::abs(q - closed) < 1e-9);
  }
}

TEST_CASE("wave_packet_limit_oracle") {
  const TimeWindow phi{1.3, 0.5, 0.0};
  CHECK(std::abs(wave_packet_limit_oracle({{LatticePoint{0, 0}, 1.0}}, phi, 1.0, 2) - phi.integral()) < 1e-15);
  CHECK(wave_packet_limit_oracle({{LatticePoint{1, 0}, 1.0}}, phi, 1.0, 2) == cplx{});
  const ModeMap m = {{LatticePoint{0, 0}, cplx{0.25, 0.5}}, {LatticePoint{1, 2}, 3.0}};
  CHECK(std::abs(wave_packet_limit_oracle(m, phi, 2.0, 2) - phi.integral() * 2.0 * cplx{0.25, 0.5}) < 1e-14);
}

TEST_CASE("state JSON round-trip") {
  std::mt19937_64 rng(9);
  const FourierState u = oracle::random_state(rng, 3, 15, 3);
  const Json j = state_to_json(u);
  const FourierState v = state_from_json(Json::parse(j.dump()));
  REQUIRE(v.size() == u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(v.modes()[i].k == u.modes()[i].k);
    CHECK(v.modes()[i].amp == u.modes()[i].amp);
  }
  CHECK_THROWS_AS(state_from_json(Json::parse(R"({"d": 2, "modes": [{"k": [1], "re": 1}]})")), ConfigError);
}

TEST_CASE("resonant JSON layout") {
  const FourierState u(2, {{{1, 0}, 1.0}, {{2, 0}, cplx{0.0, 1.0}}});
  const Json j = resonant_to_json(build_resonant(u, 0.5, primitive_direction({1, 0})));
  CHECK(j.at("omega") == Json::array({1, 0}));
  CHECK(j.at("h") == 0.5);
  REQUIRE(j.at("atoms").size() == 1);
  CHECK(j.at("atoms")[0].at("entries").size() == 2);
  CHECK(j.at("atoms")[0].at("entries")[1].at("im") == 1.0);
}

TEST_CASE("parse_config accepts the base config") {
  const ExperimentConfig cfg = parse_config(base_config());
  CHECK(cfg.d == 2);
  CHECK(cfg.h_schedule.size() == 4);
  CHECK(cfg.h_schedule.front() == 0.25);
  CHECK(cfg.quantities.size() == 4);
  CHECK(cfg.quantities[0].label == "norm_sq");
}

TEST_CASE("parse_config reports every offending field") {
  Json j = base_config();
  j["colour"] = "blue";
  j["quantities"][1]["symbol"] = "missing";
  j["quantities"][3]["window"] = "nope";
  j["windows"][0]["width"] = -1.0;
  const auto issues = issues_of(j);
  CHECK(mentions(issues, "colour"));
  CHECK(mentions(issues, "quantities[1].symbol"));
  CHECK(mentions(issues, "quantities[3].window"));
  CHECK(mentions(issues, "windows[0].width"));
}

TEST_CASE("parse_config error paths") {
  {
    Json j = base_config();
    j["h_schedule"] = Json::array({0.1, 0.2, 0.05});
    CHECK(mentions(issues_of(j), "strictly decreasing"));
  }
  {
    Json j = base_config();
    j["quantities"][0]["name"] = "bogus";
    CHECK(mentions(issues_of(j), "unknown quantity"));
  }
  {
    Json j = base_config();
    j["symbols"][0]["modes"][0]["k"] = Json::array({0, 0});
    CHECK(mentions(issues_of(j), "without a zero mode"));
  }
  {
    Json j = base_config();
    j["h_schedule"] = Json::array({0.5, 0.25});
    j["quantities"][0]["fit"] = true;
    CHECK(mentions(issues_of(j), "at least 3"));
  }
  {
    Json j = base_config();
    j["quantities"].push_back({{"name", "wave_packet_oracle_gap"}, {"multiplier", "m"}, {"window", "w"}});
    CHECK(mentions(issues_of(j), "wave_packet family"));
  }
  {
    Json j = base_config();
    j.erase("family");
    CHECK(mentions(issues_of(j), "family"));
  }
  {
    Json j = base_config();
    j["d"] = 9;
    CHECK(mentions(issues_of(j), "d:"));
  }
  {
    Json j = base_config();
    j["family"]["kind"] = "comet";
    CHECK_FALSE(issues_of(j).empty());
  }
}

TEST_CASE("empty quantities give an empty passing report") {
  Json j = base_config();
  j["quantities"] = Json::array();
  const ConvergenceReport r = run_experiment(parse_config(j));
  CHECK(r.series.empty());
  CHECK(r.pass);
}

TEST_CASE("run_experiment values match direct library calls") {
  const ExperimentConfig cfg = parse_config(base_config());
  const ConvergenceReport r = run_experiment(cfg);
  REQUIRE(r.series.size() == 4);
  const FourierState u = generate(cfg.family, 0.25);
  CHECK(r.series[0].points[0].value == cplx{norm_sq(u)});
  const cplx tap = time_averaged_pair(u, 0.25, cfg.symbols[0].value, cfg.windows[0].value).value;
  CHECK(std::abs(r.series[1].points[0].value - tap) < 1e-15);
  CHECK(r.series[2].points[0].value.real() >= 0.0);
}

TEST_CASE("repeated runs give byte-identical CSV, across thread counts") {
  Json j = base_config();
  j["quantities"].push_back({{"name", "resonant_term"}, {"symbol", "a"}, {"window", "w"}});
  const ExperimentConfig cfg = parse_config(j);
  const std::string a = render_csv(run_experiment(cfg, {1, 1.0, false}));
  const std::string b = render_csv(run_experiment(cfg, {1, 1.0, false}));
  const std::string c = render_csv(run_experiment(cfg, {3, 1.0, false}));
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.rfind("family,d,h,quantity,symbol_id,window_id,value_re,value_im,tail_bound\n", 0) == 0);
}

TEST_CASE("summary JSON round-trips through report_from_summary") {
  Json j = base_config();
  j["quantities"][2]["fit"] = true;
  j["quantities"][0]["max_abs"] = 0.5;
  const ConvergenceReport r = run_experiment(parse_config(j));
  const Json s = summary_json(r);
  const ConvergenceReport back = report_from_summary(Json::parse(s.dump()));
  CHECK(back.pass == r.pass);
  REQUIRE(back.series.size() == r.series.size());
  CHECK(back.series[0].pass == false);
  CHECK(back.series[0].failures == r.series[0].failures);
  CHECK(render_csv(back) == render_csv(r));
  std::ostringstream os;
  print_summary(back, os);
  CHECK(os.str().find("norm_sq") != std::string::npos);
}

TEST_CASE("pass criteria") {
  Json j = base_config();
  j["quantities"] = Json::array(
      {{{"name", "norm_sq"}, {"min_abs", 0.99}, {"max_abs", 1.01}},
       {{"name", "lemma_main_residual"}, {"symbol", "a"}, {"window", "w"}, {"max_abs", 1e-30}},
       {{"name", "norm_sq"}, {"label", "norm_decreasing"}, {"decreasing", true}}});
  const ConvergenceReport r = run_experiment(parse_config(j));
  CHECK(r.series[0].pass);
  CHECK_FALSE(r.series[1].pass);
  CHECK_FALSE(r.series[2].pass);
  CHECK(r.series[2].spec.label == "norm_decreasing");
  CHECK_FALSE(r.pass);
  const ConvergenceReport loose = run_experiment(parse_config(j), {1, 1e40, false});
  CHECK(loose.series[1].pass);
}
