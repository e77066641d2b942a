// Randomized property suite behind the `check` command. Generators are
// hand-rolled on std::mt19937_64 so every run with the same seed sees the same
// cases.

#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>

#include "reswig/harness.hpp"
#include "reswig/resonant.hpp"
#include "reswig/wigner.hpp"

namespace reswig {

namespace {

constexpr double kPi = std::numbers::pi;

struct Gen {
  std::mt19937_64 rng;

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  }
  cplx complex_unit() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }

  LatticePoint point(std::size_t d, std::int64_t box, bool nonzero) {
    LatticePoint k(d);
    do {
      for (std::size_t i = 0; i < d; ++i) k[i] = integer(-box, box);
    } while (nonzero && k.is_zero());
    return k;
  }

  std::vector<double> covector(std::size_t d, double r) {
    std::vector<double> v(d);
    for (double& x : v) x = uniform(-r, r);
    return v;
  }

  CoefficientFn coefficient(std::size_t d) {
    const cplx c = complex_unit();
    const double width = uniform(0.3, 1.5);
    if (integer(0, 2) == 0) {
      std::vector<Monomial> terms = {{1.0, std::vector<int>(d, 0)}};
      std::vector<int> pw(d, 0);
      pw[static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(d) - 1))] = 1;
      terms.push_back({uniform(-1.0, 1.0), pw});
      return CoefficientFn::poly_gaussian(c, covector(d, 1.0), width, std::move(terms));
    }
    return CoefficientFn::gaussian(c, covector(d, 1.0), width);
  }

  CoefficientFn nonnegative(std::size_t d) {
    return CoefficientFn::gaussian(uniform(0.1, 2.0), covector(d, 1.0), uniform(0.3, 1.5));
  }

  Symbol symbol(std::size_t d, std::size_t modes, std::int64_t box, bool zero_mean) {
    Symbol a(d);
    for (std::size_t i = 0; i < modes; ++i) a.set_mode(point(d, box, zero_mean), coefficient(d));
    return a;
  }

  TimeWindow window() { return {uniform(0.5, 2.0), uniform(0.3, 2.0), uniform(-1.0, 1.0)}; }

  FourierState state(std::size_t d, std::size_t count, std::int64_t box) {
    return random_state(d, count, box, rng());
  }
};

struct Outcome {
  bool ok = true;
  double worst = 0.0;  // worst normalized defect (≤ 1 passes)
  void record(double defect) {
    worst = std::max(worst, defect);
    if (!(defect <= 1.0)) ok = false;
  }
};

using Property = std::function<void(Gen&, Outcome&)>;

void lattice_bijection(Gen& g, Outcome& o) {
  const std::size_t d = static_cast<std::size_t>(g.integer(2, 4));
  const PrimitiveDirection p = primitive_direction(g.point(d, 6, true));
  for (int i = 0; i < 50; ++i) {
    const LatticePoint k = g.point(d, 40, false);
    const LineDecomposition dec = decompose(k, p);
    LatticePoint back(d);
    const bool exact = reconstruct(dec.n, dec.r_scaled, p, back) && back == k;
    const bool coset = dec.class_c >= 0 && dec.class_c < p.norm_sq() && euclid_mod(dec.n, p.norm_sq()) == dec.class_c;
    o.record(exact && coset ? 0.0 : 2.0);
  }
}

void evolve_unitary(Gen& g, Outcome& o) {
  const FourierState u = g.state(2, 40, 30);
  const double n0 = norm_sq(u);
  o.record(std::abs(norm_sq(evolve(u, g.uniform(-50.0, 50.0))) - n0) / (1e-12 * n0));
}

void decomposition_identity(Gen& g, Outcome& o) {
  const FourierState u = g.state(2, 60, 10);
  const Symbol a = g.symbol(2, 3, 3, true);
  const TimeWindow phi = g.window();
  const double h = g.uniform(0.02, 0.5);
  const cplx full = time_averaged_pair(u, h, a, phi).value;
  const cplx split = resonant_term(u, h, a, phi) + remainder_term(u, h, a, phi);
  o.record(std::abs(full - split) / (1e-9 * (std::abs(full) + norm_sq(u))));
}

void remainder_bound(Gen& g, Outcome& o) {
  const FourierState u = g.state(2, 60, 10);
  const Symbol a = g.symbol(2, 3, 3, true);
  const TimeWindow phi = g.window();
  const double h = g.uniform(0.01, 0.3);
  const double bound = remainder_constant(a, phi) * h * norm_sq(u);
  o.record(std::abs(remainder_term(u, h, a, phi)) / (bound * (1.0 + 1e-12) + 1e-300));
}

void trace_positivity(Gen& g, Outcome& o) {
  const FourierState u = g.state(2, 80, 8);
  const PrimitiveDirection p = primitive_direction(g.point(2, 3, true));
  const ResonantMeasure R = build_resonant(u, g.uniform(0.05, 1.0), p);
  const CoefficientFn b = g.nonnegative(2);
  const double tr = R.total_trace();
  const OperatorWindowMatrix K = operator_window(R, b, R.max_abs_index());
  o.record(std::max(0.0, -min_eigenvalue(K)) / (1e-10 * tr));
  o.record(std::max(0.0, -trace_norm_bound_gap(R, b)) / 1e-10);
}

void liouville(Gen& g, Outcome& o) {
  const FourierState u = g.state(3, 50, 12);
  const CoefficientFn b = g.coefficient(3);
  const double gap = liouville_invariance_gap(u, g.uniform(0.05, 1.0), b, g.uniform(-10.0, 10.0));
  o.record(gap / (1e-12 * norm_sq(u) * b.sup_norm()));
}

void hs_domination(Gen& g, Outcome& o) {
  const Symbol a = g.symbol(2, 4, 3, true);
  const TimeWindow phi = g.window();
  const std::vector<double> xi = g.covector(2, 1.5);
  double total = 0.0;
  for (const PrimitiveDirection& w : directions_of_modes(a.mode_keys())) {
    const OperatorWindowMatrix K = k_a_phi_window(w, xi, a, phi, 60);
    total += std::pow(std::sqrt(hs_norm_sq_window(K)) + K.tail_bound, 2);
  }
  const double bound = hs_bound(a, phi, xi);
  o.record(total / (bound * (1.0 + 1e-9)));
}

void density_matrix_ode(Gen& g, Outcome& o) {
  const FourierState u = g.state(2, 20, 2);
  const PrimitiveDirection p = primitive_direction(g.point(2, 2, true));
  const ResonantMeasure R = build_resonant(u, 0.1, p);
  const double t = g.uniform(-2.0, 2.0), dt = 1e-4;
  const ResonantMeasure plus = evolve_resonant(R, t + dt), minus = evolve_resonant(R, t - dt),
                        mid = evolve_resonant(R, t);
  const double P = static_cast<double>(p.norm_sq());
  for (std::size_t i = 0; i < R.atoms.size(); ++i) {
    const auto& vm = mid.atoms[i].v;
    for (std::size_t a = 0; a < vm.size(); ++a) {
      for (std::size_t b = 0; b < vm.size(); ++b) {
        const auto entry = [&](const ResonantMeasure& S) {
          return S.atoms[i].v[a].second * std::conj(S.atoms[i].v[b].second);
        };
        const double m = static_cast<double>(vm[a].first), n = static_cast<double>(vm[b].first);
        const cplx rhs = cplx{0.0, (n * n - m * m) / (2.0 * P)} * entry(mid);
        const cplx lhs = (entry(plus) - entry(minus)) / (2.0 * dt);
        o.record(std::abs(lhs - rhs) / 1e-6);
      }
    }
  }
  o.record(std::abs(mid.total_trace() - R.total_trace()) / 1e-12);
}

void trace_density_mass(Gen& g, Outcome& o) {
  const FourierState u = g.state(2, 40, 6);
  const PrimitiveDirection p = primitive_direction(g.point(2, 2, true));
  const ResonantMeasure R = build_resonant(u, 0.2, p);
  const CoefficientFn b = g.nonnegative(2);
  const double t = g.uniform(-3.0, 3.0);
  const int M = 1024;
  const double L = 2.0 * kPi * std::sqrt(static_cast<double>(p.norm_sq()));
  double mass = 0.0, lowest = 0.0;
  for (int i = 0; i < M; ++i) {
    const double rho = trace_density_eval(R, t, L * i / M, b);
    lowest = std::min(lowest, rho);
    mass += rho * L / M;
  }
  const double tr = trace_pair(R, b).real();
  o.record(std::abs(mass - tr) / (1e-8 * std::max(1.0, tr)));
  o.record(-lowest / 1e-12);
}

void multiplier_symbol(Gen& g, Outcome& o) {
  const FourierState u = g.state(2, 60, 8);
  ModeMap m;
  for (int i = 0; i < 4; ++i) m[g.point(2, 3, false)] = g.complex_unit();
  const cplx lhs = wigner_pair(u, g.uniform(0.05, 1.0), Symbol::from_multiplier(2, m)).value;
  const cplx rhs = position_density_pair(u, m);
  o.record(std::abs(lhs - rhs) / (1e-12 * (1.0 + std::abs(rhs))));
}

void window_quadrature(Gen& g, Outcome& o) {
  const TimeWindow phi = g.window();
  const double s = g.uniform(-20.0, 20.0);
  // trapezoid on a Gaussian is spectrally accurate
  const double half = 14.0 * phi.width, dt = phi.width / 64.0;
  cplx acc{};
  for (double t = phi.center - half; t <= phi.center + half; t += dt) acc += phi(t) * std::polar(dt, -s * t);
  o.record(std::abs(acc - phi.transform(s)) / 1e-10);
}

void time_average_quadrature(Gen& g, Outcome& o) {
  const FourierState u = g.state(2, 12, 3);
  const Symbol a = g.symbol(2, 3, 2, false);
  const TimeWindow phi = g.window();
  const double h = g.uniform(0.1, 0.5);
  const double half = 14.0 * phi.width, dt = phi.width / 128.0;
  cplx acc{};
  for (double t = phi.center - half; t <= phi.center + half; t += dt) {
    acc += phi(t) * dt * wigner_pair(evolve(u, t), h, a).value;
  }
  const cplx closed = time_averaged_pair(u, h, a, phi).value;
  o.record(std::abs(acc - closed) / (1e-8 * (1.0 + std::abs(closed))));
}

}  // namespace

bool run_property_suite(std::ostream& os, std::uint64_t seed) {
  const std::vector<std::tuple<const char*, int, Property>> props = {
      {"lattice_bijection", 40, lattice_bijection},
      {"evolve_unitary", 40, evolve_unitary},
      {"decomposition_identity", 20, decomposition_identity},
      {"remainder_bound", 20, remainder_bound},
      {"trace_positivity", 30, trace_positivity},
      {"liouville_invariance", 30, liouville},
      {"hs_domination", 20, hs_domination},
      {"density_matrix_ode", 10, density_matrix_ode},
      {"trace_density_mass", 10, trace_density_mass},
      {"multiplier_symbol", 20, multiplier_symbol},
      {"window_quadrature", 30, window_quadrature},
      {"time_average_quadrature", 5, time_average_quadrature},
  };
  bool all = true;
  Gen g{std::mt19937_64(seed)};
  for (const auto& [name, cases, prop] : props) {
    Outcome o;
    std::string error;
    try {
      for (int i = 0; i < cases; ++i) prop(g, o);
    } catch (const std::exception& e) {
      o.ok = false;
      error = e.what();
    }
    all = all && o.ok;
    os << (o.ok ? "[PASS] " : "[FAIL] ") << std::left << std::setw(26) << name << " cases=" << cases
       << " worst/tol=" << std::setprecision(3) << o.worst;
    if (!error.empty()) os << " error: " << error;
    os << '\n';
  }
  return all;
}

}  // namespace reswig
