// Independent reference computations for tests. Nothing here calls the
// library's pairing or resonant code; states and symbols are only read.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "reswig/symbols.hpp"
#include "reswig/torus_state.hpp"

namespace oracle {

using reswig::cplx;
using reswig::LatticePoint;
inline constexpr double kPi = std::numbers::pi;

/// k / gcd with the first nonzero entry made positive.
inline std::vector<std::int64_t> primitive(const std::vector<std::int64_t>& k) {
  std::int64_t g = 0;
  for (auto c : k) g = std::gcd(g, c < 0 ? -c : c);
  std::vector<std::int64_t> out(k);
  for (auto& c : out) c /= g;
  for (auto c : out) {
    if (c != 0) {
      if (c < 0) {
        for (auto& e : out) e = -e;
      }
      break;
    }
  }
  return out;
}

/// u(x) = Σ û(k) (2π)^{-d/2} e^{ik·x} at a point.
inline cplx state_at(const reswig::FourierState& u, std::span<const double> x) {
  const double norm = std::pow(2.0 * kPi, -static_cast<double>(u.dim()) / 2.0);
  cplx acc{};
  for (const auto& m : u.modes()) {
    double phase = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) phase += static_cast<double>(m.k[i]) * x[i];
    acc += m.amp * std::polar(norm, phase);
  }
  return acc;
}

/// m(x) = Σ m̂(q) e^{iq·x}.
inline cplx multiplier_at(const reswig::ModeMap& m, std::span<const double> x) {
  cplx acc{};
  for (const auto& [q, c] : m) {
    double phase = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) phase += static_cast<double>(q[i]) * x[i];
    acc += c * std::polar(1.0, phase);
  }
  return acc;
}

/// ∫_{T²} m |u|² dx on an n×n grid (exact for trigonometric polynomials of
/// low enough degree).
inline cplx grid_position_pair_2d(const reswig::FourierState& u, const reswig::ModeMap& m, int n) {
  const double dx = 2.0 * kPi / n;
  cplx acc{};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x[2] = {i * dx, j * dx};
      acc += multiplier_at(m, x) * std::norm(state_at(u, x));
    }
  }
  return acc * dx * dx;
}

/// Composite Simpson on [a, b] with n (even) panels.
inline cplx simpson(const std::function<cplx(double)>& f, double a, double b, int n) {
  const double step = (b - a) / n;
  cplx acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * step);
  return acc * step / 3.0;
}

/// ∫ φ(t) g(t) dt over ±14 widths around the window center.
inline cplx window_quadrature(const reswig::TimeWindow& phi, const std::function<cplx(double)>& g, int n = 4000) {
  const double half = 14.0 * phi.width;
  return simpson([&](double t) { return phi(t) * g(t); }, phi.center - half, phi.center + half, n);
}

/// Random sparse state with modes in [-box, box]^d (distinct), amplitudes
/// uniform in the unit square.
inline reswig::FourierState random_state(std::mt19937_64& rng, std::size_t d, std::size_t count, std::int64_t box) {
  std::uniform_int_distribution<std::int64_t> coord(-box, box);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::vector<reswig::Mode> modes;
  std::vector<LatticePoint> seen;
  while (modes.size() < count) {
    LatticePoint k(d);
    for (std::size_t i = 0; i < d; ++i) k[i] = coord(rng);
    if (std::find(seen.begin(), seen.end(), k) != seen.end()) continue;
    seen.push_back(k);
    modes.push_back({k, {amp(rng), amp(rng)}});
  }
  return reswig::FourierState(d, std::move(modes));
}

inline double max_abs_amp(const reswig::FourierState& u) {
  double m = 0.0;
  for (const auto& e : u.modes()) m = std::max(m, std::abs(e.amp));
  return m;
}

}  // namespace oracle
