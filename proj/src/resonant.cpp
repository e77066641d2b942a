#include "reswig/resonant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include "reswig/summation.hpp"
#include "reswig/wigner.hpp"

namespace reswig {

namespace {

constexpr double kPi = std::numbers::pi;

double psi_norm(std::size_t d) { return std::pow(2.0 * kPi, -static_cast<double>(d) / 2.0); }

// Modes of a on the line of ω, keyed by λ (q = λp).
std::vector<std::pair<std::int64_t, const CoefficientFn*>> line_modes(const Symbol& a, const PrimitiveDirection& omega) {
  std::vector<std::pair<std::int64_t, const CoefficientFn*>> out;
  for (const auto& [q, f] : a.modes()) {
    if (q.is_zero() || f.is_zero()) continue;
    if (primitive_direction(q) != omega) continue;
    out.emplace_back(q.dot(omega.vector()) / omega.norm_sq(), &f);
  }
  return out;
}

void require_zero_mean(const Symbol& a) {
  if (a.has_mean_mode()) throw std::invalid_argument("symbol has a nonzero mean mode");
}

// Σ over n = n0, n0 + dir, ... of |φ̂(λ(2n + λP)/2)|², terms summed until the
// argument grows past the Gaussian range, then closed with a geometric bound.
double transform_sq_tail(const TimeWindow& phi, std::int64_t lambda, std::int64_t P, std::int64_t n0, int dir) {
  const double amp2 = std::pow(phi.transform_sup(), 2);
  const double tau2 = phi.width * phi.width;
  const auto step = static_cast<double>(std::abs(lambda));
  CompensatedSum acc;
  for (std::int64_t n = n0;; n += dir) {
    const double s = 0.5 * static_cast<double>(lambda) * static_cast<double>(2 * n + lambda * P);
    const double term = amp2 * std::exp(-tau2 * s * s);
    acc.add(term);
    const bool moving_out = (s * static_cast<double>(dir * lambda)) > 0.0;
    if (moving_out && tau2 * s * s > 40.0) {
      const double ratio = std::exp(-2.0 * tau2 * std::abs(s) * step);
      acc.add(term * ratio / (1.0 - ratio));
      break;
    }
  }
  return acc.value();
}

struct ResonantSplit {
  cplx resonant{};
  cplx remainder{};
};

ResonantSplit resonant_split(const FourierState& u, double h, const Symbol& a, const TimeWindow& phi) {
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  if (u.dim() != a.dim()) throw std::invalid_argument("state/symbol dimension mismatch");
  require_zero_mean(a);
  ComplexCompensatedSum res, rem;
  const auto keys = a.mode_keys();
  for (const PrimitiveDirection& omega : directions_of_modes(keys)) {
    const auto lines = line_modes(a, omega);
    if (lines.empty()) continue;
    const ResonantMeasure R = build_resonant(u, h, omega);
    const std::int64_t P = omega.norm_sq();
    const double Pd = static_cast<double>(P);
    const LatticePoint& p = omega.vector();
    for (const ResonantAtom& atom : R.atoms) {
      for (const auto& [n, vn] : atom.v) {
        for (const auto& [lambda, f] : lines) {
          const std::int64_t m = n + lambda * P;
          const cplx* vm = atom.find(m);
          if (!vm) continue;
          const double s = static_cast<double>(n * n - m * m) / (2.0 * Pd);
          const cplx weight = phi.transform(s) * vn * std::conj(*vm);
          const cplx at_atom = (*f)(atom.xi.span());
          // midpoint h(k+j)/2 = h(m+n)/(2|p|²) p + ξ
          Covector mid = atom.xi;
          const double shift = h * static_cast<double>(m + n) / (2.0 * Pd);
          for (std::size_t i = 0; i < mid.dim; ++i) mid.v[i] += shift * static_cast<double>(p[i]);
          res.add(weight * at_atom);
          rem.add(weight * ((*f)(mid.span()) - at_atom));
        }
      }
    }
  }
  const double c = psi_norm(u.dim());
  return {c * res.value(), c * rem.value()};
}

Covector atom_position(const LatticePoint& r_scaled, std::int64_t P, double h) {
  Covector xi;
  xi.dim = r_scaled.dim();
  for (std::size_t i = 0; i < xi.dim; ++i) {
    xi.v[i] = h * static_cast<double>(r_scaled[i]) / static_cast<double>(P);
  }
  return xi;
}

}  // namespace

double ResonantAtom::trace() const {
  CompensatedSum s;
  for (const auto& [n, z] : v) s.add(std::norm(z));
  return s.value();
}

const cplx* ResonantAtom::find(std::int64_t n) const noexcept {
  auto it = std::lower_bound(v.begin(), v.end(), n, [](const auto& e, std::int64_t key) { return e.first < key; });
  if (it != v.end() && it->first == n) return &it->second;
  return nullptr;
}

double ResonantMeasure::total_trace() const {
  CompensatedSum s;
  for (const ResonantAtom& a : atoms) s.add(a.trace());
  return s.value();
}

std::int64_t ResonantMeasure::max_abs_index() const {
  std::int64_t m = 0;
  for (const ResonantAtom& a : atoms) {
    for (const auto& [n, z] : a.v) m = std::max(m, std::abs(n));
  }
  return m;
}

cplx OperatorWindowMatrix::at(std::int64_t m, std::int64_t n) const {
  if (std::abs(m) > window || std::abs(n) > window) return {};
  return entries(m + window, n + window);
}

ResonantMeasure build_resonant(const FourierState& u, double h, const PrimitiveDirection& omega) {
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  if (u.dim() != omega.dim()) throw std::invalid_argument("state/direction dimension mismatch");
  ResonantMeasure R{omega, h, {}};
  std::unordered_map<LatticePoint, std::size_t, LatticePointHash> slot;
  for (const Mode& m : u.modes()) {
    LineDecomposition dec = decompose(m.k, omega);
    auto [it, inserted] = slot.try_emplace(dec.r_scaled, R.atoms.size());
    if (inserted) {
      ResonantAtom atom;
      atom.r_scaled = dec.r_scaled;
      atom.xi = atom_position(dec.r_scaled, omega.norm_sq(), h);
      atom.class_c = dec.class_c;
      R.atoms.push_back(std::move(atom));
    }
    R.atoms[it->second].v.emplace_back(dec.n, m.amp);
  }
  std::sort(R.atoms.begin(), R.atoms.end(),
            [](const ResonantAtom& a, const ResonantAtom& b) { return a.r_scaled < b.r_scaled; });
  for (ResonantAtom& a : R.atoms) {
    std::sort(a.v.begin(), a.v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  }
  return R;
}

cplx trace_pair(const ResonantMeasure& R, const CoefficientFn& b) {
  ComplexCompensatedSum acc;
  for (const ResonantAtom& a : R.atoms) acc.add(b(a.xi.span()) * a.trace());
  return acc.value();
}

OperatorWindowMatrix operator_window(const ResonantMeasure& R, const CoefficientFn& b, std::int64_t M) {
  if (M < 0) throw std::invalid_argument("window must be nonnegative");
  OperatorWindowMatrix K;
  K.window = M;
  const auto size = static_cast<Eigen::Index>(2 * M + 1);
  K.entries = Eigen::MatrixXcd::Zero(size, size);
  double tail = 0.0;
  for (const ResonantAtom& a : R.atoms) {
    const cplx w = b(a.xi.span());
    double inside = 0.0, outside = 0.0;
    for (const auto& [m, vm] : a.v) {
      if (std::abs(m) > M) {
        outside += std::norm(vm);
        continue;
      }
      inside += std::norm(vm);
      for (const auto& [n, vn] : a.v) {
        if (std::abs(n) > M) continue;
        K.entries(m + M, n + M) += w * vm * std::conj(vn);
      }
    }
    // ‖v⊗v̄‖²_HS minus its window part: ‖v‖⁴ - ‖v_in‖⁴
    tail += std::abs(w) * std::sqrt(outside * (outside + 2.0 * inside));
  }
  K.tail_bound = tail;
  return K;
}

double min_eigenvalue(const OperatorWindowMatrix& K) {
  if (K.entries.size() == 0) return 0.0;
  const Eigen::MatrixXcd herm = 0.5 * (K.entries + K.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double trace_norm_bound_gap(const ResonantMeasure& R, const CoefficientFn& b) {
  CompensatedSum abs_sum;
  for (const ResonantAtom& a : R.atoms) abs_sum.add(std::abs(b(a.xi.span())) * a.trace());
  return R.total_trace() * b.sup_norm() - abs_sum.value();
}

ResonantMeasure evolve_resonant(const ResonantMeasure& R, double t) {
  ResonantMeasure out = R;
  const auto P = static_cast<double>(R.omega.norm_sq());
  for (ResonantAtom& a : out.atoms) {
    for (auto& [n, z] : a.v) {
      const auto nd = static_cast<double>(n);
      z *= std::polar(1.0, -t * nd * nd / (2.0 * P));
    }
  }
  return out;
}

OperatorWindowMatrix k_a_phi_window(const PrimitiveDirection& omega, std::span<const double> xi, const Symbol& a,
                                    const TimeWindow& phi, std::int64_t M) {
  if (M < 0) throw std::invalid_argument("window must be nonnegative");
  if (a.dim() != omega.dim() || xi.size() != omega.dim()) throw std::invalid_argument("dimension mismatch");
  OperatorWindowMatrix K;
  K.window = M;
  const auto size = static_cast<Eigen::Index>(2 * M + 1);
  K.entries = Eigen::MatrixXcd::Zero(size, size);
  const std::int64_t P = omega.norm_sq();
  const double c = psi_norm(a.dim());
  double tail_sq = 0.0;
  for (const auto& [lambda, f] : line_modes(a, omega)) {
    const cplx aq = (*f)(xi);
    for (std::int64_t n = -M; n <= M; ++n) {
      const std::int64_t m = n + lambda * P;
      if (std::abs(m) > M) continue;
      const double s = static_cast<double>(n * n - m * m) / (2.0 * static_cast<double>(P));
      K.entries(m + M, n + M) = c * phi.transform(s) * aq;
    }
    // omitted n: those with n or n + λP outside [-M, M]
    const std::int64_t lo = std::max(-M, -M - lambda * P);
    const std::int64_t hi = std::min(M, M - lambda * P);
    double omitted = 0.0;
    if (lo > hi) {
      omitted = transform_sq_tail(phi, lambda, P, 0, 1) + transform_sq_tail(phi, lambda, P, -1, -1);
    } else {
      omitted = transform_sq_tail(phi, lambda, P, hi + 1, 1) + transform_sq_tail(phi, lambda, P, lo - 1, -1);
    }
    tail_sq += c * c * std::norm(aq) * omitted;
  }
  K.tail_bound = std::sqrt(tail_sq);
  return K;
}

double hs_norm_sq_window(const OperatorWindowMatrix& K) { return K.entries.squaredNorm(); }

double hs_bound(const Symbol& a, const TimeWindow& phi, std::span<const double> xi) {
  // Σ_N |φ̂(N/2)|²
  const double amp2 = std::pow(phi.transform_sup(), 2);
  const double tau2 = phi.width * phi.width;
  CompensatedSum window_sum;
  window_sum.add(amp2);
  for (std::int64_t N = 1;; ++N) {
    const double s = 0.5 * static_cast<double>(N);
    const double term = amp2 * std::exp(-tau2 * s * s);
    window_sum.add(2.0 * term);
    if (tau2 * s * s > 40.0) {
      const double ratio = std::exp(-tau2 * s);  // (s + 1/2)² - s² ≥ s
      window_sum.add(2.0 * term * ratio / (1.0 - ratio));
      break;
    }
  }
  CompensatedSum modes;
  for (const auto& [k, f] : a.modes()) {
    if (!k.is_zero()) modes.add(std::norm(f(xi)));
  }
  return std::pow(2.0 * kPi, -static_cast<double>(a.dim())) * window_sum.value() * modes.value();
}

cplx resonant_term(const FourierState& u, double h, const Symbol& a, const TimeWindow& phi) {
  return resonant_split(u, h, a, phi).resonant;
}

cplx remainder_term(const FourierState& u, double h, const Symbol& a, const TimeWindow& phi) {
  return resonant_split(u, h, a, phi).remainder;
}

double remainder_constant(const Symbol& a, const TimeWindow& phi) {
  require_zero_mean(a);
  // Σ_N |N/2 · φ̂(N/2)|²
  const double amp2 = std::pow(phi.transform_sup(), 2);
  const double tau2 = phi.width * phi.width;
  CompensatedSum weighted;
  for (std::int64_t N = 1;; ++N) {
    const double s = 0.5 * static_cast<double>(N);
    const double term = amp2 * s * s * std::exp(-tau2 * s * s);
    weighted.add(2.0 * term);
    if (tau2 * s * s > 60.0 && s * tau2 > 2.0) {
      // ratio of consecutive terms ≤ ((s+½)/s)² e^{-τ² s} < 1 here
      const double ratio = std::pow((s + 0.5) / s, 2) * std::exp(-tau2 * s);
      weighted.add(2.0 * term * ratio / (1.0 - ratio));
      break;
    }
  }
  double per_direction = 0.0;
  for (const PrimitiveDirection& omega : directions_of_modes(a.mode_keys())) {
    double acc = 0.0;
    for (const auto& [lambda, f] : line_modes(a, omega)) {
      const double g = f->gradient_sup_norm();
      acc += g * g / (static_cast<double>(lambda * lambda) * static_cast<double>(omega.norm_sq()));
    }
    per_direction += std::sqrt(acc);
  }
  return psi_norm(a.dim()) * std::sqrt(weighted.value()) * per_direction;
}

double lemma_main_residual(const FourierState& u, double h, const Symbol& a, const TimeWindow& phi) {
  require_zero_mean(a);
  const cplx full = time_averaged_pair(u, h, a, phi).value;
  return std::abs(full - resonant_term(u, h, a, phi));
}

cplx rho_fourier_coefficient(const ResonantMeasure& R, double t, const LatticePoint& k, const CoefficientFn& b) {
  if (k.dim() != R.omega.dim()) throw std::invalid_argument("dimension mismatch");
  if (k.is_zero()) throw std::invalid_argument("the zero mode belongs to the averaged term");
  if (primitive_direction(k) != R.omega) throw std::invalid_argument("k is not on the line of omega");
  const std::int64_t shift = k.dot(R.omega.vector());
  const ResonantMeasure Rt = evolve_resonant(R, t);
  ComplexCompensatedSum acc;
  for (const ResonantAtom& a : Rt.atoms) {
    ComplexCompensatedSum line;
    for (const auto& [n, vn] : a.v) {
      if (const cplx* vm = a.find(n + shift)) line.add(*vm * std::conj(vn));
    }
    acc.add(b(a.xi.span()) * line.value());
  }
  return psi_norm(R.omega.dim()) * acc.value();
}

double trace_density_eval(const ResonantMeasure& R, double t, double s, const CoefficientFn& b) {
  const double len = std::sqrt(static_cast<double>(R.omega.norm_sq()));
  const double norm = 1.0 / std::sqrt(2.0 * kPi * len);
  const ResonantMeasure Rt = evolve_resonant(R, t);
  CompensatedSum acc;
  for (const ResonantAtom& a : Rt.atoms) {
    ComplexCompensatedSum wave;
    for (const auto& [n, vn] : a.v) wave.add(vn * std::polar(norm, static_cast<double>(n) * s / len));
    acc.add(b(a.xi.span()).real() * std::norm(wave.value()));
  }
  return acc.value();
}

cplx main_formula_pair(const FourierState& u, double h, const Symbol& a, const TimeWindow& phi) {
  const cplx oscillating = resonant_term(u, h, zero_mean_part(a), phi);
  const cplx averaged = phi.transform(0.0) * momentum_marginal_pair(u, h, mean_mode(a));
  return oscillating + averaged;
}

std::vector<double> vanishing_criterion(const StateFamily& family, const PrimitiveDirection& omega, double n_cut,
                                        std::span<const double> h_schedule) {
  if (!(n_cut > 0.0)) throw std::invalid_argument("N must be positive");
  std::vector<double> out;
  out.reserve(h_schedule.size());
  for (double h : h_schedule) out.push_back(near_hyperplane_mass(generate(family, h), omega, n_cut));
  return out;
}

double domination_gap(const FourierState& u, double h, const PrimitiveDirection& omega, const CoefficientFn& b) {
  if (!b.is_nonnegative()) throw std::invalid_argument("domination_gap needs a nonnegative test function");
  const ResonantMeasure R = build_resonant(u, h, omega);
  const double marginal = momentum_marginal_pair(u, h, b).real();
  const double slack = h * static_cast<double>(R.max_abs_index()) * b.gradient_sup_norm() * norm_sq(u);
  return marginal + slack - trace_pair(R, b).real();
}

}  // namespace reswig
