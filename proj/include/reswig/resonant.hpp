// resonant.hpp: resonant Wigner distributions as atomic operator-valued
// measures on the hyperplane I_ω = p^⊥.
//
// For a direction ω with primitive vector p (P = |p|²), every populated line
// {k + λp} of the support gives one atom at ξ = h r (r the orthogonal offset
// of the line). The atom is the rank-one operator v ⊗ conj(v) on L²(γ_ω),
// written in the basis φ_n(s) = e^{ins/|p|} / √(2π|p|), with
//
//     v(n) = û(k)   for the line point k with k·p = n.
//
// All n in one atom are congruent mod P. Operator entries (m, n) are
// ⟨K φ_n, φ_m⟩, so the atom's entry is v(m) conj(v(n)).

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "reswig/lattice.hpp"
#include "reswig/symbols.hpp"
#include "reswig/torus_state.hpp"

namespace reswig {

struct ResonantAtom {
  LatticePoint r_scaled;  // |p|² r, exact
  Covector xi;            // h r
  std::int64_t class_c = 0;
  std::vector<std::pair<std::int64_t, cplx>> v;  // sorted by n

  double trace() const;
  const cplx* find(std::int64_t n) const noexcept;
};

struct ResonantMeasure {
  PrimitiveDirection omega;
  double h = 0.0;
  std::vector<ResonantAtom> atoms;  // sorted by r_scaled

  double total_trace() const;
  /// Largest |n| over all atoms (0 when empty).
  std::int64_t max_abs_index() const;
};

/// Operator restricted to indices m, n ∈ [-M, M]; entry (m, n) is at
/// (m + M, n + M).
struct OperatorWindowMatrix {
  std::int64_t window = 0;
  Eigen::MatrixXcd entries;
  /// Bound on the Hilbert–Schmidt norm of the omitted entries.
  double tail_bound = 0.0;

  cplx at(std::int64_t m, std::int64_t n) const;
};

ResonantMeasure build_resonant(const FourierState& u, double h, const PrimitiveDirection& omega);

/// tr ∫ b dR = Σ_atoms b(ξ) ‖v‖².
cplx trace_pair(const ResonantMeasure& R, const CoefficientFn& b);

/// Entries Σ_atoms b(ξ) v(m) conj(v(n)) for |m|, |n| ≤ M.
OperatorWindowMatrix operator_window(const ResonantMeasure& R, const CoefficientFn& b, std::int64_t M);

/// Smallest eigenvalue of the Hermitian part of the window.
double min_eigenvalue(const OperatorWindowMatrix& K);

/// ‖u‖² sup|b| - Σ_atoms |b(ξ)| ‖v‖², with ‖u‖² taken as the total trace.
double trace_norm_bound_gap(const ResonantMeasure& R, const CoefficientFn& b);

/// Conjugation by e^{it∂²/2} on γ_ω: v(n) ↦ e^{-itn²/(2|p|²)} v(n).
ResonantMeasure evolve_resonant(const ResonantMeasure& R, double t);

/// Windowed k_{a,φ}(ω, ξ): off-diagonal entries
/// (2π)^{-d/2} φ̂((n² - m²)/(2|p|²)) a_{λp}(ξ) for m - n = λ|p|², λ ≠ 0.
OperatorWindowMatrix k_a_phi_window(const PrimitiveDirection& omega, std::span<const double> xi, const Symbol& a,
                                    const TimeWindow& phi, std::int64_t M);

double hs_norm_sq_window(const OperatorWindowMatrix& K);

/// (2π)^{-d} Σ_{N∈Z} |φ̂(N/2)|² · Σ_{k≠0} |a_k(ξ)|²; bounds Σ_ω ‖k_{a,φ}(ω, ξ)‖²_HS.
double hs_bound(const Symbol& a, const TimeWindow& phi, std::span<const double> xi);

/// Σ_ω tr ∫ k_{a,φ} dR_u^h. a must have no mean mode.
cplx resonant_term(const FourierState& u, double h, const Symbol& a, const TimeWindow& phi);

/// Σ_ω tr ∫ r_{a,φ} dR_u^h, the difference between the time-averaged pairing
/// and the resonant term. a must have no mean mode.
cplx remainder_term(const FourierState& u, double h, const Symbol& a, const TimeWindow& phi);

/// C with |remainder_term| ≤ C h ‖u‖², from the gradient sup-norms of the
/// line modes of a.
double remainder_constant(const Symbol& a, const TimeWindow& phi);

/// |time_averaged_pair - resonant_term|.
double lemma_main_residual(const FourierState& u, double h, const Symbol& a, const TimeWindow& phi);

/// Fourier coefficient of ρ_ω^t tested against b at k = λp, λ ≠ 0:
/// (2π)^{-d/2} Σ_atoms b(ξ) Σ_n v_t(n + k·p) conj(v_t(n)).
cplx rho_fourier_coefficient(const ResonantMeasure& R, double t, const LatticePoint& k, const CoefficientFn& b);

/// Σ_atoms b(ξ) |Σ_n v_t(n) φ_n(s)|², s ∈ [0, 2π|p|).
double trace_density_eval(const ResonantMeasure& R, double t, double s, const CoefficientFn& b);

/// resonant_term(zero-mean part) + φ̂(0) Σ_k ā(hk)|û(k)|².
cplx main_formula_pair(const FourierState& u, double h, const Symbol& a, const TimeWindow& phi);

/// near_hyperplane_mass along an h schedule.
std::vector<double> vanishing_criterion(const StateFamily& family, const PrimitiveDirection& omega, double n_cut,
                                        std::span<const double> h_schedule);

/// Σ_k b(hk)|û(k)|² + h N_eff sup|∇b| ‖u‖² - tr ∫ b dR, N_eff the largest
/// populated |n|. b must be flagged nonnegative.
double domination_gap(const FourierState& u, double h, const PrimitiveDirection& omega, const CoefficientFn& b);

}  // namespace reswig
