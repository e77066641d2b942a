// wigner.hpp: Wigner-distribution pairings on T^d.
//
//   ⟨w_u^h, a⟩ = (2π)^{-d/2} Σ_{k,j} û(k) conj(û(j)) a_{j-k}(h(k+j)/2)
//
// and its time average against a window φ under e^{itΔ/2}, which multiplies
// each term by φ̂((|k|² - |j|²)/2). All sums run over (k, q) with j = k + q,
// q a mode of the symbol, in sorted order with compensated accumulation.

#pragma once

#include <cstddef>

#include "reswig/symbols.hpp"
#include "reswig/torus_state.hpp"

namespace reswig {

struct PairingResult {
  cplx value{};
  std::size_t terms_summed = 0;
  /// Bound on the contribution of modes dropped when the state was generated.
  double truncation_tail_bound = 0.0;
};

PairingResult wigner_pair(const FourierState& u, double h, const Symbol& a);

PairingResult time_averaged_pair(const FourierState& u, double h, const Symbol& a, const TimeWindow& phi);

/// Σ_k b(hk) |û(k)|².
cplx momentum_marginal_pair(const FourierState& u, double h, const CoefficientFn& b);

/// |⟨marginal of e^{itΔ/2}u, b⟩ - ⟨marginal of u, b⟩|.
double liouville_invariance_gap(const FourierState& u, double h, const CoefficientFn& b, double t);

/// Compares ⟨w^h(ht), a⟩ with ⟨w^h(0), a∘φ_t⟩, (a∘φ_t)_q(ξ) = a_q(ξ) e^{itq·ξ}.
double classical_limit_gap(const FourierState& u, double h, const Symbol& a, double t);

/// ⟨w^h(0), a∘φ_t⟩ on its own.
cplx transported_pair(const FourierState& u, double h, const Symbol& a, double t);

/// ∫ φ(t) ∫ m |e^{itΔ/2}u|² dx dt = Σ m̂(q) û(k) conj(û(k+q)) φ̂((|k|² - |k+q|²)/2).
PairingResult time_averaged_position_pair(const FourierState& u, const ModeMap& m_modes, const TimeWindow& phi);

/// (2π)^{-d/2} Σ_q sup|a_q|: |⟨w_u^h, a⟩| ≤ this · ‖u‖².
double pairing_form_bound(const Symbol& a);

/// Bound for |B(u_full) - B(u)| when the state dropped mass δ: the pairing is a
/// bounded sesquilinear form with constant `form_bound`, giving
/// form_bound · (2 ‖u‖ √δ + δ).
double truncation_bound(double form_bound, double norm_sq, double dropped_mass);

}  // namespace reswig
