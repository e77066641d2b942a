#include "reswig/wigner.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "reswig/summation.hpp"

namespace reswig {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_h(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
}

void require_dims(const FourierState& u, const Symbol& a) {
  if (u.dim() != a.dim()) throw std::invalid_argument("state/symbol dimension mismatch");
}

Covector midpoint(const LatticePoint& k, const LatticePoint& j, double h) {
  Covector xi;
  xi.dim = k.dim();
  for (std::size_t i = 0; i < xi.dim; ++i) xi.v[i] = 0.5 * h * static_cast<double>(k[i] + j[i]);
  return xi;
}

// Shared kernel: Σ û(k) conj(û(k+q)) a_q(h(2k+q)/2) · weight(k, q, ξ).
template <class Weight>
PairingResult pair_with(const FourierState& u, double h, const Symbol& a, Weight&& weight) {
  ComplexCompensatedSum acc;
  std::size_t terms = 0;
  for (const Mode& mk : u.modes()) {
    for (const auto& [q, f] : a.modes()) {
      const LatticePoint j = mk.k + q;
      const cplx* uj = u.find(j);
      if (!uj) continue;
      const Covector xi = midpoint(mk.k, j, h);
      acc.add(weight(mk.k, j, q, xi) * f(xi.span()) * mk.amp * std::conj(*uj));
      ++terms;
    }
  }
  PairingResult r;
  r.value = std::pow(2.0 * kPi, -static_cast<double>(u.dim()) / 2.0) * acc.value();
  r.terms_summed = terms;
  return r;
}

}  // namespace

double pairing_form_bound(const Symbol& a) {
  double s = 0.0;
  for (const auto& [q, f] : a.modes()) s += f.sup_norm();
  return std::pow(2.0 * kPi, -static_cast<double>(a.dim()) / 2.0) * s;
}

double truncation_bound(double form_bound, double norm_sq, double dropped_mass) {
  if (dropped_mass <= 0.0) return 0.0;
  return form_bound * (2.0 * std::sqrt(norm_sq * dropped_mass) + dropped_mass);
}

PairingResult wigner_pair(const FourierState& u, double h, const Symbol& a) {
  require_positive_h(h);
  require_dims(u, a);
  PairingResult r = pair_with(u, h, a, [](const LatticePoint&, const LatticePoint&, const LatticePoint&,
                                          const Covector&) { return cplx{1.0, 0.0}; });
  r.truncation_tail_bound = truncation_bound(pairing_form_bound(a), norm_sq(u), u.dropped_mass());
  return r;
}

PairingResult time_averaged_pair(const FourierState& u, double h, const Symbol& a, const TimeWindow& phi) {
  require_positive_h(h);
  require_dims(u, a);
  PairingResult r = pair_with(u, h, a, [&](const LatticePoint& k, const LatticePoint& j, const LatticePoint&,
                                           const Covector&) {
    const double s = 0.5 * static_cast<double>(k.norm_sq() - j.norm_sq());
    return phi.transform(s);
  });
  r.truncation_tail_bound =
      truncation_bound(pairing_form_bound(a) * phi.transform_sup(), norm_sq(u), u.dropped_mass());
  return r;
}

cplx momentum_marginal_pair(const FourierState& u, double h, const CoefficientFn& b) {
  require_positive_h(h);
  ComplexCompensatedSum acc;
  Covector xi;
  xi.dim = u.dim();
  for (const Mode& m : u.modes()) {
    for (std::size_t i = 0; i < xi.dim; ++i) xi.v[i] = h * static_cast<double>(m.k[i]);
    acc.add(b(xi.span()) * std::norm(m.amp));
  }
  return acc.value();
}

double liouville_invariance_gap(const FourierState& u, double h, const CoefficientFn& b, double t) {
  return std::abs(momentum_marginal_pair(evolve(u, t), h, b) - momentum_marginal_pair(u, h, b));
}

cplx transported_pair(const FourierState& u, double h, const Symbol& a, double t) {
  require_positive_h(h);
  require_dims(u, a);
  return pair_with(u, h, a, [t](const LatticePoint&, const LatticePoint&, const LatticePoint& q,
                                const Covector& xi) {
           double qxi = 0.0;
           for (std::size_t i = 0; i < xi.dim; ++i) qxi += static_cast<double>(q[i]) * xi.v[i];
           return std::polar(1.0, t * qxi);
         })
      .value;
}

double classical_limit_gap(const FourierState& u, double h, const Symbol& a, double t) {
  require_positive_h(h);
  const cplx quantum = wigner_pair(evolve(u, h * t), h, a).value;
  return std::abs(quantum - transported_pair(u, h, a, t));
}

PairingResult time_averaged_position_pair(const FourierState& u, const ModeMap& m_modes, const TimeWindow& phi) {
  ComplexCompensatedSum acc;
  std::size_t terms = 0;
  double m_abs = 0.0;
  for (const auto& [q, mq] : m_modes) {
    if (q.dim() != u.dim()) throw std::invalid_argument("multiplier dimension mismatch");
    m_abs += std::abs(mq);
  }
  for (const Mode& mk : u.modes()) {
    for (const auto& [q, mq] : m_modes) {
      const LatticePoint j = mk.k + q;
      const cplx* uj = u.find(j);
      if (!uj) continue;
      const double s = 0.5 * static_cast<double>(mk.k.norm_sq() - j.norm_sq());
      acc.add(mq * phi.transform(s) * mk.amp * std::conj(*uj));
      ++terms;
    }
  }
  PairingResult r;
  r.value = acc.value();
  r.terms_summed = terms;
  r.truncation_tail_bound = truncation_bound(m_abs * phi.transform_sup(), norm_sq(u), u.dropped_mass());
  return r;
}

}  // namespace reswig
