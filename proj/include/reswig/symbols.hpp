// symbols.hpp: phase-space observables a(x, ξ) = Σ_k a_k(ξ) ψ_k(x) with
// finitely many x-modes, and Gaussian time windows φ.
//
// Coefficient functions are closed-form parametric families so that values,
// gradients and their sup-norms are exact; time windows have the transform
// φ̂(s) = ∫ φ(t) e^{-ist} dt in closed form.

#pragma once

#include <array>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "reswig/lattice.hpp"
#include "reswig/types.hpp"

namespace reswig {

/// ξ-vector with inline storage (hot loops evaluate coefficients per term).
struct Covector {
  std::array<double, kMaxDim> v{};
  std::size_t dim = 0;
  std::span<const double> span() const noexcept { return {v.data(), dim}; }
};

struct Monomial {
  double coef = 1.0;
  std::vector<int> powers;  // one exponent per coordinate
};

class CoefficientFn {
 public:
  enum class Kind { Zero, Constant, Gaussian, PolyGaussian };

  CoefficientFn() = default;  // the zero function
  static CoefficientFn constant(cplx c);
  /// c · exp(-|ξ - center|² / (2 width²))
  static CoefficientFn gaussian(cplx c, std::vector<double> center, double width);
  /// c · P(ξ - center) · exp(-|ξ - center|² / (2 width²)), P = Σ coef · y^powers
  static CoefficientFn poly_gaussian(cplx c, std::vector<double> center, double width,
                                     std::vector<Monomial> terms);

  Kind kind() const noexcept { return kind_; }
  cplx amplitude() const noexcept { return c_; }
  const std::vector<double>& center() const noexcept { return center_; }
  double width() const noexcept { return width_; }
  const std::vector<Monomial>& terms() const noexcept { return terms_; }

  cplx operator()(std::span<const double> xi) const;
  std::vector<cplx> gradient(std::span<const double> xi) const;

  /// Upper bounds on sup|f| and sup|∇f| over R^d.
  double sup_norm() const;
  double gradient_sup_norm() const;

  bool is_zero() const noexcept { return kind_ == Kind::Zero || c_ == cplx{}; }
  /// True when f ≥ 0 everywhere follows from the parameters.
  bool is_nonnegative() const noexcept;

  CoefficientFn conj() const;
  CoefficientFn scaled(cplx s) const;

 private:
  Kind kind_ = Kind::Zero;
  cplx c_{};
  std::vector<double> center_;
  double width_ = 1.0;
  std::vector<Monomial> terms_;
};

class Symbol {
 public:
  explicit Symbol(std::size_t d = 1, bool hermitian = false);

  /// Adds (or replaces) the ψ-basis coefficient a_k.
  void set_mode(const LatticePoint& k, CoefficientFn f);
  /// Adds a_k = f and a_{-k} = conj(f); for k = 0 f must be real-valued.
  void set_real_pair(const LatticePoint& k, const CoefficientFn& f);

  /// From the plane-wave form a = Σ A_k(ξ) e^{ik·x}: a_k = (2π)^{d/2} A_k.
  static Symbol from_plane_wave(std::size_t d, std::span<const std::pair<LatticePoint, CoefficientFn>> modes,
                                bool hermitian = false);
  /// ξ-independent symbol of the multiplier m: a_k = (2π)^{d/2} m̂(k).
  static Symbol from_multiplier(std::size_t d, const ModeMap& m_hat);

  std::size_t dim() const noexcept { return d_; }
  bool hermitian() const noexcept { return hermitian_; }
  void set_hermitian(bool h) noexcept { hermitian_ = h; }
  /// Sorted by k.
  std::span<const std::pair<LatticePoint, CoefficientFn>> modes() const noexcept { return modes_; }
  std::vector<LatticePoint> mode_keys() const;
  const CoefficientFn* find(const LatticePoint& k) const noexcept;
  bool has_mean_mode() const noexcept;

 private:
  std::size_t d_;
  bool hermitian_;
  std::vector<std::pair<LatticePoint, CoefficientFn>> modes_;
};

/// a_k(ξ); zero when k is not a mode.
cplx eval_symbol_coeff(const Symbol& a, const LatticePoint& k, std::span<const double> xi);

/// a(x, ξ) = Σ_k a_k(ξ) ψ_k(x).
cplx eval_symbol(const Symbol& a, std::span<const double> x, std::span<const double> xi);

/// ā(ξ) = (2π)^{-d} ∫ a(x, ξ) dx = (2π)^{-d/2} a_0(ξ).
CoefficientFn mean_mode(const Symbol& a);

/// a with the zero mode removed.
Symbol zero_mean_part(const Symbol& a);

/// Max over sampled points of |a_{-k}(ξ) - conj(a_k(ξ))|.
double hermitian_defect(const Symbol& a, std::span<const Covector> samples);

/// φ(t) = A exp(-(t - t0)² / (2τ²)).
struct TimeWindow {
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;

  double operator()(double t) const;
  /// φ̂(s) = ∫ φ(t) e^{-ist} dt = A τ √(2π) e^{-ist0} e^{-τ² s² / 2}.
  cplx transform(double s) const;
  /// ∫ φ dt = φ̂(0).
  double integral() const;
  /// sup_s |φ̂(s)|.
  double transform_sup() const;
};

inline cplx window_transform(const TimeWindow& phi, double s) { return phi.transform(s); }

}  // namespace reswig
