#include "reswig/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace reswig {

namespace {

constexpr double kPi = std::numbers::pi;

// sup_y |y|^a exp(-y² / (2w²))
double monomial_peak(int a, double w) {
  if (a == 0) return 1.0;
  const double ad = static_cast<double>(a);
  return std::pow(ad * w * w, ad / 2.0) * std::exp(-ad / 2.0);
}

double monomial_bound(const std::vector<int>& powers, double w) {
  double b = 1.0;
  for (int a : powers) b *= monomial_peak(a, w);
  return b;
}

double ipow(double x, int a) {
  double r = 1.0;
  for (int i = 0; i < a; ++i) r *= x;
  return r;
}

}  // namespace

CoefficientFn CoefficientFn::constant(cplx c) {
  CoefficientFn f;
  f.kind_ = Kind::Constant;
  f.c_ = c;
  return f;
}

CoefficientFn CoefficientFn::gaussian(cplx c, std::vector<double> center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian coefficient: width must be positive");
  if (center.empty() || center.size() > kMaxDim) throw std::invalid_argument("gaussian coefficient: bad center");
  CoefficientFn f;
  f.kind_ = Kind::Gaussian;
  f.c_ = c;
  f.center_ = std::move(center);
  f.width_ = width;
  return f;
}

CoefficientFn CoefficientFn::poly_gaussian(cplx c, std::vector<double> center, double width,
                                           std::vector<Monomial> terms) {
  CoefficientFn f = gaussian(c, std::move(center), width);
  for (const Monomial& m : terms) {
    if (m.powers.size() != f.center_.size()) throw std::invalid_argument("poly_gaussian: exponent dimension");
    for (int a : m.powers) {
      if (a < 0) throw std::invalid_argument("poly_gaussian: negative exponent");
    }
  }
  f.kind_ = Kind::PolyGaussian;
  f.terms_ = std::move(terms);
  return f;
}

cplx CoefficientFn::operator()(std::span<const double> xi) const {
  switch (kind_) {
    case Kind::Zero:
      return {};
    case Kind::Constant:
      return c_;
    case Kind::Gaussian:
    case Kind::PolyGaussian: {
      if (xi.size() != center_.size()) throw std::invalid_argument("coefficient: dimension mismatch");
      std::array<double, kMaxDim> y{};
      double r2 = 0.0;
      for (std::size_t i = 0; i < xi.size(); ++i) {
        y[i] = xi[i] - center_[i];
        r2 += y[i] * y[i];
      }
      const double g = std::exp(-r2 / (2.0 * width_ * width_));
      if (kind_ == Kind::Gaussian) return c_ * g;
      double p = 0.0;
      for (const Monomial& m : terms_) {
        double t = m.coef;
        for (std::size_t i = 0; i < xi.size(); ++i) t *= ipow(y[i], m.powers[i]);
        p += t;
      }
      return c_ * p * g;
    }
  }
  return {};
}

std::vector<cplx> CoefficientFn::gradient(std::span<const double> xi) const {
  std::vector<cplx> g(xi.size());
  if (kind_ == Kind::Zero || kind_ == Kind::Constant) return g;
  if (xi.size() != center_.size()) throw std::invalid_argument("coefficient: dimension mismatch");
  const std::size_t d = xi.size();
  std::vector<double> y(d);
  double r2 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    y[i] = xi[i] - center_[i];
    r2 += y[i] * y[i];
  }
  const double w2 = width_ * width_;
  const double gauss = std::exp(-r2 / (2.0 * w2));
  if (kind_ == Kind::Gaussian) {
    for (std::size_t i = 0; i < d; ++i) g[i] = -c_ * (y[i] / w2) * gauss;
    return g;
  }
  double p = 0.0;
  std::vector<double> dp(d, 0.0);
  for (const Monomial& m : terms_) {
    double t = m.coef;
    for (std::size_t i = 0; i < d; ++i) t *= ipow(y[i], m.powers[i]);
    p += t;
    for (std::size_t j = 0; j < d; ++j) {
      if (m.powers[j] == 0) continue;
      double tj = m.coef * m.powers[j];
      for (std::size_t i = 0; i < d; ++i) tj *= ipow(y[i], m.powers[i] - (i == j ? 1 : 0));
      dp[j] += tj;
    }
  }
  for (std::size_t i = 0; i < d; ++i) g[i] = c_ * (dp[i] - y[i] * p / w2) * gauss;
  return g;
}

double CoefficientFn::sup_norm() const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
    case Kind::Gaussian:
      return std::abs(c_);
    case Kind::PolyGaussian: {
      double b = 0.0;
      for (const Monomial& m : terms_) b += std::abs(m.coef) * monomial_bound(m.powers, width_);
      return std::abs(c_) * b;
    }
  }
  return 0.0;
}

double CoefficientFn::gradient_sup_norm() const {
  switch (kind_) {
    case Kind::Zero:
    case Kind::Constant:
      return 0.0;
    case Kind::Gaussian:
      return std::abs(c_) / width_ * std::exp(-0.5);
    case Kind::PolyGaussian: {
      const std::size_t d = center_.size();
      const double w2 = width_ * width_;
      double total = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        double bi = 0.0;
        for (const Monomial& m : terms_) {
          std::vector<int> up = m.powers;
          ++up[i];
          bi += std::abs(m.coef) * monomial_bound(up, width_) / w2;
          if (m.powers[i] > 0) {
            std::vector<int> down = m.powers;
            --down[i];
            bi += std::abs(m.coef) * m.powers[i] * monomial_bound(down, width_);
          }
        }
        total += bi * bi;
      }
      return std::abs(c_) * std::sqrt(total);
    }
  }
  return 0.0;
}

bool CoefficientFn::is_nonnegative() const noexcept {
  switch (kind_) {
    case Kind::Zero:
      return true;
    case Kind::Constant:
    case Kind::Gaussian:
      return c_.imag() == 0.0 && c_.real() >= 0.0;
    case Kind::PolyGaussian:
      return false;
  }
  return false;
}

CoefficientFn CoefficientFn::conj() const {
  CoefficientFn f = *this;
  f.c_ = std::conj(c_);
  return f;
}

CoefficientFn CoefficientFn::scaled(cplx s) const {
  CoefficientFn f = *this;
  if (kind_ == Kind::Zero) return f;
  f.c_ = s * c_;
  return f;
}

// ---------------------------------------------------------------------------

Symbol::Symbol(std::size_t d, bool hermitian) : d_(d), hermitian_(hermitian) {
  if (d == 0 || d > kMaxDim) throw std::invalid_argument("unsupported symbol dimension");
}

void Symbol::set_mode(const LatticePoint& k, CoefficientFn f) {
  if (k.dim() != d_) throw std::invalid_argument("symbol mode dimension mismatch");
  auto it = std::lower_bound(modes_.begin(), modes_.end(), k,
                             [](const auto& e, const LatticePoint& key) { return e.first < key; });
  if (it != modes_.end() && it->first == k) {
    it->second = std::move(f);
  } else {
    modes_.insert(it, {k, std::move(f)});
  }
}

void Symbol::set_real_pair(const LatticePoint& k, const CoefficientFn& f) {
  if (k.is_zero()) {
    if (f.amplitude().imag() != 0.0) throw std::invalid_argument("mean mode of a real symbol must be real");
    set_mode(k, f);
    return;
  }
  set_mode(k, f);
  set_mode(-k, f.conj());
}

Symbol Symbol::from_plane_wave(std::size_t d, std::span<const std::pair<LatticePoint, CoefficientFn>> modes,
                               bool hermitian) {
  Symbol a(d, hermitian);
  const double s = std::pow(2.0 * kPi, static_cast<double>(d) / 2.0);
  for (const auto& [k, f] : modes) a.set_mode(k, f.scaled(s));
  return a;
}

Symbol Symbol::from_multiplier(std::size_t d, const ModeMap& m_hat) {
  Symbol a(d, false);
  const double s = std::pow(2.0 * kPi, static_cast<double>(d) / 2.0);
  for (const auto& [k, v] : m_hat) a.set_mode(k, CoefficientFn::constant(s * v));
  return a;
}

std::vector<LatticePoint> Symbol::mode_keys() const {
  std::vector<LatticePoint> out;
  out.reserve(modes_.size());
  for (const auto& [k, f] : modes_) out.push_back(k);
  return out;
}

const CoefficientFn* Symbol::find(const LatticePoint& k) const noexcept {
  auto it = std::lower_bound(modes_.begin(), modes_.end(), k,
                             [](const auto& e, const LatticePoint& key) { return e.first < key; });
  if (it != modes_.end() && it->first == k) return &it->second;
  return nullptr;
}

bool Symbol::has_mean_mode() const noexcept {
  const CoefficientFn* f = find(LatticePoint(d_));
  return f != nullptr && !f->is_zero();
}

cplx eval_symbol_coeff(const Symbol& a, const LatticePoint& k, std::span<const double> xi) {
  const CoefficientFn* f = a.find(k);
  return f ? (*f)(xi) : cplx{};
}

cplx eval_symbol(const Symbol& a, std::span<const double> x, std::span<const double> xi) {
  if (x.size() != a.dim() || xi.size() != a.dim()) throw std::invalid_argument("point dimension mismatch");
  const double norm = std::pow(2.0 * kPi, -static_cast<double>(a.dim()) / 2.0);
  cplx acc{};
  for (const auto& [k, f] : a.modes()) {
    double phase = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) phase += static_cast<double>(k[i]) * x[i];
    acc += f(xi) * std::polar(norm, phase);
  }
  return acc;
}

CoefficientFn mean_mode(const Symbol& a) {
  const CoefficientFn* f = a.find(LatticePoint(a.dim()));
  if (!f) return CoefficientFn{};
  return f->scaled(std::pow(2.0 * kPi, -static_cast<double>(a.dim()) / 2.0));
}

Symbol zero_mean_part(const Symbol& a) {
  Symbol out(a.dim(), a.hermitian());
  for (const auto& [k, f] : a.modes()) {
    if (!k.is_zero()) out.set_mode(k, f);
  }
  return out;
}

double hermitian_defect(const Symbol& a, std::span<const Covector> samples) {
  double worst = 0.0;
  for (const auto& [k, f] : a.modes()) {
    const CoefficientFn* partner = a.find(-k);
    for (const Covector& xi : samples) {
      const cplx lhs = partner ? (*partner)(xi.span()) : cplx{};
      worst = std::max(worst, std::abs(lhs - std::conj(f(xi.span()))));
    }
  }
  return worst;
}

double TimeWindow::operator()(double t) const {
  const double y = (t - center) / width;
  return amplitude * std::exp(-0.5 * y * y);
}

cplx TimeWindow::transform(double s) const {
  const double mag = amplitude * width * std::sqrt(2.0 * kPi) * std::exp(-0.5 * width * width * s * s);
  return mag * std::polar(1.0, -s * center);
}

double TimeWindow::integral() const { return amplitude * width * std::sqrt(2.0 * kPi); }

double TimeWindow::transform_sup() const { return std::abs(integral()); }

}  // namespace reswig
