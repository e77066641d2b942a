#include "reswig/torus_state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "reswig/summation.hpp"

namespace reswig {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

// Open-addressing table from lattice point to mode position.
struct FourierState::Index {
  std::vector<std::uint32_t> slots;
  std::size_t mask = 0;
  static constexpr std::uint32_t kEmpty = std::numeric_limits<std::uint32_t>::max();

  explicit Index(std::span<const Mode> modes) {
    std::size_t cap = 16;
    while (cap < 2 * modes.size()) cap <<= 1;
    slots.assign(cap, kEmpty);
    mask = cap - 1;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      std::size_t s = LatticePointHash{}(modes[i].k) & mask;
      while (slots[s] != kEmpty) s = (s + 1) & mask;
      slots[s] = static_cast<std::uint32_t>(i);
    }
  }

  const Mode* find(std::span<const Mode> modes, const LatticePoint& k) const noexcept {
    std::size_t s = LatticePointHash{}(k)&mask;
    while (slots[s] != kEmpty) {
      const Mode& m = modes[slots[s]];
      if (m.k == k) return &m;
      s = (s + 1) & mask;
    }
    return nullptr;
  }
};

FourierState::FourierState(std::size_t d) : FourierState(d, {}) {}

FourierState::FourierState(std::size_t d, std::vector<Mode> modes, double dropped_mass)
    : d_(d), modes_(std::move(modes)), dropped_mass_(dropped_mass) {
  if (d == 0 || d > kMaxDim) throw std::invalid_argument("unsupported state dimension");
  for (const Mode& m : modes_) {
    if (m.k.dim() != d) throw std::invalid_argument("dimension mismatch in state modes");
  }
  std::sort(modes_.begin(), modes_.end(), [](const Mode& a, const Mode& b) { return a.k < b.k; });
  // merge duplicates
  std::size_t w = 0;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (w > 0 && modes_[w - 1].k == modes_[i].k) {
      modes_[w - 1].amp += modes_[i].amp;
    } else {
      modes_[w++] = modes_[i];
    }
  }
  modes_.resize(w);
  if (modes_.size() >= Index::kEmpty) throw std::length_error("state too large");
  index_ = std::make_shared<const Index>(modes_);
}

const cplx* FourierState::find(const LatticePoint& k) const noexcept {
  const Mode* m = index_->find(modes_, k);
  return m ? &m->amp : nullptr;
}

std::vector<LatticePoint> FourierState::support() const {
  std::vector<LatticePoint> out;
  out.reserve(modes_.size());
  for (const Mode& m : modes_) out.push_back(m.k);
  return out;
}

FourierState FourierState::with_amplitudes(std::vector<cplx> amps) const {
  if (amps.size() != modes_.size()) throw std::invalid_argument("amplitude count mismatch");
  FourierState out(*this);
  for (std::size_t i = 0; i < amps.size(); ++i) out.modes_[i].amp = amps[i];
  return out;
}

double norm_sq(const FourierState& u) {
  CompensatedSum s;
  for (const Mode& m : u.modes()) s.add(std::norm(m.amp));
  return s.value();
}

FourierState evolve(const FourierState& u, double t) {
  std::vector<cplx> amps;
  amps.reserve(u.size());
  for (const Mode& m : u.modes()) {
    const double phase = -0.5 * t * static_cast<double>(m.k.norm_sq());
    amps.push_back(m.amp * std::polar(1.0, phase));
  }
  return u.with_amplitudes(std::move(amps));
}

FourierState scale(const FourierState& u, cplx alpha) {
  std::vector<cplx> amps;
  amps.reserve(u.size());
  for (const Mode& m : u.modes()) amps.push_back(alpha * m.amp);
  return u.with_amplitudes(std::move(amps));
}

double h_oscillation_tail(const FourierState& u, double h, double radius) {
  if (!(h > 0.0) || !(radius > 0.0)) throw std::invalid_argument("h and R must be positive");
  const double cut = radius / h;
  CompensatedSum s;
  for (const Mode& m : u.modes()) {
    if (std::sqrt(static_cast<double>(m.k.norm_sq())) > cut) s.add(std::norm(m.amp));
  }
  return s.value();
}

double near_hyperplane_mass(const FourierState& u, const PrimitiveDirection& p, double n_cut) {
  if (!(n_cut > 0.0)) throw std::invalid_argument("N must be positive");
  if (p.dim() != u.dim()) throw std::invalid_argument("dimension mismatch");
  CompensatedSum s;
  for (const Mode& m : u.modes()) {
    if (std::abs(static_cast<double>(m.k.dot(p.vector()))) < n_cut) s.add(std::norm(m.amp));
  }
  return s.value();
}

cplx position_density_pair(const FourierState& u, const ModeMap& m_modes) {
  ComplexCompensatedSum s;
  for (const Mode& mk : u.modes()) {
    for (const auto& [q, mq] : m_modes) {
      const cplx* uj = u.find(mk.k + q);
      if (uj) s.add(mq * mk.amp * std::conj(*uj));
    }
  }
  return s.value();
}

// ---------------------------------------------------------------------------

double gaussian_profile_hat(double sigma, std::span<const double> eta) {
  const auto d = static_cast<double>(eta.size());
  double e2 = 0.0;
  for (double x : eta) e2 += x * x;
  const double pref = std::pow(2.0 * kPi, -d) * std::pow(kPi * sigma * sigma, -d / 4.0) *
                      std::pow(2.0 * kPi * sigma * sigma, d / 2.0);
  return pref * std::exp(-0.5 * sigma * sigma * e2);
}

namespace {

// Σ over integers n outside [lo, hi] of exp(-alpha (n - c)²), summed directly.
double gaussian_tail_1d(double alpha, double c, std::int64_t lo, std::int64_t hi) {
  CompensatedSum s;
  for (std::int64_t n = hi + 1;; ++n) {
    const double x = static_cast<double>(n) - c;
    const double v = std::exp(-alpha * x * x);
    s.add(v);
    if (x > 0 && v < 1e-300) break;
  }
  for (std::int64_t n = lo - 1;; --n) {
    const double x = static_cast<double>(n) - c;
    const double v = std::exp(-alpha * x * x);
    s.add(v);
    if (x < 0 && v < 1e-300) break;
  }
  return s.value();
}

double gaussian_total_1d(double alpha, double c) {
  const auto center = static_cast<std::int64_t>(std::llround(c));
  CompensatedSum s;
  s.add(std::exp(-alpha * (static_cast<double>(center) - c) * (static_cast<double>(center) - c)));
  s.add(gaussian_tail_1d(alpha, c, center, center));
  return s.value();
}

}  // namespace

FourierState wave_packet(const WavePacketFamily& wp, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("wave_packet: h must be positive");
  if (!(wp.sigma > 0.0)) throw std::invalid_argument("wave_packet: sigma must be positive");
  const std::size_t d = wp.xi0.size();
  if (d == 0 || d > kMaxDim || wp.x0.size() != d) {
    throw std::invalid_argument("wave_packet: x0/xi0 dimension mismatch");
  }
  if (!(wp.trunc > 0.0 && wp.trunc < 1.0)) throw std::invalid_argument("wave_packet: trunc in (0,1)");

  const double dd = static_cast<double>(d);
  const double sigma2 = wp.sigma * wp.sigma;
  const double alpha = sigma2 * h;  // |û(k)|² ∝ exp(-alpha |k - c|²)
  const double amp0 = std::pow(2.0 * kPi, dd / 2.0) * std::pow(h, dd / 4.0) * std::pow(2.0 * kPi, -dd) *
                      std::pow(kPi * sigma2, -dd / 4.0) * std::pow(2.0 * kPi * sigma2, dd / 2.0);
  const double radius2 = std::log(1.0 / wp.trunc) / alpha;
  const double radius = std::sqrt(radius2);

  std::array<double, kMaxDim> c{};
  std::array<std::int64_t, kMaxDim> lo{}, hi{};
  for (std::size_t i = 0; i < d; ++i) {
    c[i] = wp.xi0[i] / h;
    lo[i] = static_cast<std::int64_t>(std::ceil(c[i] - radius));
    hi[i] = static_cast<std::int64_t>(std::floor(c[i] + radius));
  }

  std::vector<Mode> modes;
  CompensatedSum box_dropped;
  LatticePoint k(d);
  for (std::size_t i = 0; i < d; ++i) k[i] = lo[i];
  bool done = false;
  while (!done) {
    double r2 = 0.0, phase = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double y = static_cast<double>(k[i]) - c[i];
      r2 += y * y;
      phase -= y * wp.x0[i];
    }
    const double env = amp0 * std::exp(-0.5 * alpha * r2);
    if (r2 <= radius2) {
      modes.push_back({k, std::polar(env, phase)});
    } else {
      box_dropped.add(env * env);
    }
    std::size_t i = d;
    while (true) {
      if (i == 0) {
        done = true;
        break;
      }
      --i;
      if (k[i] < hi[i]) {
        ++k[i];
        break;
      }
      k[i] = lo[i];
    }
  }

  // mass outside the box from 1-D theta sums: Π T_i · (1 - Π (1 - t_i / T_i))
  double log_keep = 0.0, log_total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double total = gaussian_total_1d(alpha, c[i]);
    const double tail = gaussian_tail_1d(alpha, c[i], lo[i], hi[i]);
    log_total += std::log(total);
    log_keep += std::log1p(-tail / total);
  }
  const double outside = amp0 * amp0 * std::exp(log_total) * (-std::expm1(log_keep));
  return FourierState(d, std::move(modes), box_dropped.value() + outside);
}

ResonantPlaneWave resonant_plane_wave(const ModeMap& profile, const LatticePoint& direction,
                                      std::int64_t n, double trunc) {
  if (n < 1) throw std::invalid_argument("resonant_plane_wave: n must be >= 1");
  const std::size_t d = direction.dim();
  double peak = 0.0;
  for (const auto& [k, a] : profile) {
    if (k.dim() != d) throw std::invalid_argument("resonant_plane_wave: dimension mismatch");
    peak = std::max(peak, std::norm(a));
  }
  std::vector<Mode> modes;
  double dropped = 0.0;
  const LatticePoint shift = n * direction;
  for (const auto& [k, a] : profile) {
    if (std::norm(a) < trunc * peak) {
      dropped += std::norm(a);
      continue;
    }
    modes.push_back({k + shift, a});
  }
  return {FourierState(d, std::move(modes), dropped), 1.0 / static_cast<double>(n)};
}

std::int64_t inverse_scale_index(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  const double inv = 1.0 / h;
  const auto n = static_cast<std::int64_t>(std::llround(inv));
  if (n < 1 || std::abs(inv - static_cast<double>(n)) > 1e-9 * inv) {
    throw std::invalid_argument("resonant plane waves need h = 1/n with integer n");
  }
  return n;
}

FourierState random_state(std::size_t d, std::size_t count, std::int64_t box, std::uint64_t seed) {
  if (d == 0 || d > kMaxDim) throw std::invalid_argument("unsupported dimension");
  const auto side = static_cast<double>(2 * box + 1);
  if (static_cast<double>(count) > std::pow(side, static_cast<double>(d))) {
    throw std::invalid_argument("random_state: more modes than box points");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> coord(-box, box);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Mode> modes;
  std::unordered_set<LatticePoint, LatticePointHash> seen;
  while (modes.size() < count) {
    LatticePoint k(d);
    for (std::size_t i = 0; i < d; ++i) k[i] = coord(rng);
    if (!seen.insert(k).second) continue;
    const double re = gauss(rng);
    const double im = gauss(rng);
    modes.push_back({k, {re, im}});
  }
  double n2 = 0.0;
  for (const Mode& m : modes) n2 += std::norm(m.amp);
  const double s = n2 > 0.0 ? 1.0 / std::sqrt(n2) : 1.0;
  for (Mode& m : modes) m.amp *= s;
  return FourierState(d, std::move(modes));
}

namespace {

FourierState shell_state(const ShellFamily& sf, double h) {
  if (!(h > 0.0) || !(sf.radius > 0.0)) throw std::invalid_argument("shell: h and radius must be positive");
  const std::size_t d = sf.d;
  const double target = sf.radius / h;
  const auto r = static_cast<std::int64_t>(std::ceil(target + 0.5));
  std::vector<Mode> modes;
  std::mt19937_64 rng(sf.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  LatticePoint k(d);
  for (std::size_t i = 0; i < d; ++i) k[i] = -r;
  while (true) {
    const double len = std::sqrt(static_cast<double>(k.norm_sq()));
    if (std::abs(len - target) < 0.5) modes.push_back({k, std::polar(1.0, angle(rng))});
    std::size_t i = d;
    bool done = false;
    while (true) {
      if (i == 0) {
        done = true;
        break;
      }
      --i;
      if (k[i] < r) {
        ++k[i];
        break;
      }
      k[i] = -r;
    }
    if (done) break;
  }
  const double s = modes.empty() ? 1.0 : 1.0 / std::sqrt(static_cast<double>(modes.size()));
  for (Mode& m : modes) m.amp *= s;
  return FourierState(d, std::move(modes));
}

}  // namespace

FourierState generate(const StateFamily& family, double h) {
  struct Visitor {
    double h;
    FourierState operator()(const WavePacketFamily& f) const { return wave_packet(f, h); }
    FourierState operator()(const ResonantPlaneWaveFamily& f) const {
      return resonant_plane_wave(f.profile, f.direction, inverse_scale_index(h), f.trunc).state;
    }
    FourierState operator()(const ShellFamily& f) const { return shell_state(f, h); }
    FourierState operator()(const RandomFamily& f) const {
      return random_state(f.d, f.count, f.box, f.seed);
    }
    FourierState operator()(const std::shared_ptr<const SuperpositionFamily>& f) const {
      if (!f || f->parts.empty()) throw std::invalid_argument("empty superposition");
      std::vector<Mode> modes;
      double dropped_norm = 0.0;  // triangle inequality on the dropped parts
      std::size_t d = 0;
      for (const auto& [w, part] : f->parts) {
        FourierState s = generate(part, h);
        d = s.dim();
        for (const Mode& m : s.modes()) modes.push_back({m.k, w * m.amp});
        dropped_norm += std::abs(w) * std::sqrt(s.dropped_mass());
      }
      return FourierState(d, std::move(modes), dropped_norm * dropped_norm);
    }
  };
  return std::visit(Visitor{h}, family);
}

std::string family_name(const StateFamily& family) {
  struct Visitor {
    std::string operator()(const WavePacketFamily&) const { return "wave_packet"; }
    std::string operator()(const ResonantPlaneWaveFamily&) const { return "resonant_plane_wave"; }
    std::string operator()(const ShellFamily&) const { return "shell"; }
    std::string operator()(const RandomFamily&) const { return "random"; }
    std::string operator()(const std::shared_ptr<const SuperpositionFamily>&) const {
      return "superposition";
    }
  };
  return std::visit(Visitor{}, family);
}

std::size_t family_dim(const StateFamily& family) {
  struct Visitor {
    std::size_t operator()(const WavePacketFamily& f) const { return f.xi0.size(); }
    std::size_t operator()(const ResonantPlaneWaveFamily& f) const { return f.direction.dim(); }
    std::size_t operator()(const ShellFamily& f) const { return f.d; }
    std::size_t operator()(const RandomFamily& f) const { return f.d; }
    std::size_t operator()(const std::shared_ptr<const SuperpositionFamily>& f) const {
      return (f && !f->parts.empty()) ? family_dim(f->parts.front().second) : 0;
    }
  };
  return std::visit(Visitor{}, family);
}

}  // namespace reswig
