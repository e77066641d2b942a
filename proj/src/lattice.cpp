#include "reswig/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace reswig {

namespace {

void check_dim(std::size_t d) {
  if (d == 0 || d > kMaxDim) {
    throw std::invalid_argument("lattice dimension " + std::to_string(d) + " outside [1, " +
                                std::to_string(kMaxDim) + "]");
  }
}

void require_same_dim(const LatticePoint& a, const LatticePoint& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
}

// Extended gcd on nonnegative-result convention: returns g = gcd(|a|,|b|) ≥ 0
// together with x, y such that a x + b y = g.
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
  std::int64_t old_r = a, r = b;
  std::int64_t old_s = 1, s = 0;
  std::int64_t old_t = 0, t = 1;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    old_r = std::exchange(r, old_r - q * r);
    old_s = std::exchange(s, old_s - q * s);
    old_t = std::exchange(t, old_t - q * t);
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  x = old_s;
  y = old_t;
  return old_r;
}

}  // namespace

LatticePoint::LatticePoint(std::size_t d) {
  check_dim(d);
  dim_ = static_cast<std::uint8_t>(d);
}

LatticePoint::LatticePoint(std::initializer_list<std::int64_t> coords) {
  check_dim(coords.size());
  dim_ = static_cast<std::uint8_t>(coords.size());
  std::copy(coords.begin(), coords.end(), c_.begin());
}

LatticePoint::LatticePoint(std::span<const std::int64_t> coords) {
  check_dim(coords.size());
  dim_ = static_cast<std::uint8_t>(coords.size());
  std::copy(coords.begin(), coords.end(), c_.begin());
}

bool LatticePoint::is_zero() const noexcept {
  for (std::size_t i = 0; i < dim_; ++i) {
    if (c_[i] != 0) return false;
  }
  return true;
}

std::int64_t LatticePoint::dot(const LatticePoint& o) const {
  require_same_dim(*this, o);
  std::int64_t s = 0;
  for (std::size_t i = 0; i < dim_; ++i) s += c_[i] * o.c_[i];
  return s;
}

LatticePoint& LatticePoint::operator+=(const LatticePoint& o) {
  require_same_dim(*this, o);
  for (std::size_t i = 0; i < dim_; ++i) c_[i] += o.c_[i];
  return *this;
}

LatticePoint& LatticePoint::operator-=(const LatticePoint& o) {
  require_same_dim(*this, o);
  for (std::size_t i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
  return *this;
}

LatticePoint operator*(std::int64_t s, LatticePoint a) {
  for (std::size_t i = 0; i < a.dim_; ++i) a.c_[i] *= s;
  return a;
}

LatticePoint LatticePoint::operator-() const { return -1 * *this; }

std::strong_ordering operator<=>(const LatticePoint& a, const LatticePoint& b) noexcept {
  const std::size_t n = std::min(a.dim_, b.dim_);
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = a.c_[i] <=> b.c_[i]; c != 0) return c;
  }
  return a.dim_ <=> b.dim_;
}

std::size_t LatticePointHash::operator()(const LatticePoint& k) const noexcept {
  // splitmix64 folded over the coordinates
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ k.dim();
  for (std::int64_t c : k.coords()) {
    std::uint64_t z = h + static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    h = z ^ (z >> 31);
  }
  return static_cast<std::size_t>(h);
}

std::int64_t euclid_mod(std::int64_t a, std::int64_t m) {
  if (m <= 0) throw std::invalid_argument("modulus must be positive");
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

PrimitiveDirection primitive_direction(const LatticePoint& k) {
  if (k.is_zero()) throw std::invalid_argument("no direction: zero vector");
  std::int64_t g = 0;
  for (std::int64_t c : k.coords()) g = std::gcd(g, c);
  LatticePoint p = k;
  std::int64_t first = 0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    p[i] /= g;
    if (first == 0) first = p[i];
  }
  if (first < 0) p = -p;
  return PrimitiveDirection(p, p.norm_sq());
}

LineDecomposition decompose(const LatticePoint& k, const PrimitiveDirection& p) {
  require_same_dim(k, p.vector());
  LineDecomposition out;
  out.n = k.dot(p.vector());
  out.r_scaled = p.norm_sq() * k - out.n * p.vector();
  out.class_c = euclid_mod(out.n, p.norm_sq());
  return out;
}

LatticePoint bezout_witness(const PrimitiveDirection& p) {
  const LatticePoint& v = p.vector();
  LatticePoint c(v.dim());
  std::int64_t g = 0;
  for (std::size_t i = 0; i < v.dim(); ++i) {
    std::int64_t x = 0, y = 0;
    const std::int64_t g2 = ext_gcd(g, v[i], x, y);
    if (g2 == g) continue;  // v[i] adds nothing new (includes v[i] == 0)
    for (std::size_t j = 0; j < i; ++j) c[j] *= x;
    c[i] = y;
    g = g2;
  }
  // g == 1 by primitivity
  return c;
}

bool same_coset(std::int64_t n, std::int64_t m, const PrimitiveDirection& p) {
  return euclid_mod(n - m, p.norm_sq()) == 0;
}

LineGroups group_by_lines(std::span<const LatticePoint> support, const PrimitiveDirection& p) {
  LineGroups groups;
  for (const LatticePoint& k : support) {
    LineDecomposition dec = decompose(k, p);
    groups[dec.r_scaled].emplace_back(dec.n, k);
  }
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end());
  }
  return groups;
}

std::vector<PrimitiveDirection> enumerate_directions(std::size_t d, std::int64_t max_norm_sq) {
  if (d < 2) throw std::invalid_argument("direction enumeration needs d >= 2");
  check_dim(d);
  std::vector<PrimitiveDirection> out;
  if (max_norm_sq < 1) return out;
  const auto radius = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(max_norm_sq)))) + 1;
  LatticePoint k(d);
  for (std::size_t i = 0; i < d; ++i) k[i] = -radius;
  // odometer over the box [-radius, radius]^d in lexicographic order
  while (true) {
    const std::int64_t n2 = k.norm_sq();
    if (n2 >= 1 && n2 <= max_norm_sq) {
      PrimitiveDirection p = primitive_direction(k);
      if (p.vector() == k) out.push_back(p);
    }
    std::size_t i = d;
    while (i > 0) {
      --i;
      if (k[i] < radius) {
        ++k[i];
        break;
      }
      k[i] = -radius;
      if (i == 0) return out;
    }
  }
}

std::set<PrimitiveDirection> directions_of_modes(std::span<const LatticePoint> modes) {
  std::set<PrimitiveDirection> out;
  for (const LatticePoint& k : modes) {
    if (!k.is_zero()) out.insert(primitive_direction(k));
  }
  return out;
}

bool reconstruct(std::int64_t n, const LatticePoint& r_scaled, const PrimitiveDirection& p,
                 LatticePoint& out) {
  LatticePoint num = n * p.vector() + r_scaled;
  for (std::size_t i = 0; i < num.dim(); ++i) {
    if (num[i] % p.norm_sq() != 0) return false;
    num[i] /= p.norm_sq();
  }
  out = num;
  return true;
}

}  // namespace reswig
