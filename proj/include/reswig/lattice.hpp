// lattice.hpp: exact integer arithmetic for resonant directions on Z^d.
//
// A resonant direction is a line through the origin spanned by an integer
// vector. It is represented canonically by its primitive vector p (coprime
// components, first nonzero component positive). Every k ∈ Z^d splits as
//
//     |p|² k = n p + r_scaled,     n = k·p,     r_scaled · p = 0,
//
// where r_scaled = |p|² r is the (exact, integral) rescaling of the orthogonal
// projection r of k onto the hyperplane p^⊥. Points on the same line
// {k + λp} share r_scaled, and their n values form one coset mod |p|².

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace reswig {

/// Largest supported torus dimension. Lattice points are stored inline.
inline constexpr std::size_t kMaxDim = 4;

class LatticePoint {
 public:
  LatticePoint() = default;
  explicit LatticePoint(std::size_t d);
  LatticePoint(std::initializer_list<std::int64_t> coords);
  explicit LatticePoint(std::span<const std::int64_t> coords);

  std::size_t dim() const noexcept { return dim_; }
  std::int64_t operator[](std::size_t i) const noexcept { return c_[i]; }
  std::int64_t& operator[](std::size_t i) noexcept { return c_[i]; }
  std::span<const std::int64_t> coords() const noexcept { return {c_.data(), dim_}; }

  bool is_zero() const noexcept;
  std::int64_t dot(const LatticePoint& o) const;
  std::int64_t norm_sq() const noexcept { return dot(*this); }

  LatticePoint& operator+=(const LatticePoint& o);
  LatticePoint& operator-=(const LatticePoint& o);
  friend LatticePoint operator+(LatticePoint a, const LatticePoint& b) { return a += b; }
  friend LatticePoint operator-(LatticePoint a, const LatticePoint& b) { return a -= b; }
  friend LatticePoint operator*(std::int64_t s, LatticePoint a);
  LatticePoint operator-() const;

  friend bool operator==(const LatticePoint& a, const LatticePoint& b) noexcept {
    return a.dim_ == b.dim_ && a.c_ == b.c_;
  }
  // Lexicographic on coordinates; dimension breaks ties.
  friend std::strong_ordering operator<=>(const LatticePoint& a, const LatticePoint& b) noexcept;

 private:
  std::array<std::int64_t, kMaxDim> c_{};
  std::uint8_t dim_ = 0;
};

struct LatticePointHash {
  std::size_t operator()(const LatticePoint& k) const noexcept;
};

/// Canonical primitive vector of a resonant direction. Only constructible
/// through primitive_direction(), so the invariants always hold.
class PrimitiveDirection {
 public:
  const LatticePoint& vector() const noexcept { return p_; }
  std::int64_t norm_sq() const noexcept { return norm_sq_; }
  std::size_t dim() const noexcept { return p_.dim(); }

  friend bool operator==(const PrimitiveDirection& a, const PrimitiveDirection& b) noexcept {
    return a.p_ == b.p_;
  }
  friend std::strong_ordering operator<=>(const PrimitiveDirection& a,
                                          const PrimitiveDirection& b) noexcept {
    return a.p_ <=> b.p_;
  }

 private:
  friend PrimitiveDirection primitive_direction(const LatticePoint& k);
  PrimitiveDirection(LatticePoint p, std::int64_t n2) : p_(p), norm_sq_(n2) {}
  LatticePoint p_;
  std::int64_t norm_sq_ = 0;
};

struct LineDecomposition {
  std::int64_t n = 0;       // k·p
  LatticePoint r_scaled;    // |p|² k − n p, orthogonal to p
  std::int64_t class_c = 0; // n mod |p|² in [0, |p|²)
};

/// Euclidean remainder in [0, m).
std::int64_t euclid_mod(std::int64_t a, std::int64_t m);

/// Normalizes k ≠ 0 to its primitive direction. Throws on k = 0 ("no direction").
PrimitiveDirection primitive_direction(const LatticePoint& k);

LineDecomposition decompose(const LatticePoint& k, const PrimitiveDirection& p);

/// Some c ∈ Z^d with p·c = 1.
LatticePoint bezout_witness(const PrimitiveDirection& p);

bool same_coset(std::int64_t n, std::int64_t m, const PrimitiveDirection& p);

using LineGroups = std::map<LatticePoint, std::vector<std::pair<std::int64_t, LatticePoint>>>;

/// Groups the support by line {k + λp}; key is r_scaled, members sorted by n.
LineGroups group_by_lines(std::span<const LatticePoint> support, const PrimitiveDirection& p);

/// All primitive directions with |p|² ≤ max_norm_sq in lexicographic order. d ≥ 2.
std::vector<PrimitiveDirection> enumerate_directions(std::size_t d, std::int64_t max_norm_sq);

/// Directions spanned by the nonzero modes; the zero mode carries none.
std::set<PrimitiveDirection> directions_of_modes(std::span<const LatticePoint> modes);

/// Recovers k from (n, r_scaled) when n p + r_scaled is divisible by |p|².
/// Returns false when the pair does not correspond to a lattice point.
bool reconstruct(std::int64_t n, const LatticePoint& r_scaled, const PrimitiveDirection& p,
                 LatticePoint& out);

}  // namespace reswig
