// torus_state.hpp: sparse Fourier states on the flat torus T^d and the free
// Schrödinger flow e^{itΔ/2}.
//
// A state u = Σ û(k) ψ_k with ψ_k(x) = (2π)^{-d/2} e^{ik·x}. The flow acts
// diagonally: e^{itΔ/2} ψ_k = e^{-it|k|²/2} ψ_k.
//
// Multiplier observables m(x) are given by m̂(q) = (2π)^{-d} ∫ m e^{-iq·x} dx,
// so m ≡ 1 is {0: 1}.

#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "reswig/lattice.hpp"
#include "reswig/types.hpp"

namespace reswig {

struct Mode {
  LatticePoint k;
  cplx amp;
};

/// Immutable sparse state. Modes are kept in lexicographic order of k.
class FourierState {
 public:
  explicit FourierState(std::size_t d = 1);
  /// Duplicate keys are summed. dropped_mass records Σ|û|² of modes removed
  /// by a generator's truncation (0 for exact states).
  FourierState(std::size_t d, std::vector<Mode> modes, double dropped_mass = 0.0);

  std::size_t dim() const noexcept { return d_; }
  std::span<const Mode> modes() const noexcept { return modes_; }
  std::size_t size() const noexcept { return modes_.size(); }
  bool empty() const noexcept { return modes_.empty(); }
  double dropped_mass() const noexcept { return dropped_mass_; }

  /// Amplitude at k, or nullptr when k is not in the support.
  const cplx* find(const LatticePoint& k) const noexcept;
  std::vector<LatticePoint> support() const;

  /// Same support (and lookup table), new amplitudes in mode order.
  FourierState with_amplitudes(std::vector<cplx> amps) const;

 private:
  struct Index;
  std::size_t d_;
  std::vector<Mode> modes_;
  std::shared_ptr<const Index> index_;
  double dropped_mass_ = 0.0;
};

double norm_sq(const FourierState& u);

/// e^{itΔ/2} u.
FourierState evolve(const FourierState& u, double t);

/// alpha · u.
FourierState scale(const FourierState& u, cplx alpha);

/// Σ_{|k| > R/h} |û(k)|².
double h_oscillation_tail(const FourierState& u, double h, double radius);

/// Σ_{|k·p| < N} |û(k)|².
double near_hyperplane_mass(const FourierState& u, const PrimitiveDirection& p, double n_cut);

/// ∫ m |u|² dx = Σ_{k,q} m̂(q) û(k) conj(û(k+q)).
cplx position_density_pair(const FourierState& u, const ModeMap& m_modes);

// ---------------------------------------------------------------------------
// Initial-data families

/// Unit-L² Gaussian profile ρ(x) = (πσ²)^{-d/4} exp(-|x|²/(2σ²)); its transform
/// with the normalization ρ̂(η) = (2π)^{-d} ∫ ρ(x) e^{-ix·η} dx.
double gaussian_profile_hat(double sigma, std::span<const double> eta);

struct WavePacketFamily {
  std::vector<double> x0;
  std::vector<double> xi0;
  double sigma = 0.2;
  double trunc = 1e-12;
};

/// Periodized h^{-d/4} ρ((x - x0)/√h) e^{i ξ0·x/h}; coefficients by Poisson
/// summation. Modes with |û|² < trunc · (peak envelope)² are dropped and
/// their mass recorded.
FourierState wave_packet(const WavePacketFamily& wp, double h);

struct ResonantPlaneWaveFamily {
  ModeMap profile;         // ρ̂ on Z^d (ψ-basis coefficients of ρ_per)
  LatticePoint direction;  // K, so that ξ0 = K and ξ0/h = nK
  double trunc = 0.0;
};

struct ResonantPlaneWave {
  FourierState state;
  double h;
};

/// û(k) = ρ̂(k - nK), h = 1/n.
ResonantPlaneWave resonant_plane_wave(const ModeMap& profile, const LatticePoint& direction,
                                      std::int64_t n, double trunc = 0.0);

/// Equal-weight superposition over the annulus ||k| - radius/h| < 1/2,
/// seeded phases, unit norm.
struct ShellFamily {
  std::size_t d = 2;
  double radius = 1.0;
  std::uint64_t seed = 0;
};

/// h-independent random state: count distinct modes in [-box, box]^d with
/// complex Gaussian amplitudes, unit norm.
struct RandomFamily {
  std::size_t d = 2;
  std::size_t count = 10;
  std::int64_t box = 8;
  std::uint64_t seed = 0;
};

struct SuperpositionFamily;

using StateFamily = std::variant<WavePacketFamily, ResonantPlaneWaveFamily, ShellFamily,
                                 RandomFamily, std::shared_ptr<const SuperpositionFamily>>;

struct SuperpositionFamily {
  std::vector<std::pair<cplx, StateFamily>> parts;
};

FourierState generate(const StateFamily& family, double h);
std::string family_name(const StateFamily& family);
std::size_t family_dim(const StateFamily& family);

/// n with h = 1/n; throws unless 1/h is an integer to 1e-9 relative.
std::int64_t inverse_scale_index(double h);

FourierState random_state(std::size_t d, std::size_t count, std::int64_t box, std::uint64_t seed);

}  // namespace reswig
