#pragma once

#include <complex>
#include <map>

#include "reswig/lattice.hpp"

namespace reswig {

using cplx = std::complex<double>;
/// Sparse lattice-indexed coefficients (profiles, multiplier transforms m̂).
using ModeMap = std::map<LatticePoint, cplx>;

}  // namespace reswig
