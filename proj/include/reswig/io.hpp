// io.hpp: JSON import/export of states and resonant measures, and parsers for
// the symbol, window, multiplier and family descriptors used in experiment
// configs.
//
// Descriptor parsers never throw on bad input; they append "path: message"
// entries to an issue list so a whole config can be validated in one pass.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "reswig/resonant.hpp"
#include "reswig/symbols.hpp"
#include "reswig/torus_state.hpp"

namespace reswig {

using Json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

using Issues = std::vector<std::string>;

/// {"d": int, "modes": [{"k": [ints], "re": float, "im": float}]}, modes in
/// lexicographic order.
Json state_to_json(const FourierState& u);
/// Throws ConfigError on malformed input.
FourierState state_from_json(const Json& j);

/// {"omega": [ints], "h": float, "atoms": [{"r_scaled": [ints],
///  "entries": [{"n": int, "re": float, "im": float}]}]}
Json resonant_to_json(const ResonantMeasure& R);

// Descriptor parsers. `path` prefixes every issue.
std::optional<CoefficientFn> parse_coefficient(const Json& j, const std::string& path, std::size_t d, Issues& issues);
std::optional<Symbol> parse_symbol(const Json& j, const std::string& path, std::size_t d, Issues& issues);
std::optional<TimeWindow> parse_window(const Json& j, const std::string& path, Issues& issues);
/// [{"q": [ints], "re": float, "im": float}] (also used for profiles with "k").
std::optional<ModeMap> parse_mode_map(const Json& j, const std::string& path, std::size_t d, const char* key,
                                      Issues& issues);
std::optional<StateFamily> parse_family(const Json& j, const std::string& path, std::size_t d,
                                        std::uint64_t default_seed, Issues& issues);
std::optional<LatticePoint> parse_lattice_point(const Json& j, const std::string& path, std::size_t d,
                                                Issues& issues);

/// Appends an issue for every key of j outside `allowed`.
void reject_unknown(const Json& j, const std::string& path, std::initializer_list<const char*> allowed,
                    Issues& issues);

}  // namespace reswig
