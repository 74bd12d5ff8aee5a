// serialize.hpp - JSON codecs for spectral densities, bath models and system models
//
// Schemas (documented in docs/formats.md):
//   "bathkit-bath/1"   one BathModel
//   "bathkit-model/1"  SystemSpec + labeled baths
// Doubles are written in shortest round-trip form, so import(export(x)) is
// exact. Import errors name the offending JSON pointer (e.g. /baths/0/modes).
// Unknown keys, including "metadata", are ignored on import.

#pragma once

#include "bathkit/discretize.hpp"
#include "bathkit/hamiltonian.hpp"
#include "bathkit/specdens.hpp"

#include <string>
#include <string_view>

namespace bathkit::io {

inline constexpr std::string_view bath_schema = "bathkit-bath/1";
inline constexpr std::string_view model_schema = "bathkit-model/1";

std::string spectral_density_to_json(const SpectralDensity& sd, int indent = 2);
SpectralDensity spectral_density_from_json(std::string_view text);

std::string bath_to_json(const BathModel& bath, int indent = 2);
BathModel bath_from_json(std::string_view text);

std::string system_to_json(const SystemSpec& system, int indent = 2);
SystemSpec system_from_json(std::string_view text);

std::string model_to_json(const DiscreteModel& model, int indent = 2);
DiscreteModel model_from_json(std::string_view text);

} // namespace bathkit::io
