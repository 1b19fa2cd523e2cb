#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dsbm/profile.hpp"

namespace dsbm {

// Matrix file format: {"K": int, "S": [[...]]} or {"K": int, "P": [[...]]}.
// Other top-level keys are ignored. Throws InvalidInput on ragged rows,
// size mismatch, negative variances or probabilities outside [0,1].
VarianceProfile parse_profile_json(std::string_view text);
VarianceProfile load_profile(const std::filesystem::path& path);

std::string profile_to_json(const VarianceProfile& profile);

// Full-precision scientific notation (%.17e) used by every CSV writer.
std::string format_double(double value);

}  // namespace dsbm
