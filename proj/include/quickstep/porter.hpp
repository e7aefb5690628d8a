#pragma once

#include <string>
#include <string_view>

namespace quickstep {

/// Porter's 1980 suffix-stripping algorithm, original rule set.
///
/// Input is expected to be a lower-case ASCII word. Tokens containing bytes
/// outside [a-z0-9] are returned unchanged; digits count as consonants.
std::string porter_stem(std::string_view word);

}  // namespace quickstep
