#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace verve::text {

// Porter (1980) suffix-stripping stemmer for lowercase ASCII words. Words of
// length <= 2 and non-alphabetic tokens are returned unchanged.
std::string porter_stem(std::string_view word);

std::vector<std::string> stem_all(const std::vector<std::string>& words);

}  // namespace verve::text
