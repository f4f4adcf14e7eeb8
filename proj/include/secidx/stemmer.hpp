#pragma once

#include <string>

namespace secidx::text {

// Porter suffix-stripping. Expects a lowercase ASCII token; words of
// length <= 2 are returned unchanged.
std::string stem(const std::string& term);

} // namespace secidx::text
