#pragma once

#include <string>
#include <string_view>

namespace pfe {

// Trim ASCII whitespace from both ends.
std::string trim(std::string_view s);

// ASCII lowercase.
std::string to_lower(std::string_view s);

// Canonical form for linkage key components and categorical labels:
// lowercase, diacritics stripped (Latin-1 supplement and Latin Extended-A),
// runs of whitespace collapsed to one space, ends trimmed. Idempotent.
std::string normalize_key(std::string_view s);

// True if s is empty or only whitespace.
bool is_blank(std::string_view s);

}  // namespace pfe
