#pragma once

#include <string>
#include <string_view>

namespace gm {

// SHA-256 hex digest (lowercase), used to guard persisted database entries.
std::string sha256_hex(std::string_view data);

} // namespace gm
