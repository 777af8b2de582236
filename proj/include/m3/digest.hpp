#pragma once

#include <string>
#include <string_view>

namespace m3 {

/// Lowercase hex SHA-256 of the bytes; used for bundle manifest digests.
std::string sha256_hex(std::string_view bytes);

} // namespace m3
