#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace hpccarbon {

/// 64-bit FNV-1a over a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// Same digest rendered as "fnv1a64:" plus 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);

} // namespace hpccarbon
