#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace irony {

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// True iff `bytes` is well-formed UTF-8 (no overlongs, no surrogates).
bool is_valid_utf8(std::string_view bytes);

std::string_view trim(std::string_view s);

/// Current UTC time as `YYYY-MM-DDTHH:MM:SSZ`.
std::string utc_timestamp();

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

/// Platform-stable uniform draw in [0, bound) from a 64-bit engine.
template <typename Engine>
std::uint64_t bounded_draw(Engine& engine, std::uint64_t bound) {
    // rejection sampling keeps the draw unbiased and independent of libstdc++'s
    // distribution implementation
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x = 0;
    do {
        x = engine();
    } while (x >= limit);
    return x % bound;
}

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace irony
