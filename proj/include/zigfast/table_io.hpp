#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zigfast/tables.hpp"

namespace zigfast {

enum class TableFormat { Json, Binary };

inline constexpr int kTableSchemaVersion = 1;

/// JSON:
///   {"schema_version": 1, "distribution": "exponential", "i_max": 256,
///    "L_max": 252, "X": [...], "F": [...], "A": [...], "epsilon_max": "...",
///    "checksum": "1a2b3c4d"}
/// Reals are hexadecimal floating-point strings ("0x1.e4p+2") so that a
/// round trip is bit-exact. The checksum is the CRC32 of the binary payload.
///
/// Binary (little-endian): "ZIGT", u8 version, u8 distribution, u16 zero,
/// u32 i_max, u32 L_max, f64 epsilon_max, f64 X[L_max+2], f64 F[L_max+2],
/// f64 A[L_max+1], u32 CRC32 of everything before it.
std::vector<std::uint8_t> serialize_tables(const ZigguratTables& tables, TableFormat format);

/// Detects the format from the first byte. Throws FormatError on malformed
/// input, unsupported version or checksum mismatch.
ZigguratTables deserialize_tables(std::span<const std::uint8_t> bytes);

void save_tables(const std::filesystem::path& path, const ZigguratTables& tables,
                 TableFormat format);
ZigguratTables load_tables(const std::filesystem::path& path);

/// Exact hexadecimal representation, e.g. "0x1.8p+1" for 3.
std::string hex_double(double value);
/// Throws FormatError unless text is a complete hexadecimal float.
double parse_hex_double(std::string_view text);

}  // namespace zigfast
