#include "zigfast/table_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <json.hpp>
#include <zlib.h>

#include "zigfast/errors.hpp"

namespace zigfast {
namespace {

constexpr char kMagic[4] = {'Z', 'I', 'G', 'T'};

class Writer {
  public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        out_.insert(out_.end(), p, p + n);
    }
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) { little_endian(v, 2); }
    void u32(std::uint32_t v) { little_endian(v, 4); }
    void f64(double v) { little_endian(std::bit_cast<std::uint64_t>(v), 8); }
    std::vector<std::uint8_t>& buffer() { return out_; }

  private:
    void little_endian(std::uint64_t v, int n) {
        for (int k = 0; k < n; ++k) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
        }
    }
    std::vector<std::uint8_t> out_;
};

class Reader {
  public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(little_endian(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(little_endian(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(little_endian(4)); }
    double f64() { return std::bit_cast<double>(little_endian(8)); }
    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return in_.size() - pos_; }

  private:
    std::uint64_t little_endian(int n) {
        if (remaining() < static_cast<std::size_t>(n)) {
            throw FormatError("table file is truncated");
        }
        std::uint64_t v = 0;
        for (int k = 0; k < n; ++k) {
            v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * k);
        }
        return v;
    }
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    crc = ::crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
    return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> binary_payload(const ZigguratTables& t) {
    Writer w;
    w.bytes(kMagic, sizeof kMagic);
    w.u8(static_cast<std::uint8_t>(kTableSchemaVersion));
    w.u8(t.distribution == Distribution::Exponential ? 0 : 1);
    w.u16(0);
    w.u32(t.i_max);
    w.u32(t.layer_count);
    w.f64(t.epsilon_max);
    for (const auto* column : {&t.x, &t.f, &t.a}) {
        for (double v : *column) {
            w.f64(v);
        }
    }
    return std::move(w.buffer());
}

void check_shape(const ZigguratTables& t) {
    const std::size_t layers = t.layer_count;
    if (t.x.size() != layers + 2 || t.f.size() != layers + 2 || t.a.size() != layers + 1) {
        throw FormatError("array lengths do not match L_max");
    }
}

ZigguratTables from_binary(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 + 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw FormatError("missing ZIGT magic");
    }
    const std::uint32_t stored_crc = Reader(bytes.last(4)).u32();
    if (crc32_of(bytes.first(bytes.size() - 4)) != stored_crc) {
        throw FormatError("checksum mismatch");
    }
    Reader r(bytes.first(bytes.size() - 4));
    r.u32();  // magic
    if (const int version = r.u8(); version != kTableSchemaVersion) {
        throw FormatError(fmt::format("unsupported table version {}", version));
    }
    ZigguratTables t;
    const std::uint8_t dist = r.u8();
    if (dist > 1) {
        throw FormatError("unknown distribution code");
    }
    t.distribution = dist == 0 ? Distribution::Exponential : Distribution::HalfNormal;
    r.u16();
    t.i_max = r.u32();
    t.layer_count = r.u32();
    t.epsilon_max = r.f64();
    const std::size_t layers = t.layer_count;
    if (r.remaining() != 8 * (3 * layers + 5)) {
        throw FormatError("payload length does not match L_max");
    }
    t.x.resize(layers + 2);
    t.f.resize(layers + 2);
    t.a.resize(layers + 1);
    for (auto* column : {&t.x, &t.f, &t.a}) {
        for (double& v : *column) {
            v = r.f64();
        }
    }
    return t;
}

std::vector<double> hex_array(const nlohmann::json& doc, const char* key) {
    const auto& arr = doc.at(key);
    if (!arr.is_array()) {
        throw FormatError(fmt::format("{} must be an array", key));
    }
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& item : arr) {
        out.push_back(parse_hex_double(item.get<std::string>()));
    }
    return out;
}

ZigguratTables from_json(std::span<const std::uint8_t> bytes) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(fmt::format("table file is not valid JSON: {}", e.what()));
    }
    ZigguratTables t;
    std::string checksum;
    try {
        if (doc.at("schema_version").get<int>() != kTableSchemaVersion) {
            throw FormatError("unsupported schema_version");
        }
        t.distribution = parse_distribution(doc.at("distribution").get<std::string>());
        t.i_max = doc.at("i_max").get<std::uint32_t>();
        t.layer_count = doc.at("L_max").get<std::uint32_t>();
        t.x = hex_array(doc, "X");
        t.f = hex_array(doc, "F");
        t.a = hex_array(doc, "A");
        t.epsilon_max = parse_hex_double(doc.at("epsilon_max").get<std::string>());
        checksum = doc.at("checksum").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(fmt::format("malformed table document: {}", e.what()));
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
    check_shape(t);
    if (checksum != fmt::format("{:08x}", crc32_of(binary_payload(t)))) {
        throw FormatError("checksum mismatch");
    }
    return t;
}

}  // namespace

std::string hex_double(double value) {
    char buf[64];
    char* p = buf;
    if (std::signbit(value)) {
        *p++ = '-';
        value = -value;
    }
    *p++ = '0';
    *p++ = 'x';
    const auto res = std::to_chars(p, buf + sizeof buf, value, std::chars_format::hex);
    return std::string(buf, res.ptr);
}

double parse_hex_double(std::string_view text) {
    bool negative = false;
    if (!text.empty() && text.front() == '-') {
        negative = true;
        text.remove_prefix(1);
    }
    if (text.size() < 3 || text[0] != '0' || (text[1] != 'x' && text[1] != 'X')) {
        throw FormatError(fmt::format("not a hexadecimal float: {}", text));
    }
    text.remove_prefix(2);
    double value = 0;
    const auto res =
        std::from_chars(text.data(), text.data() + text.size(), value, std::chars_format::hex);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw FormatError(fmt::format("not a hexadecimal float: 0x{}", text));
    }
    return negative ? -value : value;
}

std::vector<std::uint8_t> serialize_tables(const ZigguratTables& tables, TableFormat format) {
    check_shape(tables);
    auto payload = binary_payload(tables);
    const std::uint32_t crc = crc32_of(payload);
    if (format == TableFormat::Binary) {
        for (int k = 0; k < 4; ++k) {
            payload.push_back(static_cast<std::uint8_t>(crc >> (8 * k)));
        }
        return payload;
    }

    auto hex_list = [](const std::vector<double>& values) {
        nlohmann::json arr = nlohmann::json::array();
        for (double v : values) {
            arr.push_back(hex_double(v));
        }
        return arr;
    };
    nlohmann::ordered_json doc;
    doc["schema_version"] = kTableSchemaVersion;
    doc["distribution"] = std::string(to_string(tables.distribution));
    doc["i_max"] = tables.i_max;
    doc["L_max"] = tables.layer_count;
    doc["X"] = hex_list(tables.x);
    doc["F"] = hex_list(tables.f);
    doc["A"] = hex_list(tables.a);
    doc["epsilon_max"] = hex_double(tables.epsilon_max);
    doc["checksum"] = fmt::format("{:08x}", crc);
    const std::string text = doc.dump(1) + "\n";
    return {text.begin(), text.end()};
}

ZigguratTables deserialize_tables(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) {
        throw FormatError("empty table file");
    }
    return bytes.front() == static_cast<std::uint8_t>(kMagic[0]) ? from_binary(bytes)
                                                                  : from_json(bytes);
}

void save_tables(const std::filesystem::path& path, const ZigguratTables& tables,
                 TableFormat format) {
    const auto bytes = serialize_tables(tables, format);
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw std::runtime_error("could not write " + path.string());
    }
}

ZigguratTables load_tables(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("could not open " + path.string());
    }
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                          std::istreambuf_iterator<char>());
    return deserialize_tables(bytes);
}

}  // namespace zigfast
