#pragma once

// FLD1 field files:
//   bytes 0-3   magic "FLD1"
//   byte  4     version (1)
//   byte  5     dim
//   bytes 6-7   reserved, zero
//   dim x u32   samples per axis, little-endian
//   f64         half-width L, little-endian
//   n^dim x f64 values, little-endian, row-major

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "mixgn/errors.hpp"
#include "mixgn/grid.hpp"

namespace mixgn {

inline constexpr std::array<char, 4> kFieldMagic{'F', 'L', 'D', '1'};
inline constexpr std::uint8_t kFieldVersion = 1;

namespace detail {

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFFu));
    }
}

inline void put_f64(std::vector<unsigned char>& out, double v)
{
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xFFu));
    }
}

inline std::uint32_t get_u32(const unsigned char* p)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    }
    return v;
}

inline double get_f64(const unsigned char* p)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    }
    return std::bit_cast<double>(v);
}

} // namespace detail

inline std::vector<unsigned char> encode_field(const Field& u)
{
    const GridSpec& g = u.grid();
    std::vector<unsigned char> out;
    out.reserve(8 + 4 * 3 + 8 + 8 * u.size());
    out.insert(out.end(), kFieldMagic.begin(), kFieldMagic.end());
    out.push_back(kFieldVersion);
    out.push_back(static_cast<unsigned char>(g.dim));
    out.push_back(0);
    out.push_back(0);
    for (int axis = 0; axis < g.dim; ++axis) {
        detail::put_u32(out, static_cast<std::uint32_t>(g.n));
    }
    detail::put_f64(out, g.half_width);
    for (double v : u.values()) {
        detail::put_f64(out, v);
    }
    return out;
}

inline Field decode_field(const std::vector<unsigned char>& bytes)
{
    using detail::concat;
    constexpr std::size_t preamble = 8;
    if (bytes.size() < preamble) {
        throw FormatError(concat("field file truncated: ", bytes.size(), " bytes, header needs ", preamble));
    }
    if (std::memcmp(bytes.data(), kFieldMagic.data(), kFieldMagic.size()) != 0) {
        throw FormatError("bad magic bytes: not an FLD1 field file");
    }
    if (bytes[4] != kFieldVersion) {
        throw FormatError(concat("unsupported FLD1 version ", int(bytes[4]), " (expected 1)"));
    }
    const int dim = bytes[5];
    if (bytes[6] != 0 || bytes[7] != 0) {
        throw FormatError("reserved header bytes must be zero");
    }
    if (dim != 3) {
        throw FormatError(concat("unsupported field dimension ", dim, " (expected 3)"));
    }
    const std::size_t header = preamble + 4 * static_cast<std::size_t>(dim) + 8;
    if (bytes.size() < header) {
        throw FormatError(concat("field file truncated: ", bytes.size(), " bytes, header needs ", header));
    }
    std::array<std::uint32_t, 3> ns{};
    for (int axis = 0; axis < dim; ++axis) {
        ns[axis] = detail::get_u32(bytes.data() + preamble + 4 * axis);
    }
    if (ns[0] != ns[1] || ns[1] != ns[2]) {
        throw FormatError(concat("anisotropic grids are not supported (n = ", ns[0], ", ", ns[1], ", ", ns[2], ")"));
    }
    GridSpec grid{dim, static_cast<int>(ns[0]), detail::get_f64(bytes.data() + preamble + 4 * dim)};
    try {
        validate(grid);
    } catch (const ParameterError& e) {
        throw FormatError(concat("invalid grid in field header: ", e.what()));
    }
    const std::size_t expected = header + 8 * grid.size();
    if (bytes.size() != expected) {
        throw FormatError(concat("field length mismatch: file has ", bytes.size(), " bytes, expected ", expected));
    }
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = detail::get_f64(bytes.data() + header + 8 * i);
    }
    try {
        return Field(grid, std::move(values));
    } catch (const ParameterError& e) {
        throw FormatError(concat("invalid field payload: ", e.what()));
    }
}

inline void save_field(const Field& u, const std::filesystem::path& path)
{
    const auto bytes = encode_field(u);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) {
        throw IoError("write failed: " + path.string());
    }
}

inline Field load_field(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (is.bad()) {
        throw IoError("read failed: " + path.string());
    }
    return decode_field(bytes);
}

} // namespace mixgn
