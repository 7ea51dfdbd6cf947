#pragma once
/// @file ply.hpp
/// @brief Minimal PLY point-cloud reader/writer (ascii and binary_little_endian).
///
/// Only the `vertex` element is interpreted: x, y, z (any numeric type) and the
/// optional red, green, blue colour channels. Other elements and properties,
/// including list properties, are skipped.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "reconeval/core/scene.hpp"
#include "reconeval/io/byte_stream.hpp"

namespace reconeval {

struct PlyPoint {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Rgb color;

    bool operator==(const PlyPoint& o) const { return position == o.position && color == o.color; }
};

struct PlyCloud {
    std::vector<PlyPoint> points;
    bool has_color = false;

    bool operator==(const PlyCloud&) const = default;
};

enum class PlyFormat { Ascii, BinaryLittleEndian };

namespace detail {

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

[[nodiscard]] inline std::optional<PlyType> ply_type_from_name(std::string_view n) {
    if (n == "char" || n == "int8") return PlyType::Int8;
    if (n == "uchar" || n == "uint8") return PlyType::UInt8;
    if (n == "short" || n == "int16") return PlyType::Int16;
    if (n == "ushort" || n == "uint16") return PlyType::UInt16;
    if (n == "int" || n == "int32") return PlyType::Int32;
    if (n == "uint" || n == "uint32") return PlyType::UInt32;
    if (n == "float" || n == "float32") return PlyType::Float32;
    if (n == "double" || n == "float64") return PlyType::Float64;
    return std::nullopt;
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::Float32;
    bool is_list = false;
    PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
    std::string name;
    std::uint64_t count = 0;
    std::vector<PlyProperty> properties;
};

[[nodiscard]] inline double read_binary_value(ByteReader& in, PlyType t) {
    switch (t) {
        case PlyType::Int8: return in.read<std::int8_t>();
        case PlyType::UInt8: return in.read<std::uint8_t>();
        case PlyType::Int16: return in.read<std::int16_t>();
        case PlyType::UInt16: return in.read<std::uint16_t>();
        case PlyType::Int32: return in.read<std::int32_t>();
        case PlyType::UInt32: return in.read<std::uint32_t>();
        case PlyType::Float32: return in.read<float>();
        case PlyType::Float64: return in.read<double>();
    }
    return 0;
}

[[nodiscard]] inline std::uint8_t to_channel(double v) {
    if (!(v >= 0.0 && v <= 255.0)) throw FormatError("PLY colour value out of [0,255]");
    return static_cast<std::uint8_t>(v);
}

}  // namespace detail

[[nodiscard]] inline PlyCloud parse_ply_bytes(std::string_view data, const std::string& name) {
    using namespace detail;
    // Header
    std::size_t pos = 0;
    auto next_line = [&](std::string_view& line) {
        if (pos >= data.size()) return false;
        auto end = data.find('\n', pos);
        if (end == std::string_view::npos) end = data.size();
        line = data.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = end + 1;
        return true;
    };
    std::string_view line;
    if (!next_line(line) || line != "ply") throw FormatError(name + ": missing 'ply' magic");
    std::optional<PlyFormat> format;
    std::vector<PlyElement> elements;
    bool header_done = false;
    while (next_line(line)) {
        const auto tok = split_ws(line);
        if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
        if (tok[0] == "end_header") {
            header_done = true;
            break;
        }
        if (tok[0] == "format") {
            if (tok.size() < 2) throw FormatError(name + ": malformed format line");
            if (tok[1] == "ascii") {
                format = PlyFormat::Ascii;
            } else if (tok[1] == "binary_little_endian") {
                format = PlyFormat::BinaryLittleEndian;
            } else {
                throw FormatError(name + ": unsupported PLY format '" + std::string(tok[1]) + "'");
            }
        } else if (tok[0] == "element") {
            if (tok.size() != 3) throw FormatError(name + ": malformed element line");
            PlyElement el;
            el.name = std::string(tok[1]);
            if (!parse_number(tok[2], el.count)) throw FormatError(name + ": bad element count");
            elements.push_back(std::move(el));
        } else if (tok[0] == "property") {
            if (elements.empty()) throw FormatError(name + ": property before any element");
            PlyProperty prop;
            if (tok.size() == 5 && tok[1] == "list") {
                const auto ct = ply_type_from_name(tok[2]);
                const auto vt = ply_type_from_name(tok[3]);
                if (!ct || !vt) throw FormatError(name + ": unknown list property type");
                prop.is_list = true;
                prop.count_type = *ct;
                prop.type = *vt;
                prop.name = std::string(tok[4]);
            } else if (tok.size() == 3) {
                const auto t = ply_type_from_name(tok[1]);
                if (!t) throw FormatError(name + ": unknown property type '" + std::string(tok[1]) + "'");
                prop.type = *t;
                prop.name = std::string(tok[2]);
            } else {
                throw FormatError(name + ": malformed property line");
            }
            elements.back().properties.push_back(std::move(prop));
        } else {
            throw FormatError(name + ": unexpected header line '" + std::string(line) + "'");
        }
    }
    if (!header_done) throw FormatError(name + ": header has no end_header");
    if (!format) throw FormatError(name + ": header has no format line");

    const PlyElement* vertex = nullptr;
    for (const auto& el : elements) {
        if (el.name == "vertex") vertex = &el;
    }
    if (vertex == nullptr) throw FormatError(name + ": no vertex element");
    int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
    for (int i = 0; i < static_cast<int>(vertex->properties.size()); ++i) {
        const auto& p = vertex->properties[static_cast<std::size_t>(i)];
        if (p.is_list) continue;
        if (p.name == "x") ix = i;
        if (p.name == "y") iy = i;
        if (p.name == "z") iz = i;
        if (p.name == "red") ir = i;
        if (p.name == "green") ig = i;
        if (p.name == "blue") ib = i;
    }
    if (ix < 0 || iy < 0 || iz < 0) throw FormatError(name + ": vertex element lacks x, y, z");
    PlyCloud cloud;
    cloud.has_color = ir >= 0 && ig >= 0 && ib >= 0;
    cloud.points.reserve(vertex->count);

    std::vector<double> values;
    auto emit_vertex = [&] {
        PlyPoint pt;
        pt.position = {values[static_cast<std::size_t>(ix)], values[static_cast<std::size_t>(iy)],
                       values[static_cast<std::size_t>(iz)]};
        if (cloud.has_color) {
            pt.color = {to_channel(values[static_cast<std::size_t>(ir)]),
                        to_channel(values[static_cast<std::size_t>(ig)]),
                        to_channel(values[static_cast<std::size_t>(ib)])};
        }
        cloud.points.push_back(pt);
    };

    if (*format == PlyFormat::BinaryLittleEndian) {
        ByteReader in(data.substr(pos), name);
        for (const auto& el : elements) {
            const bool is_vertex = &el == vertex;
            for (std::uint64_t r = 0; r < el.count; ++r) {
                values.clear();
                for (const auto& p : el.properties) {
                    if (p.is_list) {
                        const auto n = static_cast<std::uint64_t>(read_binary_value(in, p.count_type));
                        for (std::uint64_t k = 0; k < n; ++k) (void)read_binary_value(in, p.type);
                        values.push_back(0.0);
                    } else {
                        values.push_back(read_binary_value(in, p.type));
                    }
                }
                if (is_vertex) emit_vertex();
            }
            if (is_vertex) break;
        }
    } else {
        // ASCII: whitespace-separated tokens; rows may span lines in principle, so
        // read a flat token stream.
        std::vector<std::string_view> tokens;
        {
            std::string_view rest = data.substr(pos);
            std::size_t i = 0;
            while (i < rest.size()) {
                while (i < rest.size() && std::string_view(" \t\r\n").find(rest[i]) != std::string_view::npos) ++i;
                if (i >= rest.size()) break;
                std::size_t j = i;
                while (j < rest.size() && std::string_view(" \t\r\n").find(rest[j]) == std::string_view::npos) ++j;
                tokens.push_back(rest.substr(i, j - i));
                i = j;
            }
        }
        std::size_t t = 0;
        auto take = [&]() -> double {
            if (t >= tokens.size()) throw FormatError(name + ": truncated ASCII body");
            double v = 0;
            if (!parse_number(tokens[t], v)) {
                throw FormatError(name + ": bad number '" + std::string(tokens[t]) + "'");
            }
            ++t;
            return v;
        };
        for (const auto& el : elements) {
            const bool is_vertex = &el == vertex;
            for (std::uint64_t r = 0; r < el.count; ++r) {
                values.clear();
                for (const auto& p : el.properties) {
                    if (p.is_list) {
                        const auto n = static_cast<std::uint64_t>(take());
                        for (std::uint64_t k = 0; k < n; ++k) (void)take();
                        values.push_back(0.0);
                    } else {
                        values.push_back(take());
                    }
                }
                if (is_vertex) emit_vertex();
            }
            if (is_vertex) break;
        }
    }
    return cloud;
}

[[nodiscard]] inline PlyCloud read_ply(const std::filesystem::path& path) {
    return parse_ply_bytes(read_file_bytes(path), path.string());
}

/// Writes x, y, z as double plus uchar colours when `with_color` is set.
inline void write_ply(const std::filesystem::path& path, const std::vector<PlyPoint>& points, PlyFormat format,
                      bool with_color = true) {
    std::ostringstream header;
    header << "ply\nformat " << (format == PlyFormat::Ascii ? "ascii" : "binary_little_endian") << " 1.0\n"
           << "element vertex " << points.size() << "\n"
           << "property double x\nproperty double y\nproperty double z\n";
    if (with_color) header << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    header << "end_header\n";
    std::string bytes = header.str();
    if (format == PlyFormat::Ascii) {
        std::ostringstream body;
        for (const auto& p : points) {
            body << format_double(p.position.x()) << ' ' << format_double(p.position.y()) << ' '
                 << format_double(p.position.z());
            if (with_color) body << ' ' << int{p.color.r} << ' ' << int{p.color.g} << ' ' << int{p.color.b};
            body << '\n';
        }
        bytes += body.str();
    } else {
        ByteWriter out;
        for (const auto& p : points) {
            out.write(p.position.x());
            out.write(p.position.y());
            out.write(p.position.z());
            if (with_color) {
                out.write(p.color.r);
                out.write(p.color.g);
                out.write(p.color.b);
            }
        }
        bytes += out.bytes();
    }
    write_file_bytes(path, bytes);
}

}  // namespace reconeval
