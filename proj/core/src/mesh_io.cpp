#include "rici/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rici/errors.hpp"

namespace rici {

std::optional<MeshFormat> format_from_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".obj") {
        return MeshFormat::Obj;
    }
    if (ext == ".ply") {
        return MeshFormat::Ply;
    }
    return std::nullopt;
}

namespace {

/// Raw polygon soup as read from disk, before cleanup.
struct RawMesh {
    std::vector<Vec3d> positions;
    std::vector<Vec3d> normals;  // empty when the file carries none
    std::vector<std::vector<std::uint32_t>> faces;
};

bool is_degenerate(const Vec3d& a, const Vec3d& b, const Vec3d& c) {
    const double area2 = length(cross(b - a, c - a));
    const double scale = std::max({squared_length(b - a), squared_length(c - a), squared_length(c - b)});
    return !(area2 > 1e-14 * scale) || scale == 0.0;
}

LoadedMesh finish(RawMesh raw, const std::string& source) {
    LoadedMesh out;
    std::vector<Triangle> triangles;
    for (const auto& face : raw.faces) {
        if (face.size() < 3) {
            throw DataError(source + ": face with fewer than 3 vertices");
        }
        for (const auto index : face) {
            if (index >= raw.positions.size()) {
                throw DataError(source + ": face index " + std::to_string(index) + " out of range");
            }
        }
        for (std::size_t i = 1; i + 1 < face.size(); ++i) {
            const Triangle tri{face[0], face[i], face[i + 1]};
            if (is_degenerate(raw.positions[tri[0]], raw.positions[tri[1]], raw.positions[tri[2]])) {
                ++out.degenerate_faces_dropped;
                continue;
            }
            triangles.push_back(tri);
        }
    }
    if (triangles.empty()) {
        throw DataError(source + ": mesh has no non-degenerate triangles");
    }

    // Drop unreferenced vertices, keeping first-reference order stable by index.
    std::vector<std::uint32_t> remap(raw.positions.size(), UINT32_MAX);
    std::vector<bool> used(raw.positions.size(), false);
    for (const auto& tri : triangles) {
        for (const auto index : tri) {
            used[index] = true;
        }
    }
    TriangleMesh& mesh = out.mesh;
    const bool has_normals = raw.normals.size() == raw.positions.size();
    for (std::size_t i = 0; i < raw.positions.size(); ++i) {
        if (!used[i]) {
            continue;
        }
        remap[i] = static_cast<std::uint32_t>(mesh.vertices.size());
        mesh.vertices.push_back(raw.positions[i]);
        if (has_normals) {
            mesh.normals.push_back(normalized(raw.normals[i]));
        }
    }
    mesh.triangles.reserve(triangles.size());
    for (const auto& tri : triangles) {
        mesh.triangles.push_back({remap[tri[0]], remap[tri[1]], remap[tri[2]]});
    }

    bool usable = has_normals;
    if (usable) {
        usable = std::all_of(mesh.normals.begin(), mesh.normals.end(),
                             [](const Vec3d& n) { return squared_length(n) > 0.0; });
    }
    if (!usable) {
        compute_vertex_normals(mesh);
        out.normals_computed = true;
    }
    return out;
}

// ---------------------------------------------------------------- OBJ

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_double(std::string_view token, const std::string& where) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw DataError(where + ": cannot parse number '" + std::string(token) + "'");
    }
    return value;
}

long parse_long(std::string_view token, const std::string& where) {
    long value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw DataError(where + ": cannot parse index '" + std::string(token) + "'");
    }
    return value;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
        }
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
        }
        if (i > start) {
            out.push_back(s.substr(start, i - start));
        }
    }
    return out;
}

std::uint32_t resolve_obj_index(long index, std::size_t count, const std::string& where) {
    const long resolved = index < 0 ? static_cast<long>(count) + index : index - 1;
    if (index == 0 || resolved < 0 || resolved >= static_cast<long>(count)) {
        throw DataError(where + ": index " + std::to_string(index) + " out of range");
    }
    return static_cast<std::uint32_t>(resolved);
}

LoadedMesh load_obj(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    const std::string source = path.string();
    std::vector<Vec3d> positions;
    std::vector<Vec3d> file_normals;
    // Corners reference (position, normal) pairs; normal index -1 when absent.
    std::vector<std::vector<std::pair<std::uint32_t, std::int64_t>>> faces;
    bool every_corner_has_normal = true;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') {
            continue;
        }
        const auto tokens = split_ws(view);
        const std::string where = source + ":" + std::to_string(line_no);
        if (tokens[0] == "v" || tokens[0] == "vn") {
            if (tokens.size() < 4) {
                throw DataError(where + ": expected three coordinates");
            }
            const Vec3d v{parse_double(tokens[1], where), parse_double(tokens[2], where),
                          parse_double(tokens[3], where)};
            (tokens[0] == "v" ? positions : file_normals).push_back(v);
        } else if (tokens[0] == "f") {
            if (tokens.size() < 4) {
                throw DataError(where + ": face with fewer than 3 vertices");
            }
            auto& face = faces.emplace_back();
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                const std::string_view corner = tokens[i];
                const auto first_slash = corner.find('/');
                const auto pos_index = resolve_obj_index(
                    parse_long(corner.substr(0, first_slash), where), positions.size(), where);
                std::int64_t normal_index = -1;
                if (first_slash != std::string_view::npos) {
                    const auto second_slash = corner.find('/', first_slash + 1);
                    if (second_slash != std::string_view::npos && second_slash + 1 < corner.size()) {
                        normal_index = resolve_obj_index(
                            parse_long(corner.substr(second_slash + 1), where), file_normals.size(),
                            where);
                    }
                }
                every_corner_has_normal = every_corner_has_normal && normal_index >= 0;
                face.emplace_back(pos_index, normal_index);
            }
        }
        // Other statements (vt, g, o, s, usemtl, ...) carry nothing we use.
    }
    if (in.bad()) {
        throw DataError("read error on " + source);
    }

    RawMesh raw;
    if (every_corner_has_normal && !file_normals.empty()) {
        // Split vertices so each (position, normal) pair is one mesh vertex.
        std::map<std::pair<std::uint32_t, std::int64_t>, std::uint32_t> ids;
        for (const auto& face : faces) {
            auto& out_face = raw.faces.emplace_back();
            for (const auto& corner : face) {
                const auto [it, inserted] =
                    ids.try_emplace(corner, static_cast<std::uint32_t>(raw.positions.size()));
                if (inserted) {
                    raw.positions.push_back(positions[corner.first]);
                    raw.normals.push_back(file_normals[static_cast<std::size_t>(corner.second)]);
                }
                out_face.push_back(it->second);
            }
        }
    } else {
        raw.positions = std::move(positions);
        for (const auto& face : faces) {
            auto& out_face = raw.faces.emplace_back();
            for (const auto& corner : face) {
                out_face.push_back(corner.first);
            }
        }
    }
    return finish(std::move(raw), source);
}

// ---------------------------------------------------------------- PLY

enum class PlyEncoding { Ascii, BinaryLittle, BinaryBig };

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

PlyType parse_ply_type(std::string_view name, const std::string& where) {
    if (name == "char" || name == "int8") return PlyType::Int8;
    if (name == "uchar" || name == "uint8") return PlyType::UInt8;
    if (name == "short" || name == "int16") return PlyType::Int16;
    if (name == "ushort" || name == "uint16") return PlyType::UInt16;
    if (name == "int" || name == "int32") return PlyType::Int32;
    if (name == "uint" || name == "uint32") return PlyType::UInt32;
    if (name == "float" || name == "float32") return PlyType::Float32;
    if (name == "double" || name == "float64") return PlyType::Float64;
    throw DataError(where + ": unknown PLY type '" + std::string(name) + "'");
}

std::size_t ply_type_size(PlyType t) {
    switch (t) {
        case PlyType::Int8:
        case PlyType::UInt8:
            return 1;
        case PlyType::Int16:
        case PlyType::UInt16:
            return 2;
        case PlyType::Int32:
        case PlyType::UInt32:
        case PlyType::Float32:
            return 4;
        case PlyType::Float64:
            return 8;
    }
    return 0;
}

struct PlyProperty {
    std::string name;
    PlyType type{PlyType::Float32};
    bool is_list{false};
    PlyType count_type{PlyType::UInt8};
};

struct PlyElement {
    std::string name;
    std::size_t count{0};
    std::vector<PlyProperty> properties;
};

class PlyReader {
public:
    PlyReader(std::istream& in, PlyEncoding encoding, std::string source)
        : in_(in), encoding_(encoding), source_(std::move(source)) {}

    double read(PlyType type) {
        if (encoding_ == PlyEncoding::Ascii) {
            return read_ascii();
        }
        unsigned char buf[8];
        const std::size_t n = ply_type_size(type);
        in_.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n));
        if (!in_) {
            throw DataError(source_ + ": unexpected end of binary PLY data");
        }
        if ((encoding_ == PlyEncoding::BinaryBig) == (std::endian::native == std::endian::little)) {
            std::reverse(buf, buf + n);
        }
        switch (type) {
            case PlyType::Int8: return decode<std::int8_t>(buf);
            case PlyType::UInt8: return decode<std::uint8_t>(buf);
            case PlyType::Int16: return decode<std::int16_t>(buf);
            case PlyType::UInt16: return decode<std::uint16_t>(buf);
            case PlyType::Int32: return decode<std::int32_t>(buf);
            case PlyType::UInt32: return decode<std::uint32_t>(buf);
            case PlyType::Float32: return decode<float>(buf);
            case PlyType::Float64: return decode<double>(buf);
        }
        return 0.0;
    }

private:
    template <typename T>
    static double decode(const unsigned char* buf) {
        T value;
        std::memcpy(&value, buf, sizeof(T));
        return static_cast<double>(value);
    }

    double read_ascii() {
        std::string token;
        if (!(in_ >> token)) {
            throw DataError(source_ + ": unexpected end of ASCII PLY data");
        }
        return parse_double(token, source_);
    }

    std::istream& in_;
    PlyEncoding encoding_;
    std::string source_;
};

LoadedMesh load_ply(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    const std::string source = path.string();
    std::string line;
    if (!std::getline(in, line) || trim(line) != "ply") {
        throw DataError(source + ": missing 'ply' magic");
    }
    std::optional<PlyEncoding> encoding;
    std::vector<PlyElement> elements;
    bool header_done = false;
    while (std::getline(in, line)) {
        const auto tokens = split_ws(line);
        if (tokens.empty() || tokens[0] == "comment" || tokens[0] == "obj_info") {
            continue;
        }
        if (tokens[0] == "end_header") {
            header_done = true;
            break;
        }
        if (tokens[0] == "format" && tokens.size() >= 2) {
            if (tokens[1] == "ascii") encoding = PlyEncoding::Ascii;
            else if (tokens[1] == "binary_little_endian") encoding = PlyEncoding::BinaryLittle;
            else if (tokens[1] == "binary_big_endian") encoding = PlyEncoding::BinaryBig;
            else throw DataError(source + ": unknown PLY format '" + std::string(tokens[1]) + "'");
        } else if (tokens[0] == "element" && tokens.size() >= 3) {
            elements.push_back({std::string(tokens[1]),
                                static_cast<std::size_t>(parse_long(tokens[2], source)), {}});
        } else if (tokens[0] == "property" && !elements.empty()) {
            PlyProperty prop;
            if (tokens.size() >= 5 && tokens[1] == "list") {
                prop.is_list = true;
                prop.count_type = parse_ply_type(tokens[2], source);
                prop.type = parse_ply_type(tokens[3], source);
                prop.name = std::string(tokens[4]);
            } else if (tokens.size() >= 3) {
                prop.type = parse_ply_type(tokens[1], source);
                prop.name = std::string(tokens[2]);
            } else {
                throw DataError(source + ": malformed property line");
            }
            elements.back().properties.push_back(prop);
        } else {
            throw DataError(source + ": unexpected header line '" + line + "'");
        }
    }
    if (!header_done || !encoding) {
        throw DataError(source + ": incomplete PLY header");
    }

    PlyReader reader(in, *encoding, source);
    RawMesh raw;
    for (const auto& element : elements) {
        const bool is_vertex = element.name == "vertex";
        const bool is_face = element.name == "face";
        bool has_normals = false;
        if (is_vertex) {
            for (const auto& p : element.properties) {
                has_normals = has_normals || p.name == "nx";
            }
            raw.positions.reserve(element.count);
            if (has_normals) {
                raw.normals.reserve(element.count);
            }
        }
        for (std::size_t i = 0; i < element.count; ++i) {
            Vec3d position;
            Vec3d normal;
            for (const auto& prop : element.properties) {
                if (prop.is_list) {
                    const auto count = static_cast<std::size_t>(reader.read(prop.count_type));
                    const bool take = is_face && (prop.name == "vertex_indices" ||
                                                  prop.name == "vertex_index");
                    std::vector<std::uint32_t> face;
                    for (std::size_t k = 0; k < count; ++k) {
                        const double value = reader.read(prop.type);
                        if (take) {
                            if (value < 0) {
                                throw DataError(source + ": negative face index");
                            }
                            face.push_back(static_cast<std::uint32_t>(value));
                        }
                    }
                    if (take) {
                        raw.faces.push_back(std::move(face));
                    }
                    continue;
                }
                const double value = reader.read(prop.type);
                if (!is_vertex) {
                    continue;
                }
                if (prop.name == "x") position.x = value;
                else if (prop.name == "y") position.y = value;
                else if (prop.name == "z") position.z = value;
                else if (prop.name == "nx") normal.x = value;
                else if (prop.name == "ny") normal.y = value;
                else if (prop.name == "nz") normal.z = value;
            }
            if (is_vertex) {
                raw.positions.push_back(position);
                if (has_normals) {
                    raw.normals.push_back(normal);
                }
            }
        }
    }
    return finish(std::move(raw), source);
}

}  // namespace

LoadedMesh load_mesh(const std::filesystem::path& path, std::optional<MeshFormat> format) {
    if (!format) {
        format = format_from_extension(path);
    }
    if (!format) {
        throw DataError("unrecognised mesh extension: " + path.string());
    }
    return *format == MeshFormat::Obj ? load_obj(path) : load_ply(path);
}

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << std::setprecision(17);
    for (const auto& v : mesh.vertices) {
        out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
    }
    for (const auto& n : mesh.normals) {
        out << "vn " << n.x << ' ' << n.y << ' ' << n.z << '\n';
    }
    for (const auto& t : mesh.triangles) {
        out << "f " << t[0] + 1 << "//" << t[0] + 1 << ' ' << t[1] + 1 << "//" << t[1] + 1 << ' '
            << t[2] + 1 << "//" << t[2] + 1 << '\n';
    }
    if (!out) {
        throw DataError("write error on " + path.string());
    }
}

}  // namespace rici
