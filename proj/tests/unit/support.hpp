#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

#include "rici/mesh.hpp"
#include "rici/prng.hpp"

namespace test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& name) {
        path_ = std::filesystem::temp_directory_path() / ("rici_test_" + name + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

/// Random triangle soup inside a cube of half-side `extent` around `center`.
inline rici::TriangleMesh random_soup(rici::Prng& rng, int triangles, double extent, rici::Vec3d center = {},
                                      double max_edge = 0.0) {
    rici::TriangleMesh mesh;
    for (int t = 0; t < triangles; ++t) {
        const rici::Vec3d base{center.x + rng.uniform(-extent, extent), center.y + rng.uniform(-extent, extent),
                               center.z + rng.uniform(-extent, extent)};
        for (int k = 0; k < 3; ++k) {
            rici::Vec3d v = base;
            if (k > 0 || max_edge <= 0.0) {
                if (max_edge > 0.0) {
                    v = base + rici::Vec3d{rng.uniform(-max_edge, max_edge), rng.uniform(-max_edge, max_edge),
                                           rng.uniform(-max_edge, max_edge)};
                } else {
                    v = {center.x + rng.uniform(-extent, extent), center.y + rng.uniform(-extent, extent),
                         center.z + rng.uniform(-extent, extent)};
                }
            }
            mesh.vertices.push_back(v);
        }
        const auto i = static_cast<std::uint32_t>(3 * t);
        mesh.triangles.push_back({i, i + 1, i + 2});
    }
    mesh.normals.assign(mesh.vertices.size(), rici::Vec3d{0, 0, 1});
    rici::compute_vertex_normals(mesh);
    return mesh;
}

inline rici::Vec3d random_unit(rici::Prng& rng) {
    while (true) {
        const rici::Vec3d v{rng.normal(), rng.normal(), rng.normal()};
        if (rici::squared_length(v) > 1e-6) {
            return rici::normalized(v);
        }
    }
}

/// Rotation by quarter_turns * 90 degrees about coordinate axis `axis` (0, 1, 2)
/// using only swaps and sign flips, followed by an integer translation.
inline rici::Vec3d quarter_turn(const rici::Vec3d& v, int axis, int quarter_turns) {
    rici::Vec3d r = v;
    for (int k = 0; k < ((quarter_turns % 4) + 4) % 4; ++k) {
        if (axis == 0) {
            r = {r.x, -r.z, r.y};
        } else if (axis == 1) {
            r = {r.z, r.y, -r.x};
        } else {
            r = {-r.y, r.x, r.z};
        }
    }
    return r;
}

struct ExactMotion {
    int axis{0};
    int quarter_turns{0};
    rici::Vec3d translation{};

    rici::Vec3d point(const rici::Vec3d& p) const { return quarter_turn(p, axis, quarter_turns) + translation; }
    rici::Vec3d direction(const rici::Vec3d& d) const { return quarter_turn(d, axis, quarter_turns); }

    rici::TriangleMesh apply(const rici::TriangleMesh& mesh) const {
        rici::TriangleMesh out = mesh;
        for (auto& v : out.vertices) v = point(v);
        for (auto& n : out.normals) n = direction(n);
        return out;
    }
    rici::OrientedPoint apply(const rici::OrientedPoint& a) const { return {point(a.position), direction(a.normal)}; }
};

inline ExactMotion random_exact_motion(rici::Prng& rng) {
    return {static_cast<int>(rng.below(3)), 1 + static_cast<int>(rng.below(3)),
            {double(rng.below(9)) - 4.0, double(rng.below(9)) - 4.0, double(rng.below(9)) - 4.0}};
}

/// A triangle soup around an anchor, dense enough that most support rows see geometry.
struct RiciCase {
    rici::TriangleMesh mesh;
    rici::OrientedPoint anchor;
};

inline RiciCase random_rici_case(rici::Prng& rng, int triangles, double support_radius) {
    RiciCase c;
    c.anchor = {{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}, random_unit(rng)};
    c.mesh = random_soup(rng, triangles, 0.8 * support_radius, c.anchor.position, 0.4 * support_radius);
    return c;
}

}  // namespace test
