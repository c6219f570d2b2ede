#include "rici/synthetic.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "rici/mesh_io.hpp"

namespace rici {

TriangleMesh icosphere(int subdivisions) {
    if (subdivisions < 0 || subdivisions > 7) {
        throw std::invalid_argument("icosphere: subdivisions must lie in [0, 7]");
    }
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    TriangleMesh mesh;
    mesh.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                     {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : mesh.vertices) {
        v = normalized(v);
    }
    mesh.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
        auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
            const auto key = std::minmax(a, b);
            const auto it = midpoints.find(key);
            if (it != midpoints.end()) {
                return it->second;
            }
            const auto index = static_cast<std::uint32_t>(mesh.vertices.size());
            mesh.vertices.push_back(normalized(mesh.vertices[a] + mesh.vertices[b]));
            midpoints.emplace(key, index);
            return index;
        };
        std::vector<Triangle> next;
        next.reserve(mesh.triangles.size() * 4);
        for (const auto& tri : mesh.triangles) {
            const std::uint32_t ab = midpoint(tri[0], tri[1]);
            const std::uint32_t bc = midpoint(tri[1], tri[2]);
            const std::uint32_t ca = midpoint(tri[2], tri[0]);
            next.push_back({tri[0], ab, ca});
            next.push_back({tri[1], bc, ab});
            next.push_back({tri[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        mesh.triangles = std::move(next);
    }
    mesh.normals = mesh.vertices;
    return mesh;
}

namespace {

struct Bump {
    Vec3d direction;
    double amplitude;
    double width;
};

std::vector<Bump> random_bumps(Prng& rng, int count, double max_amplitude) {
    std::vector<Bump> bumps;
    for (int i = 0; i < count; ++i) {
        Vec3d d{rng.normal(), rng.normal(), rng.normal()};
        if (squared_length(d) < 1e-12) {
            d = {0, 0, 1};
        }
        const double sign = rng.uniform() < 0.7 ? 1.0 : -1.0;
        bumps.push_back({normalized(d), sign * rng.uniform(0.3, 1.0) * max_amplitude, rng.uniform(0.25, 0.7)});
    }
    return bumps;
}

double bump_field(const std::vector<Bump>& bumps, const Vec3d& direction) {
    double sum = 0.0;
    for (const auto& b : bumps) {
        sum += b.amplitude * std::exp((dot(direction, b.direction) - 1.0) / (b.width * b.width));
    }
    return sum;
}

/// Random anisotropic scale along a random frame.
void random_stretch(Prng& rng, TriangleMesh& mesh) {
    const RigidTransform frame = RigidTransform::random_rotation(rng, {});
    const RigidTransform back = frame.inverse();
    const Vec3d scale{rng.uniform(0.7, 1.3), rng.uniform(0.7, 1.3), rng.uniform(0.7, 1.3)};
    for (auto& v : mesh.vertices) {
        Vec3d local = back.rotate(v);
        local = {local.x * scale.x, local.y * scale.y, local.z * scale.z};
        v = frame.rotate(local);
    }
}

}  // namespace

TriangleMesh bumpy_blob(Prng& rng, int subdivisions, int bumps) {
    TriangleMesh mesh = icosphere(subdivisions);
    const auto field = random_bumps(rng, bumps, 0.35);
    for (auto& v : mesh.vertices) {
        v = v * std::max(0.3, 1.0 + bump_field(field, v));
    }
    random_stretch(rng, mesh);
    compute_vertex_normals(mesh);
    return mesh;
}

TriangleMesh wobbly_torus(Prng& rng, int major_segments, int minor_segments) {
    if (major_segments < 3 || minor_segments < 3) {
        throw std::invalid_argument("wobbly_torus: need at least 3 segments per direction");
    }
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double tube = rng.uniform(0.28, 0.42);
    const int k1 = 2 + static_cast<int>(rng.below(3));
    const int k2 = 1 + static_cast<int>(rng.below(3));
    const double p1 = rng.uniform(0.0, two_pi);
    const double p2 = rng.uniform(0.0, two_pi);
    const double p3 = rng.uniform(0.0, two_pi);
    const double a1 = rng.uniform(0.1, 0.3);
    const double a2 = rng.uniform(0.1, 0.25);
    const double lift = rng.uniform(0.05, 0.25);
    const auto field = random_bumps(rng, 5, 0.25);

    TriangleMesh mesh;
    for (int i = 0; i < major_segments; ++i) {
        const double u = two_pi * i / major_segments;
        const double ring = 1.0 + 0.15 * std::sin(u + p1);
        for (int j = 0; j < minor_segments; ++j) {
            const double v = two_pi * j / minor_segments;
            const Vec3d direction{std::cos(u) * std::cos(v), std::sin(u) * std::cos(v), std::sin(v)};
            double r = tube * (1.0 + a1 * std::sin(k1 * u + p2) + a2 * std::sin(v + k2 * u + p3) +
                               bump_field(field, direction));
            r = std::max(0.08, r);
            mesh.vertices.push_back({(ring + r * std::cos(v)) * std::cos(u),
                                     (ring + r * std::cos(v)) * std::sin(u),
                                     r * std::sin(v) + lift * std::sin(2.0 * u + p1)});
        }
    }
    auto index = [&](int i, int j) {
        return static_cast<std::uint32_t>((i % major_segments) * minor_segments + (j % minor_segments));
    };
    for (int i = 0; i < major_segments; ++i) {
        for (int j = 0; j < minor_segments; ++j) {
            mesh.triangles.push_back({index(i, j), index(i + 1, j), index(i + 1, j + 1)});
            mesh.triangles.push_back({index(i, j), index(i + 1, j + 1), index(i, j + 1)});
        }
    }
    random_stretch(rng, mesh);
    mesh.normals.assign(mesh.vertices.size(), Vec3d{0, 0, 1});
    compute_vertex_normals(mesh);
    return mesh;
}

TriangleMesh lumpy_superellipsoid(Prng& rng, int subdivisions) {
    TriangleMesh mesh = icosphere(subdivisions);
    const std::array<double, 3> exponent{rng.uniform(0.4, 1.4), rng.uniform(0.4, 1.4), rng.uniform(0.4, 1.4)};
    const auto field = random_bumps(rng, 4, 0.2);
    for (auto& v : mesh.vertices) {
        const double grow = 1.0 + bump_field(field, v);
        auto shape = [&](double c, double e) { return std::copysign(std::pow(std::abs(c), e), c); };
        const Vec3d p{shape(v.x, exponent[0]), shape(v.y, exponent[1]), shape(v.z, exponent[2])};
        v = p * std::max(0.3, grow);
    }
    random_stretch(rng, mesh);
    compute_vertex_normals(mesh);
    return mesh;
}

TriangleMesh large_test_mesh(std::uint64_t seed) {
    Prng rng = Prng(seed).derive("large-test-mesh");
    return bumpy_blob(rng, 4, 24);
}

std::vector<std::filesystem::path> write_synthetic_corpus(const std::filesystem::path& directory,
                                                          int count, std::uint64_t seed) {
    if (count < 1) {
        throw std::invalid_argument("write_synthetic_corpus: count must be >= 1");
    }
    std::filesystem::create_directories(directory);
    const Prng root(seed);
    std::vector<std::filesystem::path> out;
    for (int i = 0; i < count; ++i) {
        Prng rng = root.derive("corpus-mesh", static_cast<std::uint64_t>(i));
        TriangleMesh mesh;
        switch (i % 3) {
            case 0:
                mesh = bumpy_blob(rng);
                break;
            case 1:
                mesh = wobbly_torus(rng);
                break;
            default:
                mesh = lumpy_superellipsoid(rng);
                break;
        }
        char name[32];
        std::snprintf(name, sizeof name, "synthetic_%03d.obj", i);
        const auto path = directory / name;
        write_obj(path, mesh);
        out.push_back(path);
    }
    return out;
}

}  // namespace rici
