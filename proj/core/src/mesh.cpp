#include "rici/mesh.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <list>
#include <numbers>
#include <numeric>
#include <string>
#include <unordered_map>

#include "rici/errors.hpp"

namespace rici {

void TriangleMesh::validate() const {
    if (normals.size() != vertices.size()) {
        throw DataError("mesh has " + std::to_string(vertices.size()) + " vertices but " +
                        std::to_string(normals.size()) + " normals");
    }
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        for (const auto index : triangles[t]) {
            if (index >= vertices.size()) {
                throw DataError("triangle " + std::to_string(t) + " references vertex " +
                                std::to_string(index) + " out of range");
            }
        }
    }
    for (std::size_t i = 0; i < normals.size(); ++i) {
        if (std::abs(length(normals[i]) - 1.0) > 1e-5) {
            throw DataError("normal " + std::to_string(i) + " is not unit length");
        }
    }
}

RigidTransform RigidTransform::random_rotation(Prng& rng, const Vec3d& translation) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double u3 = rng.uniform();
    const double a = std::sqrt(1.0 - u1);
    const double b = std::sqrt(u1);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    RigidTransform t;
    t.x = a * std::sin(two_pi * u2);
    t.y = a * std::cos(two_pi * u2);
    t.z = b * std::sin(two_pi * u3);
    t.w = b * std::cos(two_pi * u3);
    t.translation = translation;
    return t;
}

RigidTransform RigidTransform::from_axis_angle(const Vec3d& axis, double degrees,
                                               const Vec3d& translation) {
    const Vec3d unit = normalized(axis);
    const double half = degrees * std::numbers::pi / 360.0;
    const double s = std::sin(half);
    RigidTransform t;
    t.w = std::cos(half);
    t.x = unit.x * s;
    t.y = unit.y * s;
    t.z = unit.z * s;
    t.translation = translation;
    return t;
}

Vec3d RigidTransform::rotate(const Vec3d& v) const {
    const Vec3d q{x, y, z};
    const Vec3d t = cross(q, v) * 2.0;
    return v + t * w + cross(q, t);
}

RigidTransform RigidTransform::inverse() const {
    RigidTransform inv;
    inv.w = w;
    inv.x = -x;
    inv.y = -y;
    inv.z = -z;
    inv.translation = -inv.rotate(translation);
    return inv;
}

double RigidTransform::quaternion_norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

double triangle_area(const Vec3d& a, const Vec3d& b, const Vec3d& c) {
    return 0.5 * length(cross(b - a, c - a));
}

Vec3d face_normal(const Vec3d& a, const Vec3d& b, const Vec3d& c) {
    return normalized(cross(b - a, c - a));
}

void compute_vertex_normals(TriangleMesh& mesh) {
    std::vector<Vec3d> sums(mesh.vertices.size());
    std::vector<Vec3d> fallback(mesh.vertices.size());
    for (const auto& tri : mesh.triangles) {
        const Vec3d& a = mesh.vertices[tri[0]];
        const Vec3d& b = mesh.vertices[tri[1]];
        const Vec3d& c = mesh.vertices[tri[2]];
        // Unnormalized cross product: magnitude is twice the area.
        const Vec3d weighted = cross(b - a, c - a);
        for (const auto index : tri) {
            sums[index] += weighted;
            if (squared_length(fallback[index]) == 0.0) {
                fallback[index] = normalized(weighted);
            }
        }
    }
    mesh.normals.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < sums.size(); ++i) {
        Vec3d n = normalized(sums[i]);
        if (squared_length(n) == 0.0) {
            // Opposing faces cancelled out, or an isolated vertex.
            n = squared_length(fallback[i]) > 0.0 ? fallback[i] : Vec3d{0, 0, 1};
        }
        mesh.normals[i] = n;
    }
}

namespace {

EnclosingSphere ball_through(std::span<const Vec3d> support) {
    switch (support.size()) {
        case 0:
            return {{}, -1.0};
        case 1:
            return {support[0], 0.0};
        case 2: {
            const Vec3d center = (support[0] + support[1]) * 0.5;
            return {center, length(support[0] - center)};
        }
        case 3: {
            const Vec3d a = support[1] - support[0];
            const Vec3d b = support[2] - support[0];
            const Vec3d axb = cross(a, b);
            const double denom = 2.0 * squared_length(axb);
            if (denom == 0.0) {
                break;
            }
            const Vec3d offset = cross(b * squared_length(a) - a * squared_length(b), axb) / denom;
            return {support[0] + offset, length(offset)};
        }
        case 4: {
            const Vec3d a = support[1] - support[0];
            const Vec3d b = support[2] - support[0];
            const Vec3d c = support[3] - support[0];
            const double denom = 2.0 * dot(a, cross(b, c));
            if (denom == 0.0) {
                break;
            }
            const Vec3d offset = (cross(b, c) * squared_length(a) + cross(c, a) * squared_length(b) +
                                  cross(a, b) * squared_length(c)) /
                                 denom;
            return {support[0] + offset, length(offset)};
        }
        default:
            break;
    }
    // Affinely dependent support set: fall back to the widest pair.
    EnclosingSphere best{support[0], 0.0};
    for (std::size_t i = 0; i < support.size(); ++i) {
        for (std::size_t j = i + 1; j < support.size(); ++j) {
            const Vec3d center = (support[i] + support[j]) * 0.5;
            const double r = length(support[i] - center);
            if (r > best.radius) {
                best = {center, r};
            }
        }
    }
    return best;
}

class MoveToFrontMiniball {
public:
    explicit MoveToFrontMiniball(std::list<Vec3d> points) : points_(std::move(points)) {}

    EnclosingSphere solve() {
        support_.clear();
        recurse(points_.end());
        return ball_;
    }

private:
    bool outside(const Vec3d& p) const {
        if (ball_.radius < 0) {
            return true;
        }
        const double r2 = ball_.radius * ball_.radius;
        return squared_length(p - ball_.center) > r2 * (1.0 + 1e-12) + 1e-300;
    }

    void recurse(std::list<Vec3d>::iterator end) {
        ball_ = ball_through(support_);
        if (support_.size() == 4) {
            return;
        }
        for (auto it = points_.begin(); it != end;) {
            auto next = std::next(it);
            if (outside(*it)) {
                support_.push_back(*it);
                recurse(it);
                support_.pop_back();
                points_.splice(points_.begin(), points_, it);
            }
            it = next;
        }
    }

    std::list<Vec3d> points_;
    std::vector<Vec3d> support_;
    EnclosingSphere ball_{{}, -1.0};
};

}  // namespace

EnclosingSphere minimal_enclosing_sphere(std::span<const Vec3d> points) {
    if (points.empty()) {
        return {{}, 0.0};
    }
    // Random insertion order gives expected linear time; the fixed seed keeps
    // the result reproducible.
    std::vector<Vec3d> shuffled(points.begin(), points.end());
    Prng rng(0x5eedf00dULL);
    for (std::size_t i = shuffled.size(); i > 1; --i) {
        std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
    }
    MoveToFrontMiniball solver(std::list<Vec3d>(shuffled.begin(), shuffled.end()));
    EnclosingSphere ball = solver.solve();
    // Tighten against rounding so every point is provably inside.
    double max_r2 = 0.0;
    for (const auto& p : points) {
        max_r2 = std::max(max_r2, squared_length(p - ball.center));
    }
    ball.radius = std::sqrt(max_r2);
    return ball;
}

NormalizedMesh normalize_to_unit_sphere(const TriangleMesh& mesh) {
    if (mesh.vertices.empty()) {
        throw DataError("cannot normalize an empty mesh");
    }
    const EnclosingSphere sphere = minimal_enclosing_sphere(mesh.vertices);
    if (!(sphere.radius > 0.0)) {
        throw DataError("all mesh vertices coincide; enclosing sphere has zero radius");
    }
    NormalizedMesh out{mesh, sphere.radius, sphere.center};
    const double inv = 1.0 / sphere.radius;
    for (auto& v : out.mesh.vertices) {
        v = (v - sphere.center) * inv;
    }
    return out;
}

TriangleMesh apply_transform(const TriangleMesh& mesh, const RigidTransform& t) {
    TriangleMesh out;
    out.triangles = mesh.triangles;
    out.vertices.reserve(mesh.vertices.size());
    out.normals.reserve(mesh.normals.size());
    for (const auto& v : mesh.vertices) {
        out.vertices.push_back(t.apply(v));
    }
    for (const auto& n : mesh.normals) {
        out.normals.push_back(t.rotate(n));
    }
    return out;
}

void append_mesh(TriangleMesh& scene, const TriangleMesh& part) {
    const auto offset = static_cast<std::uint32_t>(scene.vertices.size());
    scene.vertices.insert(scene.vertices.end(), part.vertices.begin(), part.vertices.end());
    scene.normals.insert(scene.normals.end(), part.normals.begin(), part.normals.end());
    scene.triangles.reserve(scene.triangles.size() + part.triangles.size());
    for (const auto& tri : part.triangles) {
        scene.triangles.push_back({tri[0] + offset, tri[1] + offset, tri[2] + offset});
    }
}

namespace {

struct FlatTriangle {
    Vec3d a, b, c;
    Vec3d normal;
    std::int32_t object_id;
};

SampledPoint sample_in(const FlatTriangle& t, Prng& rng) {
    const double su = std::sqrt(rng.uniform());
    const double v = rng.uniform();
    const Vec3d p = t.a * (1.0 - su) + t.b * (su * (1.0 - v)) + t.c * (su * v);
    return {p, t.normal, t.object_id};
}

}  // namespace

std::vector<SampledPoint> sample_point_cloud(std::span<const SceneObject> scene,
                                             std::size_t total_samples, Prng& rng,
                                             SamplingMode mode) {
    if (total_samples == 0) {
        throw std::invalid_argument("sample_point_cloud: total_samples must be >= 1");
    }
    std::vector<FlatTriangle> triangles;
    std::vector<double> cumulative;
    std::size_t triangle_count = 0;
    double total_area = 0.0;
    for (const auto& object : scene) {
        triangle_count += object.mesh->triangles.size();
        for (const auto& tri : object.mesh->triangles) {
            const Vec3d& a = object.mesh->vertices[tri[0]];
            const Vec3d& b = object.mesh->vertices[tri[1]];
            const Vec3d& c = object.mesh->vertices[tri[2]];
            const double area = triangle_area(a, b, c);
            if (!(area > 0.0)) {
                continue;
            }
            total_area += area;
            triangles.push_back({a, b, c, face_normal(a, b, c), object.object_id});
            cumulative.push_back(total_area);
        }
    }
    if (triangle_count == 0) {
        throw DataError("sample_point_cloud: scene has no triangles");
    }
    if (!(total_area > 0.0)) {
        throw DataError("sample_point_cloud: total surface area is zero");
    }

    std::vector<SampledPoint> out;
    if (mode == SamplingMode::PerTriangle) {
        const std::size_t per = (total_samples + triangle_count - 1) / triangle_count;
        out.reserve(per * triangles.size());
        for (const auto& t : triangles) {
            for (std::size_t i = 0; i < per; ++i) {
                out.push_back(sample_in(t, rng));
            }
        }
        return out;
    }

    out.reserve(total_samples);
    for (std::size_t i = 0; i < total_samples; ++i) {
        const double target = rng.uniform() * total_area;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        if (it == cumulative.end()) {
            --it;
        }
        out.push_back(sample_in(triangles[static_cast<std::size_t>(it - cumulative.begin())], rng));
    }
    return out;
}

namespace {

struct VertexKey {
    std::array<std::uint64_t, 6> bits;
    bool operator==(const VertexKey&) const = default;
};

struct VertexKeyHash {
    std::size_t operator()(const VertexKey& k) const {
        std::uint64_t h = 0;
        for (const auto b : k.bits) {
            h = mix64(h ^ b);
        }
        return static_cast<std::size_t>(h);
    }
};

}  // namespace

UniqueVertices unique_vertices(const TriangleMesh& mesh) {
    UniqueVertices out;
    out.vertex_to_unique.resize(mesh.vertices.size());
    std::unordered_map<VertexKey, std::uint32_t, VertexKeyHash> seen;
    seen.reserve(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3d& p = mesh.vertices[i];
        const Vec3d& n = mesh.normals[i];
        const VertexKey key{{std::bit_cast<std::uint64_t>(p.x), std::bit_cast<std::uint64_t>(p.y),
                             std::bit_cast<std::uint64_t>(p.z), std::bit_cast<std::uint64_t>(n.x),
                             std::bit_cast<std::uint64_t>(n.y), std::bit_cast<std::uint64_t>(n.z)}};
        const auto [it, inserted] =
            seen.try_emplace(key, static_cast<std::uint32_t>(out.points.size()));
        if (inserted) {
            out.points.push_back({p, n});
        }
        out.vertex_to_unique[i] = it->second;
    }
    return out;
}

}  // namespace rici
