#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rici/prng.hpp"
#include "rici/vec3.hpp"

namespace rici {

using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle set with one unit normal per vertex.
///
/// Invariants: every index < vertices.size(), normals.size() == vertices.size()
/// and every normal has unit length. validate() checks them.
struct TriangleMesh {
    std::vector<Vec3d> vertices;
    std::vector<Vec3d> normals;
    std::vector<Triangle> triangles;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t triangle_count() const { return triangles.size(); }
    bool empty() const { return triangles.empty(); }

    /// Throws DataError describing the first violated invariant.
    void validate() const;
};

/// Spin vertex + unit spin normal.
struct OrientedPoint {
    Vec3d position;
    Vec3d normal;
};

/// Rotation (unit quaternion w + xi + yj + zk) followed by translation.
struct RigidTransform {
    double w{1};
    double x{0};
    double y{0};
    double z{0};
    Vec3d translation{};

    static RigidTransform identity() { return {}; }

    /// Uniformly distributed rotation (Shoemake) with the given translation.
    static RigidTransform random_rotation(Prng& rng, const Vec3d& translation);

    /// Rotation of `degrees` about `axis` (need not be unit length).
    static RigidTransform from_axis_angle(const Vec3d& axis, double degrees,
                                          const Vec3d& translation = {});

    Vec3d rotate(const Vec3d& v) const;
    Vec3d apply(const Vec3d& p) const { return rotate(p) + translation; }
    RigidTransform inverse() const;
    double quaternion_norm() const;
};

/// A point on the surface of a scene object, carrying its triangle's face normal.
struct SampledPoint {
    Vec3d position;
    Vec3d normal;
    std::int32_t object_id{0};
};

/// A mesh tagged with the id of the object it came from.
struct SceneObject {
    const TriangleMesh* mesh{nullptr};
    std::int32_t object_id{0};
};

enum class SamplingMode { AreaWeighted, PerTriangle };

double triangle_area(const Vec3d& a, const Vec3d& b, const Vec3d& c);

/// Unit face normal following the triangle's winding; zero for degenerate faces.
Vec3d face_normal(const Vec3d& a, const Vec3d& b, const Vec3d& c);

/// Replaces all normals with area-weighted averages of incident face normals.
void compute_vertex_normals(TriangleMesh& mesh);

struct EnclosingSphere {
    Vec3d center;
    double radius{0};
};

/// Exact minimal enclosing sphere of a point set (Welzl, move-to-front).
EnclosingSphere minimal_enclosing_sphere(std::span<const Vec3d> points);

struct NormalizedMesh {
    TriangleMesh mesh;
    double scale{1};
    Vec3d center;
};

/// Translates by -center and scales by 1/scale so the minimal enclosing sphere
/// of the vertices becomes the unit sphere. Throws DataError when all vertices
/// coincide.
NormalizedMesh normalize_to_unit_sphere(const TriangleMesh& mesh);

/// Rotates and translates positions; rotates normals; keeps topology.
TriangleMesh apply_transform(const TriangleMesh& mesh, const RigidTransform& t);

/// Appends `part` to `scene`, offsetting its triangle indices.
void append_mesh(TriangleMesh& scene, const TriangleMesh& part);

/// Draws surface samples from a set of meshes.
///
/// AreaWeighted draws `total_samples` points; each picks a triangle by inverse
/// CDF over cumulative triangle area, then a uniform point inside it with the
/// square-root barycentric formula. PerTriangle places
/// ceil(total_samples / triangle_count) points on every non-degenerate
/// triangle. Throws DataError when the total surface area is zero.
std::vector<SampledPoint> sample_point_cloud(std::span<const SceneObject> scene,
                                             std::size_t total_samples, Prng& rng,
                                             SamplingMode mode = SamplingMode::AreaWeighted);

/// Deduplicated (position, normal) anchors of a mesh, in first-occurrence order.
struct UniqueVertices {
    std::vector<OrientedPoint> points;
    /// For every mesh vertex, the index of its anchor in `points`.
    std::vector<std::uint32_t> vertex_to_unique;
};

UniqueVertices unique_vertices(const TriangleMesh& mesh);

}  // namespace rici
