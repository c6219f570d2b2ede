#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rici/mesh.hpp"
#include "rici/prng.hpp"

namespace rici {

/// Subdivided icosahedron projected onto the unit sphere (closed, shared vertices).
TriangleMesh icosphere(int subdivisions);

/// Icosphere with random Gaussian bumps and an anisotropic scale. Closed and
/// free of symmetries for almost every seed.
TriangleMesh bumpy_blob(Prng& rng, int subdivisions = 3, int bumps = 12);

/// Torus sampled on a major x minor grid with random radial undulations. Closed.
TriangleMesh wobbly_torus(Prng& rng, int major_segments = 28, int minor_segments = 14);

/// Superellipsoid with random exponents and axes, plus a few bumps. Closed.
TriangleMesh lumpy_superellipsoid(Prng& rng, int subdivisions = 3);

/// Watertight mesh with more than 1,000 vertices and little self-similarity.
TriangleMesh large_test_mesh(std::uint64_t seed);

/// Writes `count` closed meshes (OBJ) named synthetic_XXX.obj into `directory`
/// and returns their paths. The shape family cycles blob, torus, superellipsoid.
std::vector<std::filesystem::path> write_synthetic_corpus(const std::filesystem::path& directory,
                                                          int count, std::uint64_t seed);

}  // namespace rici
