#pragma once

#include "meshmark/mesh.hpp"

#include <string>
#include <vector>

namespace meshmark::corpus {

// Procedural meshes. All are deterministic; closed ones are consistently
// oriented with outward normals.

// Subdivided icosahedron projected onto a sphere; 10*4^k + 2 vertices.
Mesh icosphere(int subdivisions, double radius = 1.0);

// Planar (z = 0) regular grid of nx * ny vertices over [0, size]^2. Every
// quad is split along the same diagonal, so interior vertices have valence 6.
Mesh grid(int nx, int ny, double size = 1.0);

// Grid with a single Gaussian bump of the given height and width (std-dev)
// centred on the grid.
Mesh bump_grid(int n, double height, double width, double size = 1.0);

// Torus around the z axis with major radius R. The tube radius r is modulated
// around the ring.
Mesh torus(double major_radius, double minor_radius, int major_segments, int minor_segments);

// Icosphere with smooth radial lobes: r = 1 + amplitude * lobes(direction).
Mesh bumpy_sphere(int subdivisions, double amplitude);

// Closed vase-like surface with twisted flutes and single-vertex poles.
Mesh vase(int segments, int rings);

// Ellipsoid with semi-axes (a, b, c) built from an icosphere.
Mesh ellipsoid(int subdivisions, double a, double b, double c);

// Moves every vertex within its tangent plane by a random distance of up to
// `fraction` of its shortest incident edge. Breaks the exact norm ties of
// parametric tessellations while keeping the surface shape.
Mesh jitter(const Mesh& mesh, double fraction, std::uint64_t seed);

// Names of the bundled benchmark meshes (2k..10k vertices, closed manifolds).
std::vector<std::string> names();
// Builds a bundled mesh by name; throws Error for unknown names.
Mesh make(const std::string& name);

}  // namespace meshmark::corpus
