#pragma once

#include "tslab/pitchfork.hpp"

#include <functional>

namespace tslab::fixtures {

/// Subdivided icosahedron projected to the sphere; outward orientation.
TriMeshd icosphere(double radius, int levels);
/// Graph z = f(x, y) over a regular grid on [x0, x1] x [y0, y1], upward normal.
TriMeshd graph_mesh(const std::function<double(double, double)>& f, double x0, double x1, double y0, double y1,
                    double h);
/// Flat annulus r in [r0, r1] in the plane z = 0.
TriMeshd annulus(double r0, double r1, int nr, int nt);

/// pitchfork_piece(pi, 6 pi, 0.1) doubled across the z-axis, built once per process.
const CappedSolve& pitchfork_piece_fixture();
const DoubledSurface& doubled_pitchfork();

}  // namespace tslab::fixtures
