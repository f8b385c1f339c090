#pragma once

#include "igabem/patch.hpp"

#include <array>
#include <functional>
#include <vector>

namespace igabem {

struct GaussRule {
    std::vector<double> x, w;
};

/// Gauss-Legendre rule on [-1,1], 1 <= n <= 64.
const GaussRule& gauss_rule(int n);

struct QuadConfig {
    int gauss_base = 4;
    double gauss_slope = 2.0;
    int gauss_cap = 12;
    double max_aspect = 2.0;
    int gauss_singular = 12;
    int infinite_bands = 24;
    int max_depth = 16;
    int volume_singular_gauss = 8;
    // octree counts n = ceil(base + slope L/d), split above cap
    int volume_base = 3;
    double volume_slope = 1.5;
    int volume_cap = 8;
};

struct Rect {
    double u0 = 0.0, u1 = 1.0, v0 = 0.0, v1 = 1.0;
    double area() const { return (u1 - u0) * (v1 - v0); }
    bool contains(double u, double v, double tol = 1e-12) const
    {
        return u >= u0 - tol && u <= u1 + tol && v >= v0 - tol && v <= v1 + tol;
    }
};

struct IntegrationRegion {
    Rect rect;
    int patch = -1;
};

struct SubRegion {
    Rect rect;
    int nu = 1, nv = 1;
};

/// Parameter-space quadrature point; w excludes the surface Jacobian.
struct QuadPoint {
    double u, v, w;
};

using SurfaceMap = std::function<Vec3(double, double)>;

/// Regions bounded by knot lines and collocation lines, split to a physical aspect ratio
/// of at most cfg.max_aspect. Infinite patches are cut into geometric bands in eta.
std::vector<IntegrationRegion> partition_regions(const Patch& patch,
                                                 const std::vector<std::array<double, 2>>& colloc,
                                                 const QuadConfig& cfg, int patch_id = -1);

/// Physical edge lengths of a parameter rectangle (chords through the midpoint).
std::array<double, 2> physical_lengths(const SurfaceMap& map, const Rect& r);

/// Proximity-driven subdivision for a source y outside the region.
std::vector<SubRegion> quadtree_subdivide(const SurfaceMap& map, const Rect& region, const Vec3& y,
                                          const QuadConfig& cfg);

std::vector<QuadPoint> tensor_points(const SubRegion& s);

struct Triangle {
    std::array<double, 2> apex, p1, p2;
};

/// Triangles fanning out from an apex on the closure of the rectangle (2 at a corner,
/// 3 on an edge, 4 in the interior).
std::vector<Triangle> triangle_fan(const Rect& r, const std::array<double, 2>& apex);

/// Degenerate-square mapped Gauss points over the fan; weights carry the 0.25 factor and
/// the vanishing apex Jacobian.
std::vector<QuadPoint> triangle_singular_rule(const Rect& r, const std::array<double, 2>& apex, int n);

// Volume analogues ---------------------------------------------------------

struct Box {
    std::array<double, 3> lo{0.0, 0.0, 0.0}, hi{1.0, 1.0, 1.0};
};

struct SubBox {
    Box box;
    std::array<int, 3> n{1, 1, 1};
};

struct QuadPoint3 {
    double s, t, r, w;
};

using VolumeMap = std::function<Vec3(double, double, double)>;

std::array<double, 3> physical_lengths(const VolumeMap& map, const Box& b);

std::vector<SubBox> octree_subdivide(const VolumeMap& map, const Box& box, const Vec3& y, const QuadConfig& cfg);

std::vector<QuadPoint3> tensor_points(const SubBox& s);

/// Gauss points of a box whose corner `corner` (bit k set = hi in direction k) is a singular
/// point: three pyramids with apex at that corner over the faces away from it.
std::vector<QuadPoint3> corner_singular_rule(const Box& b, int corner, int n);

}  // namespace igabem
