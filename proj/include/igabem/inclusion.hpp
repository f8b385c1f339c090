#pragma once

#include "igabem/boundary.hpp"
#include "igabem/kelvin.hpp"
#include "igabem/nurbs.hpp"
#include "igabem/quadrature.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace igabem {

class InclusionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Grid layout along one local direction: `cells` equal cells, Lagrange degree 0, 1 or 2
/// (1, 2 or 3 nodes per cell; degree 0 places one node at each cell centre).
struct GridAxis {
    int cells = 1;
    int degree = 1;
    int node_count() const;
    double node(int i) const;
};

/// One-dimensional Lagrange values inside the cell containing s.
struct Lagrange1D {
    int cell = 0;
    std::vector<int> nodes;     ///< global node indices along the axis
    std::vector<double> N, dN;  ///< values and derivatives with respect to s
};

/// Evaluates the Lagrange functions of `cell` at s (s need not lie in the cell).
Lagrange1D lagrange_in_cell(const GridAxis& a, int cell, double s);
/// Cell containing s (right-continuous, last cell for s = 1).
int cell_of(const GridAxis& a, double s);
Lagrange1D lagrange_1d(const GridAxis& a, double s);

/// Tensor-product shape functions M_n = L_i(s) L_j(t) L_k(r) of the cell (cs, ct, cr).
struct ShapeValues {
    std::vector<std::array<int, 3>> ijk;
    std::vector<double> M;
    std::vector<std::array<double, 3>> dM;  ///< derivatives with respect to (s, t, r)
};
ShapeValues lagrange_shape(const std::array<GridAxis, 3>& grid, const std::array<int, 3>& cell, double s, double t,
                           double r);
ShapeValues lagrange_shape(const std::array<GridAxis, 3>& grid, double s, double t, double r);

/// Volume inclusion bounded by two surfaces: x(s,t,r) = (1-r) x^I(s,t) + r x^II(s,t).
struct GeneralInclusion {
    std::string id;
    NurbsSurface bottom, top;
    std::array<GridAxis, 3> grid;
    std::string material;

    void validate() const;
};

struct InclusionMap {
    Vec3 x;
    Mat3 J;      ///< rows: dx/ds, dx/dt, dx/dr
    double det;
};

InclusionMap map_general(const GeneralInclusion& g, double s, double t, double r);

/// Rock bolt: degree-1 axis curve, circular cross-section, bolt modulus.
struct LinearInclusion {
    std::string id;
    NurbsCurve axis;
    double radius = 0.0;
    double E = 0.0;

    void validate() const;
    int segment_count() const { return axis.count() - 1; }
};

/// Bolt initial-stress interpolation on one segment: (M1, M2) = (z'/H, 1 - z'/H).
std::array<double, 2> bolt_shape(double H, double z);

/// Grid point of an inclusion.
struct GridPoint {
    int inclusion = 0;        ///< index within its kind
    bool linear = false;
    std::array<double, 3> local{0.0, 0.0, 0.0};  ///< (s,t,r) or (s,-,-) for bolts
    Vec3 x = Vec3::Zero();
    Vec3 axis = Vec3::Zero();                    ///< bolt direction at the point (bolts only)
    std::optional<PatchParam> boundary;          ///< set when the point lies on a boundary patch
};

struct BoltLocalFrame {
    Vec3 vx, vy, vz;
    Mat3 T;            ///< columns vx, vy, vz
    double y = 0.0;    ///< perpendicular offset of the source (>= 0)
    double z = 0.0;    ///< axial offset of the source from the segment start
    bool fallback = false;
};

/// Local frame for segment xa -> xb and source y (x' chosen so the source has x' = 0).
BoltLocalFrame bolt_local_frame(const Vec3& xa, const Vec3& xb, const Vec3& y);

/// Closed-form line integral of E M_l pi R^2 over a segment of length H for a source at
/// (0, y, z) in the segment frame; l = 1 uses M1 = z'/H, l = 2 uses M2 = 1 - z'/H.
Mat36 bolt_regular_analytic(double H, double R, double y, double z, const ElasticConstants& k, int l);

enum class BoltEnd { Top, Bottom };

/// Closed-form integral over the cylinder with the source on the axis at one end. Here l = 1
/// is the linear function vanishing at the source and l = 2 the one equal to one there.
/// Top: source at z' = H, body below.
Mat36 bolt_singular_analytic(double H, double R, const ElasticConstants& k, int l, BoltEnd end);

/// Global 3x6 blocks for the two segment nodes (start, end) for source y; the columns act
/// on the local initial stress of the segment frame.
std::array<Mat36, 2> bolt_segment_blocks(const Vec3& xa, const Vec3& xb, double R, const Vec3& y,
                                         const ElasticConstants& k);

/// All inclusions of a model with their merged grid points.
struct InclusionSet {
    std::vector<GeneralInclusion> general;
    std::vector<LinearInclusion> linear;
    std::vector<GridPoint> points;
    std::vector<std::vector<int>> general_nodes;  ///< [inclusion][i + ns*(j + nt*k)] -> point
    std::vector<std::vector<int>> linear_nodes;   ///< [bolt][control point] -> point

    bool empty() const { return general.empty() && linear.empty(); }
    int size() const { return static_cast<int>(points.size()); }
};

/// Builds grid points, merges coincident nodes and flags points lying on boundary patches.
InclusionSet prepare_inclusions(std::vector<GeneralInclusion> general, std::vector<LinearInclusion> linear,
                                const std::vector<Patch>& patches, double tol = 1e-9);

/// E-integrals over every inclusion for each source: (3 * sources) x (6 * grid points).
Eigen::MatrixXd integrate_B0(const InclusionSet& set, const std::vector<Vec3>& sources, const ElasticConstants& k,
                             const QuadConfig& cfg, int threads = 1);

/// Per-node 3x6 blocks of one general inclusion for source y (keys are merged point ids).
std::vector<std::pair<int, Mat36>> integrate_B0_general(const InclusionSet& set, int incl, const Vec3& y,
                                                        const ElasticConstants& k, const QuadConfig& cfg);

}  // namespace igabem
