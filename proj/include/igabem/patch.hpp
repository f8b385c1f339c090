#pragma once

#include "igabem/nurbs.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace igabem {

class DegenerateMappingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PatchKind { Finite, Infinite, Special };

/// Displacement behaviour of an infinite patch along the direction to infinity.
enum class InfiniteMode { PlaneStrain, Decay };

struct MapResult {
    Vec3 x, v_xi, v_eta, n;
    double J = 0.0;
};

/// Boundary patch. Finite patches carry a NURBS surface; infinite patches a finite-edge
/// curve plus a second control row; special patches an outer and an inner curve.
/// The field (displacement/traction) basis is stored separately from the geometry.
struct Patch {
    PatchKind kind = PatchKind::Finite;
    std::string id;
    bool flip = false;  ///< reverse the normal

    NurbsSurface geometry;  // finite

    NurbsCurve edge;             // infinite: row x_i1 with basis R_i(xi)
    std::vector<Vec3> row2;      // infinite: row x_i2
    InfiniteMode mode = InfiniteMode::PlaneStrain;

    NurbsCurve outer, inner;     // special: x^I and x^II (shared knots and weights)
    bool chord_eta = false; // special: use v_eta = x^I - x^II instead of the true derivative

    NurbsSurface field;          // finite / special field basis
    NurbsCurve field_edge;       // infinite field basis in xi

    void validate() const;

    /// Number of field basis functions owned by the patch.
    int field_count() const;
    /// Greville collocation parameters of the field functions in local order.
    std::vector<std::array<double, 2>> collocation_params() const;
    /// Nonzero field functions at (xi, eta): local indices and values.
    void field_basis(double xi, double eta, std::vector<int>& idx, std::vector<double>& val) const;
    /// Knot breakpoints of geometry and field in each direction (infinite: xi only).
    std::vector<double> breaks_xi() const;
    std::vector<double> breaks_eta() const;
};

MapResult map_finite(const Patch& p, double xi, double eta);
MapResult map_infinite(const Patch& p, double xi, double eta);
MapResult map_special(const Patch& p, double xi, double eta);
MapResult map_patch(const Patch& p, double xi, double eta);

/// Infinite-direction functions M1 = (1-2eta)/(1-eta), M2 = eta/(1-eta) and their derivatives.
std::array<double, 4> infinite_shape(double eta);

Patch make_finite_patch(std::string id, NurbsSurface geometry, bool flip = false);
Patch make_infinite_patch(std::string id, NurbsCurve edge, const Vec3& direction, InfiniteMode mode,
                          bool flip = false);
Patch make_special_patch(std::string id, NurbsCurve outer, NurbsCurve inner, bool flip = false);

/// Field refinement applied to the field basis only.
void refine_field(Patch& p, Direction dir, const std::vector<double>& insert, int elevate);

/// Closest-point inversion; returns (xi, eta) when the point lies on the patch within tol.
std::optional<std::array<double, 2>> invert_patch(const Patch& p, const Vec3& x, double tol);

/// Quadratic rational quarter-circle arc helper: control points and weights of a full circle
/// of radius r in the plane spanned by e1, e2 around centre c, starting at angle a0 (radians)
/// and sweeping `quarters` quarter arcs counter-clockwise.
NurbsCurve circle_arc(const Vec3& c, const Vec3& e1, const Vec3& e2, double r, double a0, int quarters);

/// Parameter on a circle_arc curve at which the polar angle equals `angle` (radians).
double arc_parameter(const NurbsCurve& arc, const Vec3& c, const Vec3& e1, const Vec3& e2, double angle);

struct TunnelOptions {
    double radius = 1.0;
    double length = 2.0;       ///< length of the finite barrel, centred at y = 0
    int order = 2;             ///< field degree around the circumference
    double inf_extent = 1.0;   ///< |d| of the infinite patches
    InfiniteMode mode = InfiniteMode::PlaneStrain;
    std::vector<double> insert_upper_xi;  ///< field knots inserted in the upper half
    std::vector<double> insert_lower_xi;
    std::vector<double> insert_eta;       ///< field knots inserted along the axis
};

/// Circular tunnel along the y axis: two finite half-cylinders (upper z > 0, lower z < 0)
/// and four plane-strain infinite patches, normals pointing into the opening.
std::vector<Patch> build_circular_tunnel(const TunnelOptions& opt);
std::vector<Patch> build_circular_tunnel(double radius, double length, int order);

}  // namespace igabem
