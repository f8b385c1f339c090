#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace igabem {

using Vec3 = Eigen::Vector3d;

/// Thrown when a parameter lies outside the closed unit interval.
class ParameterDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Thrown on invalid knot vectors, weights or refinement requests.
class NurbsError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Clamped knot vector on [0,1].
struct KnotVector {
    std::vector<double> knots;
    int degree = 0;

    KnotVector() = default;
    KnotVector(std::vector<double> k, int p);

    int basis_count() const { return static_cast<int>(knots.size()) - degree - 1; }
    /// Span index i with knots[i] <= u < knots[i+1] (last nonempty span for u = 1).
    int find_span(double u) const;
    int multiplicity(double u, double tol = 1e-12) const;
    /// Distinct knot values including 0 and 1.
    std::vector<double> breakpoints() const;
    void validate() const;
};

/// Nonzero basis functions at a parameter value.
struct BasisValues {
    int first = 0;                ///< global index of values[0]
    std::vector<double> values;   ///< p+1 entries
    std::vector<double> derivs;   ///< first derivatives (empty unless requested)
};

/// Rational basis R_i = w_i N_i / sum_j w_j N_j.
BasisValues eval_basis(const KnotVector& knot, const std::vector<double>& weights, double u);
BasisValues eval_basis_derivatives(const KnotVector& knot, const std::vector<double>& weights, double u);

/// Polynomial B-spline basis (all weights one) with first derivatives.
BasisValues eval_bspline(const KnotVector& knot, double u, bool with_derivs);

/// One abscissa per basis function: mean of knots[i+1..i+p].
std::vector<double> greville_abscissae(const KnotVector& knot);

struct NurbsCurve {
    KnotVector knot;
    std::vector<Vec3> points;
    std::vector<double> weights;

    int count() const { return knot.basis_count(); }
    void validate() const;
    Vec3 point(double u) const;
    /// Position and first derivative.
    void eval(double u, Vec3& x, Vec3& dx) const;
};

enum class Direction { U, V };

/// Tensor-product NURBS surface; control points numbered first along U then along V.
struct NurbsSurface {
    KnotVector knotU, knotV;
    std::vector<Vec3> points;
    std::vector<double> weights;

    int countU() const { return knotU.basis_count(); }
    int countV() const { return knotV.basis_count(); }
    int index(int i, int j) const { return i + countU() * j; }
    void validate() const;

    struct Basis {
        std::vector<int> index;
        std::vector<double> R, dRu, dRv;
    };
    /// Nonzero rational basis functions with their parametric derivatives.
    Basis basis(double u, double v) const;

    Vec3 point(double u, double v) const;
    void eval(double u, double v, Vec3& x, Vec3& xu, Vec3& xv) const;
};

NurbsCurve knot_insert(const NurbsCurve& c, double u);
NurbsCurve order_elevate(const NurbsCurve& c);
NurbsSurface knot_insert(const NurbsSurface& s, Direction dir, double u);
NurbsSurface order_elevate(const NurbsSurface& s, Direction dir);

}  // namespace igabem
