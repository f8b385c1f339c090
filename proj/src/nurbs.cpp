#include "igabem/nurbs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace igabem {

namespace {

using Vec4 = Eigen::Vector4d;

void check_param(double u)
{
    if (!(u >= 0.0 && u <= 1.0)) {
        std::ostringstream os;
        os << "parameter " << u << " outside [0,1]";
        throw ParameterDomainError(os.str());
    }
}

std::vector<Vec4> to_homogeneous(const std::vector<Vec3>& pts, const std::vector<double>& w)
{
    std::vector<Vec4> h(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) h[i] << w[i] * pts[i], w[i];
    return h;
}

void from_homogeneous(const std::vector<Vec4>& h, std::vector<Vec3>& pts, std::vector<double>& w)
{
    pts.resize(h.size());
    w.resize(h.size());
    for (size_t i = 0; i < h.size(); ++i) {
        w[i] = h[i][3];
        pts[i] = h[i].head<3>() / w[i];
    }
}

// Boehm insertion on a homogeneous control polygon.
std::vector<Vec4> insert_homogeneous(const KnotVector& kv, const std::vector<Vec4>& P, double u,
                                     KnotVector& out)
{
    if (!(u > 0.0 && u < 1.0)) throw NurbsError("knot insertion requires 0 < u < 1");
    const int p = kv.degree;
    const int s = kv.multiplicity(u);
    if (s + 1 > p) throw NurbsError("knot multiplicity would exceed the degree");
    const int k = kv.find_span(u);
    const auto& t = kv.knots;
    const int n = kv.basis_count();
    std::vector<Vec4> Q(n + 1);
    for (int i = 0; i <= n; ++i) {
        if (i <= k - p) {
            Q[i] = P[i];
        } else if (i >= k + 1) {
            Q[i] = P[i - 1];
        } else {
            const double a = (u - t[i]) / (t[i + p] - t[i]);
            Q[i] = a * P[i] + (1.0 - a) * P[i - 1];
        }
    }
    out = kv;
    out.knots.insert(out.knots.begin() + k + 1, u);
    return Q;
}

// Exact elevation by interpolation at the Greville points of the elevated basis;
// the homogeneous curve lies in the elevated spline space, so the fit is exact.
std::vector<Vec4> elevate_homogeneous(const KnotVector& kv, const std::vector<Vec4>& P, KnotVector& out)
{
    const int p = kv.degree;
    std::vector<double> k2;
    for (int i = 0; i < p + 2; ++i) k2.push_back(0.0);
    const auto bp = kv.breakpoints();
    for (size_t b = 1; b + 1 < bp.size(); ++b) {
        const int m = kv.multiplicity(bp[b]);
        for (int i = 0; i < m + 1; ++i) k2.push_back(bp[b]);
    }
    for (int i = 0; i < p + 2; ++i) k2.push_back(1.0);
    out = KnotVector(k2, p + 1);

    const int n2 = out.basis_count();
    const auto g = greville_abscissae(out);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n2, n2);
    Eigen::MatrixXd rhs(n2, 4);
    for (int j = 0; j < n2; ++j) {
        const auto b2 = eval_bspline(out, g[j], false);
        for (size_t a = 0; a < b2.values.size(); ++a) A(j, b2.first + static_cast<int>(a)) = b2.values[a];
        const auto b1 = eval_bspline(kv, g[j], false);
        Vec4 c = Vec4::Zero();
        for (size_t a = 0; a < b1.values.size(); ++a) c += b1.values[a] * P[b1.first + a];
        rhs.row(j) = c.transpose();
    }
    const Eigen::MatrixXd Q = A.fullPivLu().solve(rhs);
    std::vector<Vec4> res(n2);
    for (int i = 0; i < n2; ++i) res[i] = Q.row(i).transpose();
    return res;
}

}  // namespace

KnotVector::KnotVector(std::vector<double> k, int p) : knots(std::move(k)), degree(p) { validate(); }

void KnotVector::validate() const
{
    const int p = degree;
    if (p < 0) throw NurbsError("negative degree");
    if (static_cast<int>(knots.size()) < 2 * (p + 1)) throw NurbsError("knot vector too short for degree");
    for (size_t i = 0; i < knots.size(); ++i) {
        if (knots[i] < 0.0 || knots[i] > 1.0) throw NurbsError("knot outside [0,1]");
        if (i > 0 && knots[i] < knots[i - 1]) throw NurbsError("knots not nondecreasing");
    }
    for (int i = 0; i <= p; ++i) {
        if (knots[i] != 0.0 || knots[knots.size() - 1 - i] != 1.0)
            throw NurbsError("knot vector not clamped on [0,1]");
    }
    for (size_t i = p + 1; i + p + 1 < knots.size(); ++i) {
        if (multiplicity(knots[i]) > p + 1) throw NurbsError("interior knot multiplicity exceeds degree+1");
    }
}

int KnotVector::find_span(double u) const
{
    const int n = basis_count();
    if (u >= knots[n]) return n - 1;
    if (u <= knots[degree]) {
        int i = degree;
        while (knots[i + 1] <= u) ++i;
        return i;
    }
    const auto it = std::upper_bound(knots.begin(), knots.end(), u);
    return static_cast<int>(it - knots.begin()) - 1;
}

int KnotVector::multiplicity(double u, double tol) const
{
    int m = 0;
    for (double k : knots)
        if (std::abs(k - u) <= tol) ++m;
    return m;
}

std::vector<double> KnotVector::breakpoints() const
{
    std::vector<double> b;
    for (double k : knots)
        if (b.empty() || k > b.back()) b.push_back(k);
    return b;
}

BasisValues eval_bspline(const KnotVector& kv, double u, bool with_derivs)
{
    check_param(u);
    const int p = kv.degree;
    const auto& t = kv.knots;
    const int span = kv.find_span(u);

    // ndu table of Piegl & Tiller, algorithm A2.3 restricted to first derivatives.
    std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1, 0.0));
    std::vector<double> left(p + 1), right(p + 1);
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = u - t[span + 1 - j];
        right[j] = t[span + j] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double tmp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        ndu[j][j] = saved;
    }
    BasisValues out;
    out.first = span - p;
    out.values.resize(p + 1);
    for (int j = 0; j <= p; ++j) out.values[j] = ndu[j][p];
    if (with_derivs) {
        out.derivs.assign(p + 1, 0.0);
        if (p > 0) {
            for (int r = 0; r <= p; ++r) {
                double d = 0.0;
                if (r >= 1) d += ndu[r - 1][p - 1] / ndu[p][r - 1];
                if (r <= p - 1) d -= ndu[r][p - 1] / ndu[p][r];
                out.derivs[r] = d * p;
            }
        }
    }
    return out;
}

namespace {

BasisValues rationalize(BasisValues b, const std::vector<double>& w, bool with_derivs)
{
    double W = 0.0, dW = 0.0;
    for (size_t a = 0; a < b.values.size(); ++a) {
        W += w[b.first + a] * b.values[a];
        if (with_derivs) dW += w[b.first + a] * b.derivs[a];
    }
    for (size_t a = 0; a < b.values.size(); ++a) {
        const double wi = w[b.first + a];
        const double N = b.values[a];
        b.values[a] = wi * N / W;
        if (with_derivs) b.derivs[a] = wi * (b.derivs[a] * W - N * dW) / (W * W);
    }
    return b;
}

}  // namespace

BasisValues eval_basis(const KnotVector& knot, const std::vector<double>& weights, double u)
{
    if (static_cast<int>(weights.size()) != knot.basis_count()) throw NurbsError("weight count mismatch");
    return rationalize(eval_bspline(knot, u, false), weights, false);
}

BasisValues eval_basis_derivatives(const KnotVector& knot, const std::vector<double>& weights, double u)
{
    if (static_cast<int>(weights.size()) != knot.basis_count()) throw NurbsError("weight count mismatch");
    return rationalize(eval_bspline(knot, u, true), weights, true);
}

std::vector<double> greville_abscissae(const KnotVector& knot)
{
    const int p = knot.degree;
    const int n = knot.basis_count();
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        if (p == 0) {
            g[i] = 0.5 * (knot.knots[i] + knot.knots[i + 1]);
            continue;
        }
        double s = 0.0;
        for (int j = 1; j <= p; ++j) s += knot.knots[i + j];
        g[i] = s / p;
    }
    return g;
}

// ---------------------------------------------------------------- curves

void NurbsCurve::validate() const
{
    knot.validate();
    if (static_cast<int>(points.size()) != count() || static_cast<int>(weights.size()) != count())
        throw NurbsError("curve control point / weight count does not match knot vector");
    for (double w : weights)
        if (!(w > 0.0)) throw NurbsError("weights must be positive");
}

Vec3 NurbsCurve::point(double u) const
{
    const auto b = eval_basis(knot, weights, u);
    Vec3 x = Vec3::Zero();
    for (size_t a = 0; a < b.values.size(); ++a) x += b.values[a] * points[b.first + a];
    return x;
}

void NurbsCurve::eval(double u, Vec3& x, Vec3& dx) const
{
    const auto b = eval_basis_derivatives(knot, weights, u);
    x.setZero();
    dx.setZero();
    for (size_t a = 0; a < b.values.size(); ++a) {
        x += b.values[a] * points[b.first + a];
        dx += b.derivs[a] * points[b.first + a];
    }
}

NurbsCurve knot_insert(const NurbsCurve& c, double u)
{
    NurbsCurve out;
    const auto Q = insert_homogeneous(c.knot, to_homogeneous(c.points, c.weights), u, out.knot);
    from_homogeneous(Q, out.points, out.weights);
    return out;
}

NurbsCurve order_elevate(const NurbsCurve& c)
{
    NurbsCurve out;
    const auto Q = elevate_homogeneous(c.knot, to_homogeneous(c.points, c.weights), out.knot);
    from_homogeneous(Q, out.points, out.weights);
    return out;
}

// ---------------------------------------------------------------- surfaces

void NurbsSurface::validate() const
{
    knotU.validate();
    knotV.validate();
    const size_t n = static_cast<size_t>(countU()) * countV();
    if (points.size() != n || weights.size() != n)
        throw NurbsError("surface control point / weight count does not match knot vectors");
    for (double w : weights)
        if (!(w > 0.0)) throw NurbsError("weights must be positive");
}

NurbsSurface::Basis NurbsSurface::basis(double u, double v) const
{
    const auto bu = eval_bspline(knotU, u, true);
    const auto bv = eval_bspline(knotV, v, true);
    const int nu = static_cast<int>(bu.values.size());
    const int nv = static_cast<int>(bv.values.size());
    Basis b;
    b.index.reserve(nu * nv);
    b.R.reserve(nu * nv);
    b.dRu.reserve(nu * nv);
    b.dRv.reserve(nu * nv);
    double W = 0.0, Wu = 0.0, Wv = 0.0;
    for (int j = 0; j < nv; ++j) {
        for (int i = 0; i < nu; ++i) {
            const int id = index(bu.first + i, bv.first + j);
            const double w = weights[id];
            b.index.push_back(id);
            b.R.push_back(w * bu.values[i] * bv.values[j]);
            b.dRu.push_back(w * bu.derivs[i] * bv.values[j]);
            b.dRv.push_back(w * bu.values[i] * bv.derivs[j]);
            W += b.R.back();
            Wu += b.dRu.back();
            Wv += b.dRv.back();
        }
    }
    for (size_t a = 0; a < b.R.size(); ++a) {
        const double N = b.R[a];
        b.R[a] = N / W;
        b.dRu[a] = (b.dRu[a] * W - N * Wu) / (W * W);
        b.dRv[a] = (b.dRv[a] * W - N * Wv) / (W * W);
    }
    return b;
}

Vec3 NurbsSurface::point(double u, double v) const
{
    const auto b = basis(u, v);
    Vec3 x = Vec3::Zero();
    for (size_t a = 0; a < b.R.size(); ++a) x += b.R[a] * points[b.index[a]];
    return x;
}

void NurbsSurface::eval(double u, double v, Vec3& x, Vec3& xu, Vec3& xv) const
{
    const auto b = basis(u, v);
    x.setZero();
    xu.setZero();
    xv.setZero();
    for (size_t a = 0; a < b.R.size(); ++a) {
        const Vec3& P = points[b.index[a]];
        x += b.R[a] * P;
        xu += b.dRu[a] * P;
        xv += b.dRv[a] * P;
    }
}

namespace {

template <typename Op>
NurbsSurface refine_surface(const NurbsSurface& s, Direction dir, Op op)
{
    const int nu = s.countU(), nv = s.countV();
    const auto H = to_homogeneous(s.points, s.weights);
    NurbsSurface out;
    std::vector<Vec4> outH;
    if (dir == Direction::U) {
        std::vector<std::vector<Vec4>> rows(nv);
        for (int j = 0; j < nv; ++j) {
            std::vector<Vec4> row(nu);
            for (int i = 0; i < nu; ++i) row[i] = H[s.index(i, j)];
            rows[j] = op(s.knotU, row, out.knotU);
        }
        out.knotV = s.knotV;
        const int nu2 = out.knotU.basis_count();
        outH.resize(static_cast<size_t>(nu2) * nv);
        for (int j = 0; j < nv; ++j)
            for (int i = 0; i < nu2; ++i) outH[i + nu2 * j] = rows[j][i];
    } else {
        std::vector<std::vector<Vec4>> cols(nu);
        for (int i = 0; i < nu; ++i) {
            std::vector<Vec4> col(nv);
            for (int j = 0; j < nv; ++j) col[j] = H[s.index(i, j)];
            cols[i] = op(s.knotV, col, out.knotV);
        }
        out.knotU = s.knotU;
        const int nv2 = out.knotV.basis_count();
        outH.resize(static_cast<size_t>(nu) * nv2);
        for (int j = 0; j < nv2; ++j)
            for (int i = 0; i < nu; ++i) outH[i + nu * j] = cols[i][j];
    }
    from_homogeneous(outH, out.points, out.weights);
    return out;
}

}  // namespace

NurbsSurface knot_insert(const NurbsSurface& s, Direction dir, double u)
{
    return refine_surface(s, dir, [u](const KnotVector& kv, const std::vector<Vec4>& P, KnotVector& out) {
        return insert_homogeneous(kv, P, u, out);
    });
}

NurbsSurface order_elevate(const NurbsSurface& s, Direction dir)
{
    return refine_surface(s, dir, [](const KnotVector& kv, const std::vector<Vec4>& P, KnotVector& out) {
        return elevate_homogeneous(kv, P, out);
    });
}

}  // namespace igabem
