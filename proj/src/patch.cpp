#include "igabem/patch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace igabem {

namespace {

void finish(MapResult& m, bool flip)
{
    Vec3 c = m.v_xi.cross(m.v_eta);
    m.J = c.norm();
    const double scale = m.v_xi.norm() * m.v_eta.norm();
    if (!(m.J > 1e-12 * scale) || scale == 0.0) throw DegenerateMappingError("degenerate patch mapping (J ~ 0)");
    m.n = c / m.J;
    if (flip) m.n = -m.n;
}

void check_unit(double u)
{
    if (!(u >= 0.0 && u <= 1.0)) throw ParameterDomainError("patch parameter outside [0,1]");
}

std::vector<double> merge_breaks(std::vector<double> a, const std::vector<double>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    std::vector<double> out;
    for (double v : a)
        if (out.empty() || v - out.back() > 1e-12) out.push_back(v);
    return out;
}

}  // namespace

std::array<double, 4> infinite_shape(double eta)
{
    if (!(eta >= 0.0 && eta < 1.0)) throw ParameterDomainError("infinite patch requires 0 <= eta < 1");
    const double a = 1.0 - eta;
    return {(1.0 - 2.0 * eta) / a, eta / a, -1.0 / (a * a), 1.0 / (a * a)};
}

MapResult map_finite(const Patch& p, double xi, double eta)
{
    MapResult m;
    p.geometry.eval(xi, eta, m.x, m.v_xi, m.v_eta);
    finish(m, p.flip);
    return m;
}

MapResult map_infinite(const Patch& p, double xi, double eta)
{
    check_unit(xi);
    const auto M = infinite_shape(eta);
    const auto b = eval_basis_derivatives(p.edge.knot, p.edge.weights, xi);
    Vec3 x1 = Vec3::Zero(), x2 = Vec3::Zero(), d1 = Vec3::Zero(), d2 = Vec3::Zero();
    for (size_t a = 0; a < b.values.size(); ++a) {
        const int i = b.first + static_cast<int>(a);
        x1 += b.values[a] * p.edge.points[i];
        x2 += b.values[a] * p.row2[i];
        d1 += b.derivs[a] * p.edge.points[i];
        d2 += b.derivs[a] * p.row2[i];
    }
    MapResult m;
    m.x = M[0] * x1 + M[1] * x2;
    m.v_xi = M[0] * d1 + M[1] * d2;
    m.v_eta = M[2] * x1 + M[3] * x2;
    finish(m, p.flip);
    return m;
}

MapResult map_special(const Patch& p, double xi, double eta)
{
    check_unit(eta);
    Vec3 xa, da, xb, db;
    p.outer.eval(xi, xa, da);
    p.inner.eval(xi, xb, db);
    MapResult m;
    m.x = (1.0 - eta) * xa + eta * xb;
    m.v_xi = (1.0 - eta) * da + eta * db;
    m.v_eta = p.chord_eta ? Vec3(xa - xb) : Vec3(xb - xa);
    finish(m, p.flip);
    return m;
}

MapResult map_patch(const Patch& p, double xi, double eta)
{
    switch (p.kind) {
    case PatchKind::Finite: return map_finite(p, xi, eta);
    case PatchKind::Infinite: return map_infinite(p, xi, eta);
    case PatchKind::Special: return map_special(p, xi, eta);
    }
    return {};
}

void Patch::validate() const
{
    switch (kind) {
    case PatchKind::Finite:
        geometry.validate();
        field.validate();
        break;
    case PatchKind::Infinite:
        edge.validate();
        field_edge.validate();
        if (row2.size() != edge.points.size()) throw NurbsError("infinite patch: row sizes differ");
        for (size_t i = 0; i < row2.size(); ++i)
            if ((row2[i] - edge.points[i]).norm() == 0.0) throw NurbsError("infinite patch: coincident rows");
        break;
    case PatchKind::Special:
        outer.validate();
        inner.validate();
        field.validate();
        if (outer.knot.knots != inner.knot.knots || outer.weights != inner.weights)
            throw NurbsError("special patch: curves must share knots and weights");
        break;
    }
}

int Patch::field_count() const
{
    if (kind == PatchKind::Infinite) return field_edge.count();
    return field.countU() * field.countV();
}

std::vector<std::array<double, 2>> Patch::collocation_params() const
{
    std::vector<std::array<double, 2>> out;
    if (kind == PatchKind::Infinite) {
        for (double g : greville_abscissae(field_edge.knot)) out.push_back({g, 0.0});
        return out;
    }
    const auto gu = greville_abscissae(field.knotU);
    const auto gv = greville_abscissae(field.knotV);
    for (double v : gv)
        for (double u : gu) out.push_back({u, v});
    return out;
}

void Patch::field_basis(double xi, double eta, std::vector<int>& idx, std::vector<double>& val) const
{
    idx.clear();
    val.clear();
    if (kind == PatchKind::Infinite) {
        const auto b = eval_basis(field_edge.knot, field_edge.weights, xi);
        const double f = mode == InfiniteMode::Decay ? 1.0 - eta : 1.0;
        for (size_t a = 0; a < b.values.size(); ++a) {
            idx.push_back(b.first + static_cast<int>(a));
            val.push_back(f * b.values[a]);
        }
        return;
    }
    const auto b = field.basis(xi, eta);
    idx = b.index;
    val = b.R;
}

std::vector<double> Patch::breaks_xi() const
{
    switch (kind) {
    case PatchKind::Finite: return merge_breaks(geometry.knotU.breakpoints(), field.knotU.breakpoints());
    case PatchKind::Infinite: return merge_breaks(edge.knot.breakpoints(), field_edge.knot.breakpoints());
    case PatchKind::Special: return merge_breaks(outer.knot.breakpoints(), field.knotU.breakpoints());
    }
    return {0.0, 1.0};
}

std::vector<double> Patch::breaks_eta() const
{
    switch (kind) {
    case PatchKind::Finite: return merge_breaks(geometry.knotV.breakpoints(), field.knotV.breakpoints());
    case PatchKind::Infinite: return {0.0, 1.0};
    case PatchKind::Special: return field.knotV.breakpoints();
    }
    return {0.0, 1.0};
}

Patch make_finite_patch(std::string id, NurbsSurface geometry, bool flip)
{
    geometry.validate();
    Patch p;
    p.kind = PatchKind::Finite;
    p.id = std::move(id);
    p.flip = flip;
    p.field = geometry;
    p.geometry = std::move(geometry);
    return p;
}

Patch make_infinite_patch(std::string id, NurbsCurve edge, const Vec3& direction, InfiniteMode mode, bool flip)
{
    edge.validate();
    if (direction.norm() == 0.0) throw NurbsError("infinite patch: zero direction");
    Patch p;
    p.kind = PatchKind::Infinite;
    p.id = std::move(id);
    p.flip = flip;
    p.mode = mode;
    for (const auto& x : edge.points) p.row2.push_back(x + direction);
    p.field_edge = edge;
    p.edge = std::move(edge);
    return p;
}

Patch make_special_patch(std::string id, NurbsCurve outer, NurbsCurve inner, bool flip)
{
    Patch p;
    p.kind = PatchKind::Special;
    p.id = std::move(id);
    p.flip = flip;
    NurbsSurface s;
    s.knotU = outer.knot;
    s.knotV = KnotVector({0.0, 0.0, 1.0, 1.0}, 1);
    s.points = outer.points;
    s.points.insert(s.points.end(), inner.points.begin(), inner.points.end());
    s.weights = outer.weights;
    s.weights.insert(s.weights.end(), inner.weights.begin(), inner.weights.end());
    p.field = s;
    p.outer = std::move(outer);
    p.inner = std::move(inner);
    p.validate();
    map_special(p, 0.5, 0.5);
    return p;
}

void refine_field(Patch& p, Direction dir, const std::vector<double>& insert, int elevate)
{
    if (p.kind == PatchKind::Infinite) {
        if (dir != Direction::U) {
            if (!insert.empty() || elevate > 0) throw NurbsError("infinite patch field is refined in xi only");
            return;
        }
        for (int e = 0; e < elevate; ++e) p.field_edge = order_elevate(p.field_edge);
        for (double u : insert) p.field_edge = knot_insert(p.field_edge, u);
        return;
    }
    for (int e = 0; e < elevate; ++e) p.field = order_elevate(p.field, dir);
    for (double u : insert) p.field = knot_insert(p.field, dir, u);
}

std::optional<std::array<double, 2>> invert_patch(const Patch& p, const Vec3& x, double tol)
{
    const double eta_max = p.kind == PatchKind::Infinite ? 1.0 - 1e-9 : 1.0;
    // Coarse search over a sample grid, then clamped Gauss-Newton.
    const int ns = 16;
    double best = std::numeric_limits<double>::max();
    std::array<double, 2> q{0.0, 0.0};
    for (int j = 0; j <= ns; ++j) {
        for (int i = 0; i <= ns; ++i) {
            const double u = double(i) / ns;
            const double v = std::min(double(j) / ns, eta_max);
            if (p.kind == PatchKind::Infinite && j == ns) continue;
            const double d = (map_patch(p, u, v).x - x).norm();
            if (d < best) {
                best = d;
                q = {u, v};
            }
        }
    }
    for (int it = 0; it < 60; ++it) {
        const auto m = map_patch(p, q[0], q[1]);
        const Vec3 r = m.x - x;
        Eigen::Matrix<double, 3, 2> A;
        A.col(0) = m.v_xi;
        A.col(1) = m.v_eta;
        const Eigen::Vector2d step = (A.transpose() * A).ldlt().solve(-A.transpose() * r);
        double u = std::clamp(q[0] + step[0], 0.0, 1.0);
        double v = std::clamp(q[1] + step[1], 0.0, eta_max);
        const double moved = std::abs(u - q[0]) + std::abs(v - q[1]);
        q = {u, v};
        if (moved < 1e-15) break;
    }
    if ((map_patch(p, q[0], q[1]).x - x).norm() <= tol) return q;
    return std::nullopt;
}

NurbsCurve circle_arc(const Vec3& c, const Vec3& e1, const Vec3& e2, double r, double a0, int quarters)
{
    if (quarters < 1 || quarters > 4) throw NurbsError("circle_arc: 1..4 quarter arcs");
    NurbsCurve arc;
    std::vector<double> k{0.0, 0.0, 0.0};
    for (int q = 1; q < quarters; ++q) {
        k.push_back(double(q) / quarters);
        k.push_back(double(q) / quarters);
    }
    k.insert(k.end(), {1.0, 1.0, 1.0});
    arc.knot = KnotVector(k, 2);
    const double h = std::numbers::pi / 4.0;
    for (int q = 0; q <= 2 * quarters; ++q) {
        const double a = a0 + q * h;
        const bool mid = q % 2 == 1;
        const double rr = mid ? r * std::sqrt(2.0) : r;
        arc.points.push_back(c + rr * (std::cos(a) * e1 + std::sin(a) * e2));
        arc.weights.push_back(mid ? std::sqrt(0.5) : 1.0);
    }
    return arc;
}

double arc_parameter(const NurbsCurve& arc, const Vec3& c, const Vec3& e1, const Vec3& e2, double angle)
{
    const Vec3 s = arc.point(0.0) - c;
    const double a0 = std::atan2(s.dot(e2), s.dot(e1));
    const double two_pi = 2.0 * std::numbers::pi;
    auto rel = [&](double u) {
        const Vec3 d = arc.point(u) - c;
        double a = std::atan2(d.dot(e2), d.dot(e1)) - a0;
        while (a < 0.0) a += two_pi;
        while (a >= two_pi) a -= two_pi;
        return a;
    };
    double target = angle - a0;
    while (target < 0.0) target += two_pi;
    while (target >= two_pi) target -= two_pi;
    double lo = 0.0, hi = 1.0;
    if (rel(0.5) < 1e-14) return 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (rel(mid) < target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<Patch> build_circular_tunnel(const TunnelOptions& opt)
{
    if (!(opt.radius > 0.0) || !(opt.length > 0.0)) throw NurbsError("tunnel radius and length must be positive");
    const Vec3 c0 = Vec3::Zero();
    const Vec3 ex(1, 0, 0), ey(0, 1, 0), ez(0, 0, 1);
    const double h = 0.5 * opt.length;
    const double pi = std::numbers::pi;

    auto ring = [&](double a0, double y) { return circle_arc(c0 + y * ey, ex, ez, opt.radius, a0, 2); };
    auto barrel = [&](const std::string& id, double a0) {
        const NurbsCurve lo = ring(a0, -h), hi = ring(a0, h);
        NurbsSurface s;
        s.knotU = lo.knot;
        s.knotV = KnotVector({0.0, 0.0, 1.0, 1.0}, 1);
        s.points = lo.points;
        s.points.insert(s.points.end(), hi.points.begin(), hi.points.end());
        s.weights = lo.weights;
        s.weights.insert(s.weights.end(), hi.weights.begin(), hi.weights.end());
        return make_finite_patch(id, s);
    };

    std::vector<Patch> out;
    out.push_back(barrel("upper", 0.0));
    out.push_back(barrel("lower", pi));
    const Vec3 d = opt.inf_extent * ey;
    out.push_back(make_infinite_patch("upper_front", ring(0.0, h), d, opt.mode));
    out.push_back(make_infinite_patch("lower_front", ring(pi, h), d, opt.mode));
    out.push_back(make_infinite_patch("upper_back", ring(0.0, -h), -d, opt.mode, true));
    out.push_back(make_infinite_patch("lower_back", ring(pi, -h), -d, opt.mode, true));

    for (auto& p : out) {
        const bool upper = p.id.rfind("upper", 0) == 0;
        if (opt.order > 2) refine_field(p, Direction::U, {}, opt.order - 2);
        refine_field(p, Direction::U, upper ? opt.insert_upper_xi : opt.insert_lower_xi, 0);
        if (p.kind == PatchKind::Finite) refine_field(p, Direction::V, opt.insert_eta, 0);
    }
    return out;
}

std::vector<Patch> build_circular_tunnel(double radius, double length, int order)
{
    TunnelOptions opt;
    opt.radius = radius;
    opt.length = length;
    opt.order = order;
    return build_circular_tunnel(opt);
}

}  // namespace igabem
