#include "igabem/inclusion.hpp"

#include "igabem/parallel.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace igabem {

int GridAxis::node_count() const
{
    switch (degree) {
    case 0: return cells;
    case 1: return cells + 1;
    case 2: return 2 * cells + 1;
    }
    throw InclusionError("grid degree must be 0, 1 or 2");
}

double GridAxis::node(int i) const
{
    switch (degree) {
    case 0: return (i + 0.5) / cells;
    case 1: return double(i) / cells;
    case 2: return double(i) / (2 * cells);
    }
    throw InclusionError("grid degree must be 0, 1 or 2");
}

Lagrange1D lagrange_in_cell(const GridAxis& a, int cell, double s)
{
    if (a.cells < 1) throw InclusionError("grid needs at least one cell");
    const double h = 1.0 / a.cells;
    const double x = (s - cell * h) / h;
    Lagrange1D L;
    L.cell = cell;
    switch (a.degree) {
    case 0:
        L.nodes = {cell};
        L.N = {1.0};
        L.dN = {0.0};
        break;
    case 1:
        L.nodes = {cell, cell + 1};
        L.N = {1.0 - x, x};
        L.dN = {-1.0 / h, 1.0 / h};
        break;
    case 2:
        L.nodes = {2 * cell, 2 * cell + 1, 2 * cell + 2};
        L.N = {2.0 * (x - 0.5) * (x - 1.0), -4.0 * x * (x - 1.0), 2.0 * x * (x - 0.5)};
        L.dN = {(4.0 * x - 3.0) / h, (4.0 - 8.0 * x) / h, (4.0 * x - 1.0) / h};
        break;
    default: throw InclusionError("grid degree must be 0, 1 or 2");
    }
    return L;
}

int cell_of(const GridAxis& a, double s)
{
    const int c = static_cast<int>(std::floor(s * a.cells));
    return std::clamp(c, 0, a.cells - 1);
}

Lagrange1D lagrange_1d(const GridAxis& a, double s) { return lagrange_in_cell(a, cell_of(a, s), s); }

ShapeValues lagrange_shape(const std::array<GridAxis, 3>& grid, const std::array<int, 3>& cell, double s, double t,
                           double r)
{
    const auto ls = lagrange_in_cell(grid[0], cell[0], s);
    const auto lt = lagrange_in_cell(grid[1], cell[1], t);
    const auto lr = lagrange_in_cell(grid[2], cell[2], r);
    ShapeValues v;
    for (size_t k = 0; k < lr.nodes.size(); ++k)
        for (size_t j = 0; j < lt.nodes.size(); ++j)
            for (size_t i = 0; i < ls.nodes.size(); ++i) {
                v.ijk.push_back({ls.nodes[i], lt.nodes[j], lr.nodes[k]});
                v.M.push_back(ls.N[i] * lt.N[j] * lr.N[k]);
                v.dM.push_back({ls.dN[i] * lt.N[j] * lr.N[k], ls.N[i] * lt.dN[j] * lr.N[k], ls.N[i] * lt.N[j] * lr.dN[k]});
            }
    return v;
}

ShapeValues lagrange_shape(const std::array<GridAxis, 3>& grid, double s, double t, double r)
{
    return lagrange_shape(grid, {cell_of(grid[0], s), cell_of(grid[1], t), cell_of(grid[2], r)}, s, t, r);
}

void GeneralInclusion::validate() const
{
    bottom.validate();
    top.validate();
    for (const auto& a : grid) {
        if (a.cells < 1) throw InclusionError("inclusion '" + id + "': grid needs at least one cell per direction");
        if (a.degree < 0 || a.degree > 2) throw InclusionError("inclusion '" + id + "': grid degree must be 0, 1 or 2");
    }
    for (double s : {0.1, 0.5, 0.9})
        for (double t : {0.1, 0.5, 0.9})
            for (double r : {0.0, 0.5, 1.0}) map_general(*this, s, t, r);
}

InclusionMap map_general(const GeneralInclusion& g, double s, double t, double r)
{
    if (!(r >= 0.0 && r <= 1.0)) throw ParameterDomainError("inclusion parameter r outside [0,1]");
    Vec3 a, as, at, b, bs, bt;
    g.bottom.eval(s, t, a, as, at);
    g.top.eval(s, t, b, bs, bt);
    InclusionMap m;
    m.x = (1.0 - r) * a + r * b;
    m.J.row(0) = ((1.0 - r) * as + r * bs).transpose();
    m.J.row(1) = ((1.0 - r) * at + r * bt).transpose();
    m.J.row(2) = (b - a).transpose();
    m.det = m.J.determinant();
    const double scale = m.J.row(0).norm() * m.J.row(1).norm() * m.J.row(2).norm();
    if (!(m.det > 1e-12 * scale)) {
        std::ostringstream os;
        os << "inclusion '" << g.id << "': nonpositive Jacobian determinant at (" << s << ", " << t << ", " << r << ")";
        throw InclusionError(os.str());
    }
    return m;
}

void LinearInclusion::validate() const
{
    axis.validate();
    if (axis.knot.degree != 1) throw InclusionError("bolt '" + id + "': axis curve must be of degree 1");
    if (!(radius > 0.0)) throw InclusionError("bolt '" + id + "': radius must be positive");
    if (!(E > 0.0)) throw InclusionError("bolt '" + id + "': modulus must be positive");
    for (int i = 0; i + 1 < axis.count(); ++i)
        if ((axis.points[i + 1] - axis.points[i]).norm() == 0.0)
            throw InclusionError("bolt '" + id + "': zero-length segment");
}

std::array<double, 2> bolt_shape(double H, double z) { return {z / H, 1.0 - z / H}; }

BoltLocalFrame bolt_local_frame(const Vec3& xa, const Vec3& xb, const Vec3& y)
{
    BoltLocalFrame f;
    const double H = (xb - xa).norm();
    if (!(H > 0.0)) throw InclusionError("zero-length bolt segment");
    f.vz = (xb - xa) / H;
    const Vec3 d = y - xa;
    Vec3 V = d.cross(f.vz);
    f.y = V.norm();
    f.z = d.dot(f.vz);
    if (f.y < 1e-6 * H) {
        f.fallback = true;
        V = Vec3::UnitY().cross(f.vz);
        if (V.norm() < 1e-8) V = Vec3::UnitX().cross(f.vz);
    }
    f.vx = V.normalized();
    f.vy = f.vz.cross(f.vx);
    f.T.col(0) = f.vx;
    f.T.col(1) = f.vy;
    f.T.col(2) = f.vz;
    return f;
}

namespace {

// On-axis source outside the segment: only r,3 = sign(z' - z~) is nonzero.
Mat36 bolt_on_axis(double H, double R, double zt, const ElasticConstants& k, int l)
{
    const double P = k.C() * std::numbers::pi * R * R;
    const double C3 = k.C3();
    const double dz = H - zt;
    const double s = zt < 0.0 ? 1.0 : -1.0;
    const double lg = std::log(std::abs(dz / zt));
    const double I = l == 1 ? (lg - zt / dz - 1.0) / H : (-1.0 - dz / zt - lg) / H;
    Mat36 M = Mat36::Zero();
    M(0, 5) = M(1, 4) = -2.0 * P * C3 * s * I;
    M(2, 0) = M(2, 1) = P * s * I;
    M(2, 2) = -2.0 * (1.0 + C3) * P * s * I;
    return M;
}

}  // namespace

Mat36 bolt_regular_analytic(double H, double R, double y, double zt, const ElasticConstants& k, int l)
{
    if (!(H > 0.0) || !(R > 0.0)) throw InclusionError("bolt segment needs H > 0 and R > 0");
    if (l != 1 && l != 2) throw InclusionError("bolt shape index must be 1 or 2");
    y = std::abs(y);
    if (y < 1e-6 * H) {
        if (zt > -1e-6 * H && zt < H + 1e-6 * H) throw InclusionError("source on the bolt axis inside the segment");
        return bolt_on_axis(H, R, zt, k, l);
    }
    const double C3 = k.C3();
    const double P = k.C() * std::numbers::pi * R * R;
    const double dz = H - zt;
    const double y2 = y * y;
    const double r0 = std::sqrt(y2 + zt * zt), r1 = std::sqrt(y2 + dz * dz);
    const double r0_3 = r0 * r0 * r0, r1_3 = r1 * r1 * r1;
    // L = ln((r0 - z~)/(r1 + dz)) written without cancellation
    const double L = -(std::asinh(dz / y) + std::asinh(zt / y));
    Mat36 M = Mat36::Zero();
    if (l == 1) {
        M(0, 3) = 2 * P * C3 / (H * y) * (r0 + (zt * dz - y2) / r1);
        M(0, 5) = 2 * P * C3 / H * (H / r1 + L);
        M(1, 0) = P / (H * y) * ((y2 - zt * dz) / r1 - r0);
        M(1, 1) = P / (H * y) *
                  ((zt * zt + 2 * C3 * r0 * r0) / r0 +
                   (dz * (zt * dz * dz + (H + zt) * y2) - 2 * C3 * r1 * r1 * (y2 - zt * dz)) / r1_3);
        M(1, 2) = P * y / H * (1 / r0 - (r0 * r0 + 2 * H * H - 3 * H * zt) / r1_3);
        M(1, 4) = 2 * P / H *
                  (H * ((C3 - 1) * H * (dz - zt) + C3 * r0 * r0 - zt * zt) / r1_3 + zt * (1 / r1 - 1 / r0) + C3 * L);
        M(2, 0) = P / H * (-L - H / r1);
        // re-derived antiderivative F(w) = ln(w + r) - w/r - w^3/r^3 + z~(-1/r + y^2/r^3), r = sqrt(y^2 + w^2)
        const auto F = [&](double w, double r) {
            const double r3 = r * r * r;
            return -w / r - w * w * w / r3 + zt * (-1.0 / r + y2 / r3);
        };
        M(2, 1) = P / H * (F(dz, r1) - F(-zt, r0) - L);
        M(2, 2) = P / H *
                  (H / r1_3 * ((3 + 2 * C3) * H * H + 2 * (1 + C3) * y2 - 2 * (3 + 2 * C3) * H * zt + (3 + 2 * C3) * zt * zt) +
                   zt * (1 / r0 - 1 / r1) + 2 * (1 + C3) * L);
        M(2, 4) = 2 * P / (H * y) *
                  (((2 + C3) * y2 + (1 + C3) * zt * zt) / r0 + (1 + C3) * zt * dz * dz * dz / r1_3 -
                   ((2 + C3) * y2 * y2 + y2 * dz * ((3 + C3) * dz - C3 * zt)) / r1_3);
    } else {
        M(0, 3) = 2 * P * C3 / (H * y) * (r1 + (zt * dz - y2) / r0);
        M(0, 5) = -2 * P * C3 / H * (H / r0 + L);
        M(1, 0) = P / (H * y) * ((y2 - zt * dz) / r0 - r1);
        M(1, 1) = P / (H * y) *
                  (((1 + 2 * C3) * H * H + zt * zt - 2 * H * zt * (1 + 2 * C3) + 2 * C3 * r0 * r0) / r1 +
                   (zt * (r0 * r0 * dz + H * y2) - 2 * C3 * r0 * r0 * (y2 - zt * dz)) / r0_3);
        M(1, 2) = P * y / H * (1 / r1 - (r0 * r0 + H * zt) / r0_3);
        M(1, 4) = 2 * P / H * ((zt - C3 * H) / r0 - H * y2 / r0_3 + dz / r1 - C3 * L);
        M(2, 0) = P / H * (L + H / r0);
        M(2, 1) = P / H * (dz / r1 + zt * (H * zt + r0 * r0) / r0_3 + L);
        M(2, 2) = P / H * (H * y2 / r0_3 - (2 * (1 + C3) * H + zt) / r0 - dz / r1 - 2 * (1 + C3) * L);
        M(2, 4) = 2 * P / (H * y) *
                  (((1 + C3) * r0 * r0 + y2 + (1 + C3) * (H * H - 2 * H * zt)) / r1 +
                   (1 + C3) * zt * zt * zt * dz / r0_3 - ((2 + C3) * y2 * y2 - y2 * zt * (C3 * dz - (3 + C3) * zt)) / r0_3);
    }
    return M;
}

Mat36 bolt_singular_analytic(double H, double R, const ElasticConstants& k, int l, BoltEnd end)
{
    if (!(H > 0.0) || !(R > 0.0)) throw InclusionError("bolt segment needs H > 0 and R > 0");
    if (l != 1 && l != 2) throw InclusionError("bolt shape index must be 1 or 2");
    const double C = k.C(), C3 = k.C3(), pi = std::numbers::pi;
    const double th = std::atan(R / H);
    const double c1 = std::cos(th), c2 = std::cos(2 * th), c3 = std::cos(3 * th);
    const double s1 = std::sin(th), s3 = std::sin(3 * th), sh = std::sin(0.5 * th);
    const double lc = std::log(std::cos(0.5 * th) / sh);
    double a, b, c;
    if (l == 1) {
        a = C * pi / (4 * H) * (H * H * (8 + 8 * C3 - (9 + 8 * C3) * c1 + c3) + R * R * ((3 - 8 * C3) * c1 + c3 + 8 * C3 * lc));
        b = C * pi / (8 * H) * (R * R * (11 * c1 + c3 - 8 * lc) - 4 * H * H * c1 * s1 * s1);
        c = -C * pi * R * R / (4 * H) * ((11 + 8 * C3) * c1 + c3 - 8 * (1 + C3) * lc) +
            C * pi * H * (1 + 4 * C3 + 2 * c1 + c2) * sh * sh;
    } else {
        a = C * pi / (4 * H) *
            (H * H * (8 + 8 * C3 - (9 + 8 * C3) * c1 + c3) +
             R * ((8 * C3 - 3) * R * c1 - R * c3 + 8 * (H + 2 * C3 * H - C3 * R * lc) + 4 * H * (-1 - 4 * C3 + c2) * s1));
        b = -C * pi * H / 2 * c1 * s1 * s1 - C * pi * R / (8 * H) * (R * (11 * c1 + c3 - 8 * lc) - 2 * H * (5 * s1 + s3 - 4));
        c = C * pi * H * (1 + 4 * C3 + 2 * c1 + c2) * sh * sh +
            C * pi * R / (4 * H) *
                ((11 + 8 * C3) * R * c1 + R * c3 + 8 * (H + 2 * C3 * H - (1 + C3) * R * lc) - 4 * H * (3 + 4 * C3 + c2) * s1);
    }
    Mat36 M = Mat36::Zero();
    M(0, 5) = M(1, 4) = a;
    M(2, 0) = M(2, 1) = b;
    M(2, 2) = c;
    return end == BoltEnd::Top ? M : Mat36(-M);
}

std::array<Mat36, 2> bolt_segment_blocks(const Vec3& xa, const Vec3& xb, double R, const Vec3& y,
                                         const ElasticConstants& k)
{
    const double H = (xb - xa).norm();
    const auto f = bolt_local_frame(xa, xb, y);
    const double eps = 1e-6 * H;
    Mat36 A, B;  // start node (M2), end node (M1)
    if (!f.fallback || f.z < -eps || f.z > H + eps) {
        B = bolt_regular_analytic(H, R, f.y, f.z, k, 1);
        A = bolt_regular_analytic(H, R, f.y, f.z, k, 2);
    } else if (std::abs(f.z) <= eps) {
        A = bolt_singular_analytic(H, R, k, 2, BoltEnd::Bottom);
        B = bolt_singular_analytic(H, R, k, 1, BoltEnd::Bottom);
    } else if (std::abs(f.z - H) <= eps) {
        B = bolt_singular_analytic(H, R, k, 2, BoltEnd::Top);
        A = bolt_singular_analytic(H, R, k, 1, BoltEnd::Top);
    } else {
        // split at the source; the linear functions are re-expressed on both halves
        const double H1 = f.z, H2 = H - f.z, q = f.z / H;
        const Mat36 lo_at = bolt_singular_analytic(H1, R, k, 2, BoltEnd::Top);
        const Mat36 lo_far = bolt_singular_analytic(H1, R, k, 1, BoltEnd::Top);
        const Mat36 up_at = bolt_singular_analytic(H2, R, k, 2, BoltEnd::Bottom);
        const Mat36 up_far = bolt_singular_analytic(H2, R, k, 1, BoltEnd::Bottom);
        B = q * lo_at + q * up_at + up_far;
        A = lo_far + (1.0 - q) * lo_at + (1.0 - q) * up_at;
    }
    return {Mat36(f.T * A), Mat36(f.T * B)};
}

InclusionSet prepare_inclusions(std::vector<GeneralInclusion> general, std::vector<LinearInclusion> linear,
                                const std::vector<Patch>& patches, double tol)
{
    InclusionSet set;
    set.general = std::move(general);
    set.linear = std::move(linear);
    double scale = 1.0;
    for (const auto& g : set.general) {
        g.validate();
        for (const auto& x : g.bottom.points) scale = std::max(scale, x.cwiseAbs().maxCoeff());
        for (const auto& x : g.top.points) scale = std::max(scale, x.cwiseAbs().maxCoeff());
    }
    for (const auto& b : set.linear) {
        b.validate();
        for (const auto& x : b.axis.points) scale = std::max(scale, x.cwiseAbs().maxCoeff());
    }
    const double eps = tol * scale;

    for (size_t gi = 0; gi < set.general.size(); ++gi) {
        const auto& g = set.general[gi];
        const int ns = g.grid[0].node_count(), nt = g.grid[1].node_count(), nr = g.grid[2].node_count();
        std::vector<int> ids(ns * nt * nr);
        const int first = set.size();
        for (int k = 0; k < nr; ++k)
            for (int j = 0; j < nt; ++j)
                for (int i = 0; i < ns; ++i) {
                    const std::array<double, 3> q{g.grid[0].node(i), g.grid[1].node(j), g.grid[2].node(k)};
                    const Vec3 x = map_general(g, q[0], q[1], q[2]).x;
                    int id = -1;
                    for (int p = first; p < set.size() && id < 0; ++p)
                        if ((set.points[p].x - x).norm() <= eps) id = p;
                    if (id < 0) {
                        GridPoint gp;
                        gp.inclusion = static_cast<int>(gi);
                        gp.local = q;
                        gp.x = x;
                        id = set.size();
                        set.points.push_back(gp);
                    }
                    ids[i + ns * (j + nt * k)] = id;
                }
        set.general_nodes.push_back(std::move(ids));
    }
    for (size_t bi = 0; bi < set.linear.size(); ++bi) {
        const auto& b = set.linear[bi];
        const auto gv = greville_abscissae(b.axis.knot);
        std::vector<int> ids;
        const int n = b.axis.count();
        for (int i = 0; i < n; ++i) {
            GridPoint gp;
            gp.inclusion = static_cast<int>(bi);
            gp.linear = true;
            gp.local = {gv[i], 0.0, 0.0};
            gp.x = b.axis.points[i];
            Vec3 dir = Vec3::Zero();
            if (i > 0) dir += (b.axis.points[i] - b.axis.points[i - 1]).normalized();
            if (i + 1 < n) dir += (b.axis.points[i + 1] - b.axis.points[i]).normalized();
            gp.axis = dir.normalized();
            ids.push_back(set.size());
            set.points.push_back(gp);
        }
        set.linear_nodes.push_back(std::move(ids));
    }
    for (auto& gp : set.points) {
        for (size_t pi = 0; pi < patches.size() && !gp.boundary; ++pi) {
            const auto q = invert_patch(patches[pi], gp.x, eps);
            if (q) gp.boundary = PatchParam{static_cast<int>(pi), *q};
        }
    }
    return set;
}

namespace {

struct CellInfo {
    Vec3 centre;
    double radius;
};

// Newton inversion of the inclusion map inside one cell.
std::optional<std::array<double, 3>> invert_in_cell(const GeneralInclusion& g, const Box& b, const Vec3& y,
                                                    double tol)
{
    std::array<double, 3> q;
    for (int a = 0; a < 3; ++a) q[a] = 0.5 * (b.lo[a] + b.hi[a]);
    for (int it = 0; it < 40; ++it) {
        std::array<double, 3> qc;
        for (int a = 0; a < 3; ++a) qc[a] = std::clamp(q[a], 0.0, 1.0);
        const auto m = map_general(g, qc[0], qc[1], qc[2]);
        const Vec3 F = m.x - y;
        const Vec3 dq = m.J.transpose().partialPivLu().solve(-F);
        for (int a = 0; a < 3; ++a) q[a] = qc[a] + dq[a];
        if (dq.norm() < 1e-15) break;
    }
    for (int a = 0; a < 3; ++a) {
        const double w = b.hi[a] - b.lo[a];
        if (q[a] < b.lo[a] - 1e-9 * w || q[a] > b.hi[a] + 1e-9 * w) return std::nullopt;
        q[a] = std::clamp(q[a], b.lo[a], b.hi[a]);
    }
    if ((map_general(g, q[0], q[1], q[2]).x - y).norm() > tol) return std::nullopt;
    return q;
}

void append_octree(const VolumeMap& map, const Box& b, const Vec3& y, const QuadConfig& cfg,
                   std::vector<QuadPoint3>& pts)
{
    for (int a = 0; a < 3; ++a)
        if (!(b.hi[a] - b.lo[a] > 0.0)) return;
    for (const auto& s : octree_subdivide(map, b, y, cfg)) {
        const auto tp = tensor_points(s);
        pts.insert(pts.end(), tp.begin(), tp.end());
    }
}

// Cell with the source at local coordinates q: split at q, Duffy pyramids in a physically
// near-cubic corner box of every part, octree on the remaining slabs.
void singular_cell_points(const VolumeMap& map, const Box& cell, const std::array<double, 3>& q, const Vec3& y,
                          const QuadConfig& cfg, std::vector<QuadPoint3>& pts)
{
    std::array<std::vector<std::array<double, 2>>, 3> parts;
    for (int a = 0; a < 3; ++a) {
        const double w = cell.hi[a] - cell.lo[a];
        if (q[a] - cell.lo[a] > 1e-12 * w) parts[a].push_back({cell.lo[a], q[a]});
        if (cell.hi[a] - q[a] > 1e-12 * w) parts[a].push_back({q[a], cell.hi[a]});
    }
    for (const auto& ps : parts[0])
        for (const auto& pt : parts[1])
            for (const auto& pr : parts[2]) {
                Box sb;
                sb.lo = {ps[0], pt[0], pr[0]};
                sb.hi = {ps[1], pt[1], pr[1]};
                int corner = 0;
                for (int a = 0; a < 3; ++a)
                    if (std::abs(sb.hi[a] - q[a]) < std::abs(sb.lo[a] - q[a])) corner |= 1 << a;
                const auto L = physical_lengths(map, sb);
                const double m = std::min({L[0], L[1], L[2]});
                Box cb = sb;
                std::array<double, 3> cut;
                for (int a = 0; a < 3; ++a) {
                    const double w = (sb.hi[a] - sb.lo[a]) * std::min(1.0, m / L[a]);
                    if ((corner >> a) & 1) {
                        cb.lo[a] = sb.hi[a] - w;
                        cut[a] = cb.lo[a];
                    } else {
                        cb.hi[a] = sb.lo[a] + w;
                        cut[a] = cb.hi[a];
                    }
                }
                const auto cp = corner_singular_rule(cb, corner, cfg.volume_singular_gauss);
                pts.insert(pts.end(), cp.begin(), cp.end());
                // slabs: direction a beyond the cut, earlier directions restricted to the corner box
                for (int a = 0; a < 3; ++a) {
                    Box slab = sb;
                    for (int c = 0; c < a; ++c) {
                        slab.lo[c] = cb.lo[c];
                        slab.hi[c] = cb.hi[c];
                    }
                    if ((corner >> a) & 1) slab.hi[a] = cut[a];
                    else slab.lo[a] = cut[a];
                    append_octree(map, slab, y, cfg, pts);
                }
            }
}

}  // namespace

std::vector<std::pair<int, Mat36>> integrate_B0_general(const InclusionSet& set, int incl, const Vec3& y,
                                                        const ElasticConstants& k, const QuadConfig& cfg)
{
    const auto& g = set.general[incl];
    const auto& ids = set.general_nodes[incl];
    const int ns = g.grid[0].node_count(), nt = g.grid[1].node_count();
    const VolumeMap map = [&g](double s, double t, double r) { return map_general(g, s, t, r).x; };
    std::map<int, Mat36> acc;
    std::vector<QuadPoint3> pts;
    const double tol = 1e-9 * std::max(1.0, y.norm());
    for (int cr = 0; cr < g.grid[2].cells; ++cr)
        for (int ct = 0; ct < g.grid[1].cells; ++ct)
            for (int cs = 0; cs < g.grid[0].cells; ++cs) {
                Box cell;
                cell.lo = {double(cs) / g.grid[0].cells, double(ct) / g.grid[1].cells, double(cr) / g.grid[2].cells};
                cell.hi = {double(cs + 1) / g.grid[0].cells, double(ct + 1) / g.grid[1].cells,
                           double(cr + 1) / g.grid[2].cells};
                const Vec3 c = map(0.5 * (cell.lo[0] + cell.hi[0]), 0.5 * (cell.lo[1] + cell.hi[1]),
                                   0.5 * (cell.lo[2] + cell.hi[2]));
                double rad = 0.0;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        for (int l = 0; l < 3; ++l) {
                            const Vec3 x = map(cell.lo[0] + 0.5 * i * (cell.hi[0] - cell.lo[0]),
                                               cell.lo[1] + 0.5 * j * (cell.hi[1] - cell.lo[1]),
                                               cell.lo[2] + 0.5 * l * (cell.hi[2] - cell.lo[2]));
                            rad = std::max(rad, (x - c).norm());
                        }
                pts.clear();
                std::optional<std::array<double, 3>> q;
                if ((y - c).norm() <= 1.5 * rad + tol) q = invert_in_cell(g, cell, y, tol);
                if (q) singular_cell_points(map, cell, *q, y, cfg, pts);
                else append_octree(map, cell, y, cfg, pts);
                const std::array<int, 3> cidx{cs, ct, cr};
                std::vector<Mat36> blocks;
                ShapeValues sv = lagrange_shape(g.grid, cidx, cell.lo[0], cell.lo[1], cell.lo[2]);
                blocks.assign(sv.M.size(), Mat36::Zero());
                for (const auto& p : pts) {
                    const auto m = map_general(g, p.s, p.t, p.r);
                    Mat36 E;
                    try {
                        E = kernel_E(y, m.x, k) * (p.w * m.det);
                    } catch (const SingularityError&) {
                        std::ostringstream os;
                        os << "inclusion '" << g.id << "' cell (" << cs << "," << ct << "," << cr
                           << "): quadrature point at the source";
                        throw InclusionError(os.str());
                    }
                    if (!E.allFinite()) {
                        std::ostringstream os;
                        os << "inclusion '" << g.id << "' cell (" << cs << "," << ct << "," << cr << "): non-finite integrand";
                        throw InclusionError(os.str());
                    }
                    sv = lagrange_shape(g.grid, cidx, p.s, p.t, p.r);
                    for (size_t n = 0; n < sv.M.size(); ++n) blocks[n] += sv.M[n] * E;
                }
                for (size_t n = 0; n < sv.ijk.size(); ++n) {
                    const auto& ijk = sv.ijk[n];
                    const int id = ids[ijk[0] + ns * (ijk[1] + nt * ijk[2])];
                    auto it = acc.find(id);
                    if (it == acc.end()) acc.emplace(id, blocks[n]);
                    else it->second += blocks[n];
                }
            }
    return {acc.begin(), acc.end()};
}

Eigen::MatrixXd integrate_B0(const InclusionSet& set, const std::vector<Vec3>& sources, const ElasticConstants& k,
                             const QuadConfig& cfg, int threads)
{
    const int G = set.size();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3 * sources.size(), 6 * G);
    parallel_for(static_cast<int>(sources.size()), threads, [&](int n) {
        const Vec3& y = sources[n];
        for (size_t gi = 0; gi < set.general.size(); ++gi)
            for (const auto& [id, blk] : integrate_B0_general(set, static_cast<int>(gi), y, k, cfg))
                B.block<3, 6>(3 * n, 6 * id) += blk;
        for (size_t bi = 0; bi < set.linear.size(); ++bi) {
            const auto& b = set.linear[bi];
            const auto& ids = set.linear_nodes[bi];
            for (int s = 0; s + 1 < b.axis.count(); ++s) {
                const auto blk = bolt_segment_blocks(b.axis.points[s], b.axis.points[s + 1], b.radius, y, k);
                B.block<3, 6>(3 * n, 6 * ids[s]) += blk[0];
                B.block<3, 6>(3 * n, 6 * ids[s + 1]) += blk[1];
            }
        }
    });
    return B;
}

}  // namespace igabem
