#include "igabem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace igabem {

namespace {

GaussRule compute_rule(int n)
{
    GaussRule g;
    g.x.resize(n);
    g.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        g.x[i] = -x;
        g.x[n - 1 - i] = x;
        g.w[i] = g.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) g.x[n / 2] = 0.0;
    return g;
}

struct RuleTable {
    std::vector<GaussRule> rules;
    RuleTable()
    {
        rules.resize(65);
        rules[1].x = {0.0};
        rules[1].w = {2.0};
        for (int n = 2; n <= 64; ++n) rules[n] = compute_rule(n);
    }
};

std::vector<double> unique_sorted(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double a : v)
        if (out.empty() || a - out.back() > 1e-12) out.push_back(a);
    return out;
}

int proximity_count(const QuadConfig& cfg, double L, double d)
{
    if (!(d > 0.0)) return cfg.gauss_cap + 1;
    const double n = std::ceil(cfg.gauss_base + cfg.gauss_slope * L / d);
    return n > cfg.gauss_cap ? cfg.gauss_cap + 1 : static_cast<int>(n);
}

void quadtree(const SurfaceMap& map, const Rect& r, const Vec3& y, const QuadConfig& cfg, int depth,
              std::vector<SubRegion>& out)
{
    const auto L = physical_lengths(map, r);
    const double us[3] = {r.u0, 0.5 * (r.u0 + r.u1), r.u1};
    const double vs[3] = {r.v0, 0.5 * (r.v0 + r.v1), r.v1};
    double dmin = std::numeric_limits<double>::max();
    for (double u : us)
        for (double v : vs) dmin = std::min(dmin, (map(u, v) - y).norm());
    const double d = dmin - 0.5 * std::hypot(0.5 * L[0], 0.5 * L[1]);
    const int nu = proximity_count(cfg, L[0], d);
    const int nv = proximity_count(cfg, L[1], d);
    const bool su = nu > cfg.gauss_cap, sv = nv > cfg.gauss_cap;
    if ((!su && !sv) || depth >= cfg.max_depth) {
        out.push_back({r, std::min(nu, cfg.gauss_cap), std::min(nv, cfg.gauss_cap)});
        return;
    }
    const double um = 0.5 * (r.u0 + r.u1), vm = 0.5 * (r.v0 + r.v1);
    std::vector<Rect> kids;
    if (su && sv) {
        kids = {{r.u0, um, r.v0, vm}, {um, r.u1, r.v0, vm}, {r.u0, um, vm, r.v1}, {um, r.u1, vm, r.v1}};
    } else if (su) {
        kids = {{r.u0, um, r.v0, r.v1}, {um, r.u1, r.v0, r.v1}};
    } else {
        kids = {{r.u0, r.u1, r.v0, vm}, {r.u0, r.u1, vm, r.v1}};
    }
    for (const auto& k : kids) quadtree(map, k, y, cfg, depth + 1, out);
}

void octree(const VolumeMap& map, const Box& b, const Vec3& y, const QuadConfig& cfg, int depth,
            std::vector<SubBox>& out)
{
    QuadConfig vcfg = cfg;
    vcfg.gauss_base = cfg.volume_base;
    vcfg.gauss_slope = cfg.volume_slope;
    vcfg.gauss_cap = cfg.volume_cap;
    const auto L = physical_lengths(map, b);
    double dmin = std::numeric_limits<double>::max();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                const double s = b.lo[0] + 0.5 * i * (b.hi[0] - b.lo[0]);
                const double t = b.lo[1] + 0.5 * j * (b.hi[1] - b.lo[1]);
                const double r = b.lo[2] + 0.5 * k * (b.hi[2] - b.lo[2]);
                dmin = std::min(dmin, (map(s, t, r) - y).norm());
            }
    const double d = dmin - 0.25 * std::sqrt(L[0] * L[0] + L[1] * L[1] + L[2] * L[2]);
    std::array<int, 3> n;
    bool any = false;
    for (int a = 0; a < 3; ++a) {
        n[a] = proximity_count(vcfg, L[a], d);
        any = any || n[a] > vcfg.gauss_cap;
    }
    if (!any || depth >= cfg.max_depth) {
        for (auto& v : n) v = std::min(v, vcfg.gauss_cap);
        out.push_back({b, n});
        return;
    }
    // halve only the long directions that need it, so elongated boxes become near-cubic
    // close to the source and stay coarse away from it
    const double Lmax = std::max({L[0], L[1], L[2]});
    std::vector<Box> kids{b};
    for (int a = 0; a < 3; ++a) {
        if (n[a] <= vcfg.gauss_cap || L[a] < 0.5 * Lmax) continue;
        std::vector<Box> next;
        for (const auto& k : kids) {
            const double m = 0.5 * (k.lo[a] + k.hi[a]);
            Box lo = k, hi = k;
            lo.hi[a] = m;
            hi.lo[a] = m;
            next.push_back(lo);
            next.push_back(hi);
        }
        kids = std::move(next);
    }
    for (const auto& k : kids) octree(map, k, y, cfg, depth + 1, out);
}

}  // namespace

const GaussRule& gauss_rule(int n)
{
    static const RuleTable table;
    if (n < 1 || n > 64) throw std::out_of_range("Gauss rule order must lie in [1, 64]");
    return table.rules[n];
}

std::array<double, 2> physical_lengths(const SurfaceMap& map, const Rect& r)
{
    const double um = 0.5 * (r.u0 + r.u1), vm = 0.5 * (r.v0 + r.v1);
    double Lu = 0.0, Lv = 0.0;
    for (double v : {r.v0, vm, r.v1}) {
        const Vec3 a = map(r.u0, v), m = map(um, v), b = map(r.u1, v);
        Lu = std::max(Lu, (m - a).norm() + (b - m).norm());
    }
    for (double u : {r.u0, um, r.u1}) {
        const Vec3 a = map(u, r.v0), m = map(u, vm), b = map(u, r.v1);
        Lv = std::max(Lv, (m - a).norm() + (b - m).norm());
    }
    return {Lu, Lv};
}

std::vector<IntegrationRegion> partition_regions(const Patch& patch,
                                                 const std::vector<std::array<double, 2>>& colloc,
                                                 const QuadConfig& cfg, int patch_id)
{
    std::vector<double> us = patch.breaks_xi();
    std::vector<double> vs = patch.breaks_eta();
    const bool inf = patch.kind == PatchKind::Infinite;
    for (const auto& c : colloc) {
        if (c[0] < 0.0 || c[0] > 1.0 || c[1] < 0.0 || c[1] > 1.0)
            throw ParameterDomainError("collocation parameter outside [0,1]^2");
        us.push_back(c[0]);
        if (!inf) vs.push_back(c[1]);
    }
    us = unique_sorted(us);
    if (inf) {
        vs = {0.0};
        for (int k = 0; k < cfg.infinite_bands; ++k) vs.push_back(1.0 - std::ldexp(1.0, -(k + 1)));
    } else {
        vs = unique_sorted(vs);
    }
    const SurfaceMap map = [&patch](double u, double v) { return map_patch(patch, u, v).x; };
    std::vector<IntegrationRegion> out;
    for (size_t j = 0; j + 1 < vs.size(); ++j) {
        for (size_t i = 0; i + 1 < us.size(); ++i) {
            const Rect r{us[i], us[i + 1], vs[j], vs[j + 1]};
            if (inf) {
                out.push_back({r, patch_id});
                continue;
            }
            const auto L = physical_lengths(map, r);
            int ku = 1, kv = 1;
            if (L[0] > cfg.max_aspect * L[1]) ku = static_cast<int>(std::ceil(L[0] / (cfg.max_aspect * L[1])));
            if (L[1] > cfg.max_aspect * L[0]) kv = static_cast<int>(std::ceil(L[1] / (cfg.max_aspect * L[0])));
            for (int b = 0; b < kv; ++b)
                for (int a = 0; a < ku; ++a) {
                    const double du = (r.u1 - r.u0) / ku, dv = (r.v1 - r.v0) / kv;
                    out.push_back({{r.u0 + a * du, r.u0 + (a + 1) * du, r.v0 + b * dv, r.v0 + (b + 1) * dv}, patch_id});
                }
        }
    }
    return out;
}

std::vector<SubRegion> quadtree_subdivide(const SurfaceMap& map, const Rect& region, const Vec3& y,
                                          const QuadConfig& cfg)
{
    std::vector<SubRegion> out;
    quadtree(map, region, y, cfg, 0, out);
    return out;
}

std::vector<QuadPoint> tensor_points(const SubRegion& s)
{
    const auto& gu = gauss_rule(s.nu);
    const auto& gv = gauss_rule(s.nv);
    const double hu = 0.5 * (s.rect.u1 - s.rect.u0), hv = 0.5 * (s.rect.v1 - s.rect.v0);
    std::vector<QuadPoint> pts;
    pts.reserve(s.nu * s.nv);
    for (int j = 0; j < s.nv; ++j)
        for (int i = 0; i < s.nu; ++i)
            pts.push_back({s.rect.u0 + hu * (1.0 + gu.x[i]), s.rect.v0 + hv * (1.0 + gv.x[j]), hu * hv * gu.w[i] * gv.w[j]});
    return pts;
}

std::vector<Triangle> triangle_fan(const Rect& r, const std::array<double, 2>& a)
{
    const std::array<std::array<double, 2>, 4> c{{{r.u0, r.v0}, {r.u1, r.v0}, {r.u1, r.v1}, {r.u0, r.v1}}};
    const double tol = 1e-12;
    std::vector<Triangle> out;
    for (int k = 0; k < 4; ++k) {
        const auto& p = c[k];
        const auto& q = c[(k + 1) % 4];
        // skip sides that contain the apex (degenerate triangles)
        const double cross = (p[0] - a[0]) * (q[1] - a[1]) - (p[1] - a[1]) * (q[0] - a[0]);
        if (std::abs(cross) <= tol * std::max(1.0, r.area())) continue;
        out.push_back({a, p, q});
    }
    return out;
}

std::vector<QuadPoint> triangle_singular_rule(const Rect& r, const std::array<double, 2>& apex, int n)
{
    const auto& g = gauss_rule(n);
    std::vector<QuadPoint> pts;
    for (const auto& t : triangle_fan(r, apex)) {
        const double e1u = t.p1[0] - t.apex[0], e1v = t.p1[1] - t.apex[1];
        const double e2u = t.p2[0] - t.apex[0], e2v = t.p2[1] - t.apex[1];
        const double det = std::abs(e1u * e2v - e1v * e2u);
        for (int i = 0; i < n; ++i) {
            const double rho = 0.5 * (1.0 + g.x[i]);
            for (int j = 0; j < n; ++j) {
                const double sig = 0.5 * (1.0 + g.x[j]);
                const double u = t.apex[0] + rho * ((1.0 - sig) * e1u + sig * e2u);
                const double v = t.apex[1] + rho * ((1.0 - sig) * e1v + sig * e2v);
                pts.push_back({u, v, 0.25 * rho * det * g.w[i] * g.w[j]});
            }
        }
    }
    return pts;
}

std::array<double, 3> physical_lengths(const VolumeMap& map, const Box& b)
{
    std::array<double, 3> L{0.0, 0.0, 0.0};
    for (int a = 0; a < 3; ++a) {
        const int o1 = (a + 1) % 3, o2 = (a + 2) % 3;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                std::array<double, 3> p;
                p[o1] = i ? b.hi[o1] : b.lo[o1];
                p[o2] = j ? b.hi[o2] : b.lo[o2];
                p[a] = b.lo[a];
                const Vec3 x0 = map(p[0], p[1], p[2]);
                p[a] = 0.5 * (b.lo[a] + b.hi[a]);
                const Vec3 xm = map(p[0], p[1], p[2]);
                p[a] = b.hi[a];
                const Vec3 x1 = map(p[0], p[1], p[2]);
                L[a] = std::max(L[a], (xm - x0).norm() + (x1 - xm).norm());
            }
    }
    return L;
}

std::vector<SubBox> octree_subdivide(const VolumeMap& map, const Box& box, const Vec3& y, const QuadConfig& cfg)
{
    std::vector<SubBox> out;
    octree(map, box, y, cfg, 0, out);
    return out;
}

std::vector<QuadPoint3> tensor_points(const SubBox& s)
{
    const auto& g0 = gauss_rule(s.n[0]);
    const auto& g1 = gauss_rule(s.n[1]);
    const auto& g2 = gauss_rule(s.n[2]);
    const double h0 = 0.5 * (s.box.hi[0] - s.box.lo[0]);
    const double h1 = 0.5 * (s.box.hi[1] - s.box.lo[1]);
    const double h2 = 0.5 * (s.box.hi[2] - s.box.lo[2]);
    std::vector<QuadPoint3> pts;
    pts.reserve(s.n[0] * s.n[1] * s.n[2]);
    for (int k = 0; k < s.n[2]; ++k)
        for (int j = 0; j < s.n[1]; ++j)
            for (int i = 0; i < s.n[0]; ++i)
                pts.push_back({s.box.lo[0] + h0 * (1.0 + g0.x[i]), s.box.lo[1] + h1 * (1.0 + g1.x[j]),
                               s.box.lo[2] + h2 * (1.0 + g2.x[k]), h0 * h1 * h2 * g0.w[i] * g1.w[j] * g2.w[k]});
    return pts;
}

std::vector<QuadPoint3> corner_singular_rule(const Box& b, int corner, int n)
{
    const auto& g = gauss_rule(n);
    std::array<double, 3> A, F, h;
    for (int a = 0; a < 3; ++a) {
        const bool hi = (corner >> a) & 1;
        A[a] = hi ? b.hi[a] : b.lo[a];
        F[a] = hi ? b.lo[a] : b.hi[a];
        h[a] = b.hi[a] - b.lo[a];
    }
    const double vol = h[0] * h[1] * h[2];
    std::vector<QuadPoint3> pts;
    pts.reserve(3 * n * n * n);
    for (int k = 0; k < 3; ++k) {
        const int i1 = (k + 1) % 3, i2 = (k + 2) % 3;
        for (int a = 0; a < n; ++a) {
            const double rho = 0.5 * (1.0 + g.x[a]);
            for (int b1 = 0; b1 < n; ++b1) {
                const double s1 = 0.5 * (1.0 + g.x[b1]);
                for (int b2 = 0; b2 < n; ++b2) {
                    const double s2 = 0.5 * (1.0 + g.x[b2]);
                    std::array<double, 3> face;
                    face[k] = F[k];
                    face[i1] = A[i1] + s1 * (F[i1] - A[i1]);
                    face[i2] = A[i2] + s2 * (F[i2] - A[i2]);
                    std::array<double, 3> p;
                    for (int c = 0; c < 3; ++c) p[c] = A[c] + rho * (face[c] - A[c]);
                    pts.push_back({p[0], p[1], p[2], 0.125 * vol * rho * rho * g.w[a] * g.w[b1] * g.w[b2]});
                }
            }
        }
    }
    return pts;
}

}  // namespace igabem
