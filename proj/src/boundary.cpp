#include "igabem/boundary.hpp"

#include "igabem/parallel.hpp"

#include <cmath>
#include <sstream>

namespace igabem {

namespace {

double model_scale(const std::vector<Patch>& patches)
{
    double s = 1.0;
    for (const auto& p : patches) {
        const auto add = [&](const std::vector<Vec3>& pts) {
            for (const auto& x : pts) s = std::max(s, x.cwiseAbs().maxCoeff());
        };
        if (p.kind == PatchKind::Finite) add(p.geometry.points);
        else if (p.kind == PatchKind::Infinite) add(p.edge.points);
        else {
            add(p.outer.points);
            add(p.inner.points);
        }
    }
    return s;
}

}  // namespace

DofMap build_dofs(const std::vector<Patch>& patches, double tol)
{
    if (patches.empty()) throw ConnectivityError("model has no patches");
    const double eps = tol * model_scale(patches);
    DofMap d;
    d.global.resize(patches.size());
    auto find = [&](const Vec3& x) {
        for (const auto& c : d.points)
            if ((c.y - x).norm() <= eps) return c.index;
        return -1;
    };
    for (int pass = 0; pass < 2; ++pass) {
        for (size_t pi = 0; pi < patches.size(); ++pi) {
            const auto& p = patches[pi];
            const bool inf = p.kind == PatchKind::Infinite;
            if ((pass == 0) == inf) continue;
            const auto params = p.collocation_params();
            d.global[pi].resize(params.size());
            for (size_t k = 0; k < params.size(); ++k) {
                const Vec3 x = map_patch(p, params[k][0], params[k][1]).x;
                int g = find(x);
                if (g < 0) {
                    if (inf) {
                        std::ostringstream os;
                        os << "infinite patch '" << p.id << "': edge function " << k
                           << " does not match any finite patch parameter";
                        throw ConnectivityError(os.str());
                    }
                    CollocationPoint c;
                    c.index = d.size();
                    c.patch = static_cast<int>(pi);
                    c.param = params[k];
                    c.y = x;
                    d.points.push_back(c);
                    g = c.index;
                }
                d.global[pi][k] = g;
            }
        }
    }
    for (auto& c : d.points) {
        for (size_t pi = 0; pi < patches.size(); ++pi) {
            const auto params = patches[pi].collocation_params();
            std::optional<std::array<double, 2>> q;
            for (size_t k = 0; k < params.size() && !q; ++k)
                if (d.global[pi][k] == c.index) q = params[k];
            if (!q) q = invert_patch(patches[pi], c.y, eps);
            if (q) c.on_patches.push_back({static_cast<int>(pi), *q});
        }
    }
    return d;
}

Vec3 excavation_traction(const Vec6& sigma_v, const Vec3& n) { return -(voigt_to_tensor(sigma_v) * n); }

void traction_basis(const Patch& p, double xi, double eta, std::vector<int>& idx, std::vector<double>& val)
{
    if (p.kind != PatchKind::Infinite) {
        p.field_basis(xi, eta, idx, val);
        return;
    }
    const auto b = eval_basis(p.field_edge.knot, p.field_edge.weights, xi);
    idx.clear();
    val.clear();
    for (size_t a = 0; a < b.values.size(); ++a) {
        idx.push_back(b.first + static_cast<int>(a));
        val.push_back(b.values[a]);
    }
}

std::vector<Vec3> excavation_tractions(const Vec6& sigma_v, const Patch& p)
{
    const auto params = p.collocation_params();
    const int n = static_cast<int>(params.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd rhs(n, 3);
    std::vector<int> idx;
    std::vector<double> val;
    for (int i = 0; i < n; ++i) {
        traction_basis(p, params[i][0], params[i][1], idx, val);
        for (size_t a = 0; a < idx.size(); ++a) A(i, idx[a]) = val[a];
        rhs.row(i) = excavation_traction(sigma_v, map_patch(p, params[i][0], params[i][1]).n).transpose();
    }
    const Eigen::MatrixXd t = A.fullPivLu().solve(rhs);
    std::vector<Vec3> out(n);
    for (int i = 0; i < n; ++i) out[i] = t.row(i).transpose();
    return out;
}

std::vector<std::vector<IntegrationRegion>> build_regions(const std::vector<Patch>& patches, const DofMap& dofs,
                                                           const QuadConfig& cfg)
{
    std::vector<std::vector<std::array<double, 2>>> lines(patches.size());
    for (const auto& c : dofs.points)
        for (const auto& on : c.on_patches) lines[on.patch].push_back(on.param);
    std::vector<std::vector<IntegrationRegion>> out(patches.size());
    for (size_t pi = 0; pi < patches.size(); ++pi)
        out[pi] = partition_regions(patches[pi], lines[pi], cfg, static_cast<int>(pi));
    return out;
}

RowIntegrals integrate_row(const Patch& p, const std::vector<IntegrationRegion>& regions, const Vec3& y,
                           const std::optional<std::array<double, 2>>& apex, const ElasticConstants& k,
                           const QuadConfig& cfg, int patch_id)
{
    RowIntegrals out;
    const int nf = p.field_count();
    out.T.assign(nf, Mat3::Zero());
    out.U.assign(nf, Mat3::Zero());
    const SurfaceMap map = [&p](double u, double v) { return map_patch(p, u, v).x; };
    std::vector<int> fi, ti;
    std::vector<double> fv, tv;
    std::vector<QuadPoint> pts;
    for (size_t ri = 0; ri < regions.size(); ++ri) {
        const auto& reg = regions[ri];
        pts.clear();
        if (apex && reg.rect.contains((*apex)[0], (*apex)[1])) {
            pts = triangle_singular_rule(reg.rect, *apex, cfg.gauss_singular);
        } else {
            for (const auto& s : quadtree_subdivide(map, reg.rect, y, cfg)) {
                const auto tp = tensor_points(s);
                pts.insert(pts.end(), tp.begin(), tp.end());
            }
        }
        for (const auto& q : pts) {
            const auto m = map_patch(p, q.u, q.v);
            const double w = q.w * m.J;
            Mat3 T, U;
            try {
                T = kernel_T(y, m.x, m.n, k) * w;
                U = kernel_U(y, m.x, k) * w;
            } catch (const SingularityError&) {
                std::ostringstream os;
                os << "quadrature point coincides with the source on patch " << patch_id << " region " << ri;
                throw AssemblyError(os.str());
            }
            if (!T.allFinite() || !U.allFinite()) {
                std::ostringstream os;
                os << "non-finite integrand on patch " << patch_id << " region " << ri;
                throw AssemblyError(os.str());
            }
            p.field_basis(q.u, q.v, fi, fv);
            for (size_t a = 0; a < fi.size(); ++a) out.T[fi[a]] += fv[a] * T;
            traction_basis(p, q.u, q.v, ti, tv);
            for (size_t a = 0; a < ti.size(); ++a) out.U[ti[a]] += tv[a] * U;
            out.S += T;
        }
    }
    return out;
}

SystemMatrices assemble(const BoundaryModel& model, int threads)
{
    for (const auto& p : model.patches) p.validate();
    SystemMatrices sys;
    sys.dofs = build_dofs(model.patches);
    sys.regions = build_regions(model.patches, sys.dofs, model.quad);
    for (const auto& p : model.patches) sys.tractions.push_back(excavation_tractions(model.virgin_stress, p));
    const int N = sys.dofs.size();
    sys.L = Eigen::MatrixXd::Zero(3 * N, 3 * N);
    sys.r = Eigen::VectorXd::Zero(3 * N);
    parallel_for(N, threads, [&](int n) {
        const auto& c = sys.dofs.points[n];
        Mat3 S = Mat3::Zero();
        for (size_t pi = 0; pi < model.patches.size(); ++pi) {
            std::optional<std::array<double, 2>> apex;
            for (const auto& on : c.on_patches)
                if (on.patch == static_cast<int>(pi)) apex = on.param;
            const auto row = [&] {
                try {
                    return integrate_row(model.patches[pi], sys.regions[pi], c.y, apex, model.k, model.quad,
                                         static_cast<int>(pi));
                } catch (const AssemblyError& e) {
                    std::ostringstream os;
                    os << e.what() << " (collocation point " << n << ")";
                    throw AssemblyError(os.str());
                }
            }();
            for (size_t kf = 0; kf < row.T.size(); ++kf)
                sys.L.block<3, 3>(3 * n, 3 * sys.dofs.global[pi][kf]) += row.T[kf];
            for (size_t kt = 0; kt < row.U.size(); ++kt) sys.r.segment<3>(3 * n) += row.U[kt] * sys.tractions[pi][kt];
            S += row.S;
        }
        std::vector<int> idx;
        std::vector<double> val;
        model.patches[c.patch].field_basis(c.param[0], c.param[1], idx, val);
        const Mat3 J = Mat3::Identity() - S;
        for (size_t a = 0; a < idx.size(); ++a)
            sys.L.block<3, 3>(3 * n, 3 * sys.dofs.global[c.patch][idx[a]]) += val[a] * J;
    });
    return sys;
}

Vec3 boundary_displacement(const BoundaryModel& model, const DofMap& dofs, const Eigen::VectorXd& x, int patch,
                           double xi, double eta)
{
    std::vector<int> idx;
    std::vector<double> val;
    model.patches[patch].field_basis(xi, eta, idx, val);
    Vec3 u = Vec3::Zero();
    for (size_t a = 0; a < idx.size(); ++a) u += val[a] * x.segment<3>(3 * dofs.global[patch][idx[a]]);
    return u;
}

}  // namespace igabem
