#include "igabem/analysis.hpp"

#include <chrono>
#include <set>
#include <sstream>

namespace igabem {

std::vector<Vec3> SampleLine::points() const
{
    std::vector<Vec3> p;
    if (count == 1) p.push_back(from);
    for (int i = 0; i < count && count > 1; ++i) p.push_back(from + (to - from) * (double(i) / (count - 1)));
    return p;
}

const MaterialDef& Model::material(const std::string& id) const
{
    for (const auto& m : materials)
        if (m.id == id) return m;
    throw ValidationError("unknown material '" + id + "'");
}

void Model::validate() const
{
    const auto fail = [](const std::string& what) { throw ValidationError(what); };
    if (version != 1) fail("unsupported model version " + std::to_string(version));
    if (patches.empty()) fail("patches: at least one patch is required");
    if (!(E > 0.0)) fail("medium: E must be positive");
    if (!(nu > -1.0 && nu < 0.5)) fail("medium: nu must lie in (-1, 0.5)");
    std::set<std::string> ids;
    for (const auto& p : patches) {
        if (!ids.insert(p.id).second) fail("patches: duplicate id '" + p.id + "'");
        try {
            p.validate();
        } catch (const std::exception& e) {
            fail("patch '" + p.id + "': " + e.what());
        }
    }
    ids.clear();
    for (const auto& m : materials) {
        if (!ids.insert(m.id).second) fail("materials: duplicate id '" + m.id + "'");
        if (!(m.E > 0.0)) fail("material '" + m.id + "': E must be positive");
        if (!(m.nu > -1.0 && m.nu < 0.5)) fail("material '" + m.id + "': nu must lie in (-1, 0.5)");
        if (m.yield) {
            try {
                m.yield->validate();
            } catch (const std::exception& e) {
                fail("material '" + m.id + "': " + e.what());
            }
        }
    }
    for (const auto& g : general) {
        if (!ids.count(g.material)) fail("inclusion '" + g.id + "': unreferenced material '" + g.material + "'");
        try {
            g.validate();
        } catch (const std::exception& e) {
            fail("inclusion '" + g.id + "': " + e.what());
        }
    }
    for (const auto& b : linear) {
        try {
            b.validate();
        } catch (const std::exception& e) {
            fail("bolt '" + b.id + "': " + e.what());
        }
    }
    for (const auto& s : samples)
        if (s.count < 1) fail("sample line '" + s.id + "': count must be positive");
    try {
        solver.validate();
    } catch (const std::exception& e) {
        fail(std::string("solver: ") + e.what());
    }
}

std::vector<GridMaterial> grid_materials(const Model& model, const InclusionSet& set)
{
    const Mat6 D = elasticity_matrix(model.E, model.nu);
    std::vector<GridMaterial> out(set.size());
    for (int p = 0; p < set.size(); ++p) {
        const auto& gp = set.points[p];
        auto& m = out[p];
        m.D = D;
        if (gp.linear) {
            const auto& b = set.linear[gp.inclusion];
            m.bolt = true;
            m.E = b.E;
            m.contrast(2, 2) = model.E - b.E;
            m.De(2, 2) = b.E;
        } else {
            const auto& md = model.material(set.general[gp.inclusion].material);
            m.E = md.E;
            m.nu = md.nu;
            m.De = elasticity_matrix(md.E, md.nu);
            m.contrast = D - m.De;
            m.yield = md.yield;
        }
    }
    return out;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

AnalysisResult run_analysis(const Model& model, const AnalysisOptions& opt)
{
    model.validate();
    const auto t_start = std::chrono::steady_clock::now();
    AnalysisResult res;
    res.boundary.patches = model.patches;
    res.boundary.k = ElasticConstants::from_E_nu(model.E, model.nu);
    res.boundary.virgin_stress = model.virgin_stress;
    res.boundary.quad = model.quad;

    auto t0 = std::chrono::steady_clock::now();
    res.sys = assemble(res.boundary, opt.threads);
    res.timings.assemble = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    res.set = prepare_inclusions(model.general, model.linear, model.patches);
    const int G = res.set.size(), N = res.sys.dofs.size();
    LinearSystem ls;
    ls.L = res.sys.L;
    ls.r = res.sys.r;
    if (G > 0) {
        std::vector<Vec3> ys;
        for (const auto& c : res.sys.dofs.points) ys.push_back(c.y);
        res.sys.B0 = integrate_B0(res.set, ys, res.boundary.k, res.boundary.quad, opt.threads);
    } else {
        res.sys.B0 = Eigen::MatrixXd::Zero(3 * N, 0);
    }
    ls.B0 = res.sys.B0;
    res.timings.inclusions = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    DisplacementRows grid_rows;
    if (G > 0) {
        grid_rows = grid_displacement_rows(res.boundary, res.sys, res.set, opt.threads);
        const auto S = strain_system(strain_operator(res.set), grid_rows);
        ls.C = S.C;
        ls.c = S.c;
        ls.C0 = S.C0;
    } else {
        ls.C = Eigen::MatrixXd::Zero(0, 3 * N);
        ls.c = Eigen::VectorXd::Zero(0);
        ls.C0 = Eigen::MatrixXd::Zero(0, 0);
    }
    res.timings.recovery = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    res.materials = grid_materials(model, res.set);
    res.solve = incremental_solve(ls, res.materials, model.virgin_stress, model.solver);
    res.linear = std::move(ls);
    res.timings.solve = seconds_since(t0);

    res.sigma0 = Eigen::VectorXd::Zero(6 * G);
    for (int p = 0; p < G; ++p) res.sigma0.segment<6>(6 * p) = res.solve.points[p].sigma0;
    if (G > 0) {
        const Eigen::VectorXd u = grid_rows.A * res.solve.x + grid_rows.c + grid_rows.B0 * res.sigma0;
        for (int p = 0; p < G; ++p) res.grid_u.push_back(u.segment<3>(3 * p));
    }
    res.timings.total = seconds_since(t_start);
    return res;
}

std::vector<Vec3> sample_displacements(const AnalysisResult& res, const std::vector<Vec3>& points, int threads)
{
    double scale = 1.0;
    for (const auto& c : res.sys.dofs.points) scale = std::max(scale, c.y.cwiseAbs().maxCoeff());
    std::vector<Vec3> out(points.size(), Vec3::Zero());
    std::vector<Vec3> inner;
    std::vector<size_t> where;
    for (size_t i = 0; i < points.size(); ++i) {
        std::optional<PatchParam> on;
        for (size_t pi = 0; pi < res.boundary.patches.size() && !on; ++pi)
            if (const auto q = invert_patch(res.boundary.patches[pi], points[i], 1e-9 * scale))
                on = PatchParam{static_cast<int>(pi), *q};
        if (on) {
            for (const auto& [dof, w] : boundary_recovery(res.boundary, res.sys.dofs, *on))
                out[i] += w * res.solve.x.segment<3>(3 * dof);
        } else {
            inner.push_back(points[i]);
            where.push_back(i);
        }
    }
    if (!inner.empty()) {
        const auto rows = displacement_rows(res.boundary, res.sys, res.set, inner, threads);
        Eigen::VectorXd u = rows.A * res.solve.x + rows.c;
        if (res.sigma0.size() > 0) u += rows.B0 * res.sigma0;
        for (size_t i = 0; i < where.size(); ++i) out[where[i]] = u.segment<3>(3 * i);
    }
    return out;
}

}  // namespace igabem
