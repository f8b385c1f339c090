#include "igabem/verify.hpp"

#include "igabem/oracles.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

namespace igabem {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Check upper_bound(std::string name, double value, double limit)
{
    return {std::move(name), value, limit, limit, "max", value <= limit};
}

}  // namespace

bool VerifyReport::pass() const
{
    for (const auto& c : checks)
        if (!c.pass) return false;
    return !checks.empty();
}

void print_checks(std::ostream& os, const std::vector<Check>& checks)
{
    os << std::left << std::setw(40) << "check" << std::right << std::setw(14) << "value" << std::setw(14)
       << "reference" << std::setw(12) << "tolerance" << "  result\n";
    for (const auto& c : checks) {
        os << std::left << std::setw(40) << c.name << std::right << std::setprecision(6) << std::setw(14) << c.value
           << std::setw(14) << c.reference << std::setw(8) << c.tolerance << ' ' << std::setw(3) << c.measure << "  "
           << (c.pass ? "PASS" : "FAIL") << '\n';
    }
}

VerifyReport verify_kirsch(const Model& model, int threads, double max_runtime)
{
    const double szz = model.virgin_stress[2];
    if (szz == 0.0) throw ValidationError("verify-kirsch: virgin s_zz must be nonzero");
    if (model.samples.empty()) throw ValidationError("verify-kirsch: the model has no sample lines");
    const double p0 = -szz, k0 = model.virgin_stress[0] / szz;
    const double G = model.E / (2.0 * (1.0 + model.nu));

    VerifyReport rep;
    const auto t0 = std::chrono::steady_clock::now();
    rep.result = run_analysis(model, {threads});
    std::vector<Vec3> pts;
    for (const auto& s : model.samples)
        for (const auto& p : s.points()) pts.push_back(p);
    const auto u = sample_displacements(rep.result, pts, threads);
    rep.runtime = seconds_since(t0);

    double worst = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const auto ref = kirsch_displacement(p0, k0, 1.0, G, model.nu, pts[i][0], pts[i][2]);
        const double e = std::hypot(u[i][0] - ref[0], u[i][2] - ref[1]) / std::hypot(ref[0], ref[1]);
        worst = std::max(worst, e);
    }
    rep.checks.push_back({"max relative displacement error", worst, 0.0, 0.02, "max", worst <= 0.02});
    rep.checks.push_back(upper_bound("runtime [s]", rep.runtime, max_runtime));
    return rep;
}

VerifyReport verify_duncan_fama(const Model& model, int threads, double reference_u, double max_runtime)
{
    const MohrCoulomb* mc = nullptr;
    for (const auto& m : model.materials)
        if (m.yield) mc = &*m.yield;
    if (!mc) throw ValidationError("verify-duncanfama: the model has no Mohr-Coulomb material");
    const double p0 = -model.virgin_stress[0];

    VerifyReport rep;
    const auto t0 = std::chrono::steady_clock::now();
    rep.result = run_analysis(model, {threads});
    std::vector<Vec3> wall;
    for (int i = 0; i < 8; ++i) {
        const double a = std::numbers::pi * (2 * i + 1) / 8.0;
        wall.emplace_back(std::cos(a), 0.0, std::sin(a));
    }
    const auto u = sample_displacements(rep.result, wall, threads);
    rep.runtime = seconds_since(t0);

    double worst = reference_u, mean = 0.0;
    for (size_t i = 0; i < wall.size(); ++i) {
        const double ur = -u[i].dot(wall[i]);
        mean += ur / wall.size();
        if (i == 0 || std::abs(ur - reference_u) > std::abs(worst - reference_u)) worst = ur;
    }
    const double rel = std::abs(worst - reference_u) / reference_u;
    rep.checks.push_back({"wall displacement (worst of 8 angles)", worst, reference_u, 0.01, "rel", rel <= 0.01});
    const auto df = duncan_fama(p0, mc->c, mc->phi, model.E, model.nu, 1.0);
    rep.checks.push_back({"wall displacement (mean, vs closed form)", mean, df.u_p, 0.01, "rel",
                          std::abs(mean - df.u_p) <= 0.01 * df.u_p});

    double rp = 0.0;
    const auto& st = rep.result.solve.points;
    for (size_t p = 0; p < st.size(); ++p)
        if (st[p].f > 0.0) {
            const Vec3& x = rep.result.set.points[p].x;
            rp = std::max(rp, std::hypot(x[0], x[2]));
        }
    rep.checks.push_back({"outermost grid radius with f > 0", rp, 1.3, 0.1, "abs", std::abs(rp - 1.3) <= 0.1 + 1e-12});
    rep.checks.push_back(upper_bound("iterations per increment", rep.result.solve.max_iterations, 9.0));
    rep.checks.push_back(upper_bound("runtime [s]", rep.runtime, max_runtime));
    return rep;
}

}  // namespace igabem
