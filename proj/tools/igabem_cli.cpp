// Command-line front end: solve, verify-kirsch, verify-duncanfama, inspect.

#include "igabem/export.hpp"
#include "igabem/model_io.hpp"
#include "igabem/models.hpp"
#include "igabem/parallel.hpp"
#include "igabem/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

using namespace igabem;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kValidation = 2, kNonConvergence = 3 };

struct Flags {
    std::string model;
    std::optional<int> steps;
    std::optional<double> tol;
    int threads = 0;
    int sample = 4;
    std::string output = "igabem_out";
};

int threads_of(const Flags& f) { return f.threads > 0 ? f.threads : default_threads(); }

void apply(const Flags& f, Model& m)
{
    if (f.steps) m.solver.n_steps = *f.steps;
    if (f.tol) m.solver.tol = *f.tol;
    if (f.sample < 1) throw ValidationError("--sample: must be at least 1");
    m.validate();
}

fs::path output_dir(const Flags& f)
{
    fs::path dir(f.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error(f.output + ": " + ec.message());
    return dir;
}

void write_all(const Flags& f, const Model& model, const AnalysisResult& res)
{
    const fs::path dir = output_dir(f);
    const int threads = threads_of(f);
    write_samples_csv((dir / "samples.csv").string(), sample_rows(model, res, threads));
    write_grid_csv((dir / "grid.csv").string(), res);
    write_history_csv((dir / "history.csv").string(), res.solve);
    write_vtk((dir / "result.vtk").string(), res, f.sample);

    std::ofstream b(dir / "boundary.csv");
    b << std::setprecision(12) << "dof,x,y,z,ux,uy,uz\n";
    for (size_t i = 0; i < res.sys.dofs.points.size(); ++i) {
        const Vec3& x = res.sys.dofs.points[i].y;
        const auto u = res.solve.x.segment<3>(3 * i);
        b << i << ',' << x[0] << ',' << x[1] << ',' << x[2] << ',' << u[0] << ',' << u[1] << ',' << u[2] << '\n';
    }

    nlohmann::json s;
    s["model"] = model.name;
    s["units"] = model.units;
    s["dof"] = 3 * res.sys.dofs.points.size();
    s["grid_points"] = res.set.size();
    s["first_yield_factor"] = res.solve.lambda;
    s["increments"] = res.solve.increments;
    s["max_iterations"] = res.solve.max_iterations;
    s["total_iterations"] = res.solve.total_iterations;
    s["timings"] = {{"assemble", res.timings.assemble},
                    {"inclusions", res.timings.inclusions},
                    {"recovery", res.timings.recovery},
                    {"solve", res.timings.solve},
                    {"total", res.timings.total}};
    std::ofstream(dir / "summary.json") << s.dump(1) << '\n';
    std::cout << "results written to " << dir.string() << '\n';
}

int cmd_solve(const Flags& f)
{
    Model m = parse_model(f.model);
    apply(f, m);
    std::cout << "model " << m.name << " (" << m.units << " units)\n";
    try {
        const auto res = run_analysis(m, {threads_of(f)});
        std::cout << "dof " << 3 * res.sys.dofs.points.size() << ", grid points " << res.set.size() << ", increments "
                  << res.solve.increments << ", max iterations " << res.solve.max_iterations << ", time "
                  << res.timings.total << " s\n";
        write_all(f, m, res);
    } catch (const NonConvergenceError& e) {
        const fs::path dir = output_dir(f);
        SolveResult partial;
        partial.history = e.history;
        write_history_csv((dir / "history.csv").string(), partial);
        throw;
    }
    return kOk;
}

int report(const Flags& f, const Model& m, const VerifyReport& rep)
{
    print_checks(std::cout, rep.checks);
    if (!f.model.empty() || f.output != "igabem_out") write_all(f, m, rep.result);
    const bool ok = rep.pass();
    std::cout << (ok ? "PASS" : "FAIL") << '\n';
    return ok ? kOk : kVerifyFailed;
}

int cmd_verify_kirsch(const Flags& f)
{
    Model m = f.model.empty() ? tunnel_elastic_model() : parse_model(f.model);
    apply(f, m);
    return report(f, m, verify_kirsch(m, threads_of(f)));
}

int cmd_verify_duncanfama(const Flags& f)
{
    Model m = f.model.empty() ? tunnel_plastic_model() : parse_model(f.model);
    apply(f, m);
    return report(f, m, verify_duncan_fama(m, threads_of(f)));
}

int cmd_inspect(const Flags& f)
{
    const Model m = parse_model(f.model);
    const auto dofs = build_dofs(m.patches);
    const auto set = prepare_inclusions(m.general, m.linear, m.patches);
    std::cout << "model      " << m.name << " (version " << m.version << ", " << m.units << " units)\n"
              << "medium     E = " << m.E << ", nu = " << m.nu << '\n'
              << "virgin     " << m.virgin_stress.transpose() << '\n'
              << "patches    " << m.patches.size() << '\n';
    for (const auto& p : m.patches) {
        const char* kind = p.kind == PatchKind::Finite ? "finite" : p.kind == PatchKind::Infinite ? "infinite" : "special";
        std::cout << "  " << p.id << ": " << kind << ", " << p.field_count() << " field functions\n";
    }
    std::cout << "dof        " << 3 * dofs.points.size() << '\n'
              << "materials  " << m.materials.size() << '\n'
              << "general    " << m.general.size() << '\n'
              << "bolts      " << m.linear.size() << '\n';
    for (const auto& b : m.linear) std::cout << "  " << b.id << ": radius " << b.radius << ", E " << b.E << '\n';
    std::cout << "grid pts   " << set.size() << '\n'
              << "solver     steps " << m.solver.n_steps << ", tol " << m.solver.tol << ", max_iter "
              << m.solver.max_iter << '\n'
              << "samples    " << m.samples.size() << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Isogeometric boundary element analysis of tunnel excavation"};
    app.require_subcommand(1);
    Flags f;

    auto add_run_flags = [&](CLI::App* c) {
        c->add_option("--steps", f.steps, "load increments after first yield");
        c->add_option("--tol", f.tol, "relative initial-stress convergence tolerance");
        c->add_option("--threads", f.threads, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
        c->add_option("--sample", f.sample, "VTK tessellation points per knot span");
        c->add_option("--output", f.output, "output directory");
    };
    auto* solve = app.add_subcommand("solve", "run an analysis and write CSV and VTK results");
    solve->add_option("model", f.model, "model file (JSON)")->required();
    add_run_flags(solve);
    auto* vk = app.add_subcommand("verify-kirsch", "elastic tunnel against the plane-strain hole solution");
    vk->add_option("--model", f.model, "model file (default: built-in elastic tunnel)");
    add_run_flags(vk);
    auto* vd = app.add_subcommand("verify-duncanfama", "plastic tunnel against the Mohr-Coulomb closed form");
    vd->add_option("--model", f.model, "model file (default: built-in plastic tunnel)");
    add_run_flags(vd);
    auto* in = app.add_subcommand("inspect", "validate a model and print its summary");
    in->add_option("model", f.model, "model file (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        if (*solve) return cmd_solve(f);
        if (*vk) return cmd_verify_kirsch(f);
        if (*vd) return cmd_verify_duncanfama(f);
        return cmd_inspect(f);
    } catch (const NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        for (const auto& h : e.history)
            std::cerr << "  step " << h.step << " iteration " << h.iteration << " change " << h.change << '\n';
        return kNonConvergence;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const SolverError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kVerifyFailed;
    }
}
