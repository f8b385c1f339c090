#include "igabem/export.hpp"

#include <fstream>
#include <iomanip>

namespace igabem {

namespace {

std::ofstream open(const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << std::setprecision(12);
    return out;
}

/// Parameter values splitting each knot span into n pieces, clipped to [0, hi].
std::vector<double> params(const std::vector<double>& breaks, int n, double hi)
{
    std::vector<double> v;
    for (size_t s = 0; s + 1 < breaks.size(); ++s) {
        if (breaks[s] >= hi) break;
        const double b = std::min(breaks[s + 1], hi);
        for (int i = 0; i < n; ++i) v.push_back(breaks[s] + (b - breaks[s]) * i / n);
        if (b >= hi) break;
    }
    v.push_back(hi);
    return v;
}

}  // namespace

std::vector<SampleRow> sample_rows(const Model& model, const AnalysisResult& res, int threads)
{
    std::vector<SampleRow> rows;
    for (const auto& s : model.samples) {
        const auto pts = s.points();
        const auto u = sample_displacements(res, pts, threads);
        for (size_t i = 0; i < pts.size(); ++i) rows.push_back({s.id, static_cast<int>(i), pts[i], u[i]});
    }
    return rows;
}

void write_samples_csv(const std::string& path, const std::vector<SampleRow>& rows)
{
    auto out = open(path);
    out << "line,index,x,y,z,ux,uy,uz\n";
    for (const auto& r : rows)
        out << r.line << ',' << r.index << ',' << r.x[0] << ',' << r.x[1] << ',' << r.x[2] << ',' << r.u[0] << ','
            << r.u[1] << ',' << r.u[2] << '\n';
}

void write_grid_csv(const std::string& path, const AnalysisResult& res)
{
    auto out = open(path);
    out << "point,kind,inclusion,x,y,z,ux,uy,uz,exx,eyy,ezz,gxy,gyz,gxz,sxx,syy,szz,sxy,syz,sxz,"
           "s0xx,s0yy,s0zz,s0xy,s0yz,s0xz,F,yielded\n";
    const auto& pts = res.set.points;
    for (size_t p = 0; p < pts.size(); ++p) {
        const auto& g = pts[p];
        out << p << ',' << (g.linear ? "bolt" : "general") << ','
            << (g.linear ? res.set.linear[g.inclusion].id : res.set.general[g.inclusion].id) << ',' << g.x[0] << ','
            << g.x[1] << ',' << g.x[2];
        const Vec3 u = p < res.grid_u.size() ? res.grid_u[p] : Vec3::Zero();
        out << ',' << u[0] << ',' << u[1] << ',' << u[2];
        PointState st;
        if (p < res.solve.points.size()) st = res.solve.points[p];
        for (int i = 0; i < 6; ++i) out << ',' << st.eps[i];
        for (int i = 0; i < 6; ++i) out << ',' << st.sigma[i];
        for (int i = 0; i < 6; ++i) out << ',' << st.sigma0[i];
        out << ',' << st.F << ',' << (st.yielded ? 1 : 0) << '\n';
    }
}

void write_history_csv(const std::string& path, const SolveResult& solve)
{
    auto out = open(path);
    out << "step,iteration,load,change\n";
    for (const auto& h : solve.history) out << h.step << ',' << h.iteration << ',' << h.load << ',' << h.change << '\n';
}

void write_vtk(const std::string& path, const AnalysisResult& res, int divisions)
{
    if (divisions < 1) throw std::invalid_argument("write_vtk: divisions must be positive");
    std::vector<Vec3> x, u;
    std::vector<std::array<int, 4>> quads;
    const auto& patches = res.boundary.patches;
    for (size_t ip = 0; ip < patches.size(); ++ip) {
        const auto& p = patches[ip];
        const auto xs = params(p.breaks_xi(), divisions, 1.0);
        const auto es = p.kind == PatchKind::Infinite ? params({0.0, 1.0}, 3 * divisions, 0.75)
                                                      : params(p.breaks_eta(), divisions, 1.0);
        const int base = static_cast<int>(x.size());
        for (double e : es)
            for (double xi : xs) {
                x.push_back(map_patch(p, xi, e).x);
                u.push_back(boundary_displacement(res.boundary, res.sys.dofs, res.solve.x, static_cast<int>(ip), xi, e));
            }
        const int nx = static_cast<int>(xs.size());
        for (int j = 0; j + 1 < static_cast<int>(es.size()); ++j)
            for (int i = 0; i + 1 < nx; ++i) {
                const int a = base + i + nx * j;
                quads.push_back({a, a + 1, a + 1 + nx, a + nx});
            }
    }
    const int nb = static_cast<int>(x.size());
    for (size_t p = 0; p < res.set.points.size(); ++p) {
        x.push_back(res.set.points[p].x);
        u.push_back(p < res.grid_u.size() ? res.grid_u[p] : Vec3::Zero());
    }
    const int ng = static_cast<int>(x.size()) - nb;

    auto out = open(path);
    out << "# vtk DataFile Version 3.0\nigabem result\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << x.size() << " double\n";
    for (const auto& p : x) out << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
    out << "CELLS " << quads.size() + ng << ' ' << 5 * quads.size() + 2 * ng << '\n';
    for (const auto& q : quads) out << "4 " << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << '\n';
    for (int i = 0; i < ng; ++i) out << "1 " << nb + i << '\n';
    out << "CELL_TYPES " << quads.size() + ng << '\n';
    for (size_t i = 0; i < quads.size(); ++i) out << "9\n";
    for (int i = 0; i < ng; ++i) out << "1\n";
    out << "POINT_DATA " << x.size() << "\nVECTORS displacement double\n";
    for (const auto& v : u) out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    out << "SCALARS boundary int 1\nLOOKUP_TABLE default\n";
    for (int i = 0; i < nb + ng; ++i) out << (i < nb ? 1 : 0) << '\n';
}

}  // namespace igabem
