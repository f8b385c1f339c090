#include "igabem/recovery.hpp"

#include "igabem/parallel.hpp"

#include <map>
#include <sstream>

namespace igabem {

DisplacementRows displacement_rows(const BoundaryModel& model, const SystemMatrices& sys, const InclusionSet& set,
                                   const std::vector<Vec3>& points, int threads)
{
    const int m = static_cast<int>(points.size()), N = sys.dofs.size();
    DisplacementRows rows;
    rows.A = Eigen::MatrixXd::Zero(3 * m, 3 * N);
    rows.c = Eigen::VectorXd::Zero(3 * m);
    parallel_for(m, threads, [&](int n) {
        for (size_t pi = 0; pi < model.patches.size(); ++pi) {
            const auto row = integrate_row(model.patches[pi], sys.regions[pi], points[n], std::nullopt, model.k,
                                           model.quad, static_cast<int>(pi));
            for (size_t kf = 0; kf < row.T.size(); ++kf)
                rows.A.block<3, 3>(3 * n, 3 * sys.dofs.global[pi][kf]) -= row.T[kf];
            for (size_t kt = 0; kt < row.U.size(); ++kt) rows.c.segment<3>(3 * n) += row.U[kt] * sys.tractions[pi][kt];
        }
    });
    if (set.size() > 0) rows.B0 = integrate_B0(set, points, model.k, model.quad, threads);
    else rows.B0 = Eigen::MatrixXd::Zero(3 * m, 0);
    return rows;
}

std::vector<std::pair<int, double>> boundary_recovery(const BoundaryModel& model, const DofMap& dofs,
                                                      const PatchParam& at)
{
    if (at.patch < 0 || at.patch >= static_cast<int>(model.patches.size()))
        throw RecoveryError("boundary recovery: point is not on any patch");
    std::vector<int> idx;
    std::vector<double> val;
    model.patches[at.patch].field_basis(at.param[0], at.param[1], idx, val);
    std::map<int, double> w;
    for (size_t a = 0; a < idx.size(); ++a) w[dofs.global[at.patch][idx[a]]] += val[a];
    return {w.begin(), w.end()};
}

DisplacementRows grid_displacement_rows(const BoundaryModel& model, const SystemMatrices& sys,
                                        const InclusionSet& set, int threads)
{
    std::vector<Vec3> inner;
    std::vector<int> where;
    for (int p = 0; p < set.size(); ++p)
        if (!set.points[p].boundary) {
            where.push_back(p);
            inner.push_back(set.points[p].x);
        }
    const auto in = displacement_rows(model, sys, set, inner, threads);
    const int G = set.size(), N = sys.dofs.size();
    DisplacementRows rows;
    rows.A = Eigen::MatrixXd::Zero(3 * G, 3 * N);
    rows.c = Eigen::VectorXd::Zero(3 * G);
    rows.B0 = Eigen::MatrixXd::Zero(3 * G, 6 * G);
    for (size_t i = 0; i < where.size(); ++i) {
        rows.A.middleRows<3>(3 * where[i]) = in.A.middleRows<3>(3 * i);
        rows.c.segment<3>(3 * where[i]) = in.c.segment<3>(3 * i);
        rows.B0.middleRows<3>(3 * where[i]) = in.B0.middleRows<3>(3 * i);
    }
    for (int p = 0; p < G; ++p) {
        const auto& b = set.points[p].boundary;
        if (!b) continue;
        for (const auto& [dof, w] : boundary_recovery(model, sys.dofs, *b))
            rows.A.block<3, 3>(3 * p, 3 * dof) += w * Mat3::Identity();
    }
    return rows;
}

namespace {

// Derivatives of the Lagrange polynomials through nodes s at s[at].
std::vector<double> lagrange_derivative_at(const std::vector<double>& s, size_t at)
{
    const size_t n = s.size();
    std::vector<double> d(n, 0.0);
    for (size_t j = 0; j < n; ++j) {
        // dL_j/ds = sum_{m != j} 1/(s_j - s_m) prod_{l != j,m} (s - s_l)/(s_j - s_l)
        double sum = 0.0;
        for (size_t m = 0; m < n; ++m) {
            if (m == j) continue;
            double prod = 1.0 / (s[j] - s[m]);
            for (size_t l = 0; l < n; ++l)
                if (l != j && l != m) prod *= (s[at] - s[l]) / (s[j] - s[l]);
            sum += prod;
        }
        d[j] = sum;
    }
    return d;
}

}  // namespace

Eigen::SparseMatrix<double> strain_operator(const InclusionSet& set)
{
    const int G = set.size();
    std::vector<Eigen::Triplet<double>> trip;
    // general inclusions: per point, sum of cell contributions and the count of cells
    std::vector<std::map<int, Eigen::Matrix<double, 6, 3>>> acc(G);
    std::vector<int> count(G, 0);
    for (size_t gi = 0; gi < set.general.size(); ++gi) {
        const auto& g = set.general[gi];
        const auto& ids = set.general_nodes[gi];
        const int ns = g.grid[0].node_count(), nt = g.grid[1].node_count();
        for (int cr = 0; cr < g.grid[2].cells; ++cr)
            for (int ct = 0; ct < g.grid[1].cells; ++ct)
                for (int cs = 0; cs < g.grid[0].cells; ++cs) {
                    const std::array<int, 3> cell{cs, ct, cr};
                    const auto nodes = lagrange_shape(g.grid, cell, (cs + 0.5) / g.grid[0].cells,
                                                      (ct + 0.5) / g.grid[1].cells, (cr + 0.5) / g.grid[2].cells)
                                           .ijk;
                    for (const auto& at : nodes) {
                        const double s = g.grid[0].node(at[0]), t = g.grid[1].node(at[1]), r = g.grid[2].node(at[2]);
                        const auto m = map_general(g, s, t, r);
                        const Mat3 Jinv = m.J.inverse();
                        const auto sv = lagrange_shape(g.grid, cell, s, t, r);
                        const int target = ids[at[0] + ns * (at[1] + nt * at[2])];
                        ++count[target];
                        for (size_t n = 0; n < sv.M.size(); ++n) {
                            const Vec3 dl(sv.dM[n][0], sv.dM[n][1], sv.dM[n][2]);
                            const Vec3 d = Jinv * dl;  // physical gradient of the shape function
                            Eigen::Matrix<double, 6, 3> B = Eigen::Matrix<double, 6, 3>::Zero();
                            B(0, 0) = d[0];
                            B(1, 1) = d[1];
                            B(2, 2) = d[2];
                            B(3, 0) = d[1];
                            B(3, 1) = d[0];
                            B(4, 1) = d[2];
                            B(4, 2) = d[1];
                            B(5, 0) = d[2];
                            B(5, 2) = d[0];
                            const int src = ids[sv.ijk[n][0] + ns * (sv.ijk[n][1] + nt * sv.ijk[n][2])];
                            auto it = acc[target].find(src);
                            if (it == acc[target].end()) acc[target].emplace(src, B);
                            else it->second += B;
                        }
                    }
                }
    }
    for (int p = 0; p < G; ++p)
        for (const auto& [src, B] : acc[p])
            for (int i = 0; i < 6; ++i)
                for (int j = 0; j < 3; ++j)
                    if (B(i, j) != 0.0) trip.emplace_back(6 * p + i, 3 * src + j, B(i, j) / count[p]);

    for (size_t bi = 0; bi < set.linear.size(); ++bi) {
        const auto& b = set.linear[bi];
        const auto& ids = set.linear_nodes[bi];
        const int n = b.axis.count();
        const int segs = n - 1;
        std::vector<double> arc(n, 0.0);
        for (int i = 1; i < n; ++i) {
            const double h = (b.axis.points[i] - b.axis.points[i - 1]).norm();
            if (!(h > 0.0)) throw RecoveryError("bolt '" + b.id + "': zero-length segment");
            arc[i] = arc[i - 1] + h;
        }
        const int step = (segs % 2 == 0) ? 2 : 1;
        std::vector<std::map<int, double>> row(n);
        std::vector<int> cnt(n, 0);
        for (int first = 0; first + step < n; first += step) {
            std::vector<double> s;
            for (int j = 0; j <= step; ++j) s.push_back(arc[first + j]);
            for (int at = 0; at <= step; ++at) {
                const auto d = lagrange_derivative_at(s, at);
                const int node = first + at;
                ++cnt[node];
                for (int j = 0; j <= step; ++j) row[node][first + j] += d[j];
            }
        }
        for (int i = 0; i < n; ++i) {
            const int p = ids[i];
            const Vec3 ax = set.points[p].axis;
            for (const auto& [j, w] : row[i])
                for (int c = 0; c < 3; ++c)
                    if (ax[c] != 0.0) trip.emplace_back(6 * p + 2, 3 * ids[j] + c, w * ax[c] / cnt[i]);
        }
    }
    Eigen::SparseMatrix<double> B(6 * G, 3 * G);
    B.setFromTriplets(trip.begin(), trip.end());
    return B;
}

StrainSystem strain_system(const Eigen::SparseMatrix<double>& Bhat, const DisplacementRows& grid_rows)
{
    StrainSystem s;
    s.C = Bhat * grid_rows.A;
    s.c = Bhat * grid_rows.c;
    s.C0 = Bhat * grid_rows.B0;
    return s;
}

}  // namespace igabem
