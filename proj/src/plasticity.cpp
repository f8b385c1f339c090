#include "igabem/plasticity.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace igabem {

void MohrCoulomb::validate() const
{
    if (!(c >= 0.0)) throw ConstitutiveError("Mohr-Coulomb cohesion must be nonnegative");
    if (!(phi >= 0.0 && phi < 0.5 * std::numbers::pi)) throw ConstitutiveError("friction angle outside [0, pi/2)");
    if (!(psi >= 0.0 && psi <= phi)) throw ConstitutiveError("dilation angle outside [0, phi]");
}

namespace {

struct Principal {
    Vec3 s;   // s[0] >= s[1] >= s[2]
    Mat3 v;   // columns: directions
};

Principal principal(const Vec6& sigma)
{
    Eigen::SelfAdjointEigenSolver<Mat3> es(voigt_to_tensor(sigma));
    Principal p;
    for (int i = 0; i < 3; ++i) {
        p.s[i] = es.eigenvalues()[2 - i];
        p.v.col(i) = es.eigenvectors().col(2 - i);
    }
    return p;
}

Vec6 from_principal(const Vec3& s, const Mat3& v)
{
    return tensor_to_voigt(v * s.asDiagonal() * v.transpose());
}

// Tensor sum_i g_i v_i v_i^T as a strain-like Voigt vector.
Vec6 strain_like(const Vec3& g, const Mat3& v)
{
    Vec6 t = tensor_to_voigt(v * g.asDiagonal() * v.transpose());
    t.tail<3>() *= 2.0;
    return t;
}

}  // namespace

double mc_yield(const Vec6& sigma, const MohrCoulomb& mc)
{
    const auto p = principal(sigma);
    return 0.5 * (p.s[0] - p.s[2]) + 0.5 * (p.s[0] + p.s[2]) * std::sin(mc.phi) - mc.c * std::cos(mc.phi);
}

double mc_compressive_strength(const MohrCoulomb& mc)
{
    return 2.0 * mc.c * std::cos(mc.phi) / (1.0 - std::sin(mc.phi));
}

FlowVectors mc_flow(const Vec6& sigma, const MohrCoulomb& mc)
{
    const auto p = principal(sigma);
    const double sf = std::sin(mc.phi), sp = std::sin(mc.psi);
    return {strain_like(Vec3(0.5 * (1 + sf), 0.0, -0.5 * (1 - sf)), p.v),
            strain_like(Vec3(0.5 * (1 + sp), 0.0, -0.5 * (1 - sp)), p.v)};
}

Mat6 d_ep(const Vec6& sigma, const Mat6& De, const MohrCoulomb& mc)
{
    const auto fv = mc_flow(sigma, mc);
    const Vec6 Db = De * fv.b;
    const double den = fv.a.dot(Db);
    if (!(den > 0.0)) throw ConstitutiveError("degenerate elasto-plastic tangent");
    return De - Db * (fv.a.transpose() * De) / den;
}

ReturnResult mc_return(const Vec6& trial, double E, double nu, const MohrCoulomb& mc)
{
    ReturnResult out;
    out.sigma = trial;
    const auto p = principal(trial);
    const double sf = std::sin(mc.phi), cf = std::cos(mc.phi), sp = std::sin(mc.psi);
    const Vec3& t = p.s;
    // Phi = 2F in terms of the ordered principal stresses
    const auto phi_of = [&](double hi, double lo) { return hi - lo + (hi + lo) * sf - 2.0 * mc.c * cf; };
    if (phi_of(t[0], t[2]) <= 0.0) return out;
    out.plastic = true;
    const double G = E / (2.0 * (1.0 + nu)), K = E / (3.0 * (1.0 - 2.0 * nu));
    // stress decrements D * n_g for the plane flow vectors (1+sp, 0, -(1-sp)) and its two
    // edge companions (1+sp, -(1-sp), 0), (0, 1+sp, -(1-sp))
    const double A1 = 2.0 * G * (1.0 + sp / 3.0) + 2.0 * K * sp;  // on the 1+sp entry
    const double A2 = (4.0 / 3.0 * G - 2.0 * K) * sp;              // on the zero entry (sign: +)
    const double A3 = 2.0 * G * (1.0 - sp / 3.0) - 2.0 * K * sp;   // on the -(1-sp) entry
    const double a = 4.0 * G * (1.0 + sf * sp / 3.0) + 4.0 * K * sf * sp;

    const auto ordered = [](const Vec3& s) { return s[0] - s[1] >= -1e-10 * (1.0 + s.cwiseAbs().maxCoeff()) &&
                                                     s[1] - s[2] >= -1e-10 * (1.0 + s.cwiseAbs().maxCoeff()); };

    // main plane; when its result violates the ordering the return goes to the edge it crossed
    Vec3 s;
    {
        const double dg = phi_of(t[0], t[2]) / a;
        s = Vec3(t[0] - A1 * dg, t[1] + A2 * dg, t[2] + A3 * dg);
        if (ordered(s)) {
            out.sigma = from_principal(s, p.v);
            out.surface = ReturnResult::Surface::Plane;
            return out;
        }
    }
    if (s[0] < s[1]) {
        // edge s1 = s2: planes (s1, s3) and (s2, s3)
        const double b = 2.0 * G * (1.0 - sf - sp - sf * sp / 3.0) + 4.0 * K * sf * sp;
        const double pa = phi_of(t[0], t[2]), pb = phi_of(t[1], t[2]);
        const double det = a * a - b * b;
        const double ga = (a * pa - b * pb) / det, gb = (a * pb - b * pa) / det;
        s = Vec3(t[0] - A1 * ga + A2 * gb, t[1] + A2 * ga - A1 * gb, t[2] + A3 * (ga + gb));
        out.surface = ReturnResult::Surface::Edge12;
    } else {
        // edge s2 = s3: planes (s1, s3) and (s1, s2)
        const double b = 2.0 * G * (1.0 + sf + sp - sf * sp / 3.0) + 4.0 * K * sf * sp;
        const double pa = phi_of(t[0], t[2]), pb = phi_of(t[0], t[1]);
        const double det = a * a - b * b;
        const double ga = (a * pa - b * pb) / det, gb = (a * pb - b * pa) / det;
        s = Vec3(t[0] - A1 * (ga + gb), t[1] + A2 * ga + A3 * gb, t[2] + A3 * ga + A2 * gb);
        out.surface = ReturnResult::Surface::Edge23;
    }
    if (!ordered(s) || (mc.phi > 0.0 && s.sum() / 3.0 > mc.c / std::tan(mc.phi))) {
        if (!(mc.phi > 0.0)) throw ConstitutiveError("Mohr-Coulomb return failed without a tension apex");
        s.setConstant(mc.c / std::tan(mc.phi));
        out.surface = ReturnResult::Surface::Apex;
    }
    out.sigma = from_principal(s, p.v);
    return out;
}

double plastic_fraction(double F_new, double F_old)
{
    if (!(F_new > 0.0)) return 0.0;
    if (F_old >= 0.0) return 1.0;
    if (F_new == F_old) return 0.0;
    return std::clamp(F_new / (F_new - F_old), 0.0, 1.0);
}

double first_yield_factor(const Vec6& sigma_v, const Vec6& dsigma, const MohrCoulomb& mc)
{
    const double tol = 1e-12 * (1.0 + mc.c);
    if (mc_yield(sigma_v, mc) > tol) throw ConstitutiveError("virgin stress violates the yield condition");
    if (mc_yield(sigma_v + dsigma, mc) <= 0.0) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (mc_yield(sigma_v + mid * dsigma, mc) > 0.0 ? hi : lo) = mid;
    }
    return lo;
}

}  // namespace igabem
