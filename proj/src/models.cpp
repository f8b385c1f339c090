#include "igabem/models.hpp"

#include <numbers>

namespace igabem {

namespace {

constexpr double kPi = std::numbers::pi;

double deg(double d) { return d * kPi / 180.0; }

}  // namespace

std::array<double, 3> bolt_angles() { return {deg(60), deg(90), deg(120)}; }

Model tunnel_elastic_model()
{
    Model m;
    m.name = "tunnel_elastic";
    m.patches = build_circular_tunnel(TunnelOptions{});
    m.virgin_stress << 0, 0, -1, 0, 0, 0;
    m.samples.push_back({"crown_line", Vec3(0, 0, 1), Vec3(0, 0, 6), 11});
    return m;
}

Model tunnel_bolts_model(bool with_bolts)
{
    Model m;
    m.name = with_bolts ? "tunnel_bolts" : "tunnel_bolts_reference";
    TunnelOptions opt;
    const NurbsCurve arc = circle_arc(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitZ(), opt.radius, 0.0, 2);
    const double xb = arc_parameter(arc, Vec3::Zero(), Vec3::UnitX(), Vec3::UnitZ(), deg(60));
    opt.insert_upper_xi = {xb, xb, 1.0 - xb, 1.0 - xb};
    opt.insert_eta = {0.5};
    m.patches = build_circular_tunnel(opt);
    m.virgin_stress << 0, 0, -1, 0, 0, 0;
    if (with_bolts) {
        const char* names[3] = {"bolt_60", "bolt_90", "bolt_120"};
        const auto ang = bolt_angles();
        for (int b = 0; b < 3; ++b) {
            LinearInclusion bolt;
            bolt.id = names[b];
            bolt.radius = 0.025;
            bolt.E = 2.0;
            bolt.axis.knot = KnotVector({0, 0, 0.25, 0.5, 0.75, 1, 1}, 1);
            const Vec3 dir(std::cos(ang[b]), 0.0, std::sin(ang[b]));
            const double xi = b == 0 ? xb : (b == 1 ? 0.5 : 1.0 - xb);
            const Vec3 head = map_patch(m.patches[0], xi, 0.5).x;
            for (int i = 0; i < 5; ++i) bolt.axis.points.push_back(head + 0.25 * i * dir);
            bolt.axis.weights.assign(5, 1.0);
            m.linear.push_back(bolt);
        }
    }
    m.samples.push_back({"crown_line", Vec3(0, 0, 1), Vec3(0, 0, 3), 17});
    m.samples.push_back({"bolt_60_line", Vec3(0.5, 0, std::sqrt(0.75)), Vec3(1.0, 0, std::sqrt(3.0)), 9});
    m.samples.push_back({"bolt_120_line", Vec3(-0.5, 0, std::sqrt(0.75)), Vec3(-1.0, 0, std::sqrt(3.0)), 9});
    return m;
}

Model tunnel_plastic_model(int radial_cells, int circumferential_cells)
{
    Model m;
    m.name = "tunnel_plastic";
    m.patches = build_circular_tunnel(TunnelOptions{});
    m.virgin_stress << -1, -1, -1, 0, 0, 0;
    MaterialDef rock;
    rock.id = "rock";
    rock.E = 1.0;
    rock.nu = 0.0;
    rock.yield = MohrCoulomb{0.5, deg(10), 0.0};
    m.materials.push_back(rock);

    // ring swept from y = +20 to y = -20 so that (s, t, r) is right-handed
    auto sweep = [](double radius) {
        const NurbsCurve c = circle_arc(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitZ(), radius, 0.0, 4);
        NurbsSurface s;
        s.knotU = c.knot;
        s.knotV = KnotVector({0, 0, 1, 1}, 1);
        for (double y : {20.0, -20.0})
            for (const auto& p : c.points) s.points.push_back(p + Vec3(0, y, 0));
        s.weights = c.weights;
        s.weights.insert(s.weights.end(), c.weights.begin(), c.weights.end());
        return s;
    };
    GeneralInclusion g;
    g.id = "annulus";
    g.material = "rock";
    g.bottom = sweep(1.0);
    g.top = sweep(2.0);
    g.grid = {GridAxis{circumferential_cells, 2}, GridAxis{1, 0}, GridAxis{radial_cells, 2}};
    m.general.push_back(g);
    m.samples.push_back({"spring_line", Vec3(1, 0, 0), Vec3(3, 0, 0), 9});
    return m;
}

}  // namespace igabem
