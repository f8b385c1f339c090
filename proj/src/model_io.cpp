#include "igabem/model_io.hpp"

#include "json.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

namespace igabem {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
    throw ValidationError(path + ": " + what);
}

const json& need(const json& j, const std::string& key, const std::string& path)
{
    if (!j.is_object()) fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing");
    return *it;
}

double num(const json& j, const std::string& path)
{
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& path)
{
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

std::string str(const json& j, const std::string& path)
{
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

bool boolean(const json& j, const std::string& path)
{
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
}

std::vector<double> numbers(const json& j, const std::string& path)
{
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> v;
    for (size_t i = 0; i < j.size(); ++i) v.push_back(num(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

Vec3 point(const json& j, const std::string& path)
{
    const auto v = numbers(j, path);
    if (v.size() != 3) fail(path, "expected 3 coordinates");
    return Vec3(v[0], v[1], v[2]);
}

std::vector<Vec3> points(const json& j, const std::string& path)
{
    if (!j.is_array()) fail(path, "expected an array of points");
    std::vector<Vec3> v;
    for (size_t i = 0; i < j.size(); ++i) v.push_back(point(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

KnotVector knots(const json& j, int degree, const std::string& path)
{
    try {
        KnotVector k(numbers(j, path), degree);
        k.validate();
        return k;
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
}

std::vector<double> weights(const json& j, const std::string& key, size_t n, const std::string& path)
{
    if (!j.contains(key)) return std::vector<double>(n, 1.0);
    auto w = numbers(j[key], path + "." + key);
    if (w.size() != n) fail(path + "." + key, "expected " + std::to_string(n) + " weights");
    for (size_t i = 0; i < w.size(); ++i)
        if (!(w[i] > 0.0)) fail(path + "." + key + "[" + std::to_string(i) + "]", "weight must be positive");
    return w;
}

NurbsCurve curve(const json& j, const std::string& path)
{
    NurbsCurve c;
    c.knot = knots(need(j, "knots", path), integer(need(j, "degree", path), path + ".degree"), path + ".knots");
    c.points = points(need(j, "points", path), path + ".points");
    if (static_cast<int>(c.points.size()) != c.count())
        fail(path + ".points", "expected " + std::to_string(c.count()) + " control points");
    c.weights = weights(j, "weights", c.points.size(), path);
    return c;
}

NurbsSurface surface(const json& j, const std::string& path)
{
    NurbsSurface s;
    const auto& deg = need(j, "degree", path);
    const auto& kn = need(j, "knots", path);
    if (!deg.is_array() || deg.size() != 2) fail(path + ".degree", "expected [p, q]");
    if (!kn.is_array() || kn.size() != 2) fail(path + ".knots", "expected [knotsU, knotsV]");
    s.knotU = knots(kn[0], integer(deg[0], path + ".degree[0]"), path + ".knots[0]");
    s.knotV = knots(kn[1], integer(deg[1], path + ".degree[1]"), path + ".knots[1]");
    s.points = points(need(j, "points", path), path + ".points");
    if (static_cast<int>(s.points.size()) != s.countU() * s.countV())
        fail(path + ".points", "expected " + std::to_string(s.countU() * s.countV()) + " control points");
    s.weights = weights(j, "weights", s.points.size(), path);
    return s;
}

ojson to_json(const Vec3& x) { return ojson::array({x[0], x[1], x[2]}); }

ojson to_json(const std::vector<Vec3>& v)
{
    ojson a = ojson::array();
    for (const auto& x : v) a.push_back(to_json(x));
    return a;
}

ojson to_json(const NurbsCurve& c)
{
    return {{"degree", c.knot.degree}, {"knots", c.knot.knots}, {"points", to_json(c.points)}, {"weights", c.weights}};
}

ojson to_json(const NurbsSurface& s)
{
    return {{"degree", {s.knotU.degree, s.knotV.degree}},
            {"knots", {s.knotU.knots, s.knotV.knots}},
            {"points", to_json(s.points)},
            {"weights", s.weights}};
}

Patch patch(const json& j, const std::string& path)
{
    const std::string id = str(need(j, "id", path), path + ".id");
    const std::string kind = str(need(j, "kind", path), path + ".kind");
    const bool flip = j.contains("flip") ? boolean(j["flip"], path + ".flip") : false;
    if (j.contains("bc") && str(j["bc"], path + ".bc") != "excavation")
        fail(path + ".bc", "only 'excavation' (traction-free opening) boundaries are supported");
    Patch p;
    try {
        if (kind == "finite") {
            p = make_finite_patch(id, surface(need(j, "geometry", path), path + ".geometry"), flip);
            if (j.contains("field")) p.field = surface(j["field"], path + ".field");
        } else if (kind == "infinite") {
            const std::string mode = j.contains("mode") ? str(j["mode"], path + ".mode") : "plane_strain";
            InfiniteMode m;
            if (mode == "plane_strain") m = InfiniteMode::PlaneStrain;
            else if (mode == "decay") m = InfiniteMode::Decay;
            else fail(path + ".mode", "expected 'plane_strain' or 'decay'");
            p = make_infinite_patch(id, curve(need(j, "edge", path), path + ".edge"), Vec3::UnitX(), m, flip);
            p.row2 = points(need(j, "row2", path), path + ".row2");
            if (j.contains("field")) p.field_edge = curve(j["field"], path + ".field");
        } else if (kind == "special") {
            p = make_special_patch(id, curve(need(j, "outer", path), path + ".outer"),
                                   curve(need(j, "inner", path), path + ".inner"), flip);
            if (j.contains("chord_eta")) p.chord_eta = boolean(j["chord_eta"], path + ".chord_eta");
            if (j.contains("field")) p.field = surface(j["field"], path + ".field");
        } else {
            fail(path + ".kind", "expected 'finite', 'infinite' or 'special'");
        }
        p.validate();
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
    return p;
}

ojson to_json(const Patch& p)
{
    ojson j{{"id", p.id}, {"kind", ""}, {"flip", p.flip}, {"bc", "excavation"}};
    switch (p.kind) {
    case PatchKind::Finite:
        j["kind"] = "finite";
        j["geometry"] = to_json(p.geometry);
        j["field"] = to_json(p.field);
        break;
    case PatchKind::Infinite:
        j["kind"] = "infinite";
        j["mode"] = p.mode == InfiniteMode::PlaneStrain ? "plane_strain" : "decay";
        j["edge"] = to_json(p.edge);
        j["row2"] = to_json(p.row2);
        j["field"] = to_json(p.field_edge);
        break;
    case PatchKind::Special:
        j["kind"] = "special";
        j["chord_eta"] = p.chord_eta;
        j["outer"] = to_json(p.outer);
        j["inner"] = to_json(p.inner);
        j["field"] = to_json(p.field);
        break;
    }
    return j;
}

double angle(const json& j, const std::string& key, const std::string& path, double fallback)
{
    if (j.contains(key)) return num(j[key], path + "." + key);
    if (j.contains(key + "_deg")) return num(j[key + "_deg"], path + "." + key + "_deg") * std::numbers::pi / 180.0;
    return fallback;
}

template <class F>
void each(const json& j, const std::string& key, const std::string& path, F&& f)
{
    if (!j.contains(key)) return;
    const auto& a = j[key];
    if (!a.is_array()) fail(path + "." + key, "expected an array");
    for (size_t i = 0; i < a.size(); ++i) f(a[i], path + "." + key + "[" + std::to_string(i) + "]");
}

Model from_json(const json& j, const std::string& src)
{
    Model m;
    if (!j.is_object()) fail(src, "model must be a JSON object");
    m.version = integer(need(j, "version", src), src + ".version");
    if (m.version != kModelVersion) fail(src + ".version", "unsupported version " + std::to_string(m.version));
    if (j.contains("name")) m.name = str(j["name"], src + ".name");
    if (j.contains("units")) m.units = str(j["units"], src + ".units");
    const auto& med = need(j, "medium", src);
    m.E = num(need(med, "E", src + ".medium"), src + ".medium.E");
    m.nu = num(need(med, "nu", src + ".medium"), src + ".medium.nu");
    const auto vs = numbers(need(j, "virgin_stress", src), src + ".virgin_stress");
    if (vs.size() != 6) fail(src + ".virgin_stress", "expected 6 Voigt components (xx, yy, zz, xy, yz, xz)");
    for (int i = 0; i < 6; ++i) m.virgin_stress[i] = vs[i];

    const auto& pa = need(j, "patches", src);
    if (!pa.is_array()) fail(src + ".patches", "expected an array");
    if (pa.empty()) fail(src + ".patches", "at least one patch is required");
    each(j, "patches", src, [&](const json& e, const std::string& p) { m.patches.push_back(patch(e, p)); });

    each(j, "materials", src, [&](const json& e, const std::string& p) {
        MaterialDef d;
        d.id = str(need(e, "id", p), p + ".id");
        d.E = num(need(e, "E", p), p + ".E");
        d.nu = num(need(e, "nu", p), p + ".nu");
        if (e.contains("mohr_coulomb")) {
            const auto& mc = e["mohr_coulomb"];
            const std::string q = p + ".mohr_coulomb";
            MohrCoulomb y;
            y.c = num(need(mc, "c", q), q + ".c");
            y.phi = angle(mc, "phi", q, -1.0);
            if (y.phi < 0.0 && !mc.contains("phi") && !mc.contains("phi_deg")) fail(q + ".phi", "missing");
            y.psi = angle(mc, "psi", q, 0.0);
            d.yield = y;
        }
        m.materials.push_back(d);
    });

    if (j.contains("inclusions")) {
        const auto& inc = j["inclusions"];
        const std::string q = src + ".inclusions";
        each(inc, "general", q, [&](const json& e, const std::string& p) {
            GeneralInclusion g;
            g.id = str(need(e, "id", p), p + ".id");
            g.material = str(need(e, "material", p), p + ".material");
            g.bottom = surface(need(e, "bottom", p), p + ".bottom");
            g.top = surface(need(e, "top", p), p + ".top");
            const auto& gr = need(e, "grid", p);
            if (!gr.is_array() || gr.size() != 3) fail(p + ".grid", "expected 3 axes (s, t, r)");
            for (int a = 0; a < 3; ++a) {
                const std::string ga = p + ".grid[" + std::to_string(a) + "]";
                g.grid[a].cells = integer(need(gr[a], "cells", ga), ga + ".cells");
                g.grid[a].degree = integer(need(gr[a], "degree", ga), ga + ".degree");
            }
            m.general.push_back(g);
        });
        each(inc, "linear", q, [&](const json& e, const std::string& p) {
            LinearInclusion b;
            b.id = str(need(e, "id", p), p + ".id");
            b.radius = num(need(e, "radius", p), p + ".radius");
            b.E = num(need(e, "E", p), p + ".E");
            b.axis = curve(need(e, "axis", p), p + ".axis");
            m.linear.push_back(b);
        });
    }
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        const std::string p = src + ".solver";
        if (s.contains("n_steps")) m.solver.n_steps = integer(s["n_steps"], p + ".n_steps");
        if (s.contains("tol")) m.solver.tol = num(s["tol"], p + ".tol");
        if (s.contains("max_iter")) m.solver.max_iter = integer(s["max_iter"], p + ".max_iter");
        if (s.contains("tol_yield")) m.solver.tol_yield = num(s["tol_yield"], p + ".tol_yield");
    }
    if (j.contains("quadrature")) {
        const auto& s = j["quadrature"];
        const std::string p = src + ".quadrature";
        auto& c = m.quad;
        const auto geti = [&](const char* k, int& v) { if (s.contains(k)) v = integer(s[k], p + "." + k); };
        const auto getd = [&](const char* k, double& v) { if (s.contains(k)) v = num(s[k], p + "." + k); };
        geti("gauss_base", c.gauss_base);
        getd("gauss_slope", c.gauss_slope);
        geti("gauss_cap", c.gauss_cap);
        getd("max_aspect", c.max_aspect);
        geti("gauss_singular", c.gauss_singular);
        geti("infinite_bands", c.infinite_bands);
        geti("max_depth", c.max_depth);
        geti("volume_singular_gauss", c.volume_singular_gauss);
        geti("volume_base", c.volume_base);
        getd("volume_slope", c.volume_slope);
        geti("volume_cap", c.volume_cap);
        if (c.gauss_base < 1 || c.gauss_cap < c.gauss_base || c.gauss_cap > 64 || c.gauss_singular < 1 ||
            c.gauss_singular > 64 || c.volume_base < 1 || c.volume_cap < c.volume_base || c.volume_cap > 64 ||
            c.volume_singular_gauss < 1 || c.volume_singular_gauss > 64 || c.max_depth < 0 || c.infinite_bands < 1 ||
            !(c.max_aspect >= 1.0) || !(c.gauss_slope >= 0.0) || !(c.volume_slope >= 0.0))
            fail(p, "Gauss counts must lie in 1..64 with base <= cap");
    }
    each(j, "samples", src, [&](const json& e, const std::string& p) {
        SampleLine s;
        s.id = str(need(e, "id", p), p + ".id");
        s.from = point(need(e, "from", p), p + ".from");
        s.to = point(need(e, "to", p), p + ".to");
        s.count = integer(need(e, "count", p), p + ".count");
        m.samples.push_back(s);
    });
    m.validate();
    return m;
}

bool scalar(const ojson& j) { return !j.is_array() && !j.is_object(); }

bool flat(const ojson& j)
{
    if (!j.is_array()) return false;
    for (const auto& e : j)
        if (!scalar(e)) return false;
    return true;
}

/// Indented JSON with numeric arrays and point lists kept on single lines.
void pretty(const ojson& j, int depth, std::string& out)
{
    const std::string pad(2 * depth + 2, ' '), end(2 * depth, ' ');
    if (scalar(j) || flat(j)) {
        if (!flat(j)) {
            out += j.dump();
            return;
        }
        out += "[";
        for (size_t i = 0; i < j.size(); ++i) out += (i ? ", " : "") + j[i].dump();
        out += "]";
        return;
    }
    const bool obj = j.is_object();
    if (j.empty()) {
        out += obj ? "{}" : "[]";
        return;
    }
    out += obj ? "{\n" : "[\n";
    size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad;
        if (obj) out += ojson(it.key()).dump() + ": ";
        pretty(*it, depth + 1, out);
        out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += end + (obj ? "}" : "]");
}

}  // namespace

Model parse_model_string(const std::string& text, const std::string& source)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(source + ": " + e.what());
    }
    return from_json(j, source);
}

Model parse_model(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError(path + ": cannot open model file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model_string(ss.str(), path);
}

std::string serialize_model(const Model& m)
{
    ojson j;
    j["version"] = m.version;
    j["name"] = m.name;
    j["units"] = m.units;
    j["medium"] = {{"E", m.E}, {"nu", m.nu}};
    j["virgin_stress"] = std::vector<double>(m.virgin_stress.data(), m.virgin_stress.data() + 6);
    j["patches"] = ojson::array();
    for (const auto& p : m.patches) j["patches"].push_back(to_json(p));
    j["materials"] = ojson::array();
    for (const auto& d : m.materials) {
        ojson e{{"id", d.id}, {"E", d.E}, {"nu", d.nu}};
        if (d.yield) e["mohr_coulomb"] = {{"c", d.yield->c}, {"phi", d.yield->phi}, {"psi", d.yield->psi}};
        j["materials"].push_back(e);
    }
    ojson gen = ojson::array(), lin = ojson::array();
    for (const auto& g : m.general) {
        ojson grid = ojson::array();
        for (const auto& a : g.grid) grid.push_back({{"cells", a.cells}, {"degree", a.degree}});
        gen.push_back({{"id", g.id}, {"material", g.material}, {"bottom", to_json(g.bottom)}, {"top", to_json(g.top)},
                       {"grid", grid}});
    }
    for (const auto& b : m.linear)
        lin.push_back({{"id", b.id}, {"radius", b.radius}, {"E", b.E}, {"axis", to_json(b.axis)}});
    j["inclusions"] = {{"general", gen}, {"linear", lin}};
    j["solver"] = {{"n_steps", m.solver.n_steps},
                   {"tol", m.solver.tol},
                   {"max_iter", m.solver.max_iter},
                   {"tol_yield", m.solver.tol_yield}};
    const auto& c = m.quad;
    j["quadrature"] = {{"gauss_base", c.gauss_base},
                       {"gauss_slope", c.gauss_slope},
                       {"gauss_cap", c.gauss_cap},
                       {"max_aspect", c.max_aspect},
                       {"gauss_singular", c.gauss_singular},
                       {"infinite_bands", c.infinite_bands},
                       {"max_depth", c.max_depth},
                       {"volume_singular_gauss", c.volume_singular_gauss},
                       {"volume_base", c.volume_base},
                       {"volume_slope", c.volume_slope},
                       {"volume_cap", c.volume_cap}};
    j["samples"] = ojson::array();
    for (const auto& s : m.samples)
        j["samples"].push_back({{"id", s.id}, {"from", to_json(s.from)}, {"to", to_json(s.to)}, {"count", s.count}});
    std::string out;
    pretty(j, 0, out);
    return out + "\n";
}

void save_model(const Model& m, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot write model file");
    out << serialize_model(m);
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace igabem
