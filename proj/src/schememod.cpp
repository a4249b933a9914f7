#include "gersten/schememod.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "gersten/error.hpp"
#include "json.hpp"

namespace gersten::schememod {

using gfield::Elem;
using gfield::FiniteField;
using gfield::Place;
using gfield::Poly;

std::string generic_point_id() { return "eta"; }

std::string place_point_id(const Place& v) {
    if (v.infinite) return "inf";
    return "(" + gfield::print_poly(v.base, v.pi, "t") + ")";
}

std::optional<Place> place_of_point_id(const FiniteField& base, const std::string& id) {
    if (id == "inf") return gfield::infinite_place(base);
    return std::nullopt;  // parsing of "(...)" ids goes through the literal layer
}

std::string SchemeDescription::name() const {
    switch (kind) {
        case SchemeKind::point: return "point/F" + std::to_string(base.q());
        case SchemeKind::affine_line:
            return removed.empty() ? "A1/F" + std::to_string(base.q())
                                   : "A1-minus-" + std::to_string(removed.size()) + "/F" +
                                         std::to_string(base.q());
        case SchemeKind::proj_line: return "P1/F" + std::to_string(base.q());
        case SchemeKind::line_config:
            return "line_config(" + std::to_string(lines.size()) + ")/F" + std::to_string(base.q());
        case SchemeKind::disjoint_union: return "disjoint_union";
        case SchemeKind::abstract: return "abstract";
    }
    return "scheme";
}

SchemeDescription builtin_point(const FiniteField& kappa) {
    SchemeDescription x;
    x.kind = SchemeKind::point;
    x.dimension = 0;
    x.base = kappa;
    SchemePoint pt;
    pt.id = generic_point_id();
    pt.codim = 0;
    pt.residue.ref = milnor::finite_field_ref(kappa);
    x.stored_points.push_back(pt);
    return x;
}

SchemeDescription builtin_affine_line(const FiniteField& base) {
    SchemeDescription x;
    x.kind = SchemeKind::affine_line;
    x.dimension = 1;
    x.base = base;
    return x;
}

SchemeDescription builtin_proj_line(const FiniteField& base) {
    SchemeDescription x;
    x.kind = SchemeKind::proj_line;
    x.dimension = 1;
    x.base = base;
    x.has_infinity = true;
    return x;
}

SchemeDescription builtin_punctured_line(const FiniteField& base,
                                         const std::vector<Place>& removed) {
    SchemeDescription x = builtin_affine_line(base);
    for (const Place& v : removed) {
        if (v.infinite) fail(errc::unsupported_scheme, "cannot puncture A^1 at infinity");
        x.removed.insert(gfield::place_key(v));
    }
    return x;
}

namespace {

std::array<Elem, 3> normalize_proj(const FiniteField& f, std::array<Elem, 3> v) {
    for (int i = 0; i < 3; ++i) {
        if (v[i] == 0) continue;
        Elem inv = f.inv(v[i]);
        for (int j = 0; j < 3; ++j) v[j] = f.mul(v[j], inv);
        return v;
    }
    fail(errc::internal, "zero projective vector");
}

bool proportional(const FiniteField& f, const LinearForm& a, const LinearForm& b) {
    return normalize_proj(f, a.a) == normalize_proj(f, b.a);
}

std::array<Elem, 3> cross(const FiniteField& f, const std::array<Elem, 3>& a,
                          const std::array<Elem, 3>& b) {
    return {f.sub(f.mul(a[1], b[2]), f.mul(a[2], b[1])),
            f.sub(f.mul(a[2], b[0]), f.mul(a[0], b[2])),
            f.sub(f.mul(a[0], b[1]), f.mul(a[1], b[0]))};
}

Elem eval_form(const FiniteField& f, const LinearForm& m, const std::array<Elem, 3>& pt) {
    Elem r = 0;
    for (int i = 0; i < 3; ++i) r = f.add(r, f.mul(m.a[i], pt[i]));
    return r;
}

std::string form_to_string(const FiniteField& f, const LinearForm& m) {
    static const char* names[3] = {"x", "y", "z"};
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i < 3; ++i) {
        if (m.a[i] == 0) continue;
        if (!first) os << "+";
        if (m.a[i] != 1) os << gfield::print_elem(f, m.a[i], "a") << "*";
        os << names[i];
        first = false;
    }
    return first ? "0" : os.str();
}

std::string coords_to_string(const FiniteField& f, const std::array<Elem, 3>& c) {
    std::ostringstream os;
    os << "[" << gfield::print_elem(f, c[0], "a") << ":" << gfield::print_elem(f, c[1], "a") << ":"
       << gfield::print_elem(f, c[2], "a") << "]";
    return os.str();
}

// parameter of the point P on the line t -> A + t B; nullopt means infinity
std::optional<Elem> line_parameter(const FiniteField& f, const LineData& ld,
                                   const std::array<Elem, 3>& P) {
    if (normalize_proj(f, ld.B) == normalize_proj(f, P)) return std::nullopt;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            // (A_i + t B_i) P_j = (A_j + t B_j) P_i
            Elem den = f.sub(f.mul(ld.B[i], P[j]), f.mul(ld.B[j], P[i]));
            if (den == 0) continue;
            Elem num = f.sub(f.mul(ld.A[j], P[i]), f.mul(ld.A[i], P[j]));
            return f.div(num, den);
        }
    }
    fail(errc::internal, "point not on the line");
}

}  // namespace

SchemeDescription builtin_line_config(const FiniteField& base,
                                      const std::vector<LinearForm>& forms) {
    if (forms.size() < 2) fail(errc::degenerate_config, "need at least two lines");
    SchemeDescription x;
    x.kind = SchemeKind::line_config;
    x.dimension = 2;
    x.base = base;
    for (std::size_t i = 0; i < forms.size(); ++i) {
        if (forms[i].a == std::array<Elem, 3>{0, 0, 0})
            fail(errc::degenerate_config, "zero linear form");
        for (std::size_t j = 0; j < i; ++j)
            if (proportional(base, forms[i], forms[j]))
                fail(errc::degenerate_config, "repeated line " + form_to_string(base, forms[i]));
        LineData ld;
        ld.form = forms[i];
        // canonical parametrization from the reduced kernel basis
        int pivot = 0;
        while (forms[i].a[pivot] == 0) ++pivot;
        std::vector<std::array<Elem, 3>> basis;
        for (int k = 0; k < 3; ++k) {
            if (k == pivot) continue;
            std::array<Elem, 3> v{0, 0, 0};
            v[k] = 1;
            v[pivot] = base.neg(base.div(forms[i].a[k], forms[i].a[pivot]));
            basis.push_back(v);
        }
        ld.A = basis[0];
        ld.B = basis[1];
        ld.id = "V(" + form_to_string(base, forms[i]) + ")";
        x.lines.push_back(ld);
    }
    // pairwise intersections, merged when several lines meet
    std::map<std::array<Elem, 3>, std::vector<int>> pts;
    for (std::size_t i = 0; i < x.lines.size(); ++i)
        for (std::size_t j = i + 1; j < x.lines.size(); ++j) {
            auto P = normalize_proj(base, cross(base, {x.lines[i].form.a[0], x.lines[i].form.a[1],
                                                       x.lines[i].form.a[2]},
                                                {x.lines[j].form.a[0], x.lines[j].form.a[1],
                                                 x.lines[j].form.a[2]}));
            pts[P];
        }
    for (auto& [P, on] : pts) {
        IntersectionPoint ip;
        ip.coords = P;
        ip.id = coords_to_string(base, P);
        for (std::size_t i = 0; i < x.lines.size(); ++i) {
            if (eval_form(base, x.lines[i].form, P) != 0) continue;
            auto t = line_parameter(base, x.lines[i], P);
            Place v = t ? gfield::finite_place(base, gfield::poly_from({base.neg(*t), 1}))
                        : gfield::infinite_place(base);
            ip.on_lines.emplace_back(static_cast<int>(i), v);
        }
        x.intersections.push_back(std::move(ip));
    }
    return x;
}

SchemeDescription builtin_disjoint_union(const std::vector<SchemeDescription>& parts) {
    if (parts.empty()) fail(errc::unsupported_scheme, "empty disjoint union");
    SchemeDescription x;
    x.kind = SchemeKind::disjoint_union;
    x.base = parts[0].base;
    x.dimension = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        x.dimension = std::max(x.dimension, parts[i].dimension);
        std::string prefix = "c" + std::to_string(i) + ".";
        for (int p = 0; p <= parts[i].dimension; ++p) {
            // unions only materialize explicitly enumerable parts
            if (parts[i].kind == SchemeKind::point || parts[i].kind == SchemeKind::line_config ||
                parts[i].kind == SchemeKind::abstract) {
                for (auto pt : points_of_codim(parts[i], p)) {
                    pt.id = prefix + pt.id;
                    pt.codim = p;
                    x.stored_points.push_back(pt);
                }
            } else if (p == 0) {
                SchemePoint pt;
                pt.id = prefix + generic_point_id();
                pt.codim = 0;
                pt.residue.ref = milnor::function_field_ref(parts[i].base);
                x.stored_points.push_back(pt);
            }
        }
    }
    return x;
}

std::vector<SchemePoint> points_of_codim(const SchemeDescription& x, int p,
                                         const SupportHint& hint) {
    std::vector<SchemePoint> out;
    if (p < 0 || p > x.dimension) return out;

    switch (x.kind) {
        case SchemeKind::point: return x.stored_points;

        case SchemeKind::affine_line:
        case SchemeKind::proj_line: {
            if (p == 0) {
                SchemePoint pt;
                pt.id = generic_point_id();
                pt.codim = 0;
                pt.residue.ref = milnor::function_field_ref(x.base);
                out.push_back(pt);
                return out;
            }
            if (hint.empty())
                fail(errc::need_support_hint,
                     "codimension-1 points of a curve form a lazy family; pass a support hint");
            std::map<gfield::PlaceKey, Place> places;
            for (const Poly& f : hint.polys) {
                if (f.zero()) continue;
                if (f.degree() < 1) continue;
                for (auto& [pi, m] : gfield::factor(x.base, f).factors) {
                    Place v = gfield::finite_place(x.base, pi);
                    if (x.removed.count(gfield::place_key(v))) continue;
                    places.emplace(gfield::place_key(v), v);
                }
            }
            std::vector<Place> sorted;
            for (auto& [k, v] : places) sorted.push_back(v);
            std::sort(sorted.begin(), sorted.end(), gfield::place_less);
            if (x.has_infinity) sorted.push_back(gfield::infinite_place(x.base));
            for (const Place& v : sorted) {
                SchemePoint pt;
                pt.id = place_point_id(v);
                pt.codim = 1;
                pt.residue.ref = milnor::finite_field_ref(gfield::residue_field(v));
                out.push_back(pt);
            }
            return out;
        }

        case SchemeKind::line_config: {
            if (p == 0) {
                SchemePoint pt;
                pt.id = generic_point_id();
                pt.codim = 0;
                pt.residue.formal = true;
                pt.residue.formal_base = x.base;
                pt.residue.vars = {"u", "v"};
                out.push_back(pt);
                return out;
            }
            if (p == 1) {
                for (const LineData& ld : x.lines) {
                    SchemePoint pt;
                    pt.id = ld.id;
                    pt.codim = 1;
                    pt.residue.ref = milnor::function_field_ref(x.base);
                    out.push_back(pt);
                }
                return out;
            }
            for (const IntersectionPoint& ip : x.intersections) {
                SchemePoint pt;
                pt.id = ip.id;
                pt.codim = 2;
                pt.residue.ref = milnor::finite_field_ref(x.base);
                out.push_back(pt);
            }
            return out;
        }

        case SchemeKind::disjoint_union:
        case SchemeKind::abstract: {
            for (const auto& pt : x.stored_points)
                if (pt.codim == p) out.push_back(pt);
            return out;
        }
    }
    return out;
}

bool specializes(const SchemeDescription& x, const std::string& from_id,
                 const std::string& to_id) {
    switch (x.kind) {
        case SchemeKind::point: return false;
        case SchemeKind::affine_line:
        case SchemeKind::proj_line:
            return from_id == generic_point_id() && to_id != generic_point_id();
        case SchemeKind::line_config: {
            if (from_id == generic_point_id()) return to_id != generic_point_id();
            for (const IntersectionPoint& ip : x.intersections) {
                if (ip.id != to_id) continue;
                for (auto& [li, v] : ip.on_lines)
                    if (x.lines[static_cast<std::size_t>(li)].id == from_id) return true;
            }
            return false;
        }
        default: {
            for (const auto& inc : x.stored_incidences)
                if (inc.x == from_id && inc.y == to_id) return true;
            return false;
        }
    }
}

std::vector<FiberComponent> fibers(const SchemeDescription& x, const std::string& from_id,
                                   const std::string& to_id) {
    std::vector<FiberComponent> out;
    switch (x.kind) {
        case SchemeKind::affine_line:
        case SchemeKind::proj_line: {
            if (from_id != generic_point_id()) return out;
            Place v = to_id == "inf"
                          ? gfield::infinite_place(x.base)
                          : gfield::place_from_key(
                                x.base, gfield::PlaceKey{});  // resolved by caller via id map
            fail(errc::internal, "curve fibers are resolved through places, not ids");
        }
        case SchemeKind::line_config: {
            for (const IntersectionPoint& ip : x.intersections) {
                if (ip.id != to_id) continue;
                for (auto& [li, v] : ip.on_lines) {
                    if (x.lines[static_cast<std::size_t>(li)].id != from_id) continue;
                    FiberComponent fc;
                    fc.t_place = v;
                    fc.t_field = gfield::residue_field(v);
                    fc.phi = gfield::canonical_hom(x.base, fc.t_field);
                    fc.uniformizer = v.infinite ? "1/t" : gfield::print_poly(x.base, v.pi, "t");
                    out.push_back(fc);
                }
                return out;
            }
            return out;
        }
        default: {
            for (const auto& inc : x.stored_incidences)
                if (inc.x == from_id && inc.y == to_id) return inc.fiber;
            if (x.kind == SchemeKind::abstract)
                fail(errc::missing_fiber, "no fiber data for " + from_id + " -> " + to_id);
            return out;
        }
    }
}

gfield::Poly restrict_form(const SchemeDescription& x, int line_index, const LinearForm& m) {
    const LineData& ld = x.lines.at(static_cast<std::size_t>(line_index));
    // m(A + tB) = m(A) + t m(B)
    Elem c0 = eval_form(x.base, m, ld.A);
    Elem c1 = eval_form(x.base, m, ld.B);
    return gfield::poly_from({c0, c1});
}

// ---- abstract descriptions ----

namespace {

nlohmann::json field_to_json(const FiniteField& f) {
    return nlohmann::json{{"p", f.p()}, {"e", f.e()}};
}

FiniteField field_from_json(const nlohmann::json& j) {
    if (!j.contains("p") || !j.contains("e")) fail(errc::schema, "field needs p and e");
    return gfield::canonical_field(j["p"].get<std::uint64_t>(), j["e"].get<unsigned>());
}

}  // namespace

std::string to_abstract_json(const SchemeDescription& x) {
    nlohmann::json doc;
    doc["dimension"] = x.dimension;
    doc["points"] = nlohmann::json::array();
    for (int p = 0; p <= x.dimension; ++p) {
        for (const auto& pt : points_of_codim(x, p)) {
            nlohmann::json jp;
            jp["id"] = pt.id;
            jp["codim"] = pt.codim;
            if (pt.residue.formal) {
                jp["residue_field"] = {{"function_field_over", field_to_json(pt.residue.formal_base)},
                                       {"vars", pt.residue.vars}};
            } else if (pt.residue.ref.function_field) {
                jp["residue_field"] = {{"function_field_over", field_to_json(pt.residue.ref.base)},
                                       {"vars", {pt.residue.ref.var}}};
            } else {
                jp["residue_field"] = field_to_json(pt.residue.ref.base);
            }
            doc["points"].push_back(jp);
        }
    }
    doc["incidences"] = nlohmann::json::array();
    auto add_incidence = [&](const std::string& xi, const std::string& yi,
                             const std::vector<FiberComponent>& fiber) {
        nlohmann::json ji;
        ji["x"] = xi;
        ji["y"] = yi;
        ji["fiber"] = nlohmann::json::array();
        for (const auto& fc : fiber) {
            nlohmann::json jf;
            jf["t_field"] = field_to_json(fc.t_field);
            jf["phi_t"] = "canonical";
            jf["uniformizer"] = fc.uniformizer;
            ji["fiber"].push_back(jf);
        }
        doc["incidences"].push_back(ji);
    };
    if (x.kind == SchemeKind::line_config) {
        for (const LineData& ld : x.lines) {
            // the generic incidence: valuation given by the line itself
            std::vector<FiberComponent> fiber;
            FiberComponent fc;
            fc.t_place = gfield::infinite_place(x.base);  // placeholder, descriptor carries it
            fc.t_field = x.base;
            fc.phi = gfield::identity_hom(x.base);
            fc.uniformizer = form_to_string(x.base, ld.form);
            fiber.push_back(fc);
            add_incidence(generic_point_id(), ld.id, fiber);
        }
        for (const IntersectionPoint& ip : x.intersections)
            for (auto& [li, v] : ip.on_lines)
                add_incidence(x.lines[static_cast<std::size_t>(li)].id, ip.id,
                              fibers(x, x.lines[static_cast<std::size_t>(li)].id, ip.id));
        nlohmann::json cfg;
        cfg["q"] = x.base.q();
        cfg["forms"] = nlohmann::json::array();
        for (const LineData& ld : x.lines)
            cfg["forms"].push_back(std::vector<std::uint64_t>{ld.form.a[0], ld.form.a[1], ld.form.a[2]});
        doc["line_config"] = cfg;
    } else {
        for (const auto& inc : x.stored_incidences) add_incidence(inc.x, inc.y, inc.fiber);
    }
    return doc.dump(2);
}

SchemeDescription load_abstract(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        fail(errc::schema, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.contains("dimension") || !doc.contains("points"))
        fail(errc::schema, "document needs dimension and points");
    if (!doc["points"].is_array() || doc["points"].empty())
        fail(errc::schema, "empty point set");

    SchemeDescription x;
    x.kind = SchemeKind::abstract;
    x.user_certified = true;
    x.dimension = doc["dimension"].get<int>();
    if (x.dimension < 0 || x.dimension > 2)
        fail(errc::schema, "dimension must be between 0 and 2");

    std::map<std::string, SchemePoint> by_id;
    for (const auto& jp : doc["points"]) {
        if (!jp.contains("id") || !jp.contains("codim") || !jp.contains("residue_field"))
            fail(errc::schema, "point needs id, codim, residue_field");
        SchemePoint pt;
        pt.id = jp["id"].get<std::string>();
        pt.codim = jp["codim"].get<int>();
        if (pt.codim < 0 || pt.codim > x.dimension)
            fail(errc::inconsistency, "codimension out of range for point " + pt.id);
        const auto& rf = jp["residue_field"];
        if (rf.contains("function_field_over")) {
            FiniteField base = field_from_json(rf["function_field_over"]);
            std::vector<std::string> vars = rf.value("vars", std::vector<std::string>{});
            if (vars.empty()) fail(errc::schema, "function field needs vars");
            if (vars.size() == 1) {
                pt.residue.ref = milnor::function_field_ref(base, vars[0]);
            } else {
                pt.residue.formal = true;
                pt.residue.formal_base = base;
                pt.residue.vars = vars;
            }
            if (pt.codim == 0 && static_cast<int>(vars.size()) != x.dimension)
                fail(errc::inconsistency,
                     "codimension-0 point must have transcendence degree " +
                         std::to_string(x.dimension));
        } else {
            pt.residue.ref = milnor::finite_field_ref(field_from_json(rf));
            if (pt.codim == 0 && x.dimension != 0)
                fail(errc::inconsistency, "codimension-0 point needs a function field");
        }
        if (by_id.count(pt.id)) fail(errc::schema, "duplicate point id " + pt.id);
        by_id[pt.id] = pt;
        x.stored_points.push_back(pt);
        if (x.stored_points[0].residue.formal)
            x.base = x.stored_points[0].residue.formal_base;
        else
            x.base = x.stored_points[0].residue.ref.base;
    }

    for (const auto& ji : doc.value("incidences", nlohmann::json::array())) {
        if (!ji.contains("x") || !ji.contains("y"))
            fail(errc::schema, "incidence needs x and y");
        StoredIncidence inc;
        inc.x = ji["x"].get<std::string>();
        inc.y = ji["y"].get<std::string>();
        inc.user_certified = true;
        auto ix = by_id.find(inc.x), iy = by_id.find(inc.y);
        if (ix == by_id.end() || iy == by_id.end())
            fail(errc::inconsistency, "incidence references unknown point");
        if (iy->second.codim != ix->second.codim + 1)
            fail(errc::inconsistency, "incidence must increase codimension by exactly 1");
        const SchemePoint& ypt = iy->second;
        for (const auto& jf : ji.value("fiber", nlohmann::json::array())) {
            if (!jf.contains("t_field")) fail(errc::schema, "fiber component needs t_field");
            FiberComponent fc;
            fc.t_field = field_from_json(jf["t_field"]);
            if (!ypt.residue.formal && !ypt.residue.ref.function_field) {
                const FiniteField& ky = ypt.residue.ref.base;
                if (ky.p() != fc.t_field.p() || fc.t_field.e() % ky.e() != 0)
                    fail(errc::inconsistency,
                         "kappa(t) does not extend kappa(y) in fiber over " + inc.y);
                fc.phi = gfield::canonical_hom(ky, fc.t_field);
            } else {
                fc.phi = gfield::identity_hom(fc.t_field);
            }
            fc.t_place = gfield::infinite_place(fc.t_field);  // descriptor-level placeholder
            fc.uniformizer = jf.value("uniformizer", std::string("(user-certified)"));
            inc.fiber.push_back(fc);
        }
        x.stored_incidences.push_back(inc);
    }

    // optional computational payload: rebuild and cross-check a line configuration
    if (doc.contains("line_config")) {
        const auto& cfg = doc["line_config"];
        std::uint64_t q = cfg["q"].get<std::uint64_t>();
        auto fac = gfield::factor_u64(q);
        if (fac.size() != 1) fail(errc::schema, "line_config q must be a prime power");
        FiniteField base = gfield::canonical_field(fac[0].first, fac[0].second);
        std::vector<LinearForm> forms;
        for (const auto& jf : cfg["forms"]) {
            LinearForm lf;
            for (int i = 0; i < 3; ++i) lf.a[static_cast<std::size_t>(i)] = jf[i].get<Elem>();
            forms.push_back(lf);
        }
        SchemeDescription rebuilt = builtin_line_config(base, forms);
        rebuilt.user_certified = false;
        // claimed points must match the recomputed configuration
        for (int p = 1; p <= 2; ++p) {
            auto claimed = points_of_codim(x, p);
            auto actual = points_of_codim(rebuilt, p);
            if (claimed.size() != actual.size())
                fail(errc::inconsistency, "line_config payload disagrees with the point list");
        }
        return rebuilt;
    }
    return x;
}

}  // namespace gersten::schememod
