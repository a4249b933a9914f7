#include "gersten/cyclecx.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "gersten/error.hpp"

namespace gersten::cyclecx {

using abgroup::AbHom;
using abgroup::FgAbGroup;
using abgroup::IntMat;
using cyclemod::CycleModuleInstance;
using gfield::Elem;
using gfield::FiniteField;
using gfield::Place;
using gfield::RatFunc;
using milnor::FieldRef;
using milnor::MilnorElement;
using schememod::SchemeDescription;
using schememod::SchemeKind;

bool CycleChain::is_zero() const {
    for (const auto& [id, x] : components)
        if (!cyclemod::is_zero_mod(phi, x)) return false;
    return true;
}

CycleChain zero_chain(std::shared_ptr<const SchemeDescription> scheme, CycleModuleInstance phi,
                      int p, int i) {
    CycleChain c;
    c.scheme = std::move(scheme);
    c.phi = std::move(phi);
    c.p = p;
    c.i = i;
    return c;
}

void set_component(CycleChain& c, const std::string& id, MilnorElement value) {
    if (cyclemod::is_zero_mod(c.phi, value)) {
        c.components.erase(id);
        return;
    }
    c.components[id] = std::move(value);
}

void set_place_component(CycleChain& c, const Place& v, MilnorElement value) {
    std::string id = schememod::place_point_id(v);
    c.places[id] = v;
    set_component(c, id, std::move(value));
}

CycleChain add(const CycleChain& a, const CycleChain& b) {
    if (a.p != b.p || a.i != b.i) fail(errc::field_mismatch, "adding incompatible chains");
    CycleChain out = a;
    for (const auto& [id, x] : b.components) {
        auto it = out.components.find(id);
        if (it == out.components.end()) {
            out.components[id] = x;
        } else {
            it->second = milnor::add(it->second, x);
            if (cyclemod::is_zero_mod(out.phi, it->second)) out.components.erase(it);
        }
    }
    for (const auto& [id, v] : b.places) out.places.emplace(id, v);
    return out;
}

CycleChain scale(const CycleChain& a, const mpz_class& n) {
    CycleChain out = a;
    for (auto it = out.components.begin(); it != out.components.end();) {
        it->second = milnor::scale(it->second, n);
        it = cyclemod::is_zero_mod(out.phi, it->second) ? out.components.erase(it)
                                                        : std::next(it);
    }
    return out;
}

bool equal(const CycleChain& a, const CycleChain& b) {
    if (a.p != b.p || a.i != b.i) return false;
    CycleChain diff = add(a, scale(b, -1));
    return diff.is_zero();
}

namespace {

MilnorElement fiber_value(const CycleModuleInstance& phi,
                          const std::vector<schememod::FiberComponent>& fiber,
                          const FiniteField& kappa_y, const MilnorElement& xi) {
    MilnorElement acc = milnor::zero_element(milnor::finite_field_ref(kappa_y), xi.degree - 1);
    for (const auto& fc : fiber) {
        MilnorElement r = phi.residue(fc.t_place, xi);
        // N_{kappa(t)/kappa(y)} back along phi_t
        MilnorElement n = phi.norm_map(milnor::extension_from_hom(fc.phi), r);
        acc = milnor::add(acc, n);
    }
    return acc;
}

int line_index_of(const SchemeDescription& X, const std::string& id) {
    for (std::size_t i = 0; i < X.lines.size(); ++i)
        if (X.lines[i].id == id) return static_cast<int>(i);
    return -1;
}

}  // namespace

FgAbGroup evaluate_point(const CycleModuleInstance& phi, const schememod::SchemePoint& x,
                         int n) {
    if (x.residue.formal)
        fail(errc::unsupported_field,
             "residue field of " + x.id + " has transcendence degree >= 2");
    auto d = cyclemod::evaluate(phi, x.residue.ref, n);
    if (!d.materialized)
        fail(errc::unsupported_field,
             "the group at " + x.id + " is not finitely generated; use the structural shape");
    return d.group;
}

MilnorElement point_differential(const SchemeDescription& X, const CycleModuleInstance& phi,
                                 const std::string& x_id, const std::string& y_id,
                                 const MilnorElement& xi,
                                 const std::optional<Place>& y_place) {
    // curves: the fiber over a place is the place itself
    if (X.kind == SchemeKind::affine_line || X.kind == SchemeKind::proj_line) {
        if (x_id != schememod::generic_point_id())
            fail(errc::unsupported_scheme, "curves have differentials out of the generic point only");
        Place v = y_place ? *y_place
                          : (y_id == "inf" ? gfield::infinite_place(X.base)
                                           : throw error(errc::need_support_hint,
                                                         "pass the place of " + y_id));
        if (v.infinite && !X.has_infinity)
            fail(errc::unsupported_scheme, "the affine line has no point at infinity");
        if (X.removed.count(gfield::place_key(v)))
            fail(errc::unsupported_scheme, "place was removed from the curve");
        return phi.residue(v, xi);
    }
    if (X.kind == SchemeKind::line_config) {
        int li = line_index_of(X, x_id);
        if (li < 0) fail(errc::unsupported_scheme, "unknown line " + x_id);
        if (!schememod::specializes(X, x_id, y_id))
            return milnor::zero_element(milnor::finite_field_ref(X.base), xi.degree - 1);
        auto fiber = schememod::fibers(X, x_id, y_id);
        return fiber_value(phi, fiber, X.base, xi);
    }
    if (X.kind == SchemeKind::abstract)
        fail(errc::missing_fiber, "abstract schemes carry user-certified fibers only");
    fail(errc::unsupported_scheme, "no differentials on this scheme");
}

CycleChain differential(const CycleChain& c) {
    const SchemeDescription& X = *c.scheme;
    CycleChain out = zero_chain(c.scheme, c.phi, c.p + 1, c.i);

    if (X.kind == SchemeKind::point) return out;

    if (X.kind == SchemeKind::affine_line || X.kind == SchemeKind::proj_line) {
        if (c.p != 0) return out;  // closed points are top codimension
        auto it = c.components.find(schememod::generic_point_id());
        if (it == c.components.end()) return out;
        const MilnorElement& xi = it->second;
        for (const Place& v : milnor::support_places(xi)) {
            if (X.removed.count(gfield::place_key(v))) continue;
            set_place_component(out, v, c.phi.residue(v, xi));
        }
        if (X.has_infinity)
            set_place_component(out, gfield::infinite_place(X.base),
                                c.phi.residue(gfield::infinite_place(X.base), xi));
        return out;
    }

    if (X.kind == SchemeKind::line_config) {
        if (c.p != 1) {
            if (c.p >= 2) return out;
            fail(errc::need_support_hint,
                 "generic chains on a configuration go through d0_line_config");
        }
        for (const auto& [line_id, xi] : c.components) {
            int li = line_index_of(X, line_id);
            if (li < 0) fail(errc::unsupported_scheme, "unknown line " + line_id);
            // parameter places of the stored points on this line
            std::map<gfield::PlaceKey, std::string> targets;
            for (const auto& ip : X.intersections)
                for (const auto& [lj, v] : ip.on_lines)
                    if (lj == li) targets.emplace(gfield::place_key(v), ip.id);
            std::vector<Place> supp = milnor::support_places(xi);
            supp.push_back(gfield::infinite_place(X.base));
            for (const Place& v : supp) {
                MilnorElement r = c.phi.residue(v, xi);
                if (cyclemod::is_zero_mod(c.phi, r)) continue;
                auto tgt = targets.find(gfield::place_key(v));
                if (tgt == targets.end())
                    fail(errc::need_support_hint,
                         "chain support leaves the stored points of the configuration at " +
                             schememod::place_point_id(v) + " on " + line_id);
                auto cur = out.components.find(tgt->second);
                MilnorElement val = cur == out.components.end()
                                        ? r
                                        : milnor::add(cur->second, r);
                if (cyclemod::is_zero_mod(c.phi, val))
                    out.components.erase(tgt->second);
                else
                    out.components[tgt->second] = val;
            }
        }
        return out;
    }

    fail(errc::missing_fiber, "differentials on abstract schemes need certified fiber data");
}

namespace {

RatFunc restrict_monomial(const SchemeDescription& X, int line, const FormMonomial& mono,
                          int drop_exponent_of_line) {
    const FiniteField& F = X.base;
    RatFunc out = gfield::rat_from_poly(gfield::poly_constant(mono.scalar));
    for (const auto& [j, e] : mono.exps) {
        if (j == drop_exponent_of_line) continue;
        gfield::Poly rest = schememod::restrict_form(X, line, X.lines[static_cast<std::size_t>(j)].form);
        if (rest.zero()) fail(errc::internal, "restriction of a distinct line vanished");
        out = gfield::rat_mul(F, out, gfield::rat_pow(F, gfield::rat_from_poly(rest), e));
    }
    return out;
}

void check_homogeneous(const P2Symbol& xi) {
    for (const auto& m : xi.entries) {
        long total = 0;
        for (const auto& [j, e] : m.exps) total += e;
        if (total != 0)
            fail(errc::inconsistency, "symbol entries must be homogeneous of degree zero");
        if (m.scalar == 0) fail(errc::zero_entry, "zero entry in a symbol");
    }
}

}  // namespace

CycleChain d0_line_config(std::shared_ptr<const SchemeDescription> scheme,
                          const CycleModuleInstance& phi, const P2Symbol& xi) {
    const SchemeDescription& X = *scheme;
    if (X.kind != SchemeKind::line_config)
        fail(errc::unsupported_scheme, "generic symbols live on line configurations");
    if (xi.entries.size() != 2)
        fail(errc::unsupported_scheme, "only degree-2 generic symbols are supported");
    check_homogeneous(xi);
    const FormMonomial& a = xi.entries[0];
    const FormMonomial& b = xi.entries[1];
    CycleChain out = zero_chain(scheme, phi, 1, 2);
    const FiniteField& F = X.base;
    for (std::size_t j = 0; j < X.lines.size(); ++j) {
        int lj = static_cast<int>(j);
        auto exp_of = [&](const FormMonomial& m) {
            auto it = m.exps.find(lj);
            return it == m.exps.end() ? 0 : it->second;
        };
        int va = exp_of(a), vb = exp_of(b);
        if (va == 0 && vb == 0) continue;
        // tau = (-1)^{va vb} b^{va} a^{-vb}, a unit along the line
        FormMonomial tau;
        tau.scalar = F.mul(F.pow(b.scalar, mpz_class(va)), F.pow(a.scalar, mpz_class(-vb)));
        if ((va & 1) && (vb & 1)) tau.scalar = F.neg(tau.scalar);
        for (const auto& [k, e] : b.exps) tau.exps[k] += va * e;
        for (const auto& [k, e] : a.exps) tau.exps[k] -= vb * e;
        if (tau.exps[lj] != 0) fail(errc::internal, "residue monomial is not a unit on the line");
        RatFunc restricted = restrict_monomial(X, lj, tau, lj);
        MilnorElement val =
            milnor::normalize(milnor::Symbol{milnor::function_field_ref(F), {restricted}});
        if (!cyclemod::is_zero_mod(phi, val)) out.components[X.lines[j].id] = val;
    }
    return out;
}

SquareZeroLedger check_square_zero_symbol(std::shared_ptr<const SchemeDescription> X,
                                          const CycleModuleInstance& phi, const P2Symbol& xi) {
    SquareZeroLedger ledger;
    CycleChain c1 = d0_line_config(X, phi, xi);
    for (const auto& [line, val] : c1.components)
        ledger.lines.push_back("d0 at " + line + ": " + milnor::print_element(val));
    CycleChain c2 = differential(c1);
    for (const auto& [pt, val] : c2.components)
        ledger.lines.push_back("d1 residue at " + pt + ": " + milnor::print_element(val));
    ledger.zero = c2.is_zero();
    return ledger;
}

cyclemod::Report check_square_zero(std::shared_ptr<const SchemeDescription> X, unsigned samples,
                                   std::uint64_t seed) {
    const SchemeDescription& S = *X;
    if (S.dimension != 2) fail(errc::unsupported_dimension, "square-zero checks need dimension 2");
    if (S.kind != SchemeKind::line_config)
        fail(errc::unsupported_scheme,
             "square-zero checks run on line configurations (load abstract schemes with a "
             "line_config payload)");
    cyclemod::Report rep;
    cyclemod::CheckEntry e{"square_zero", samples, {}};
    std::mt19937_64 rng(seed);
    auto phi = cyclemod::km_instance();
    const std::size_t L = S.lines.size();
    for (unsigned s = 0; s < samples; ++s) {
        P2Symbol xi;
        for (int entry = 0; entry < 2; ++entry) {
            FormMonomial m;
            m.scalar = 1 + rng() % (S.base.q() - 1);
            long total = 0;
            for (std::size_t j = 0; j + 1 < L; ++j) {
                int ej = static_cast<int>(rng() % 5) - 2;
                if (ej) m.exps[static_cast<int>(j)] = ej;
                total += ej;
            }
            if (total) m.exps[static_cast<int>(L - 1)] = static_cast<int>(-total);
            xi.entries.push_back(std::move(m));
        }
        auto ledger = check_square_zero_symbol(X, phi, xi);
        if (!ledger.zero) {
            std::ostringstream os;
            os << "sample " << s << ": nonzero composite;";
            for (const auto& l : ledger.lines) os << " | " << l;
            e.failures.push_back(os.str());
        }
    }
    rep.entries.push_back(std::move(e));
    return rep;
}

// ---- Chow groups with coefficients ----

namespace {

FgAbGroup coeff_group(const CycleModuleInstance& phi, const FiniteField& f, int n) {
    auto d = cyclemod::evaluate(phi, milnor::finite_field_ref(f), n);
    return d.group;
}

// the norm-sum class map on closed-point chains of P^1 / A^1: lands in
// phi_{i-1}(F_q)
MilnorElement norm_sum(const CycleChain& z) {
    const SchemeDescription& X = *z.scheme;
    FieldRef fq = milnor::finite_field_ref(X.base);
    MilnorElement acc = milnor::zero_element(fq, z.i - 1);
    for (const auto& [id, val] : z.components) {
        auto it = z.places.find(id);
        if (it == z.places.end()) fail(errc::need_support_hint, "component without a place: " + id);
        FiniteField kappa = gfield::residue_field(it->second);
        auto ext = milnor::canonical_extension(fq, milnor::finite_field_ref(kappa));
        acc = milnor::add(acc, z.phi.norm_map(ext, val));
    }
    return acc;
}

std::optional<MilnorElement> curve_witness(const CycleModuleInstance& phi,
                                           const CycleChain& z) {
    const SchemeDescription& X = *z.scheme;
    FieldRef ft = milnor::function_field_ref(X.base);
    const int i = z.i;
    // outside grading 1..2 the target groups vanish, so zero is a witness
    if (i < 1 || i > 2) return milnor::zero_element(ft, i);
    MilnorElement x = milnor::zero_element(ft, i);
    MilnorElement z_inf = milnor::zero_element(milnor::finite_field_ref(X.base), i - 1);
    for (const auto& [id, val] : z.components) {
        auto it = z.places.find(id);
        if (it == z.places.end()) fail(errc::need_support_hint, "component without a place: " + id);
        const Place& v = it->second;
        if (v.infinite) {
            z_inf = val;
            continue;
        }
        if (i == 1 && val.z != 0)
            x.val_res[gfield::place_key(v)] = val.z;
        else if (i == 2 && val.u)
            x.unit_res[gfield::place_key(v)] = val.u;
    }
    if (!X.has_infinity) return x;

    MilnorElement dx_inf = milnor::tame_symbol(gfield::infinite_place(X.base), x);
    MilnorElement mismatch = milnor::sub(z_inf, dx_inf);
    if (mismatch.is_zero()) return x;
    if (phi.ell == 0) return std::nullopt;

    // mod l: absorb the mismatch at an auxiliary rational place; the added
    // residue is divisible by l, so the boundary matches z mod l
    mpz_class ell(phi.ell);
    Place aux = gfield::finite_place(X.base, gfield::poly_x(X.base));
    if (i == 1) {
        if (mismatch.z % ell != 0) return std::nullopt;
        auto key = gfield::place_key(aux);
        x.val_res[key] += -mismatch.z;
        if (x.val_res[key] == 0) x.val_res.erase(key);
    } else {
        std::uint64_t order = X.base.q() - 1;
        mpz_class m(static_cast<unsigned long>(mismatch.u));
        // solve l*s = -m in Z/(q-1)
        mpz_class g = gcd(ell, mpz_class(static_cast<unsigned long>(order)));
        if (m % g != 0) return std::nullopt;
        mpz_class ellg = ell / g, ordg = mpz_class(static_cast<unsigned long>(order)) / g;
        mpz_class inv;
        if (ordg == 1)
            inv = 0;
        else if (mpz_invert(inv.get_mpz_t(), ellg.get_mpz_t(), ordg.get_mpz_t()) == 0)
            return std::nullopt;
        mpz_class s = ((-(m / g) * inv) % ordg + ordg) % ordg;
        mpz_class shift = (ell * s) % mpz_class(static_cast<unsigned long>(order));
        std::uint64_t cur = 0;
        auto it = x.unit_res.find(gfield::place_key(aux));
        if (it != x.unit_res.end()) cur = it->second;
        std::uint64_t next = (cur + shift.get_ui()) % order;
        if (next == 0)
            x.unit_res.erase(gfield::place_key(aux));
        else
            x.unit_res[gfield::place_key(aux)] = next;
    }
    // re-verify before handing the witness out
    MilnorElement check = milnor::tame_symbol(gfield::infinite_place(X.base), x);
    if (!cyclemod::equal_mod(phi, check, z_inf)) return std::nullopt;
    return x;
}

}  // namespace

ChowResult chow(std::shared_ptr<const SchemeDescription> X, const CycleModuleInstance& phi, int p,
                int i, const schememod::SupportHint& bound) {
    const SchemeDescription& S = *X;
    ChowResult out;
    out.p = p;
    out.i = i;

    if (S.kind == SchemeKind::point) {
        if (p == 0) {
            out.group = coeff_group(phi, S.base, i);
            out.note = "phi_" + std::to_string(i) + " of the point";
        }
        return out;
    }

    if (S.kind == SchemeKind::affine_line || S.kind == SchemeKind::proj_line) {
        if (p == 0) {
            // kernel of the divisor map: constants, plus the puncture lattice
            out.group = coeff_group(phi, S.base, i);
            out.note = "constants";
            for (const auto& key : S.removed) {
                Place v = gfield::place_from_key(S.base, key);
                out.group = FgAbGroup::direct_sum(
                    out.group, coeff_group(phi, gfield::residue_field(v), i - 1));
                out.note = "constants and units along the punctures";
            }
            return out;
        }
        if (p != 1) return out;
        if (!S.removed.empty())
            fail(errc::unsupported_scheme, "exact A^1 on punctured lines is not provided");
        if (S.has_infinity) {
            out.group = coeff_group(phi, S.base, i - 1);
            out.note = i == 1 ? "degree map" : "sum of norms";
            // generator: the least rational point with unit coefficient
            if (!out.group.trivial()) {
                CycleChain gen = zero_chain(X, phi, 1, i);
                Place v = gfield::finite_place(S.base, gfield::poly_x(S.base));
                FieldRef kappa = milnor::finite_field_ref(S.base);
                set_place_component(gen, v,
                                    i == 1 ? milnor::k0_element(kappa, 1)
                                           : milnor::k1_element(kappa, 1));
                out.generators.push_back(std::move(gen));
            }
        } else {
            out.group = FgAbGroup();
            out.note = "every divisor is principal";
        }
        CycleModuleInstance phi_copy = phi;
        out.witness = [phi_copy](const CycleChain& z) { return curve_witness(phi_copy, z); };
        out.class_of = [phi_copy](const CycleChain& z) {
            MilnorElement cls = norm_sum(z);
            cls = cyclemod::reduce_element(phi_copy, cls);
            std::vector<mpz_class> out_coords;
            if (z.i - 1 == 0)
                out_coords.push_back(cls.z);
            else if (z.i - 1 == 1)
                out_coords.push_back(mpz_class(static_cast<unsigned long>(cls.u)));
            return out_coords;
        };
        return out;
    }

    if (S.kind == SchemeKind::line_config) {
        if (p < 2 || i != 2)
            fail(errc::unsupported_dimension,
                 "exact Chow groups on dimension-2 schemes are not provided; "
                 "the support-bounded mode covers p = 2, i = 2 only");
        // support-bounded approximation of A^2(X)_2: cokernel of the bounded
        // d^1 from line chains into the stored points
        out.exact = false;
        out.note = "approximate (support-bounded)";
        std::size_t npts = S.intersections.size();
        std::map<std::string, std::size_t> pt_index;
        for (std::size_t k = 0; k < npts; ++k) pt_index[S.intersections[k].id] = k;
        std::vector<std::vector<mpz_class>> image_cols;
        for (std::size_t li = 0; li < S.lines.size(); ++li) {
            // bounded generators of K_1 on the line: functions with divisor
            // supported on the stored parameter places
            std::vector<Place> params;
            for (const auto& ip : S.intersections)
                for (const auto& [lj, v] : ip.on_lines)
                    if (lj == static_cast<int>(li) && !v.infinite) params.push_back(v);
            for (const Place& v : params) {
                CycleChain c = zero_chain(X, phi, 1, 2);
                MilnorElement gen = milnor::zero_element(milnor::function_field_ref(S.base), 1);
                gen.val_res[gfield::place_key(v)] = 1;
                c.components[S.lines[li].id] = gen;
                CycleChain dd = differential(c);
                std::vector<mpz_class> col(npts, 0);
                for (const auto& [id, val] : dd.components) col[pt_index.at(id)] = val.z;
                image_cols.push_back(std::move(col));
            }
        }
        IntMat rel = image_cols.empty() ? IntMat(npts, 0) : IntMat::from_cols(image_cols);
        out.group = FgAbGroup::quotient_of_free(npts, rel);
        if (phi.ell) {
            IntMat lrel(npts, npts);
            for (std::size_t k = 0; k < npts; ++k) lrel.at(k, k) = phi.ell;
            out.group = FgAbGroup::quotient_of_free(npts, rel.hcat(lrel));
        }
        (void)bound;
        return out;
    }

    fail(errc::unsupported_scheme, "chow is not defined on this scheme");
}

FgAbGroup unramified(const SchemeDescription& X, const CycleModuleInstance& phi, int i) {
    if (X.kind == SchemeKind::point) return coeff_group(phi, X.base, i);
    if (X.kind == SchemeKind::proj_line) return coeff_group(phi, X.base, i);
    fail(errc::unsupported_scheme,
         "unramified groups are computed exactly for proper built-ins (point, P^1)");
}

CycleChain pushforward_to_point(const CycleChain& c) {
    const SchemeDescription& X = *c.scheme;
    bool proper = X.kind == SchemeKind::point || X.kind == SchemeKind::proj_line ||
                  X.kind == SchemeKind::line_config;
    if (!proper) fail(errc::unsupported_morphism, "pushforward needs a proper scheme");
    int top = X.dimension;
    if (c.p != top)
        fail(errc::unsupported_morphism, "pushforward needs closed-point support");
    auto point = std::make_shared<SchemeDescription>(schememod::builtin_point(X.base));
    CycleChain out = zero_chain(point, c.phi, 0, c.i - top);
    FieldRef fq = milnor::finite_field_ref(X.base);
    MilnorElement acc = milnor::zero_element(fq, c.i - top);
    for (const auto& [id, val] : c.components) {
        FiniteField kappa = X.base;
        if (X.kind == SchemeKind::proj_line) {
            auto it = c.places.find(id);
            if (it == c.places.end())
                fail(errc::need_support_hint, "component without a place: " + id);
            kappa = gfield::residue_field(it->second);
        }
        auto ext = milnor::canonical_extension(fq, milnor::finite_field_ref(kappa));
        acc = milnor::add(acc, c.phi.norm_map(ext, val));
    }
    set_component(out, schememod::generic_point_id(), acc);
    return out;
}

CycleChain pullback_structure(std::shared_ptr<const SchemeDescription> curve,
                              const CycleChain& on_point) {
    const SchemeDescription& X = *on_point.scheme;
    if (X.kind != SchemeKind::point || on_point.p != 0)
        fail(errc::unsupported_morphism, "structure pullback starts from a point chain");
    const SchemeDescription& C = *curve;
    if (C.kind != SchemeKind::affine_line && C.kind != SchemeKind::proj_line)
        fail(errc::unsupported_morphism, "structure pullback lands on a built-in curve");
    if (C.base != X.base) fail(errc::unsupported_morphism, "base fields differ");
    CycleChain out = zero_chain(curve, on_point.phi, 0, on_point.i);
    auto it = on_point.components.find(schememod::generic_point_id());
    if (it == on_point.components.end()) return out;
    auto ext = milnor::canonical_extension(milnor::finite_field_ref(X.base),
                                           milnor::function_field_ref(C.base));
    set_component(out, schememod::generic_point_id(), on_point.phi.corestrict(ext, it->second));
    return out;
}

CycleChain pullback_open(std::shared_ptr<const SchemeDescription> smaller, const CycleChain& c) {
    const SchemeDescription& big = *c.scheme;
    const SchemeDescription& small = *smaller;
    bool big_curve = big.kind == SchemeKind::affine_line || big.kind == SchemeKind::proj_line;
    bool small_curve = small.kind == SchemeKind::affine_line;
    if (!big_curve || !small_curve || big.base != small.base)
        fail(errc::unsupported_morphism, "open immersions between built-in curves only");
    if (!std::includes(small.removed.begin(), small.removed.end(), big.removed.begin(),
                       big.removed.end()))
        fail(errc::unsupported_morphism, "not an open immersion");
    CycleChain out = zero_chain(smaller, c.phi, c.p, c.i);
    if (c.p == 0) {
        out.components = c.components;  // restriction of the generic component
        return out;
    }
    for (const auto& [id, val] : c.components) {
        auto it = c.places.find(id);
        if (it == c.places.end()) fail(errc::need_support_hint, "component without a place");
        const Place& v = it->second;
        if (v.infinite) continue;  // dropped with the point at infinity
        if (small.removed.count(gfield::place_key(v))) continue;
        set_place_component(out, v, val);
    }
    return out;
}

CycleChain ch_action(const CycleChain& zero_cycle, const CycleChain& c) {
    const SchemeDescription& X = *c.scheme;
    if (X.kind != SchemeKind::affine_line && X.kind != SchemeKind::proj_line)
        fail(errc::unsupported_scheme, "the CH^* action is provided on built-in curves");
    if (zero_cycle.p != 1 || zero_cycle.i != 1)
        fail(errc::unsupported_scheme, "the acting cycle must be a K_0-valued 0-cycle");
    auto it = c.components.find(schememod::generic_point_id());
    if (c.p != 0 || it == c.components.end())
        fail(errc::unsupported_scheme, "the action is computed against generic-point chains");
    const MilnorElement& x = it->second;
    const FiniteField& F = X.base;
    milnor::FieldRef ft = milnor::function_field_ref(F);
    CycleChain out = zero_chain(c.scheme, c.phi, 1, c.i + 1);
    for (const auto& [id, coeff] : zero_cycle.components) {
        auto vp = zero_cycle.places.find(id);
        if (vp == zero_cycle.places.end())
            fail(errc::need_support_hint, "acting cycle component without a place");
        const Place& v = vp->second;
        RatFunc pi = v.infinite
                         ? gfield::rat_div(F, gfield::rat_one(),
                                           gfield::rat_from_poly(gfield::poly_x(F)))
                         : gfield::rat_from_poly(v.pi);
        MilnorElement prod = c.phi.action(milnor::Symbol{ft, {pi}}, x);
        MilnorElement res = c.phi.residue(v, prod);
        set_place_component(out, v, milnor::scale(res, coeff.z));
    }
    return out;
}

BoundedComplex bounded_gersten_complex(const SchemeDescription& X,
                                       const CycleModuleInstance& phi, int n,
                                       const std::vector<Place>& support) {
    if (phi.ell)
        fail(errc::unsupported_realization, "the bounded Gersten row is integral K^M");
    if (X.kind != SchemeKind::affine_line && X.kind != SchemeKind::proj_line &&
        X.kind != SchemeKind::point)
        fail(errc::unsupported_scheme, "bounded rows for point, A^1, P^1 only");
    if (n < 0 || n > 1) fail(errc::unsupported_realization, "weights 0 and 1 only");

    BoundedComplex out;
    if (X.kind == SchemeKind::point) {
        out.c0 = coeff_group(phi, X.base, n);
        out.c1 = FgAbGroup();
        out.d = AbHom::zero(out.c0, out.c1);
        return out;
    }

    std::vector<Place> sorted = support;
    std::sort(sorted.begin(), sorted.end(), gfield::place_less);
    sorted.erase(std::unique(sorted.begin(), sorted.end(),
                             [](const Place& a, const Place& b) { return gfield::place_equal(a, b); }),
                 sorted.end());
    for (const Place& v : sorted)
        if (v.infinite) fail(errc::need_support_hint, "support bounds list finite places");
    out.support = sorted;
    out.columns = sorted;
    if (X.has_infinity) out.columns.push_back(gfield::infinite_place(X.base));

    if (n == 0) {
        out.c0 = FgAbGroup::free(1);
        out.c1 = FgAbGroup();
        out.columns.clear();
        out.d = AbHom::zero(out.c0, out.c1);
        return out;
    }

    // C^0: units with divisor supported in S; coordinates [dlog const; e_pi]
    mpz_class torsion_order(static_cast<unsigned long>(X.base.q() - 1));
    FgAbGroup c0 = FgAbGroup::direct_sum(FgAbGroup::cyclic(torsion_order),
                                         FgAbGroup::free(sorted.size()));
    FgAbGroup c1 = FgAbGroup::free(out.columns.size());
    std::vector<std::string> labels0, labels1;
    if (c0.torsion_count()) labels0.push_back("const");
    for (const Place& v : sorted) labels0.push_back(schememod::place_point_id(v));
    for (const Place& v : out.columns) labels1.push_back(schememod::place_point_id(v));
    c0.set_labels(std::move(labels0));
    c1.set_labels(std::move(labels1));
    IntMat d(c1.dim(), c0.dim());
    std::size_t const_coords = c0.torsion_count();  // 0 when q = 2
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        d.at(j, const_coords + j) = 1;  // valuation at its own place
        if (X.has_infinity)
            d.at(out.columns.size() - 1, const_coords + j) =
                -static_cast<long>(sorted[j].degree());
    }
    out.c0 = c0;
    out.c1 = c1;
    out.d = AbHom(c0, c1, d);
    return out;
}

}  // namespace gersten::cyclecx
