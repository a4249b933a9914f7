#include "gersten/cyclemod.hpp"

#include <random>
#include <sstream>

#include "gersten/error.hpp"
#include "json.hpp"

namespace gersten::cyclemod {

using abgroup::FgAbGroup;
using gfield::Elem;
using gfield::FiniteField;
using gfield::Place;
using gfield::RatFunc;
using milnor::Extension;
using milnor::FieldRef;
using milnor::MilnorElement;
using milnor::Symbol;

namespace {

void assert_degree(int got, int want, const char* what) {
    if (got != want) fail(errc::internal, std::string(what) + ": degree bookkeeping violated");
}

}  // namespace

CycleModuleInstance km_instance() {
    CycleModuleInstance m;
    m.name = "KM";
    m.ell = 0;
    m.offset = 0;
    m.residue = [](const Place& v, const MilnorElement& x) {
        MilnorElement r = milnor::tame_symbol(v, x);
        assert_degree(r.degree, x.degree - 1, "residue");
        return r;
    };
    m.corestrict = [](const Extension& e, const MilnorElement& x) {
        MilnorElement r = milnor::corestriction(e, x);
        assert_degree(r.degree, x.degree, "corestriction");
        return r;
    };
    m.norm_map = [](const Extension& e, const MilnorElement& x) {
        MilnorElement r = milnor::norm(e, x);
        assert_degree(r.degree, x.degree, "norm");
        return r;
    };
    m.action = [](const Symbol& s, const MilnorElement& x) {
        MilnorElement r = milnor::km_action(s, x);
        assert_degree(r.degree, x.degree + static_cast<int>(s.entries.size()), "action");
        return r;
    };
    return m;
}

CycleModuleInstance km_mod_instance(unsigned ell) {
    if (ell < 2) fail(errc::internal, "mod-l reduction needs l >= 2");
    CycleModuleInstance m = km_instance();
    m.name = "KM/" + std::to_string(ell);
    m.ell = ell;
    return m;
}

namespace {

FgAbGroup finite_group(const CycleModuleInstance& m, const FiniteField& f, int n) {
    mpz_class ell(m.ell);
    if (n < 0 || n >= 2) return FgAbGroup();
    if (n == 0) return m.ell ? FgAbGroup::cyclic(ell) : FgAbGroup::free(1);
    mpz_class order(static_cast<unsigned long>(f.q() - 1));
    if (m.ell) order = gcd(order, ell);
    return FgAbGroup::cyclic(order);
}

}  // namespace

GroupDescriptor evaluate(const CycleModuleInstance& m, const FieldRef& f, int n) {
    GroupDescriptor d;
    if (!f.function_field) {
        d.materialized = true;
        d.group = finite_group(m, f.base, n);
        return d;
    }
    d.materialized = false;
    d.shape.constant_part = finite_group(m, f.base, n);
    std::ostringstream os;
    os << "K_" << n << "(" << milnor::field_name(f) << ") = K_" << n << "(F" << f.base.q()
       << ") + sum over monic irreducible places of K_" << (n - 1) << "(kappa)";
    if (m.ell) os << " mod " << m.ell;
    d.shape.family = os.str();
    CycleModuleInstance copy = m;
    d.shape.place_part = [copy, n](const Place& v) {
        return finite_group(copy, gfield::residue_field(v), n - 1);
    };
    return d;
}

MilnorElement reduce_element(const CycleModuleInstance& m, MilnorElement x) {
    if (m.ell == 0) return x;
    mpz_class ell(m.ell);
    auto reduce_unit = [&](std::uint64_t u, std::uint64_t order) {
        std::uint64_t g =
            mpz_class(gcd(mpz_class(static_cast<unsigned long>(order)), ell)).get_ui();
        return g ? u % g : u;
    };
    x.z = ((x.z % ell) + ell) % ell;
    x.u = reduce_unit(x.u, x.field.base.q() - 1);
    for (auto it = x.val_res.begin(); it != x.val_res.end();) {
        it->second = ((it->second % ell) + ell) % ell;
        it = it->second == 0 ? x.val_res.erase(it) : std::next(it);
    }
    for (auto it = x.unit_res.begin(); it != x.unit_res.end();) {
        Place v = gfield::place_from_key(x.field.base, it->first);
        it->second = reduce_unit(it->second, gfield::residue_field(v).q() - 1);
        it = it->second == 0 ? x.unit_res.erase(it) : std::next(it);
    }
    return x;
}

bool equal_mod(const CycleModuleInstance& m, const MilnorElement& a, const MilnorElement& b) {
    return reduce_element(m, a) == reduce_element(m, b);
}

bool is_zero_mod(const CycleModuleInstance& m, const MilnorElement& a) {
    return reduce_element(m, a).is_zero();
}

bool Report::ok() const {
    for (const auto& e : entries)
        if (!e.failures.empty()) return false;
    return true;
}

std::string Report::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json item;
        item["check"] = e.check;
        item["samples"] = e.samples;
        item["failures"] = e.failures;
        j.push_back(item);
    }
    return j.dump();
}

namespace {

struct Sampler {
    std::mt19937_64 rng;
    explicit Sampler(std::uint64_t seed) : rng(seed) {}

    std::uint64_t pick(std::uint64_t n) { return rng() % n; }

    RatFunc ratfunc(const FiniteField& f, std::uint64_t maxdeg) {
        for (;;) {
            std::vector<Elem> n(1 + pick(maxdeg + 1)), d(1 + pick(maxdeg + 1));
            for (auto& x : n) x = pick(f.q());
            for (auto& x : d) x = pick(f.q());
            gfield::Poly np = gfield::poly_from(std::move(n)), dp = gfield::poly_from(std::move(d));
            if (np.zero() || dp.zero()) continue;
            return gfield::rat_make(f, np, dp);
        }
    }

    Elem unit(const FiniteField& f) { return 1 + pick(f.q() - 1); }
};

const std::uint64_t kPrimePool[] = {2, 3, 5};

}  // namespace

Report check_premodule_coherences(const CycleModuleInstance& m, unsigned samples,
                                  std::uint64_t seed) {
    Report rep;
    Sampler smp(seed);
    unsigned per = (samples + 4) / 5;

    // 1. corestriction functoriality under composition of inclusions
    {
        CheckEntry e{"corestriction_composition", per, {}};
        for (unsigned i = 0; i < per; ++i) {
            std::uint64_t p = kPrimePool[smp.pick(3)];
            unsigned d1 = 1 + static_cast<unsigned>(smp.pick(2));
            unsigned d2 = 1 + static_cast<unsigned>(smp.pick(2));
            auto E = milnor::finite_field_ref(gfield::canonical_field(p, 1));
            auto F = milnor::finite_field_ref(gfield::canonical_field(p, d1));
            auto L = milnor::finite_field_ref(gfield::canonical_field(p, d1 * d2));
            auto e1 = milnor::canonical_extension(E, F);
            auto e2 = milnor::canonical_extension(F, L);
            MilnorElement x =
                smp.pick(2) ? milnor::k1_element(E, smp.pick(p - 1))
                            : milnor::k0_element(E, mpz_class(static_cast<long>(smp.pick(20)) - 10));
            auto via_composite = m.corestrict(milnor::compose(e2, e1), x);
            auto via_steps = m.corestrict(e2, m.corestrict(e1, x));
            if (!equal_mod(m, via_composite, via_steps))
                e.failures.push_back("x in " + milnor::field_name(E) + ": " +
                                     milnor::print_element(x));
        }
        rep.entries.push_back(std::move(e));
    }

    // 2. N o cor = [L:E] . id
    {
        CheckEntry e{"norm_after_corestriction", per, {}};
        for (unsigned i = 0; i < per; ++i) {
            std::uint64_t p = kPrimePool[smp.pick(3)];
            unsigned base_e = (p == 3 && smp.pick(2)) ? 2 : 1;
            unsigned d = 1 + static_cast<unsigned>(smp.pick(base_e == 1 ? 4 : 2));
            auto E = milnor::finite_field_ref(gfield::canonical_field(p, base_e));
            auto L = milnor::finite_field_ref(gfield::canonical_field(p, base_e * d));
            auto ext = milnor::canonical_extension(E, L);
            MilnorElement x =
                smp.pick(2) ? milnor::k1_element(E, smp.pick(E.base.q() - 1))
                            : milnor::k0_element(E, mpz_class(static_cast<long>(smp.pick(20)) - 10));
            auto lhs = m.norm_map(ext, m.corestrict(ext, x));
            auto rhs = milnor::scale(x, d);
            if (!equal_mod(m, lhs, rhs))
                e.failures.push_back("x in " + milnor::field_name(E) + ", d=" + std::to_string(d) +
                                     ": " + milnor::print_element(x));
        }
        rep.entries.push_back(std::move(e));
    }

    // 3. projection formula N(cor(sigma) . y) = sigma . N(y) landing in K_1
    {
        CheckEntry e{"projection_formula", per, {}};
        for (unsigned i = 0; i < per; ++i) {
            std::uint64_t p = (smp.pick(2) == 0) ? 3 : 5;
            unsigned d = 1 + static_cast<unsigned>(smp.pick(3));
            auto E = milnor::finite_field_ref(gfield::canonical_field(p, 1));
            auto L = milnor::finite_field_ref(gfield::canonical_field(p, d));
            auto ext = milnor::canonical_extension(E, L);
            Elem a = smp.unit(E.base);
            Symbol sigma{E, {gfield::rat_from_poly(gfield::poly_constant(a))}};
            Elem al = gfield::apply_hom(ext.base_hom, a);
            Symbol sigma_l{L, {gfield::rat_from_poly(gfield::poly_constant(al))}};
            MilnorElement y = milnor::k0_element(L, mpz_class(static_cast<long>(smp.pick(10)) - 5));
            auto lhs = m.norm_map(ext, m.action(sigma_l, y));
            auto rhs = m.action(sigma, m.norm_map(ext, y));
            if (!equal_mod(m, lhs, rhs))
                e.failures.push_back("a=" + gfield::print_elem(E.base, a, "t") +
                                     ", y=" + milnor::print_element(y));
        }
        rep.entries.push_back(std::move(e));
    }

    // 4. residues commute with unramified constant-field corestriction
    {
        CheckEntry e{"residue_corestriction_unramified", per, {}};
        for (unsigned i = 0; i < per; ++i) {
            std::uint64_t p = kPrimePool[smp.pick(3)];
            unsigned d = 2;
            auto F = gfield::canonical_field(p, 1);
            auto Fd = gfield::canonical_field(p, d);
            auto Et = milnor::function_field_ref(F);
            auto Lt = milnor::function_field_ref(Fd);
            auto ext = milnor::canonical_extension(Et, Lt);
            RatFunc a = smp.ratfunc(F, 2), b = smp.ratfunc(F, 2);
            Symbol s{Et, {a, b}};
            MilnorElement x = milnor::normalize(s);
            MilnorElement big = m.corestrict(ext, x);
            for (const Place& pi : milnor::support_places(x)) {
                MilnorElement small_res = m.residue(pi, x);
                std::vector<Elem> c(pi.pi.c.size());
                for (std::size_t k = 0; k < c.size(); ++k)
                    c[k] = gfield::apply_hom(ext.base_hom, pi.pi.c[k]);
                for (auto& [pi2p, mult] :
                     gfield::factor(Fd, gfield::poly_from(std::move(c))).factors) {
                    Place pi2 = gfield::finite_place(Fd, pi2p);
                    auto psi = milnor::residue_field_embedding(Et, pi, ext.base_hom, pi2);
                    auto lhs = m.residue(pi2, big);
                    auto rhs = m.corestrict(milnor::extension_from_hom(psi), small_res);
                    if (!equal_mod(m, lhs, rhs)) {
                        e.failures.push_back("symbol over " + milnor::field_name(Et) +
                                             " at place " + gfield::print_place(pi, "t") + ": " +
                                             milnor::print_element(x));
                        break;
                    }
                }
            }
        }
        rep.entries.push_back(std::move(e));
    }

    // 5. residue anchors d{pi} = 1, d{pi,u} = class(u), d{u} = 0; a flipped
    // residue fails here, which is the Steinberg-consistency trap
    {
        CheckEntry e{"steinberg_residue_consistency", per, {}};
        for (unsigned i = 0; i < per; ++i) {
            std::uint64_t p = (smp.pick(2) == 0) ? 3 : 5;
            auto F = gfield::canonical_field(p, 1);
            auto Ft = milnor::function_field_ref(F);
            gfield::Poly pi_poly = gfield::poly_from({static_cast<Elem>(smp.pick(p)), 1});
            Place v = gfield::finite_place(F, pi_poly);
            RatFunc pi_rat = gfield::rat_from_poly(pi_poly);
            Elem c0 = smp.unit(F);
            gfield::Poly up = gfield::poly_from({F.add(pi_poly.c[0], c0), 1});
            RatFunc u = smp.pick(2) ? gfield::rat_from_poly(up)
                                    : gfield::rat_from_poly(gfield::poly_constant(c0));
            FiniteField K = gfield::residue_field(v);
            Elem ubar = gfield::reduce_at(v, u);

            auto r1 = m.residue(v, milnor::normalize(Symbol{Ft, {pi_rat}}));
            bool ok1 = equal_mod(m, r1, milnor::k0_element(milnor::finite_field_ref(K), 1));
            auto r2 = m.residue(v, milnor::normalize(Symbol{Ft, {pi_rat, u}}));
            bool ok2 =
                equal_mod(m, r2, milnor::k1_element(milnor::finite_field_ref(K), K.dlog(ubar)));
            auto r3 = m.residue(v, milnor::normalize(Symbol{Ft, {u}}));
            bool ok3 = is_zero_mod(m, r3);
            if (!(ok1 && ok2 && ok3))
                e.failures.push_back("pi=" + gfield::print_poly(F, pi_poly, "t") +
                                     ", u=" + gfield::print_rat(F, u, "t"));
        }
        rep.entries.push_back(std::move(e));
    }

    return rep;
}

std::vector<Place> check_fd(const CycleModuleInstance& m, const MilnorElement& x) {
    if (!x.field.function_field)
        fail(errc::field_mismatch, "finite support is about function field elements");
    std::vector<Place> out;
    for (const Place& v : milnor::support_places(x))
        if (!is_zero_mod(m, m.residue(v, x))) out.push_back(v);
    Place inf = gfield::infinite_place(x.field.base);
    if (!is_zero_mod(m, m.residue(inf, x))) out.push_back(inf);
    return out;
}

}  // namespace gersten::cyclemod
