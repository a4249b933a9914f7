#include <random>

#include "doctest.h"
#include "gersten/abgroup.hpp"
#include "gersten/error.hpp"
#include "gersten/milnor.hpp"

using namespace gersten;
using namespace gersten::gfield;
using namespace gersten::milnor;

namespace {

RatFunc random_ratfunc(const FiniteField& f, std::mt19937_64& rng, int maxdeg) {
    for (;;) {
        std::vector<Elem> n(1 + rng() % (maxdeg + 1)), d(1 + rng() % (maxdeg + 1));
        for (auto& x : n) x = rng() % f.q();
        for (auto& x : d) x = rng() % f.q();
        Poly np = poly_from(std::move(n)), dp = poly_from(std::move(d));
        if (np.zero() || dp.zero()) continue;
        return rat_make(f, np, dp);
    }
}

// Independent residue oracle: expand both entries into unit part times a
// power of the uniformizer and use the base cases d{pi,u} = class(u),
// d{pi,pi} = class(-1), d{u,u'} = 0 with bilinearity.
Elem residue_oracle_deg2(const Place& v, const FiniteField& F, RatFunc a, RatFunc b) {
    Place w = v;
    if (v.infinite) {
        a = rat_invert_var(F, a);
        b = rat_invert_var(F, b);
        w = finite_place(F, poly_x(F));
    }
    std::int64_t m = valuation(w, a), n = valuation(w, b);
    RatFunc pi = rat_from_poly(w.pi);
    RatFunc ua = rat_mul(F, a, rat_pow(F, pi, -m));
    RatFunc ub = rat_mul(F, b, rat_pow(F, pi, -n));
    FiniteField K = residue_field(v);
    // {a,b} = mn{pi,pi} + m{pi,ub} + n{ua,pi} + {ua,ub}
    Elem r = K.one();
    Elem minus1 = K.neg(K.one());
    r = K.mul(r, K.pow(minus1, mpz_class(static_cast<long>(m * n))));
    r = K.mul(r, K.pow(reduce_at(w, ub), mpz_class(static_cast<long>(m))));
    r = K.mul(r, K.pow(reduce_at(w, ua), mpz_class(static_cast<long>(-n))));
    return r;
}

Symbol sym(const FieldRef& f, std::vector<RatFunc> entries) { return Symbol{f, std::move(entries)}; }

}  // namespace

TEST_CASE("normalize pinned examples") {
    SUBCASE("Steinberg over a finite field and a function field") {
        auto f5 = canonical_field(5, 1);
        FieldRef F5 = finite_field_ref(f5);
        RatFunc a = rat_from_poly(poly_constant(3));
        RatFunc one_minus_a = rat_from_poly(poly_constant(f5.sub(1, 3)));
        CHECK(normalize(sym(F5, {a, one_minus_a})).is_zero());

        FieldRef F5t = function_field_ref(f5);
        RatFunc t = rat_from_poly(poly_x(f5));
        RatFunc omt = rat_sub(f5, rat_one(), t);
        CHECK(normalize(sym(F5t, {t, omt})).is_zero());
    }
    SUBCASE("{2,3} in K_2(F_5) vanishes, certified by the exhaustive presentation") {
        auto f5 = canonical_field(5, 1);
        FieldRef F5 = finite_field_ref(f5);
        CHECK(normalize(sym(F5, {rat_from_poly(poly_constant(2)), rat_from_poly(poly_constant(3))}))
                  .is_zero());
        // presentation of K_2(F_5): generators (a,b), bilinearity + Steinberg
        auto idx = [&](Elem x, Elem y) { return (x - 1) * 4 + (y - 1); };
        std::vector<std::vector<mpz_class>> rel;
        for (Elem x = 1; x < 5; ++x)
            for (Elem y = 1; y < 5; ++y) {
                for (Elem z = 1; z < 5; ++z) {
                    std::vector<mpz_class> r(16, 0);
                    r[idx(f5.mul(x, z), y)] -= 1;  // {xz, y} = {x,y} + {z,y}
                    r[idx(x, y)] += 1;
                    r[idx(z, y)] += 1;
                    rel.push_back(r);
                    std::vector<mpz_class> r2(16, 0);
                    r2[idx(x, f5.mul(y, z))] -= 1;  // {x, yz} = {x,y} + {x,z}
                    r2[idx(x, y)] += 1;
                    r2[idx(x, z)] += 1;
                    rel.push_back(r2);
                }
                if (f5.add(x, y) == 1) {
                    std::vector<mpz_class> r(16, 0);
                    r[idx(x, y)] += 1;  // Steinberg
                    rel.push_back(r);
                }
            }
        auto k2 = abgroup::FgAbGroup::quotient_of_free(16, abgroup::IntMat::from_cols(rel));
        CHECK(k2.trivial());
    }
    SUBCASE("{t} in K_1(F_3(t))") {
        auto f3 = canonical_field(3, 1);
        FieldRef F3t = function_field_ref(f3);
        auto x = normalize(sym(F3t, {rat_from_poly(poly_x(f3))}));
        CHECK(x.u == 0);
        REQUIRE(x.val_res.size() == 1);
        CHECK(x.val_res.begin()->second == 1);
        CHECK(x.val_res.begin()->first == PlaceKey{0, 1});
    }
    SUBCASE("zero entries rejected") {
        auto f3 = canonical_field(3, 1);
        FieldRef F3t = function_field_ref(f3);
        CHECK_THROWS_AS(normalize(sym(F3t, {RatFunc{Poly{}, poly_constant(1)}})), error);
    }
}

TEST_CASE("tame symbol pinned examples") {
    auto f3 = canonical_field(3, 1);
    FieldRef F3t = function_field_ref(f3);
    RatFunc t = rat_from_poly(poly_x(f3));
    Place at_t = finite_place(f3, poly_x(f3));

    SUBCASE("degree 1 residue is the valuation") {
        // f = t^3 (t+1)/(t+2), a unit times t^3 at (t)
        RatFunc f = rat_make(f3, poly_mul(f3, poly_mul(f3, poly_mul(f3, poly_x(f3), poly_x(f3)), poly_x(f3)), poly_from({1, 1})),
                             poly_from({2, 1}));
        auto x = normalize(sym(F3t, {f}));
        auto r = tame_symbol(at_t, x);
        CHECK(r.degree == 0);
        CHECK(r.z == 3);
    }
    SUBCASE("d_(t){t, t-1} = class of -1 = 2 in F_3") {
        RatFunc tm1 = rat_from_poly(poly_from({2, 1}));
        auto r = residue_of_symbol(at_t, sym(F3t, {t, tm1}));
        CHECK(r.degree == 1);
        auto f3ref = finite_field_ref(f3);
        CHECK(r == k1_element(f3ref, f3.dlog(2)));
    }
    SUBCASE("all-unit symbols have zero residue") {
        RatFunc u1 = rat_from_poly(poly_from({1, 1}));
        RatFunc u2 = rat_from_poly(poly_from({2, 1}));
        CHECK(residue_of_symbol(at_t, sym(F3t, {u1, u2})).is_zero());
    }
    SUBCASE("d{pi, u} = class(u) anchors the convention") {
        RatFunc u = rat_from_poly(poly_from({2, 1}));  // t+2, unit at (t)
        auto r = residue_of_symbol(at_t, sym(F3t, {t, u}));
        CHECK(r == k1_element(finite_field_ref(f3), f3.dlog(2)));  // u(0) = 2
    }
}

TEST_CASE("worked Weil instance {t, t-2} over F_5") {
    auto f5 = canonical_field(5, 1);
    FieldRef F5t = function_field_ref(f5);
    RatFunc t = rat_from_poly(poly_x(f5));
    RatFunc tm2 = rat_from_poly(poly_from({3, 1}));
    Symbol s = sym(F5t, {t, tm2});

    Place p0 = finite_place(f5, poly_x(f5));
    Place p2 = finite_place(f5, poly_from({3, 1}));
    Place pinf = infinite_place(f5);

    // under the convention d{pi,u} = class(u): residues 3, 3, 4
    auto r0 = residue_of_symbol(p0, s);
    auto r2 = residue_of_symbol(p2, s);
    auto rinf = residue_of_symbol(pinf, s);
    CHECK(f5.pow(f5.generator(), mpz_class(static_cast<unsigned long>(r0.u))) == 3);
    CHECK(f5.pow(f5.generator(), mpz_class(static_cast<unsigned long>(r2.u))) == 3);
    CHECK(f5.pow(f5.generator(), mpz_class(static_cast<unsigned long>(rinf.u))) == 4);
    // product of norms is 1 (all residue fields are F_5 here)
    CHECK((r0.u + r2.u + rinf.u) % 4 == 0);
    // independent oracle agrees at every place
    for (const Place& v : {p0, p2, pinf}) {
        auto r = residue_of_symbol(v, s);
        Elem expect = residue_oracle_deg2(v, f5, t, tm2);
        auto K = residue_field(v);
        CHECK(K.pow(K.generator(), mpz_class(static_cast<unsigned long>(r.u))) == expect);
    }
    // the normal form carries the finite residues; infinity comes from reciprocity
    auto x = normalize(s);
    CHECK(tame_symbol(pinf, x) == rinf);
}

TEST_CASE("residues agree with the expansion oracle on random symbols") {
    std::mt19937_64 rng(60311);
    for (auto [p, e] : {std::pair<std::uint64_t, unsigned>{3, 1}, {5, 1}, {3, 2}}) {
        auto F = canonical_field(p, e);
        FieldRef Ft = function_field_ref(F);
        for (int trial = 0; trial < 30; ++trial) {
            RatFunc a = random_ratfunc(F, rng, 2);
            RatFunc b = random_ratfunc(F, rng, 2);
            Symbol s = sym(Ft, {a, b});
            auto x = normalize(s);
            // every place dividing the entries plus infinity
            std::vector<Place> places = support_places(normalize(sym(Ft, {a})));
            for (const Place& v : support_places(normalize(sym(Ft, {b})))) places.push_back(v);
            places.push_back(infinite_place(F));
            for (const Place& v : places) {
                Elem expect = residue_oracle_deg2(v, F, a, b);
                auto r = residue_of_symbol(v, s);
                auto K = residue_field(v);
                CHECK(K.pow(K.generator(), mpz_class(static_cast<unsigned long>(r.u))) == expect);
                if (!v.infinite) CHECK(tame_symbol(v, x) == r);
            }
        }
    }
}

TEST_CASE("bilinearity and skew symmetry") {
    std::mt19937_64 rng(17);
    auto F = canonical_field(5, 1);
    FieldRef Ft = function_field_ref(F);
    for (int trial = 0; trial < 40; ++trial) {
        RatFunc a = random_ratfunc(F, rng, 2);
        RatFunc ap = random_ratfunc(F, rng, 2);
        RatFunc b = random_ratfunc(F, rng, 2);
        auto lhs = normalize(sym(Ft, {rat_mul(F, a, ap), b}));
        auto rhs = add(normalize(sym(Ft, {a, b})), normalize(sym(Ft, {ap, b})));
        CHECK(lhs == rhs);
        CHECK(add(normalize(sym(Ft, {a, b})), normalize(sym(Ft, {b, a}))).is_zero());
        CHECK(normalize(sym(Ft, {a, rat_neg(F, a)})).is_zero());
        CHECK(normalize(sym(Ft, {a, a})) == normalize(sym(Ft, {a, rat_from_poly(poly_constant(F.neg(1)))})));
    }
}

TEST_CASE("Weil reciprocity on random K_2 symbols") {
    std::mt19937_64 rng(5150);
    for (auto [p, e] : {std::pair<std::uint64_t, unsigned>{3, 1}, {5, 1}, {3, 2}}) {
        auto F = canonical_field(p, e);
        FieldRef Ft = function_field_ref(F);
        for (int trial = 0; trial < 25; ++trial) {
            RatFunc a = random_ratfunc(F, rng, 2);
            RatFunc b = random_ratfunc(F, rng, 2);
            Symbol s = sym(Ft, {a, b});
            std::map<PlaceKey, Place> places;
            for (const RatFunc* r : {&a, &b})
                for (const Place& v : support_places(normalize(sym(Ft, {*r}))))
                    places.emplace(place_key(v), v);
            places.emplace(PlaceKey{}, infinite_place(F));
            std::uint64_t acc = 0;
            for (auto& [k, v] : places) {
                auto r = residue_of_symbol(v, s);
                if (r.is_zero()) continue;
                auto K = residue_field(v);
                Elem val = K.pow(K.generator(), mpz_class(static_cast<unsigned long>(r.u)));
                Elem nm = norm_along(canonical_hom(F, K), val);
                acc = (acc + F.dlog(nm)) % (F.q() - 1);
            }
            CHECK(acc == 0);
        }
    }
}

TEST_CASE("corestriction pinned examples") {
    auto f3 = canonical_field(3, 1);
    auto f9 = canonical_field(3, 2);
    FieldRef F3 = finite_field_ref(f3), F9 = finite_field_ref(f9);
    SUBCASE("identity inclusion") {
        auto x = k1_element(F3, 1);
        CHECK(corestriction(identity_extension(F3), x) == x);
    }
    SUBCASE("F_3 into F_9 on K_1: dlog 1 -> dlog 4") {
        auto x = k1_element(F3, 1);  // the class of 2
        auto y = corestriction(canonical_extension(F3, F9), x);
        CHECK(y == k1_element(F9, 4));
    }
    SUBCASE("degree 0 is the identity on integers") {
        auto x = k0_element(F3, 7);
        CHECK(corestriction(canonical_extension(F3, F9), x).z == 7);
    }
    SUBCASE("functorial under composition") {
        auto f81 = canonical_field(3, 4);
        FieldRef F81 = finite_field_ref(f81);
        auto e1 = canonical_extension(F3, F9);
        auto e2 = canonical_extension(F9, F81);
        auto x = k1_element(F3, 1);
        CHECK(corestriction(compose(e2, e1), x) ==
              corestriction(e2, corestriction(e1, x)));
    }
}

TEST_CASE("norm pinned examples") {
    auto f3 = canonical_field(3, 1);
    auto f9 = canonical_field(3, 2);
    FieldRef F3 = finite_field_ref(f3), F9 = finite_field_ref(f9);
    auto ext = canonical_extension(F3, F9);
    SUBCASE("N after corestriction is multiplication by the degree on K_0") {
        auto one = k0_element(F3, 1);
        CHECK(norm(ext, corestriction(ext, one)).z == 2);
    }
    SUBCASE("N_{F_9/F_3}(g) = 2") {
        auto g = k1_element(F9, 1);
        auto n = norm(ext, g);
        CHECK(f3.pow(f3.generator(), mpz_class(static_cast<unsigned long>(n.u))) == 2);
    }
    SUBCASE("N(1) = 1 in K_1") { CHECK(norm(ext, k1_element(F9, 0)).is_zero()); }
}

TEST_CASE("K-module action pinned examples") {
    auto f3 = canonical_field(3, 1);
    FieldRef F3t = function_field_ref(f3);
    RatFunc t = rat_from_poly(poly_x(f3));
    SUBCASE("empty symbol acts as the identity") {
        auto x = normalize(sym(F3t, {t}));
        CHECK(km_action(sym(F3t, {}), x) == x);
    }
    SUBCASE("Steinberg action on K_0") {
        RatFunc a = rat_from_poly(poly_from({0, 2}));  // 2t
        RatFunc oma = rat_sub(f3, rat_one(), a);
        auto one = k0_element(F3t, 1);
        auto ya = km_action(sym(F3t, {a}), one);
        auto res = km_action(sym(F3t, {oma}), ya);
        CHECK(res.is_zero());
    }
    SUBCASE("{t}*{t} = {t,-1}") {
        auto x = normalize(sym(F3t, {t}));
        auto y = km_action(sym(F3t, {t}), x);
        Place at_t = finite_place(f3, poly_x(f3));
        auto r = tame_symbol(at_t, y);
        CHECK(r == k1_element(finite_field_ref(f3), f3.dlog(2)));  // class of -1
    }
}

TEST_CASE("specialization pinned examples") {
    auto f5 = canonical_field(5, 1);
    FieldRef F5 = finite_field_ref(f5), F5t = function_field_ref(f5);
    Place at_t = finite_place(f5, poly_x(f5));
    SUBCASE("identity on constants") {
        for (Elem c = 1; c < 5; ++c) {
            auto x = corestriction(canonical_extension(F5, F5t), k1_element(F5, f5.dlog(c)));
            CHECK(specialize(at_t, x) == k1_element(F5, f5.dlog(c)));
        }
    }
    SUBCASE("s_(t)(2+3t) = 2") {
        auto x = normalize(sym(F5t, {rat_from_poly(poly_from({2, 3}))}));
        CHECK(specialize(at_t, x) == k1_element(F5, f5.dlog(2)));
    }
    SUBCASE("degree 0 is the identity") {
        CHECK(specialize(at_t, k0_element(F5t, 9)).z == 9);
    }
}

TEST_CASE("reconstruction determines degree-1 elements") {
    std::mt19937_64 rng(321);
    auto F = canonical_field(5, 1);
    FieldRef Ft = function_field_ref(F);
    for (int trial = 0; trial < 40; ++trial) {
        RatFunc f = random_ratfunc(F, rng, 3);
        auto x = normalize(sym(Ft, {f}));
        auto g = reconstruct_unit(x);
        CHECK(normalize(sym(Ft, {g})) == x);
        CHECK(g == f);  // canonical: leading unit times monic prime powers
    }
}

TEST_CASE("the action is associative with normalization") {
    std::mt19937_64 rng(777);
    auto F = canonical_field(5, 1);
    FieldRef Ft = function_field_ref(F);
    for (int trial = 0; trial < 25; ++trial) {
        RatFunc a = random_ratfunc(F, rng, 2), b = random_ratfunc(F, rng, 2);
        // {a} . ({b} . 1) = normalize({a, b})
        auto one = k0_element(Ft, 1);
        auto lhs = km_action(sym(Ft, {a}), km_action(sym(Ft, {b}), one));
        auto rhs = normalize(sym(Ft, {a, b}));
        CHECK(lhs == rhs);
        // and {a, b} . 1 directly
        CHECK(km_action(sym(Ft, {a, b}), one) == rhs);
    }
}

TEST_CASE("constant-field base change commutes with normalization") {
    std::mt19937_64 rng(246);
    auto f3 = canonical_field(3, 1);
    auto f9 = canonical_field(3, 2);
    FieldRef F3t = function_field_ref(f3), F9t = function_field_ref(f9);
    auto ext = canonical_extension(F3t, F9t);
    auto map_rat = [&](const RatFunc& r) {
        auto lift = [&](const Poly& p) {
            std::vector<Elem> c(p.c.size());
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = apply_hom(ext.base_hom, p.c[i]);
            return poly_from(std::move(c));
        };
        return rat_make(f9, lift(r.num), lift(r.den));
    };
    for (int trial = 0; trial < 25; ++trial) {
        RatFunc a = random_ratfunc(f3, rng, 2), b = random_ratfunc(f3, rng, 2);
        // degree 1
        auto x1 = normalize(sym(F3t, {a}));
        CHECK(corestriction(ext, x1) == normalize(sym(F9t, {map_rat(a)})));
        // degree 2: residue machinery vs direct normalization over the big field
        auto x2 = normalize(sym(F3t, {a, b}));
        CHECK(corestriction(ext, x2) == normalize(sym(F9t, {map_rat(a), map_rat(b)})));
    }
}
