#include <random>

#include "doctest.h"
#include "gersten/abgroup.hpp"
#include "gersten/cyclemod.hpp"
#include "gersten/error.hpp"

using namespace gersten;
using namespace gersten::gfield;
using namespace gersten::milnor;
using namespace gersten::cyclemod;

namespace {

// exhaustive presentation oracle for K_n(F_q): multilinearity in every slot
// plus Steinberg in adjacent slots
abgroup::FgAbGroup milnor_group_presentation(const FiniteField& f, unsigned n) {
    std::uint64_t u = f.q() - 1;
    std::uint64_t gens = 1;
    for (unsigned k = 0; k < n; ++k) gens *= u;
    auto index = [&](const std::vector<Elem>& tuple) {
        std::uint64_t idx = 0;
        for (unsigned k = 0; k < n; ++k) idx = idx * u + (tuple[k] - 1);
        return idx;
    };
    std::vector<std::vector<mpz_class>> rel;
    auto for_each_tuple = [&](auto&& body) {
        std::vector<Elem> t(n, 1);
        for (;;) {
            body(t);
            unsigned k = 0;
            while (k < n && ++t[k] == f.q()) t[k++] = 1;
            if (k == n) break;
        }
    };
    for_each_tuple([&](const std::vector<Elem>& t) {
        for (unsigned slot = 0; slot < n; ++slot) {
            for (Elem w = 1; w < f.q(); ++w) {
                std::vector<mpz_class> r(gens, 0);
                std::vector<Elem> prod = t;
                prod[slot] = f.mul(t[slot], w);
                r[index(prod)] -= 1;
                r[index(t)] += 1;
                std::vector<Elem> other = t;
                other[slot] = w;
                r[index(other)] += 1;
                rel.push_back(std::move(r));
            }
            if (slot + 1 < n && f.add(t[slot], t[slot + 1]) == 1) {
                std::vector<mpz_class> r(gens, 0);
                r[index(t)] += 1;
                rel.push_back(std::move(r));
            }
        }
    });
    return abgroup::FgAbGroup::quotient_of_free(
        gens, abgroup::IntMat::from_cols(rel));
}

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

}  // namespace

TEST_CASE("evaluate pinned values") {
    auto km = km_instance();
    SUBCASE("K_1(F_9) = Z/8") {
        auto d = evaluate(km, finite_field_ref(canonical_field(3, 2)), 1);
        CHECK(d.materialized);
        CHECK(d.group == abgroup::FgAbGroup::cyclic(8));
    }
    SUBCASE("K_3 of small finite fields vanishes, against the presentation oracle") {
        for (std::uint64_t q : {2, 3, 4, 5}) {
            auto fac = factor_u64(q);
            auto f = canonical_field(fac[0].first, fac[0].second);
            auto d = evaluate(km, finite_field_ref(f), 3);
            CHECK(d.group.trivial());
            CHECK(milnor_group_presentation(f, 3).trivial());
            CHECK(milnor_group_presentation(f, 2).trivial());
        }
    }
    SUBCASE("mod-2 reduction of K_1(F_5)") {
        auto d = evaluate(km_mod_instance(2), finite_field_ref(canonical_field(5, 1)), 1);
        CHECK(d.group == abgroup::FgAbGroup::cyclic(2));
    }
    SUBCASE("negative and high degrees vanish") {
        auto f = finite_field_ref(canonical_field(7, 1));
        CHECK(evaluate(km, f, -1).group.trivial());
        CHECK(evaluate(km, f, 5).group.trivial());
    }
    SUBCASE("function fields come back as structural descriptors") {
        auto d = evaluate(km, function_field_ref(canonical_field(3, 1)), 1);
        CHECK(!d.materialized);
        CHECK(d.shape.constant_part == abgroup::FgAbGroup::cyclic(2));
        auto v = finite_place(canonical_field(3, 1), poly_from({1, 0, 1}));
        CHECK(d.shape.place_part(v) == abgroup::FgAbGroup::free(1));  // K_0 of the residue field
    }
}

TEST_CASE("premodule coherences pass and the flipped fixture fails") {
    SUBCASE("the genuine instance passes") {
        auto rep = check_premodule_coherences(km_instance(), 120, 2026);
        CHECK(rep.ok());
        unsigned total = 0;
        for (const auto& e : rep.entries) total += e.samples;
        CHECK(total >= 120);
    }
    SUBCASE("mod-3 instance passes") {
        CHECK(check_premodule_coherences(km_mod_instance(3), 60, 11).ok());
    }
    SUBCASE("a sign-flipped residue is caught by the Steinberg consistency check") {
        auto bad = km_instance();
        bad.residue = [](const Place& v, const MilnorElement& x) {
            return milnor::negate(milnor::tame_symbol(v, x));
        };
        auto rep = check_premodule_coherences(bad, 60, 5);
        CHECK(!rep.ok());
        bool anchor_failed = false;
        for (const auto& e : rep.entries)
            if (e.check == "steinberg_residue_consistency" && !e.failures.empty())
                anchor_failed = true;
        CHECK(anchor_failed);
    }
    SUBCASE("zero-sample run reports zero samples") {
        auto rep = check_premodule_coherences(km_instance(), 0, 1);
        for (const auto& e : rep.entries) CHECK(e.samples == 0);
        CHECK(rep.ok());
        CHECK(rep.to_json().find("\"samples\":0") != std::string::npos);
    }
}

TEST_CASE("finite support is computed exactly") {
    auto km = km_instance();
    auto f3 = canonical_field(3, 1);
    FieldRef F3t = function_field_ref(f3);
    SUBCASE("{t^2-1} in K_1(F_3(t)) is supported at (t-1), (t+1), infinity") {
        auto x = normalize(Symbol{F3t, {rat_from_poly(poly_from({2, 0, 1}))}});
        auto supp = check_fd(km, x);
        REQUIRE(supp.size() == 3);
        CHECK(supp[0].pi == poly_from({1, 1}));
        CHECK(supp[1].pi == poly_from({2, 1}));
        CHECK(supp[2].infinite);
    }
    SUBCASE("constants have empty support") {
        auto x = normalize(Symbol{F3t, {rat_from_poly(poly_constant(2))}});
        CHECK(check_fd(km, x).empty());
    }
    SUBCASE("{t, t-2} over F_5") {
        auto f5 = canonical_field(5, 1);
        FieldRef F5t = function_field_ref(f5);
        auto x = normalize(Symbol{F5t, {rat_from_poly(poly_x(f5)), rat_from_poly(poly_from({3, 1}))}});
        auto supp = check_fd(km, x);
        REQUIRE(supp.size() == 3);
        CHECK(supp[0].pi == poly_from({0, 1}));
        CHECK(supp[1].pi == poly_from({3, 1}));
        CHECK(supp[2].infinite);
    }
    SUBCASE("mod-l support can shrink") {
        // {t^2} has valuation 2 at (t) and -2 at infinity; both die mod 2
        auto x = normalize(Symbol{F3t, {rat_from_poly(poly_mul(f3, poly_x(f3), poly_x(f3)))}});
        auto supp2 = check_fd(km_mod_instance(2), x);
        CHECK(supp2.empty());
        CHECK(check_fd(km, x).size() == 2);
    }
}

TEST_CASE("mod-l reduction commutes with the structural maps") {
    std::mt19937_64 rng(9090);
    auto km = km_instance();
    for (unsigned ell : {2u, 3u}) {
        auto kml = km_mod_instance(ell);
        auto f3 = canonical_field(3, 1);
        FieldRef F3t = function_field_ref(f3);
        for (int trial = 0; trial < 25; ++trial) {
            RatFunc a = random_ratfunc(f3, rng, 2), b = random_ratfunc(f3, rng, 2);
            auto x = normalize(Symbol{F3t, {a, b}});
            // residue at a support place
            for (const Place& v : support_places(x)) {
                auto lhs = reduce_element(kml, tame_symbol(v, x));
                auto rhs = reduce_element(kml, tame_symbol(v, reduce_element(kml, x)));
                CHECK(lhs == rhs);
            }
            // base change
            auto ext = canonical_extension(F3t, function_field_ref(canonical_field(3, 2)));
            CHECK(reduce_element(kml, corestriction(ext, x)) ==
                  reduce_element(kml, corestriction(ext, reduce_element(kml, x))));
        }
    }
}

TEST_CASE("degree bookkeeping is asserted per structural call") {
    auto km = km_instance();
    auto f3 = canonical_field(3, 1);
    FieldRef F3t = function_field_ref(f3);
    auto x = normalize(Symbol{F3t, {rat_from_poly(poly_x(f3))}});
    Place v = finite_place(f3, poly_x(f3));
    CHECK(km.residue(v, x).degree == 0);
    CHECK(km.corestrict(identity_extension(F3t), x).degree == 1);
    CHECK(km.action(Symbol{F3t, {rat_from_poly(poly_x(f3))}}, x).degree == 2);
}
