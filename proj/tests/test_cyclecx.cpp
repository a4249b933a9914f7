#include <random>

#include "doctest.h"
#include "gersten/cyclecx.hpp"
#include "gersten/error.hpp"

using namespace gersten;
using namespace gersten::gfield;
using namespace gersten::milnor;
using namespace gersten::cyclecx;

namespace {

std::shared_ptr<const schememod::SchemeDescription> make(schememod::SchemeDescription x) {
    return std::make_shared<schememod::SchemeDescription>(std::move(x));
}

CycleChain generic_chain(std::shared_ptr<const schememod::SchemeDescription> X,
                         const cyclemod::CycleModuleInstance& phi, const MilnorElement& xi) {
    CycleChain c = zero_chain(X, phi, 0, xi.degree);
    set_component(c, schememod::generic_point_id(), xi);
    return c;
}

Place rational_place(const FiniteField& f, Elem root) {
    return finite_place(f, poly_from({f.neg(root), 1}));
}

}  // namespace

TEST_CASE("point differential pinned examples") {
    auto phi = cyclemod::km_instance();
    auto f3 = canonical_field(3, 1);
    SUBCASE("A^1: generic to (t-1) of {t^2-1} is the valuation 1") {
        auto X = make(schememod::builtin_affine_line(f3));
        auto xi = normalize(Symbol{function_field_ref(f3), {rat_from_poly(poly_from({2, 0, 1}))}});
        auto r = point_differential(*X, phi, schememod::generic_point_id(), "(t+2)", xi,
                                    rational_place(f3, 1));
        CHECK(r.degree == 0);
        CHECK(r.z == 1);
    }
    SUBCASE("no specialization, no contribution") {
        std::vector<schememod::LinearForm> xyz{{{1, 0, 0}}, {{0, 1, 0}}, {{0, 0, 1}}};
        auto X = make(schememod::builtin_line_config(f3, xyz));
        auto xi = k0_element(function_field_ref(f3), 1);
        // V(x) does not pass through [1:0:0]
        auto r = point_differential(*X, phi, X->lines[0].id, "[1:0:0]", xi);
        CHECK(r.is_zero());
    }
    SUBCASE("line to intersection point: valuation 1 contribution") {
        std::vector<schememod::LinearForm> xyz{{{1, 0, 0}}, {{0, 1, 0}}, {{0, 0, 1}}};
        auto X = make(schememod::builtin_line_config(f3, xyz));
        // component at V(x): the class of y/z restricted, = the parameter or
        // its inverse depending on the canonical chart
        Poly ry = schememod::restrict_form(*X, 0, schememod::LinearForm{{0, 1, 0}});
        Poly rz = schememod::restrict_form(*X, 0, schememod::LinearForm{{0, 0, 1}});
        auto xi = normalize(Symbol{function_field_ref(f3),
                                   {rat_make(f3, ry, rz)}});
        auto r = point_differential(*X, phi, X->lines[0].id, "[0:0:1]", xi);
        CHECK(r.degree == 0);
        CHECK((r.z == 1 || r.z == -1));
        // the value is the valuation of y/z at the point, which is +1
        CHECK(r.z == 1);
    }
}

TEST_CASE("differential pinned examples") {
    auto phi = cyclemod::km_instance();
    auto f3 = canonical_field(3, 1);
    auto xi = normalize(Symbol{function_field_ref(f3), {rat_from_poly(poly_from({2, 0, 1}))}});
    SUBCASE("A^1: divisor of t^2-1") {
        auto X = make(schememod::builtin_affine_line(f3));
        auto d = differential(generic_chain(X, phi, xi));
        REQUIRE(d.components.size() == 2);
        CHECK(d.components.at("(t+1)").z == 1);
        CHECK(d.components.at("(t+2)").z == 1);
    }
    SUBCASE("P^1 adds the pole at infinity") {
        auto X = make(schememod::builtin_proj_line(f3));
        auto d = differential(generic_chain(X, phi, xi));
        REQUIRE(d.components.size() == 3);
        CHECK(d.components.at("inf").z == -2);
    }
    SUBCASE("top-codimension chains map to zero") {
        auto X = make(schememod::builtin_proj_line(f3));
        CycleChain c = zero_chain(X, phi, 1, 1);
        set_place_component(c, rational_place(f3, 0), k0_element(finite_field_ref(f3), 1));
        CHECK(differential(c).is_zero());
    }
}

TEST_CASE("square zero on line configurations") {
    auto phi = cyclemod::km_instance();
    auto f3 = canonical_field(3, 1);
    std::vector<schememod::LinearForm> xyz{{{1, 0, 0}}, {{0, 1, 0}}, {{0, 0, 1}}};
    auto X = make(schememod::builtin_line_config(f3, xyz));

    SUBCASE("{x/z, y/z}: composite vanishes through cancelling contributions") {
        P2Symbol xi;
        xi.entries.push_back(FormMonomial{1, {{0, 1}, {2, -1}}});
        xi.entries.push_back(FormMonomial{1, {{1, 1}, {2, -1}}});
        auto ledger = check_square_zero_symbol(X, phi, xi);
        CHECK(ledger.zero);
        CHECK(!ledger.lines.empty());
        // d0 is nonzero: the cancellation happens at the second step
        auto c1 = d0_line_config(X, phi, xi);
        CHECK(!c1.is_zero());
        CHECK(differential(c1).is_zero());
    }
    SUBCASE("a Steinberg symbol dies at the first differential") {
        // {f, 1-f} with f = x/z over the configuration {x, z, z-x}
        std::vector<schememod::LinearForm> forms{{{1, 0, 0}}, {{0, 0, 1}}, {{2, 0, 1}}};
        auto Y = make(schememod::builtin_line_config(f3, forms));
        P2Symbol xi;
        xi.entries.push_back(FormMonomial{1, {{0, 1}, {1, -1}}});  // x/z
        xi.entries.push_back(FormMonomial{1, {{2, 1}, {1, -1}}});  // (z-x)/z = 1 - x/z
        auto c1 = d0_line_config(Y, phi, xi);
        CHECK(c1.is_zero());
    }
    SUBCASE("random configurations over F_3 and F_5") {
        for (std::uint64_t q : {3, 5}) {
            auto base = canonical_field(q, 1);
            std::vector<schememod::LinearForm> forms{
                {{1, 0, 0}}, {{0, 1, 0}}, {{0, 0, 1}}, {{1, 1, 1}}};
            auto Y = make(schememod::builtin_line_config(base, forms));
            auto rep = check_square_zero(Y, 25, 99);
            CHECK(rep.ok());
        }
    }
    SUBCASE("dimension guard") {
        auto P = make(schememod::builtin_proj_line(f3));
        CHECK_THROWS_AS(check_square_zero(P, 1, 1), error);
    }
}

TEST_CASE("chow pinned examples") {
    auto phi = cyclemod::km_instance();
    SUBCASE("A^1(P^1; K^M)_1 = Z with the degree isomorphism") {
        for (std::uint64_t q : {3, 5}) {
            auto f = canonical_field(q, 1);
            auto X = make(schememod::builtin_proj_line(f));
            auto res = chow(X, phi, 1, 1);
            CHECK(res.group == abgroup::FgAbGroup::free(1));
            REQUIRE(!res.generators.empty());
            CHECK(res.class_of(res.generators[0]) == std::vector<mpz_class>{1});
            // a degree-0 divisor is principal with an exact witness
            CycleChain z = zero_chain(X, phi, 1, 1);
            Poly quad = q == 3 ? poly_from({1, 0, 1}) : poly_from({2, 0, 1});
            set_place_component(z, rational_place(f, 1), k0_element(finite_field_ref(f), 2));
            set_place_component(z, finite_place(f, quad),
                                k0_element(finite_field_ref(canonical_field(q, 2)), 1));
            set_place_component(z, infinite_place(f), k0_element(finite_field_ref(f), -4));
            CHECK(res.class_of(z) == std::vector<mpz_class>{0});
            auto w = res.witness(z);
            REQUIRE(w.has_value());
            CHECK(equal(differential(generic_chain(X, phi, *w)), z));
            // a degree-1 divisor is not principal
            CycleChain nz = zero_chain(X, phi, 1, 1);
            set_place_component(nz, rational_place(f, 0), k0_element(finite_field_ref(f), 1));
            CHECK(!res.witness(nz).has_value());
        }
    }
    SUBCASE("A^1(A^1; K^M)_1 = 0, the witness is the defining polynomial") {
        auto f = canonical_field(5, 1);
        auto X = make(schememod::builtin_affine_line(f));
        auto res = chow(X, phi, 1, 1);
        CHECK(res.group.trivial());
        CycleChain z = zero_chain(X, phi, 1, 1);
        Place v = finite_place(f, poly_from({3, 1}));
        set_place_component(z, v, k0_element(finite_field_ref(f), 1));
        auto w = res.witness(z);
        REQUIRE(w.has_value());
        CHECK(reconstruct_unit(*w) == rat_from_poly(poly_from({3, 1})));
    }
    SUBCASE("A^0(P^1; K^M)_1 = Z/(q-1)") {
        auto f = canonical_field(7, 1);
        auto X = make(schememod::builtin_proj_line(f));
        CHECK(chow(X, phi, 0, 1).group == abgroup::FgAbGroup::cyclic(6));
    }
    SUBCASE("homotopy invariance of A^0 on A^1") {
        auto f = canonical_field(5, 1);
        auto X = make(schememod::builtin_affine_line(f));
        CHECK(chow(X, phi, 0, 0).group == abgroup::FgAbGroup::free(1));
        CHECK(chow(X, phi, 0, 1).group == abgroup::FgAbGroup::cyclic(4));
        CHECK(chow(X, phi, 0, 2).group.trivial());
    }
    SUBCASE("mod-l instances") {
        auto f = canonical_field(5, 1);
        auto X = make(schememod::builtin_proj_line(f));
        CHECK(chow(X, cyclemod::km_mod_instance(2), 1, 1).group == abgroup::FgAbGroup::cyclic(2));
        CHECK(chow(X, cyclemod::km_mod_instance(2), 0, 1).group == abgroup::FgAbGroup::cyclic(2));
    }
    SUBCASE("mod-l principality needs only degree divisible by l") {
        auto f = canonical_field(5, 1);
        auto phi2 = cyclemod::km_mod_instance(2);
        auto X = make(schememod::builtin_proj_line(f));
        auto res = chow(X, phi2, 1, 1);
        // degree 2: not principal integrally, principal mod 2
        CycleChain z = zero_chain(X, phi2, 1, 1);
        set_place_component(z, rational_place(f, 1), k0_element(finite_field_ref(f), 1));
        set_place_component(z, rational_place(f, 2), k0_element(finite_field_ref(f), 1));
        CHECK(res.class_of(z) == std::vector<mpz_class>{0});
        auto w = res.witness(z);
        REQUIRE(w.has_value());
        auto boundary = differential(generic_chain(X, phi2, *w));
        CHECK(equal(boundary, z));  // equality is taken mod 2 by the instance
        CHECK(!chow(X, cyclemod::km_instance(), 1, 1).witness(z).has_value());
        // odd degree stays non-principal mod 2
        CycleChain odd = zero_chain(X, phi2, 1, 1);
        set_place_component(odd, rational_place(f, 0), k0_element(finite_field_ref(f), 1));
        CHECK(!res.witness(odd).has_value());
    }
    SUBCASE("mod-l principality in grading 2") {
        auto f = canonical_field(5, 1);
        auto phi2 = cyclemod::km_mod_instance(2);
        auto X = make(schememod::builtin_proj_line(f));
        auto res = chow(X, phi2, 1, 2);
        CHECK(res.group == abgroup::FgAbGroup::cyclic(2));
        // a K_1-valued 0-cycle whose norm sum is a square but not 1
        CycleChain z = zero_chain(X, phi2, 1, 2);
        set_place_component(z, rational_place(f, 1), k1_element(finite_field_ref(f), 2));
        CHECK(res.class_of(z) == std::vector<mpz_class>{0});
        auto w = res.witness(z);
        REQUIRE(w.has_value());
        CHECK(equal(differential(generic_chain(X, phi2, *w)), z));
        // a non-square norm sum is not a boundary mod 2
        CycleChain nz = zero_chain(X, phi2, 1, 2);
        set_place_component(nz, rational_place(f, 1), k1_element(finite_field_ref(f), 1));
        CHECK(res.class_of(nz) == std::vector<mpz_class>{1});
        CHECK(!res.witness(nz).has_value());
    }
    SUBCASE("grading 2 on P^1: the norm-sum target") {
        auto f = canonical_field(3, 1);
        auto X = make(schememod::builtin_proj_line(f));
        CHECK(chow(X, phi, 1, 2).group == abgroup::FgAbGroup::cyclic(2));
    }
    SUBCASE("exact mode refuses dimension 2") {
        auto f = canonical_field(3, 1);
        std::vector<schememod::LinearForm> xyz{{{1, 0, 0}}, {{0, 1, 0}}, {{0, 0, 1}}};
        auto X = make(schememod::builtin_line_config(f, xyz));
        CHECK_THROWS_AS(chow(X, phi, 1, 1), error);
        // the support-bounded subquotient is labeled approximate
        auto res = chow(X, phi, 2, 2);
        CHECK(!res.exact);
        CHECK(res.group == abgroup::FgAbGroup::free(1));  // triangle graph is connected
    }
}

TEST_CASE("principality solver soundness on random divisors") {
    std::mt19937_64 rng(160311);
    auto phi = cyclemod::km_instance();
    for (std::uint64_t q : {3, 5}) {
        auto f = canonical_field(q, 1);
        auto X = make(schememod::builtin_proj_line(f));
        auto res = chow(X, phi, 1, 1);
        for (int trial = 0; trial < 30; ++trial) {
            CycleChain z = zero_chain(X, phi, 1, 1);
            mpz_class degree = 0;
            for (int s = 0; s < 4; ++s) {
                Place v = rational_place(f, rng() % q);
                long c = static_cast<long>(rng() % 11) - 5;
                auto cur = z.components.find(schememod::place_point_id(v));
                mpz_class base = cur == z.components.end() ? 0 : cur->second.z;
                set_place_component(z, v, k0_element(finite_field_ref(f), base + c));
            }
            for (const auto& [id, val] : z.components) degree += val.z * z.places.at(id).degree();
            set_place_component(z, infinite_place(f),
                                k0_element(finite_field_ref(f), -degree));
            auto w = res.witness(z);
            REQUIRE(w.has_value());
            CHECK(equal(differential(generic_chain(X, phi, *w)), z));
        }
    }
}

TEST_CASE("pushforward pinned examples") {
    auto phi = cyclemod::km_instance();
    auto f5 = canonical_field(5, 1);
    auto X = make(schememod::builtin_proj_line(f5));
    SUBCASE("reciprocity: pushforward of a boundary is zero") {
        auto xi = normalize(Symbol{function_field_ref(f5),
                                   {rat_from_poly(poly_x(f5)), rat_from_poly(poly_from({3, 1}))}});
        auto d = differential(generic_chain(X, phi, xi));
        auto pf = pushforward_to_point(d);
        CHECK(pf.is_zero());
    }
    SUBCASE("a rational point pushes to 1") {
        CycleChain c = zero_chain(X, phi, 1, 1);
        set_place_component(c, rational_place(f5, 2), k0_element(finite_field_ref(f5), 1));
        auto pf = pushforward_to_point(c);
        CHECK(pf.components.at(schememod::generic_point_id()).z == 1);
    }
    SUBCASE("a degree-d place pushes to d") {
        CycleChain c = zero_chain(X, phi, 1, 1);
        set_place_component(c, finite_place(f5, poly_from({2, 0, 1})),
                            k0_element(finite_field_ref(canonical_field(5, 2)), 1));
        CHECK(pushforward_to_point(c).components.at(schememod::generic_point_id()).z == 2);
    }
    SUBCASE("generic support is rejected") {
        auto c = generic_chain(X, phi, k0_element(function_field_ref(f5), 1));
        CHECK_THROWS_AS(pushforward_to_point(c), error);
        auto A = make(schememod::builtin_affine_line(f5));
        CycleChain ca = zero_chain(A, phi, 1, 1);
        CHECK_THROWS_AS(pushforward_to_point(ca), error);
    }
    SUBCASE("pushforward is a chain map from the generic point") {
        std::mt19937_64 rng(55);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<Elem> nc(1 + rng() % 3), dc(1 + rng() % 3);
            for (auto& x : nc) x = rng() % 5;
            for (auto& x : dc) x = rng() % 5;
            Poly n = poly_from(std::move(nc)), d = poly_from(std::move(dc));
            if (n.zero() || d.zero()) continue;
            auto xi = normalize(Symbol{function_field_ref(f5), {rat_make(f5, n, d)}});
            CHECK(pushforward_to_point(differential(generic_chain(X, phi, xi))).is_zero());
        }
    }
}

TEST_CASE("flat pullbacks") {
    auto phi = cyclemod::km_instance();
    auto f5 = canonical_field(5, 1);
    SUBCASE("structure pullback gives constant chains") {
        auto pt = make(schememod::builtin_point(f5));
        auto A = make(schememod::builtin_affine_line(f5));
        CycleChain c = zero_chain(pt, phi, 0, 1);
        set_component(c, schememod::generic_point_id(), k1_element(finite_field_ref(f5), 1));
        auto up = pullback_structure(A, c);
        auto g = up.components.at(schememod::generic_point_id());
        CHECK(g.field.function_field);
        CHECK(g.u == 1);
        CHECK(g.val_res.empty());
    }
    SUBCASE("open immersion drops the removed components") {
        auto A = make(schememod::builtin_affine_line(f5));
        auto punctured = make(schememod::builtin_punctured_line(
            f5, {finite_place(f5, poly_x(f5))}));
        CycleChain c = zero_chain(A, phi, 1, 1);
        set_place_component(c, rational_place(f5, 0), k0_element(finite_field_ref(f5), 3));
        set_place_component(c, rational_place(f5, 1), k0_element(finite_field_ref(f5), 4));
        auto r = pullback_open(punctured, c);
        CHECK(r.components.size() == 1);
        CHECK(r.components.count("(t+4)") == 1);
    }
    SUBCASE("pullback then pushforward through the generic point is rejected") {
        auto pt = make(schememod::builtin_point(f5));
        auto P = make(schememod::builtin_proj_line(f5));
        CycleChain c = zero_chain(pt, phi, 0, 0);
        set_component(c, schememod::generic_point_id(), k0_element(finite_field_ref(f5), 1));
        auto up = pullback_structure(P, c);
        CHECK_THROWS_AS(pushforward_to_point(up), error);
        try {
            pushforward_to_point(up);
        } catch (const error& e) {
            CHECK(e.code() == errc::unsupported_morphism);
        }
    }
}

TEST_CASE("CH^* action on curves") {
    auto phi = cyclemod::km_instance();
    auto f5 = canonical_field(5, 1);
    auto X = make(schememod::builtin_proj_line(f5));
    auto fundamental = generic_chain(X, phi, k0_element(function_field_ref(f5), 1));
    SUBCASE("a point acts on the fundamental chain as itself") {
        CycleChain alpha = zero_chain(X, phi, 1, 1);
        set_place_component(alpha, rational_place(f5, 2), k0_element(finite_field_ref(f5), 1));
        auto r = ch_action(alpha, fundamental);
        REQUIRE(r.components.size() == 1);
        CHECK(r.components.at("(t+3)").z == 1);
    }
    SUBCASE("the action distributes over sums of 0-cycles") {
        CycleChain a1 = zero_chain(X, phi, 1, 1);
        set_place_component(a1, rational_place(f5, 1), k0_element(finite_field_ref(f5), 2));
        CycleChain a2 = zero_chain(X, phi, 1, 1);
        set_place_component(a2, rational_place(f5, 3), k0_element(finite_field_ref(f5), -1));
        auto lhs = ch_action(add(a1, a2), fundamental);
        auto rhs = add(ch_action(a1, fundamental), ch_action(a2, fundamental));
        CHECK(equal(lhs, rhs));
    }
    SUBCASE("div(f) acting on constants lands in boundaries") {
        auto res = chow(X, phi, 1, 2);
        // alpha = div(t^2 - 1), constant c = 2 in K_1
        auto xi = normalize(Symbol{function_field_ref(f5), {rat_from_poly(poly_from({4, 0, 1}))}});
        auto alpha = differential(generic_chain(X, phi, xi));
        auto constants = generic_chain(
            X, phi, corestriction(canonical_extension(finite_field_ref(f5), function_field_ref(f5)),
                                  k1_element(finite_field_ref(f5), f5.dlog(2))));
        auto acted = ch_action(alpha, constants);
        auto w = res.witness(acted);
        REQUIRE(w.has_value());
        CHECK(equal(differential(generic_chain(X, phi, *w)), acted));
    }
}

TEST_CASE("unramified groups") {
    auto f5 = canonical_field(5, 1);
    SUBCASE("P^1 mod 2 over F_5") {
        auto X = schememod::builtin_proj_line(f5);
        CHECK(unramified(X, cyclemod::km_mod_instance(2), 1) == abgroup::FgAbGroup::cyclic(2));
    }
    SUBCASE("the point evaluates the module") {
        auto X = schememod::builtin_point(canonical_field(3, 2));
        CHECK(unramified(X, cyclemod::km_instance(), 1) == abgroup::FgAbGroup::cyclic(8));
    }
    SUBCASE("degree zero constants") {
        auto X = schememod::builtin_proj_line(f5);
        CHECK(unramified(X, cyclemod::km_instance(), 0) == abgroup::FgAbGroup::free(1));
    }
    SUBCASE("non-proper schemes are refused") {
        auto A = schememod::builtin_affine_line(f5);
        CHECK_THROWS_AS(unramified(A, cyclemod::km_instance(), 1), error);
    }
}

TEST_CASE("evaluating points rejects formal residue fields") {
    auto phi = cyclemod::km_instance();
    auto f3 = canonical_field(3, 1);
    std::vector<schememod::LinearForm> xyz{{{1, 0, 0}}, {{0, 1, 0}}, {{0, 0, 1}}};
    auto X = schememod::builtin_line_config(f3, xyz);
    auto pts2 = schememod::points_of_codim(X, 2);
    CHECK(evaluate_point(phi, pts2[0], 0) == abgroup::FgAbGroup::free(1));
    auto pts0 = schememod::points_of_codim(X, 0);
    CHECK_THROWS_AS(evaluate_point(phi, pts0[0], 2), error);
    try {
        evaluate_point(phi, pts0[0], 2);
    } catch (const error& e) {
        CHECK(e.code() == errc::unsupported_field);
    }
}

TEST_CASE("bounded Gersten rows") {
    auto phi = cyclemod::km_instance();
    auto f3 = canonical_field(3, 1);
    auto X = schememod::builtin_proj_line(f3);
    std::vector<Place> support{finite_place(f3, poly_x(f3)), finite_place(f3, poly_from({1, 1})),
                               finite_place(f3, poly_from({1, 0, 1}))};
    auto row = bounded_gersten_complex(X, phi, 1, support);
    CHECK(row.c0 == abgroup::FgAbGroup::of(3, {2}));
    CHECK(row.c1 == abgroup::FgAbGroup::free(4));
    // the divisor of each place generator has total degree zero
    for (std::size_t j = 0; j < row.support.size(); ++j) {
        mpz_class total = 0;
        for (std::size_t i = 0; i < row.columns.size(); ++i)
            total += row.d.matrix().at(i, row.c0.torsion_count() + j) *
                     static_cast<long>(row.columns[i].degree());
        CHECK(total == 0);
    }
}
