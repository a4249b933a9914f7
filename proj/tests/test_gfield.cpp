#include <atomic>
#include <random>
#include <thread>

#include "doctest.h"
#include "gersten/error.hpp"
#include "gersten/gfield.hpp"

using namespace gersten;
using namespace gersten::gfield;

namespace {

// exhaustive-search oracle: all monic irreducibles of degree d over F_p by
// trial multiplication of lower-degree polynomials
bool has_nontrivial_factor_bruteforce(const FiniteField& f, const Poly& g) {
    std::uint64_t q = f.q();
    int n = g.degree();
    for (int d = 1; 2 * d <= n; ++d) {
        // enumerate monic polys of degree d
        std::uint64_t count = 1;
        for (int i = 0; i < d; ++i) count *= q;
        for (std::uint64_t enc = 0; enc < count; ++enc) {
            std::vector<Elem> c(static_cast<std::size_t>(d) + 1);
            std::uint64_t e = enc;
            for (int i = 0; i < d; ++i) {
                c[static_cast<std::size_t>(i)] = e % q;
                e /= q;
            }
            c.back() = 1;
            Poly cand = poly_from(std::move(c));
            if (poly_mod(f, g, cand).zero()) return true;
        }
    }
    return false;
}

std::uint64_t order_bruteforce(const FiniteField& f, Elem x) {
    Elem y = x;
    std::uint64_t n = 1;
    while (y != 1) {
        y = f.mul(y, x);
        ++n;
    }
    return n;
}

Poly random_poly(const FiniteField& f, std::mt19937_64& rng, int deg) {
    std::vector<Elem> c(static_cast<std::size_t>(deg) + 1);
    for (auto& x : c) x = rng() % f.q();
    c.back() = 1 + rng() % (f.q() - 1);
    return poly_from(std::move(c));
}

}  // namespace

TEST_CASE("canonical field pinned examples") {
    SUBCASE("F_9: modulus t^2+1, generator t+1 of order 8") {
        auto f = canonical_field(3, 2);
        CHECK(f.modulus() == std::vector<std::uint64_t>{1, 0, 1});
        CHECK(f.generator() == 4);  // t+1 packed
        CHECK(order_bruteforce(f, f.generator()) == 8);
        // exhaustive: no smaller monic irreducible of degree 2
        auto fp = canonical_field(3, 1);
        for (std::uint64_t n = 0; n < 1; ++n) {  // t^2+0t+0 and t^2+... below packed 1
            Poly cand = poly_from({static_cast<Elem>(n), 0, 1});
            CHECK(has_nontrivial_factor_bruteforce(fp, cand));
        }
        // and no smaller generator
        for (Elem g = 1; g < 4; ++g) CHECK(order_bruteforce(f, g) < 8);
    }
    SUBCASE("F_5: modulus t, generator 2") {
        auto f = canonical_field(5, 1);
        CHECK(f.modulus() == std::vector<std::uint64_t>{0, 1});
        CHECK(f.generator() == 2);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(canonical_field(4, 1), error);
        CHECK_THROWS_AS(canonical_field(2, 21), error);
        CHECK_THROWS_WITH_AS(canonical_field(4, 1), doctest::Contains("NotPrime"), error);
    }
}

TEST_CASE("exhaustive modulus search oracle for F_9 and F_8") {
    // least monic irreducible over F_3 of degree 2 is t^2+1; over F_2 of degree 3 is t^3+t+1
    auto f3 = canonical_field(3, 1);
    std::vector<Poly> irr3;
    for (std::uint64_t n = 0; n < 9; ++n)
        if (!has_nontrivial_factor_bruteforce(f3, poly_from({static_cast<Elem>(n % 3),
                                                             static_cast<Elem>(n / 3), 1})))
            irr3.push_back(poly_from({static_cast<Elem>(n % 3), static_cast<Elem>(n / 3), 1}));
    REQUIRE(!irr3.empty());
    CHECK(canonical_field(3, 2).modulus()[0] == irr3.front().c[0]);

    auto f8 = canonical_field(2, 3);
    CHECK(f8.modulus() == std::vector<std::uint64_t>{1, 1, 0, 1});  // t^3+t+1
}

TEST_CASE("factorization pinned examples") {
    SUBCASE("t^2-1 over F_3 splits") {
        auto f = canonical_field(3, 1);
        Poly g = poly_from({2, 0, 1});  // t^2 - 1
        auto fac = factor(f, g);
        REQUIRE(fac.factors.size() == 2);
        CHECK(fac.unit == 1);
        CHECK(fac.factors[0].first == poly_from({1, 1}));  // t+1
        CHECK(fac.factors[1].first == poly_from({2, 1}));  // t+2 = t-1
    }
    SUBCASE("t^2+1 over F_3 irreducible") {
        auto f = canonical_field(3, 1);
        CHECK(is_irreducible(f, poly_from({1, 0, 1})));
        auto fac = factor(f, poly_from({1, 0, 1}));
        CHECK(fac.factors.size() == 1);
        CHECK(fac.factors[0].second == 1);
    }
    SUBCASE("2t^3 over F_5") {
        auto f = canonical_field(5, 1);
        auto fac = factor(f, poly_from({0, 0, 0, 2}));
        CHECK(fac.unit == 2);
        REQUIRE(fac.factors.size() == 1);
        CHECK(fac.factors[0].first == poly_from({0, 1}));
        CHECK(fac.factors[0].second == 3);
    }
}

TEST_CASE("factor reassembles exactly and certifies irreducibility") {
    std::mt19937_64 rng(1815);
    for (auto [p, e] : {std::pair<std::uint64_t, unsigned>{2, 1}, {3, 1}, {5, 1}, {2, 2}, {3, 2}}) {
        auto f = canonical_field(p, e);
        for (int trial = 0; trial < 25; ++trial) {
            Poly g = random_poly(f, rng, 1 + static_cast<int>(rng() % 6));
            auto fac = factor(f, g);
            Poly prod = poly_constant(fac.unit);
            for (auto& [pi, m] : fac.factors) {
                CHECK(pi.c.back() == 1);
                for (unsigned i = 0; i < m; ++i) prod = poly_mul(f, prod, pi);
                if (pi.degree() <= 3) CHECK(!has_nontrivial_factor_bruteforce(f, pi));
            }
            CHECK(prod == g);
        }
    }
}

TEST_CASE("norm map pinned examples") {
    auto f3 = canonical_field(3, 1);
    auto f9 = canonical_field(3, 2);
    auto h = canonical_hom(f3, f9);
    SUBCASE("F_9/F_3: generator norms to 2") {
        Elem n = norm_along(h, f9.generator());
        CHECK(n == 2);
        CHECK(f9.pow(f9.generator(), 4) == apply_hom(h, n));
    }
    SUBCASE("identity extension is the identity") {
        auto id = canonical_hom(f9, f9);
        for (Elem x = 1; x < 9; ++x) CHECK(norm_along(id, x) == x);
    }
    SUBCASE("norm of one is one") { CHECK(norm_along(h, 1) == 1); }
    SUBCASE("not a subfield") {
        CHECK_THROWS_AS(canonical_hom(canonical_field(2, 1), f9), error);
        CHECK_THROWS_AS(canonical_hom(f9, canonical_field(3, 3)), error);
    }
}

TEST_CASE("norm after inclusion is the [L:E] power, exhaustively") {
    for (auto [pe, pl] : {std::pair<std::pair<std::uint64_t, unsigned>,
                                    std::pair<std::uint64_t, unsigned>>{{2, 1}, {2, 4}},
                          {{3, 1}, {3, 4}},
                          {{5, 1}, {5, 2}},
                          {{3, 2}, {3, 4}},
                          {{2, 2}, {2, 6}}}) {
        auto E = canonical_field(pe.first, pe.second);
        auto L = canonical_field(pl.first, pl.second);
        auto h = canonical_hom(E, L);
        unsigned d = L.e() / E.e();
        for (Elem x = 1; x < E.q(); ++x)
            CHECK(norm_along(h, apply_hom(h, x)) == E.pow(x, mpz_class(d)));
    }
}

TEST_CASE("dlog pinned examples and exhaustive correctness") {
    SUBCASE("dlog of the generator is 1, of one is 0") {
        auto f = canonical_field(7, 1);
        CHECK(f.dlog(f.generator()) == 1);
        CHECK(f.dlog(1) == 0);
        CHECK_THROWS_AS(f.dlog(0), error);
    }
    SUBCASE("F_9: dlog(2) = 4 with generator t+1") {
        auto f = canonical_field(3, 2);
        CHECK(f.dlog(2) == 4);
    }
    SUBCASE("exhaustive dlog in medium fields") {
        for (auto [p, e] : {std::pair<std::uint64_t, unsigned>{2, 10}, {3, 5}, {1009, 1}}) {
            auto f = canonical_field(p, e);
            for (Elem x = 1; x < std::min<std::uint64_t>(f.q(), 400); ++x)
                CHECK(f.pow(f.generator(), mpz_class(static_cast<unsigned long>(f.dlog(x)))) == x);
        }
    }
}

TEST_CASE("embeddings compose and respect arithmetic") {
    auto f3 = canonical_field(3, 1);
    auto f9 = canonical_field(3, 2);
    auto f81 = canonical_field(3, 4);
    auto h1 = canonical_hom(f3, f9);
    auto h2 = canonical_hom(f9, f81);
    auto h = compose_hom(h2, h1);
    for (Elem x = 0; x < 3; ++x)
        for (Elem y = 0; y < 3; ++y) {
            CHECK(apply_hom(h, f3.add(x, y)) == f81.add(apply_hom(h, x), apply_hom(h, y)));
            CHECK(apply_hom(h, f3.mul(x, y)) == f81.mul(apply_hom(h, x), apply_hom(h, y)));
        }
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        Elem x = rng() % 9, y = rng() % 9;
        CHECK(apply_hom(h2, f9.add(x, y)) == f81.add(apply_hom(h2, x), apply_hom(h2, y)));
        CHECK(apply_hom(h2, f9.mul(x, y)) == f81.mul(apply_hom(h2, x), apply_hom(h2, y)));
    }
}

TEST_CASE("places, valuations and reductions") {
    auto f3 = canonical_field(3, 1);
    Poly t = poly_x(f3);
    SUBCASE("residue field degrees") {
        auto v = finite_place(f3, poly_from({1, 0, 1}));
        CHECK(residue_field(v) == canonical_field(3, 2));
        CHECK(residue_field(infinite_place(f3)) == f3);
    }
    SUBCASE("valuations") {
        // f = t^3 (t+1) / (t+2)^2
        RatFunc f = rat_make(f3, poly_mul(f3, poly_mul(f3, poly_mul(f3, t, t), t), poly_from({1, 1})),
                             poly_mul(f3, poly_from({2, 1}), poly_from({2, 1})));
        CHECK(valuation(finite_place(f3, t), f) == 3);
        CHECK(valuation(finite_place(f3, poly_from({1, 1})), f) == 1);
        CHECK(valuation(finite_place(f3, poly_from({2, 1})), f) == -2);
        CHECK(valuation(infinite_place(f3), f) == -2);
        CHECK(valuation(finite_place(f3, poly_from({1, 0, 1})), f) == 0);
    }
    SUBCASE("reduction at a degree-2 place lands on a root") {
        auto v = finite_place(f3, poly_from({1, 0, 1}));
        auto f9 = canonical_field(3, 2);
        Elem r = reduce_at(v, rat_from_poly(t));
        CHECK(f9.add(f9.mul(r, r), 1) == 0);
    }
    SUBCASE("reduction at infinity is the leading ratio") {
        RatFunc f = rat_make(f3, poly_from({1, 2}), poly_from({2, 1}));  // (2t+1)/(t+2)
        CHECK(reduce_at(infinite_place(f3), f) == 2);
    }
}

TEST_CASE("field descriptors are safe for concurrent shared reads") {
    std::vector<std::thread> threads;
    std::atomic<int> bad{0};
    for (int t = 0; t < 4; ++t)
        threads.emplace_back([&, t]() {
            auto f = canonical_field(3, 2 + t % 2);
            for (Elem x = 1; x < 30 && x < f.q(); ++x)
                if (f.pow(f.generator(), mpz_class(static_cast<unsigned long>(f.dlog(x)))) != x)
                    ++bad;
            auto v = finite_place(canonical_field(5, 1), poly_from({2, 0, 1}));
            if (!(residue_field(v) == canonical_field(5, 2))) ++bad;
        });
    for (auto& th : threads) th.join();
    CHECK(bad == 0);
}

TEST_CASE("variable inversion matches valuations at infinity") {
    std::mt19937_64 rng(99);
    auto f5 = canonical_field(5, 1);
    auto s_place = finite_place(f5, poly_x(f5));
    for (int trial = 0; trial < 40; ++trial) {
        Poly n = random_poly(f5, rng, static_cast<int>(rng() % 4));
        Poly d = random_poly(f5, rng, static_cast<int>(rng() % 4));
        RatFunc f = rat_make(f5, n, d);
        if (f.zero()) continue;
        RatFunc g = rat_invert_var(f5, f);
        CHECK(valuation(s_place, g) == valuation(infinite_place(f5), f));
        CHECK(rat_invert_var(f5, g) == f);
    }
}
