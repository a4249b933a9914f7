#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace gersten::gfield {

// Element of F_{p^e}, packed as sum c_i p^i with digits c_i the coordinates
// in the power basis of the canonical modulus root. Packed-integer order is
// the lexicographic order on (c_{e-1}, ..., c_0) used for all canonical
// "least" choices.
using Elem = std::uint64_t;

inline constexpr std::uint64_t kSizeBound = 1u << 20;

class FiniteField;
struct FieldData;

// Deterministic canonical field: modulus is the lexicographically smallest
// monic irreducible of degree e over F_p, the generator the smallest
// multiplicative generator. Interned, cheap to copy.
FiniteField canonical_field(std::uint64_t p, unsigned e);

class FiniteField {
  public:
    FiniteField() = default;
    std::uint64_t p() const;
    unsigned e() const;
    std::uint64_t q() const;  // p^e
    const std::vector<std::uint64_t>& modulus() const;  // digits, length e+1, monic
    Elem generator() const;
    bool valid() const { return data_ != nullptr; }

    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    Elem from_int(std::int64_t n) const;  // image of an integer in the prime field
    Elem add(Elem a, Elem b) const;
    Elem sub(Elem a, Elem b) const;
    Elem neg(Elem a) const;
    Elem mul(Elem a, Elem b) const;
    Elem inv(Elem a) const;
    Elem div(Elem a, Elem b) const;
    Elem pow(Elem a, const mpz_class& k) const;  // negative exponents invert

    // residue class of dlog modulo q-1 with respect to the generator
    std::uint64_t dlog(Elem x) const;

    friend bool operator==(const FiniteField& a, const FiniteField& b);

  private:
    explicit FiniteField(std::shared_ptr<const FieldData> d) : data_(std::move(d)) {}
    std::shared_ptr<const FieldData> data_;
    friend FiniteField canonical_field(std::uint64_t, unsigned);
    friend struct FieldData;
};

inline bool operator!=(const FiniteField& a, const FiniteField& b) { return !(a == b); }

std::string print_elem(const FiniteField& f, Elem x, const std::string& var);

// ---- univariate polynomials over a finite field ----

// coefficients c[0] + c[1] t + ...; empty = zero polynomial
struct Poly {
    std::vector<Elem> c;

    bool zero() const { return c.empty(); }
    int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
    friend auto operator<=>(const Poly&, const Poly&) = default;
};

Poly poly_from(std::vector<Elem> coeffs);
Poly poly_constant(Elem a);
Poly poly_x(const FiniteField& f);

Poly poly_add(const FiniteField& f, const Poly& a, const Poly& b);
Poly poly_sub(const FiniteField& f, const Poly& a, const Poly& b);
Poly poly_neg(const FiniteField& f, const Poly& a);
Poly poly_mul(const FiniteField& f, const Poly& a, const Poly& b);
Poly poly_scale(const FiniteField& f, Elem s, const Poly& a);
std::pair<Poly, Poly> poly_divmod(const FiniteField& f, const Poly& a, const Poly& b);
Poly poly_mod(const FiniteField& f, const Poly& a, const Poly& b);
Poly poly_gcd(const FiniteField& f, Poly a, Poly b);  // monic
Poly poly_monic(const FiniteField& f, const Poly& a);
Poly poly_derivative(const FiniteField& f, const Poly& a);
Poly poly_pow_mod(const FiniteField& f, Poly base, const mpz_class& k, const Poly& m);
Elem poly_eval(const FiniteField& f, const Poly& a, Elem x);
std::string print_poly(const FiniteField& f, const Poly& a, const std::string& var);

struct Factorization {
    Elem unit;
    std::vector<std::pair<Poly, unsigned>> factors;  // monic irreducible, multiplicity
};

Factorization factor(const FiniteField& f, const Poly& a);
bool is_irreducible(const FiniteField& f, const Poly& a);
std::vector<Elem> roots(const FiniteField& f, const Poly& a);  // sorted, with gcd-based search

// ---- subfield embeddings ----

// Embedding determined by the image of the source modulus root; canonical_hom
// picks the least root, but any hom can be carried around and composed.
struct FieldHom {
    FiniteField source, target;
    Elem root_image = 0;
};

FieldHom canonical_hom(const FiniteField& e, const FiniteField& l);  // NotSubfield if invalid
FieldHom identity_hom(const FiniteField& f);
Elem apply_hom(const FieldHom& h, Elem x);
FieldHom compose_hom(const FieldHom& outer, const FieldHom& inner);

// norm along h : E -> L, i.e. L^x -> E^x, x -> x^((|L|-1)/(|E|-1)) pulled back
Elem norm_along(const FieldHom& h, Elem x_in_target);

// ---- rational functions ----

// num/den with den monic, gcd(num, den) = 1; zero is {0, 1}
struct RatFunc {
    Poly num, den;
    bool zero() const { return num.zero(); }
    friend auto operator<=>(const RatFunc&, const RatFunc&) = default;
};

RatFunc rat_make(const FiniteField& f, Poly num, Poly den);
RatFunc rat_from_poly(Poly p);
RatFunc rat_one();
RatFunc rat_add(const FiniteField& f, const RatFunc& a, const RatFunc& b);
RatFunc rat_sub(const FiniteField& f, const RatFunc& a, const RatFunc& b);
RatFunc rat_mul(const FiniteField& f, const RatFunc& a, const RatFunc& b);
RatFunc rat_div(const FiniteField& f, const RatFunc& a, const RatFunc& b);
RatFunc rat_neg(const FiniteField& f, const RatFunc& a);
RatFunc rat_pow(const FiniteField& f, const RatFunc& a, std::int64_t k);
bool rat_is_constant(const RatFunc& a);
// f(1/s) as a rational function of s
RatFunc rat_invert_var(const FiniteField& f, const RatFunc& a);
std::string print_rat(const FiniteField& f, const RatFunc& a, const std::string& var);

// ---- places of A^1 / P^1 ----

struct Place {
    FiniteField base;
    bool infinite = false;
    Poly pi;  // monic irreducible; empty when infinite

    unsigned degree() const { return infinite ? 1 : static_cast<unsigned>(pi.degree()); }
};

Place finite_place(const FiniteField& base, Poly pi);  // checks monic irreducible
Place infinite_place(const FiniteField& base);
bool place_equal(const Place& a, const Place& b);
bool place_less(const Place& a, const Place& b);  // by (degree, coeffs), infinity last
std::string print_place(const Place& v, const std::string& var);

FiniteField residue_field(const Place& v);

// valuation of a nonzero rational function at the place
std::int64_t valuation(const Place& v, const RatFunc& a);

// reduction of a v-unit at the place, landing in the canonical residue field;
// for finite v this fixes the least root of pi as the image of the variable
Elem reduce_at(const Place& v, const RatFunc& a);

// key usable in ordered containers: digits of pi, empty for infinity
using PlaceKey = std::vector<std::uint64_t>;
PlaceKey place_key(const Place& v);
Place place_from_key(const FiniteField& base, const PlaceKey& k);

bool is_prime_u64(std::uint64_t n);
std::vector<std::pair<std::uint64_t, unsigned>> factor_u64(std::uint64_t n);

}  // namespace gersten::gfield
