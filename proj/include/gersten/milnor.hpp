#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gersten/gfield.hpp"

namespace gersten::milnor {

// Supported fields: F_q itself, or the rational function field F_q(t).
struct FieldRef {
    gfield::FiniteField base;
    bool function_field = false;
    std::string var = "t";

    friend bool operator==(const FieldRef& a, const FieldRef& b) {
        return a.base == b.base && a.function_field == b.function_field;
    }
};

FieldRef finite_field_ref(const gfield::FiniteField& f);
FieldRef function_field_ref(const gfield::FiniteField& base, const std::string& var = "t");
std::string field_name(const FieldRef& f);

// Unreduced symbol {a_1, ..., a_n}; entries are constants over finite fields.
struct Symbol {
    FieldRef field;
    std::vector<gfield::RatFunc> entries;
};

// Element of K_n in canonical normal form.
//
// Over F_q:    n = 0 integer z;  n = 1 dlog class u mod q-1;  n >= 2 zero.
// Over F_q(t): constant part (z or u as over F_q, via specialization at
// infinity) plus the finite-support residue family over the finite places:
// val_res holds K_0-valued residues (degree 1), unit_res holds K_1-valued
// residues as dlog classes in the residue field (degree 2). Degrees >= 3
// vanish. Maps never store zero values.
struct MilnorElement {
    FieldRef field;
    int degree = 0;
    mpz_class z;
    std::uint64_t u = 0;
    std::map<gfield::PlaceKey, mpz_class> val_res;
    std::map<gfield::PlaceKey, std::uint64_t> unit_res;

    bool is_zero() const;
    friend bool operator==(const MilnorElement& a, const MilnorElement& b);
};

MilnorElement zero_element(const FieldRef& f, int degree);
MilnorElement k0_element(const FieldRef& f, const mpz_class& n);
MilnorElement k1_element(const FieldRef& f, std::uint64_t dlog_class);

MilnorElement add(const MilnorElement& a, const MilnorElement& b);
MilnorElement negate(const MilnorElement& a);
MilnorElement sub(const MilnorElement& a, const MilnorElement& b);
MilnorElement scale(const MilnorElement& a, const mpz_class& n);

// canonical normal form of a symbol; ZeroEntry on zero entries
MilnorElement normalize(const Symbol& s);

// residue of a symbol at a place, computed by the local tame-symbol formula
// with the convention d{pi, u} = class(u); infinity goes through s = 1/t
MilnorElement residue_of_symbol(const gfield::Place& v, const Symbol& s);

// residue of a normal form: support lookup at finite places, the canonical
// reconstruction (degree 1) or reciprocity sum (degree 2) at infinity
MilnorElement tame_symbol(const gfield::Place& v, const MilnorElement& x);

// Supported field extensions, carried with their base embedding so that
// composites stay functorial.
struct Extension {
    FieldRef from, to;
    gfield::FieldHom base_hom;
};

Extension identity_extension(const FieldRef& f);
Extension canonical_extension(const FieldRef& from, const FieldRef& to);
Extension extension_from_hom(const gfield::FieldHom& h);  // finite fields
Extension compose(const Extension& outer, const Extension& inner);

// covariant map along an arbitrary supported extension, degree 0
MilnorElement corestriction(const Extension& ext, const MilnorElement& x);

// wrong-way map N_{L/E} for finite extensions of finite fields, degree 0
MilnorElement norm(const Extension& ext, const MilnorElement& y);

// graded K^M-module structure: {sigma} * x
MilnorElement km_action(const Symbol& sigma, const MilnorElement& x);

// specialization s_v(x) = d_v({-pi_v} x); identity on constants
MilnorElement specialize(const gfield::Place& v, const MilnorElement& x);

// the canonical unit with a given degree-1 normal form
gfield::RatFunc reconstruct_unit(const MilnorElement& x);

// embedding kappa(pi) -> kappa(pi2), pi2 | pi^h, compatible with both
// reduction maps under the base extension h; this is the embedding along
// which residues and constant-field base change commute
gfield::FieldHom residue_field_embedding(const FieldRef& small, const gfield::Place& pi,
                                         const gfield::FieldHom& h, const gfield::Place& pi2);

// finite places in the support of the normal form
std::vector<gfield::Place> support_places(const MilnorElement& x);

std::string print_element(const MilnorElement& x);

}  // namespace gersten::milnor
