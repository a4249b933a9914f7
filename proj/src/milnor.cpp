#include "gersten/milnor.hpp"

#include <algorithm>
#include <sstream>

#include "gersten/error.hpp"

namespace gersten::milnor {

using gfield::Elem;
using gfield::FieldHom;
using gfield::FiniteField;
using gfield::Place;
using gfield::PlaceKey;
using gfield::Poly;
using gfield::RatFunc;

FieldRef finite_field_ref(const FiniteField& f) { return FieldRef{f, false, "t"}; }

FieldRef function_field_ref(const FiniteField& base, const std::string& var) {
    return FieldRef{base, true, var};
}

std::string field_name(const FieldRef& f) {
    std::string s = "F" + std::to_string(f.base.q());
    if (f.function_field) s += "(" + f.var + ")";
    return s;
}

namespace {

std::uint64_t unit_mod(const FieldRef& f) { return f.base.q() - 1; }

std::uint64_t residue_unit_mod(const FieldRef& f, const PlaceKey& k) {
    unsigned deg = k.empty() ? 1 : static_cast<unsigned>(k.size()) - 1;
    std::uint64_t m = 1;
    for (unsigned i = 0; i < deg; ++i) m *= f.base.q();
    return m - 1;
}

void cleanup(MilnorElement& x) {
    if (x.degree == 1 && !x.field.function_field) x.u %= unit_mod(x.field);
    if (x.field.function_field) {
        if (x.degree == 1) x.u %= unit_mod(x.field);
        for (auto it = x.val_res.begin(); it != x.val_res.end();)
            it = it->second == 0 ? x.val_res.erase(it) : std::next(it);
        for (auto it = x.unit_res.begin(); it != x.unit_res.end();) {
            it->second %= residue_unit_mod(x.field, it->first);
            it = it->second == 0 ? x.unit_res.erase(it) : std::next(it);
        }
    }
}

void require_same_field(const FieldRef& a, const FieldRef& b, const char* what) {
    if (!(a == b)) fail(errc::field_mismatch, what);
}

Place place_of_key(const FieldRef& f, const PlaceKey& k) {
    return gfield::place_from_key(f.base, k);
}

}  // namespace

bool MilnorElement::is_zero() const {
    if (degree == 0) return z == 0;
    if (degree == 1) return u == 0 && val_res.empty();
    if (degree == 2) return unit_res.empty();
    return true;
}

bool operator==(const MilnorElement& a, const MilnorElement& b) {
    if (!(a.field == b.field) || a.degree != b.degree) return false;
    switch (a.degree) {
        case 0: return a.z == b.z;
        case 1: return a.u == b.u && a.val_res == b.val_res;
        case 2: return a.unit_res == b.unit_res;
        default: return true;
    }
}

MilnorElement zero_element(const FieldRef& f, int degree) {
    MilnorElement x;
    x.field = f;
    x.degree = degree;
    return x;
}

MilnorElement k0_element(const FieldRef& f, const mpz_class& n) {
    MilnorElement x = zero_element(f, 0);
    x.z = n;
    return x;
}

MilnorElement k1_element(const FieldRef& f, std::uint64_t dlog_class) {
    MilnorElement x = zero_element(f, 1);
    x.u = dlog_class % unit_mod(f);
    return x;
}

MilnorElement add(const MilnorElement& a, const MilnorElement& b) {
    require_same_field(a.field, b.field, "adding elements of different fields");
    if (a.degree != b.degree) fail(errc::field_mismatch, "adding elements of different degrees");
    MilnorElement x = a;
    x.z += b.z;
    x.u += b.u;
    for (const auto& [k, v] : b.val_res) x.val_res[k] += v;
    for (const auto& [k, v] : b.unit_res) x.unit_res[k] += v;
    cleanup(x);
    return x;
}

MilnorElement negate(const MilnorElement& a) { return scale(a, -1); }

MilnorElement sub(const MilnorElement& a, const MilnorElement& b) { return add(a, negate(b)); }

MilnorElement scale(const MilnorElement& a, const mpz_class& n) {
    MilnorElement x = a;
    x.z *= n;
    mpz_class um(static_cast<unsigned long>(unit_mod(a.field)));
    mpz_class nu = ((n % um) + um) % um;
    x.u = (x.u * nu.get_ui()) % unit_mod(a.field);
    for (auto& [k, v] : x.val_res) v *= n;
    for (auto& [k, v] : x.unit_res) {
        mpz_class m(static_cast<unsigned long>(residue_unit_mod(a.field, k)));
        mpz_class nv = ((n % m) + m) % m;
        v = (v * nv.get_ui()) % m.get_ui();
    }
    cleanup(x);
    return x;
}

namespace {

// specialization at infinity of a nonzero rational function: the ratio of
// leading coefficients, i.e. reduction of f * t^{v_inf(f)} at infinity
Elem leading_ratio(const FiniteField& F, const RatFunc& f) {
    return F.div(f.num.c.back(), f.den.c.back());
}

std::vector<Place> candidate_places(const FieldRef& f, const std::vector<RatFunc>& entries) {
    std::map<PlaceKey, Place> acc;
    for (const RatFunc& r : entries) {
        for (const Poly* part : {&r.num, &r.den}) {
            if (part->degree() < 1) continue;
            for (auto& [pi, m] : gfield::factor(f.base, *part).factors) {
                Place v = gfield::finite_place(f.base, pi);
                acc.emplace(gfield::place_key(v), v);
            }
        }
    }
    std::vector<Place> out;
    for (auto& [k, v] : acc) out.push_back(v);
    return out;
}

}  // namespace

MilnorElement residue_of_symbol(const Place& v, const Symbol& s) {
    if (!s.field.function_field) fail(errc::field_mismatch, "residues live over function fields");
    if (!(v.base == s.field.base)) fail(errc::field_mismatch, "place over a different base field");
    for (const auto& a : s.entries)
        if (a.zero()) fail(errc::zero_entry, "symbol entry is zero");

    const FiniteField& F = s.field.base;
    FieldRef kappa = finite_field_ref(gfield::residue_field(v));
    int n = static_cast<int>(s.entries.size());
    if (n == 0 || n >= 3) return zero_element(kappa, n - 1);

    if (n == 1) return k0_element(kappa, mpz_class(static_cast<long>(gfield::valuation(v, s.entries[0]))));

    // degree 2: d{a,b} = class((-1)^{v(a)v(b)} b^{v(a)} a^{-v(b)})
    RatFunc a = s.entries[0], b = s.entries[1];
    Place w = v;
    if (v.infinite) {
        a = gfield::rat_invert_var(F, a);
        b = gfield::rat_invert_var(F, b);
        w = gfield::finite_place(F, gfield::poly_x(F));
    }
    std::int64_t va = gfield::valuation(w, a);
    std::int64_t vb = gfield::valuation(w, b);
    if (va == 0 && vb == 0) return zero_element(kappa, 1);
    RatFunc tau = gfield::rat_mul(F, gfield::rat_pow(F, b, va),
                                  gfield::rat_pow(F, a, -vb));
    if ((va & 1) && (vb & 1)) tau = gfield::rat_neg(F, tau);
    Elem val = gfield::reduce_at(w, tau);
    FiniteField K = gfield::residue_field(v);
    return k1_element(kappa, K.dlog(val));
}

MilnorElement normalize(const Symbol& s) {
    for (const auto& a : s.entries)
        if (a.zero()) fail(errc::zero_entry, "symbol entry is zero");
    int n = static_cast<int>(s.entries.size());
    const FiniteField& F = s.field.base;

    if (!s.field.function_field) {
        if (n == 0) return k0_element(s.field, 1);
        if (n >= 2) return zero_element(s.field, n);
        const RatFunc& a = s.entries[0];
        if (!gfield::rat_is_constant(a))
            fail(errc::field_mismatch, "non-constant entry over a finite field");
        return k1_element(s.field, F.dlog(F.div(a.num.c[0], a.den.c.empty() ? 1 : a.den.c[0])));
    }

    MilnorElement x = zero_element(s.field, n);
    if (n == 0) {
        x.degree = 0;
        x.z = 1;
        return x;
    }
    if (n >= 3) return x;

    if (n == 1) {
        const RatFunc& f = s.entries[0];
        x.u = F.dlog(leading_ratio(F, f));
        for (const Poly* part : {&f.num, &f.den}) {
            if (part->degree() < 1) continue;
            bool den = part == &f.den;
            for (auto& [pi, m] : gfield::factor(F, *part).factors) {
                Place v = gfield::finite_place(F, pi);
                x.val_res[gfield::place_key(v)] += den ? -static_cast<long>(m) : static_cast<long>(m);
            }
        }
        cleanup(x);
        return x;
    }

    for (const Place& v : candidate_places(s.field, s.entries)) {
        MilnorElement r = residue_of_symbol(v, s);
        if (!r.is_zero()) x.unit_res[gfield::place_key(v)] = r.u;
    }
    return x;
}

namespace {

// reciprocity sum: the residue at infinity of a degree-2 normal form is
// minus the sum of the norms of its finite residues (kappa(inf) = F_q)
MilnorElement infinity_residue_deg2(const MilnorElement& x) {
    const FiniteField& F = x.field.base;
    FieldRef kappa = finite_field_ref(F);
    std::uint64_t acc = 0;
    std::uint64_t mod = F.q() - 1;
    for (const auto& [k, r] : x.unit_res) {
        FiniteField K = gfield::residue_field(place_of_key(x.field, k));
        FieldHom h = gfield::canonical_hom(F, K);
        Elem val = K.pow(K.generator(), mpz_class(static_cast<unsigned long>(r)));
        Elem nm = gfield::norm_along(h, val);
        acc = (acc + F.dlog(nm)) % mod;
    }
    return k1_element(kappa, (mod - acc % mod) % mod);
}

}  // namespace

MilnorElement tame_symbol(const Place& v, const MilnorElement& x) {
    if (!x.field.function_field) fail(errc::field_mismatch, "tame symbol needs a function field");
    if (!(v.base == x.field.base)) fail(errc::field_mismatch, "place over a different base field");
    FieldRef kappa = finite_field_ref(gfield::residue_field(v));

    if (x.degree == 0 || x.degree >= 3) return zero_element(kappa, x.degree - 1);

    if (!v.infinite) {
        PlaceKey k = gfield::place_key(v);
        if (x.degree == 1) {
            auto it = x.val_res.find(k);
            return k0_element(kappa, it == x.val_res.end() ? 0 : it->second);
        }
        auto it = x.unit_res.find(k);
        return it == x.unit_res.end() ? zero_element(kappa, 1) : k1_element(kappa, it->second);
    }

    if (x.degree == 1) {
        // the divisor on P^1 has degree zero
        mpz_class deg = 0;
        for (const auto& [k, e] : x.val_res)
            deg += e * static_cast<long>(k.size() - 1);
        return k0_element(kappa, -deg);
    }
    return infinity_residue_deg2(x);
}

Extension identity_extension(const FieldRef& f) {
    return Extension{f, f, gfield::identity_hom(f.base)};
}

Extension extension_from_hom(const FieldHom& h) {
    return Extension{finite_field_ref(h.source), finite_field_ref(h.target), h};
}

Extension canonical_extension(const FieldRef& from, const FieldRef& to) {
    if (from == to) return identity_extension(from);
    if (!from.function_field && !to.function_field)
        return Extension{from, to, gfield::canonical_hom(from.base, to.base)};
    if (!from.function_field && to.function_field)
        return Extension{from, to, gfield::canonical_hom(from.base, to.base)};
    if (from.function_field && to.function_field)
        return Extension{from, to, gfield::canonical_hom(from.base, to.base)};
    fail(errc::unsupported_extension, "function field into finite field");
}

Extension compose(const Extension& outer, const Extension& inner) {
    if (!(inner.to == outer.from)) fail(errc::unsupported_extension, "extensions do not compose");
    return Extension{inner.from, outer.to, gfield::compose_hom(outer.base_hom, inner.base_hom)};
}

namespace {

// Solve M c = y over F_p by Gaussian elimination; M given column-major.
std::vector<std::uint64_t> fp_solve(std::uint64_t p,
                                    std::vector<std::vector<std::uint64_t>> cols,
                                    std::vector<std::uint64_t> rhs) {
    std::size_t n = rhs.size();
    std::size_t m = cols.size();
    // build augmented row-major matrix
    std::vector<std::vector<std::uint64_t>> a(n, std::vector<std::uint64_t>(m + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) a[i][j] = cols[j][i] % p;
        a[i][m] = rhs[i] % p;
    }
    auto inv_mod = [&](std::uint64_t x) {
        std::uint64_t r = 1, b = x % p, k = p - 2;
        while (k) {
            if (k & 1) r = r * b % p;
            b = b * b % p;
            k >>= 1;
        }
        return r;
    };
    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m && row < n; ++col) {
        std::size_t sel = row;
        while (sel < n && a[sel][col] == 0) ++sel;
        if (sel == n) continue;
        std::swap(a[sel], a[row]);
        std::uint64_t iv = inv_mod(a[row][col]);
        for (std::size_t j = col; j <= m; ++j) a[row][j] = a[row][j] * iv % p;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == row || a[i][col] == 0) continue;
            std::uint64_t f = a[i][col];
            for (std::size_t j = col; j <= m; ++j)
                a[i][j] = (a[i][j] + (p - f) * a[row][j]) % p;
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (std::size_t i = row; i < n; ++i)
        if (a[i][m] != 0) fail(errc::internal, "inconsistent F_p system");
    std::vector<std::uint64_t> x(m, 0);
    for (std::size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = a[i][m];
    return x;
}

// kappa(pi) over F_q (reduction root rho1) into kappa(pi') over F_{q^d}
// (reduction root rho2), compatible with h : F_q -> F_{q^d}
Elem map_residue_value_impl(const FieldRef& small, const Place& pi, const FieldHom& h,
                            const Place& pi2, Elem y) {
    const FiniteField& Fq = small.base;
    FiniteField K1 = gfield::residue_field(pi);
    FiniteField K2 = gfield::residue_field(pi2);
    FieldHom i1 = gfield::canonical_hom(Fq, K1);
    FieldHom i2 = gfield::canonical_hom(h.target, K2);
    // reduction roots: recompute deterministically the way reduce_at does
    auto root_of = [](const Place& v, const FieldHom& incl) {
        std::vector<Elem> c(v.pi.c.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = gfield::apply_hom(incl, v.pi.c[i]);
        auto rs = gfield::roots(incl.target, gfield::poly_from(std::move(c)));
        return rs.front();
    };
    Elem rho1 = root_of(pi, i1);
    Elem rho2 = root_of(pi2, i2);

    unsigned m = static_cast<unsigned>(pi.pi.degree());
    unsigned e = Fq.e();
    std::uint64_t p = Fq.p();
    // basis iota1(x^u) rho1^w of K1 over F_p
    std::vector<std::vector<std::uint64_t>> cols;
    std::vector<std::pair<Elem, Elem>> basis_images;  // (h(x^u) via i2, rho2^w)
    Elem xbar = e == 1 ? 1 : static_cast<Elem>(p);  // x generates F_q over F_p; 1 if prime
    for (unsigned u = 0; u < e; ++u) {
        Elem bu = Fq.pow(xbar, mpz_class(u));
        Elem bu1 = gfield::apply_hom(i1, bu);
        Elem bu2 = gfield::apply_hom(i2, gfield::apply_hom(h, bu));
        for (unsigned w = 0; w < m; ++w) {
            Elem col = K1.mul(bu1, K1.pow(rho1, mpz_class(w)));
            std::vector<std::uint64_t> digits(K1.e());
            Elem cc = col;
            for (unsigned i = 0; i < K1.e(); ++i) {
                digits[i] = cc % p;
                cc /= p;
            }
            cols.push_back(std::move(digits));
            basis_images.emplace_back(bu2, static_cast<Elem>(w));
        }
    }
    std::vector<std::uint64_t> rhs(K1.e());
    Elem yy = y;
    for (unsigned i = 0; i < K1.e(); ++i) {
        rhs[i] = yy % p;
        yy /= p;
    }
    auto coeffs = fp_solve(p, std::move(cols), std::move(rhs));
    Elem out = 0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (!coeffs[i]) continue;
        Elem term = K2.mul(basis_images[i].first, K2.pow(rho2, mpz_class(static_cast<unsigned long>(basis_images[i].second))));
        term = K2.mul(term, K2.from_int(static_cast<std::int64_t>(coeffs[i])));
        out = K2.add(out, term);
    }
    return out;
}

}  // namespace

FieldHom residue_field_embedding(const FieldRef& small, const Place& pi, const FieldHom& h,
                                 const Place& pi2) {
    FiniteField K1 = gfield::residue_field(pi);
    FiniteField K2 = gfield::residue_field(pi2);
    Elem xbar = K1.e() == 1 ? 0 : static_cast<Elem>(K1.p());
    return FieldHom{K1, K2, map_residue_value_impl(small, pi, h, pi2, xbar)};
}

MilnorElement corestriction(const Extension& ext, const MilnorElement& x) {
    require_same_field(ext.from, x.field, "corestriction of a foreign element");
    // equal fields still allow a Frobenius-twisted hom; only the strict
    // identity passes through unchanged
    if (ext.from == ext.to &&
        ext.base_hom.root_image == gfield::identity_hom(ext.from.base).root_image)
        return x;

    // finite -> finite
    if (!ext.from.function_field && !ext.to.function_field) {
        const FiniteField& L = ext.to.base;
        if (x.degree == 0) return k0_element(ext.to, x.z);
        if (x.degree == 1) {
            if (x.u == 0) return zero_element(ext.to, 1);
            Elem g = ext.from.base.pow(ext.from.base.generator(), mpz_class(static_cast<unsigned long>(x.u)));
            return k1_element(ext.to, L.dlog(gfield::apply_hom(ext.base_hom, g)));
        }
        return zero_element(ext.to, x.degree);
    }

    // constants into the function field, through the base embedding
    if (!ext.from.function_field && ext.to.function_field) {
        MilnorElement out = zero_element(ext.to, x.degree);
        if (x.degree == 0) out.z = x.z;
        if (x.degree == 1 && x.u != 0) {
            Elem g = ext.from.base.pow(ext.from.base.generator(),
                                       mpz_class(static_cast<unsigned long>(x.u)));
            out.u = ext.to.base.dlog(gfield::apply_hom(ext.base_hom, g));
        }
        cleanup(out);
        return out;
    }

    if (ext.from.function_field && !ext.to.function_field)
        fail(errc::unsupported_extension, "function field into finite field");

    // base change F_q(t) -> F_{q^d}(t)
    const FieldHom& h = ext.base_hom;
    const FiniteField& Fq = ext.from.base;
    const FiniteField& Fqd = ext.to.base;
    MilnorElement out = zero_element(ext.to, x.degree);
    if (x.degree == 0) {
        out.z = x.z;
        return out;
    }
    auto factor_over_big = [&](const PlaceKey& k) {
        Place pi = place_of_key(x.field, k);
        std::vector<Elem> c(pi.pi.c.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = gfield::apply_hom(h, pi.pi.c[i]);
        return gfield::factor(Fqd, gfield::poly_from(std::move(c)));
    };
    if (x.degree == 1) {
        if (x.u != 0) {
            Elem g = Fq.pow(Fq.generator(), mpz_class(static_cast<unsigned long>(x.u)));
            out.u = Fqd.dlog(gfield::apply_hom(h, g));
        }
        for (const auto& [k, e] : x.val_res)
            for (auto& [pi2, m] : factor_over_big(k).factors)
                out.val_res[gfield::place_key(gfield::finite_place(Fqd, pi2))] += e;
        cleanup(out);
        return out;
    }
    if (x.degree == 2) {
        for (const auto& [k, r] : x.unit_res) {
            Place pi = place_of_key(x.field, k);
            FiniteField K1 = gfield::residue_field(pi);
            Elem val = K1.pow(K1.generator(), mpz_class(static_cast<unsigned long>(r)));
            for (auto& [pi2poly, m] : factor_over_big(k).factors) {
                Place pi2 = gfield::finite_place(Fqd, pi2poly);
                FieldHom psi = residue_field_embedding(ext.from, pi, h, pi2);
                FiniteField K2 = gfield::residue_field(pi2);
                out.unit_res[gfield::place_key(pi2)] += K2.dlog(gfield::apply_hom(psi, val));
            }
        }
        cleanup(out);
        return out;
    }
    return out;
}

MilnorElement norm(const Extension& ext, const MilnorElement& y) {
    require_same_field(ext.to, y.field, "norm of a foreign element");
    if (ext.from.function_field || ext.to.function_field)
        fail(errc::unsupported_extension, "norms only along finite extensions of finite fields");
    unsigned d = ext.to.base.e() / ext.from.base.e();
    if (y.degree == 0) return k0_element(ext.from, y.z * d);
    if (y.degree == 1) {
        if (y.u == 0) return zero_element(ext.from, 1);
        const FiniteField& L = ext.to.base;
        Elem val = L.pow(L.generator(), mpz_class(static_cast<unsigned long>(y.u)));
        Elem nm = gfield::norm_along(ext.base_hom, val);
        return k1_element(ext.from, ext.from.base.dlog(nm));
    }
    return zero_element(ext.from, y.degree);
}

gfield::RatFunc reconstruct_unit(const MilnorElement& x) {
    if (!x.field.function_field || x.degree != 1)
        fail(errc::field_mismatch, "reconstruction needs a degree-1 function field element");
    const FiniteField& F = x.field.base;
    Elem c = F.pow(F.generator(), mpz_class(static_cast<unsigned long>(x.u)));
    RatFunc f = gfield::rat_from_poly(gfield::poly_constant(c));
    for (const auto& [k, e] : x.val_res) {
        if (!e.fits_slong_p()) fail(errc::size_bound, "valuation too large to reconstruct");
        Place v = place_of_key(x.field, k);
        f = gfield::rat_mul(F, f, gfield::rat_pow(F, gfield::rat_from_poly(v.pi), e.get_si()));
    }
    return f;
}

MilnorElement km_action(const Symbol& sigma, const MilnorElement& x) {
    require_same_field(sigma.field, x.field, "action of a foreign symbol");
    for (const auto& a : sigma.entries)
        if (a.zero()) fail(errc::zero_entry, "symbol entry is zero");
    if (sigma.entries.empty()) return x;
    if (x.degree == 0) return scale(normalize(sigma), x.z);

    int target = x.degree + static_cast<int>(sigma.entries.size());
    if (!x.field.function_field) return zero_element(x.field, target);
    if (target >= 3) return zero_element(x.field, target);

    // degree 1 times one symbol entry
    Symbol prod{x.field, {sigma.entries[0], reconstruct_unit(x)}};
    return normalize(prod);
}

MilnorElement specialize(const Place& v, const MilnorElement& x) {
    if (!x.field.function_field) fail(errc::field_mismatch, "specialization needs a function field");
    if (!(v.base == x.field.base)) fail(errc::field_mismatch, "place over a different base field");
    FieldRef kappa = finite_field_ref(gfield::residue_field(v));
    if (x.degree == 0) return k0_element(kappa, x.z);
    if (x.degree >= 2) return zero_element(kappa, x.degree);

    const FiniteField& F = x.field.base;
    RatFunc f = reconstruct_unit(x);
    std::int64_t m = gfield::valuation(v, f);
    RatFunc unit;
    if (v.infinite) {
        unit = gfield::rat_mul(F, f, gfield::rat_pow(F, gfield::rat_from_poly(gfield::poly_x(F)), m));
    } else {
        unit = gfield::rat_mul(F, f, gfield::rat_pow(F, gfield::rat_from_poly(v.pi), -m));
    }
    FiniteField K = gfield::residue_field(v);
    return k1_element(kappa, K.dlog(gfield::reduce_at(v, unit)));
}

std::vector<Place> support_places(const MilnorElement& x) {
    std::vector<Place> out;
    if (!x.field.function_field) return out;
    for (const auto& [k, e] : x.val_res) out.push_back(place_of_key(x.field, k));
    for (const auto& [k, e] : x.unit_res) out.push_back(place_of_key(x.field, k));
    std::sort(out.begin(), out.end(), gfield::place_less);
    return out;
}

std::string print_element(const MilnorElement& x) {
    std::ostringstream os;
    const FiniteField& F = x.field.base;
    os << "K_" << x.degree << "(" << field_name(x.field) << "): ";
    if (x.is_zero()) {
        os << "0";
        return os.str();
    }
    if (x.degree == 0) {
        os << x.z;
        return os.str();
    }
    if (!x.field.function_field) {
        os << gfield::print_elem(F, F.pow(F.generator(), mpz_class(static_cast<unsigned long>(x.u))),
                                 F.e() >= 2 ? "a" : "t");
        return os.str();
    }
    bool first = true;
    if (x.degree == 1 && x.u != 0) {
        os << "const "
           << gfield::print_elem(F, F.pow(F.generator(), mpz_class(static_cast<unsigned long>(x.u))),
                                 F.e() >= 2 ? "a" : "t");
        first = false;
    }
    for (const auto& [k, e] : x.val_res) {
        if (!first) os << ", ";
        os << "(" << print_place(place_of_key(x.field, k), x.field.var) << "): " << e;
        first = false;
    }
    for (const auto& [k, u] : x.unit_res) {
        if (!first) os << ", ";
        Place v = place_of_key(x.field, k);
        FiniteField K = gfield::residue_field(v);
        os << "(" << print_place(v, x.field.var) << "): "
           << gfield::print_elem(K, K.pow(K.generator(), mpz_class(static_cast<unsigned long>(u))),
                                 K.e() >= 2 ? "a" : "t");
        first = false;
    }
    return os.str();
}

}  // namespace gersten::milnor
