#include "gersten/gfield.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

#include "gersten/error.hpp"

namespace gersten::gfield {

namespace {

std::vector<std::uint64_t> unpack(Elem x, std::uint64_t p, unsigned e) {
    std::vector<std::uint64_t> d(e);
    for (unsigned i = 0; i < e; ++i) {
        d[i] = x % p;
        x /= p;
    }
    return d;
}

Elem pack(const std::vector<std::uint64_t>& d, std::uint64_t p) {
    Elem x = 0;
    for (std::size_t i = d.size(); i-- > 0;) x = x * p + d[i];
    return x;
}

struct SplitMix {
    std::uint64_t s;
    std::uint64_t next() {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
};

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::vector<std::pair<std::uint64_t, unsigned>> factor_u64(std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, unsigned>> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d) continue;
        unsigned m = 0;
        while (n % d == 0) {
            n /= d;
            ++m;
        }
        out.emplace_back(d, m);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

struct FieldData {
    std::uint64_t p = 0;
    unsigned e = 0;
    std::uint64_t q = 0;
    std::vector<std::uint64_t> modulus;  // length e+1, monic
    Elem generator = 0;
    std::vector<std::pair<std::uint64_t, unsigned>> qm1_factors;
    std::uint64_t baby_m = 0;
    std::map<Elem, std::uint64_t> baby;
    Elem giant = 0;

    Elem add(Elem a, Elem b) const {
        auto x = unpack(a, p, e), y = unpack(b, p, e);
        for (unsigned i = 0; i < e; ++i) x[i] = (x[i] + y[i]) % p;
        return pack(x, p);
    }
    Elem neg(Elem a) const {
        auto x = unpack(a, p, e);
        for (unsigned i = 0; i < e; ++i) x[i] = (p - x[i]) % p;
        return pack(x, p);
    }
    Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
    Elem mul(Elem a, Elem b) const {
        if (a == 0 || b == 0) return 0;
        auto x = unpack(a, p, e), y = unpack(b, p, e);
        std::vector<std::uint64_t> z(2 * e - 1, 0);
        for (unsigned i = 0; i < e; ++i) {
            if (!x[i]) continue;
            for (unsigned j = 0; j < e; ++j) z[i + j] = (z[i + j] + x[i] * y[j]) % p;
        }
        // reduce by the monic modulus
        for (std::size_t k = z.size(); k-- > e;) {
            std::uint64_t c = z[k];
            if (!c) continue;
            z[k] = 0;
            for (unsigned i = 0; i < e; ++i)
                z[k - e + i] = (z[k - e + i] + (p - modulus[i]) % p * c) % p;
        }
        z.resize(e);
        return pack(z, p);
    }
    Elem pow_u(Elem a, std::uint64_t k) const {
        Elem r = 1, b = a;
        while (k) {
            if (k & 1) r = mul(r, b);
            b = mul(b, b);
            k >>= 1;
        }
        return r;
    }
    Elem inv(Elem a) const {
        if (a == 0) fail(errc::zero_element, "inverse of zero");
        return pow_u(a, q - 2);
    }
};

namespace {

std::map<std::pair<std::uint64_t, unsigned>, std::shared_ptr<const FieldData>>& field_registry() {
    static std::map<std::pair<std::uint64_t, unsigned>, std::shared_ptr<const FieldData>> r;
    return r;
}
std::mutex& field_mutex() {
    static std::mutex m;
    return m;
}

void finish_field(FieldData& d) {
    d.qm1_factors = factor_u64(d.q - 1);
    // smallest multiplicative generator
    for (Elem g = 1; g < d.q; ++g) {
        bool ok = true;
        for (auto& [l, m] : d.qm1_factors)
            if (d.pow_u(g, (d.q - 1) / l) == 1) {
                ok = false;
                break;
            }
        if (ok || d.q == 2) {
            d.generator = g;
            break;
        }
    }
    // baby-step table for dlog
    std::uint64_t n = d.q - 1;
    std::uint64_t m = 1;
    while (m * m < n) ++m;
    d.baby_m = m;
    Elem cur = 1;
    for (std::uint64_t j = 0; j < m; ++j) {
        d.baby.emplace(cur, j);
        cur = d.mul(cur, d.generator);
    }
    d.giant = d.pow_u(d.inv(d.generator), m);
}

}  // namespace

FiniteField canonical_field(std::uint64_t p, unsigned e) {
    if (!is_prime_u64(p)) fail(errc::not_prime, std::to_string(p) + " is not prime");
    if (e < 1) fail(errc::size_bound, "extension degree must be positive");
    std::uint64_t q = 1;
    for (unsigned i = 0; i < e; ++i) {
        q *= p;
        if (q > kSizeBound) fail(errc::size_bound, "p^e exceeds 2^20");
    }
    {
        std::lock_guard<std::mutex> lock(field_mutex());
        auto it = field_registry().find({p, e});
        if (it != field_registry().end()) return FiniteField(it->second);
    }

    auto data = std::make_shared<FieldData>();
    data->p = p;
    data->e = e;
    data->q = q;
    if (e == 1) {
        data->modulus = {0, 1};  // t
        finish_field(*data);
    } else {
        // search over the prime field for the least monic irreducible
        FiniteField fp = canonical_field(p, 1);
        Poly found;
        for (std::uint64_t n = 0; n < q; ++n) {
            std::vector<Elem> c(e + 1);
            auto digits = unpack(n, p, e);
            for (unsigned i = 0; i < e; ++i) c[i] = digits[i];
            c[e] = 1;
            Poly cand = poly_from(c);
            if (is_irreducible(fp, cand)) {
                found = cand;
                break;
            }
        }
        data->modulus.resize(e + 1);
        for (unsigned i = 0; i <= e; ++i) data->modulus[i] = found.c[i];
        finish_field(*data);
    }

    std::lock_guard<std::mutex> lock(field_mutex());
    auto [it, inserted] = field_registry().emplace(std::make_pair(p, e), data);
    return FiniteField(it->second);
}

std::uint64_t FiniteField::p() const { return data_->p; }
unsigned FiniteField::e() const { return data_->e; }
std::uint64_t FiniteField::q() const { return data_->q; }
const std::vector<std::uint64_t>& FiniteField::modulus() const { return data_->modulus; }
Elem FiniteField::generator() const { return data_->generator; }

Elem FiniteField::from_int(std::int64_t n) const {
    std::int64_t p = static_cast<std::int64_t>(data_->p);
    std::int64_t r = n % p;
    if (r < 0) r += p;
    return static_cast<Elem>(r);
}

Elem FiniteField::add(Elem a, Elem b) const { return data_->add(a, b); }
Elem FiniteField::sub(Elem a, Elem b) const { return data_->sub(a, b); }
Elem FiniteField::neg(Elem a) const { return data_->neg(a); }
Elem FiniteField::mul(Elem a, Elem b) const { return data_->mul(a, b); }
Elem FiniteField::inv(Elem a) const { return data_->inv(a); }
Elem FiniteField::div(Elem a, Elem b) const { return data_->mul(a, data_->inv(b)); }

Elem FiniteField::pow(Elem a, const mpz_class& k) const {
    if (a == 0) {
        if (k > 0) return 0;
        if (k == 0) return 1;
        fail(errc::zero_element, "negative power of zero");
    }
    mpz_class m = k % (data_->q - 1);
    if (m < 0) m += data_->q - 1;
    return data_->pow_u(a, m.get_ui());
}

std::uint64_t FiniteField::dlog(Elem x) const {
    if (x == 0) fail(errc::zero_element, "dlog of zero");
    const FieldData& d = *data_;
    Elem cur = x;
    for (std::uint64_t i = 0;; ++i) {
        if (i * d.baby_m >= 2 * (d.q - 1) + 1) break;
        auto it = d.baby.find(cur);
        if (it != d.baby.end()) return (i * d.baby_m + it->second) % (d.q - 1);
        cur = d.mul(cur, d.giant);
    }
    fail(errc::internal, "dlog search failed");
}

bool operator==(const FiniteField& a, const FiniteField& b) {
    if (a.data_ == b.data_) return true;
    if (!a.data_ || !b.data_) return false;
    return a.data_->p == b.data_->p && a.data_->e == b.data_->e;
}

std::string print_elem(const FiniteField& f, Elem x, const std::string& var) {
    if (x == 0) return "0";
    auto d = unpack(x, f.p(), f.e());
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = d.size(); i-- > 0;) {
        if (!d[i]) continue;
        if (!first) os << "+";
        if (i == 0) {
            os << d[i];
        } else {
            if (d[i] != 1) os << d[i] << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
        first = false;
    }
    return os.str();
}

// ---- polynomials ----

Poly poly_from(std::vector<Elem> coeffs) {
    while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
    return Poly{std::move(coeffs)};
}

Poly poly_constant(Elem a) { return a == 0 ? Poly{} : Poly{{a}}; }

Poly poly_x(const FiniteField&) { return Poly{{0, 1}}; }

Poly poly_add(const FiniteField& f, const Poly& a, const Poly& b) {
    std::vector<Elem> c(std::max(a.c.size(), b.c.size()), 0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        Elem x = i < a.c.size() ? a.c[i] : 0;
        Elem y = i < b.c.size() ? b.c[i] : 0;
        c[i] = f.add(x, y);
    }
    return poly_from(std::move(c));
}

Poly poly_neg(const FiniteField& f, const Poly& a) {
    std::vector<Elem> c(a.c.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = f.neg(a.c[i]);
    return Poly{std::move(c)};
}

Poly poly_sub(const FiniteField& f, const Poly& a, const Poly& b) {
    return poly_add(f, a, poly_neg(f, b));
}

Poly poly_mul(const FiniteField& f, const Poly& a, const Poly& b) {
    if (a.zero() || b.zero()) return Poly{};
    std::vector<Elem> c(a.c.size() + b.c.size() - 1, 0);
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        for (std::size_t j = 0; j < b.c.size(); ++j)
            c[i + j] = f.add(c[i + j], f.mul(a.c[i], b.c[j]));
    }
    return poly_from(std::move(c));
}

Poly poly_scale(const FiniteField& f, Elem s, const Poly& a) {
    if (s == 0) return Poly{};
    std::vector<Elem> c(a.c.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = f.mul(s, a.c[i]);
    return Poly{std::move(c)};
}

std::pair<Poly, Poly> poly_divmod(const FiniteField& f, const Poly& a, const Poly& b) {
    if (b.zero()) fail(errc::zero_polynomial, "division by the zero polynomial");
    if (a.degree() < b.degree()) return {Poly{}, a};
    std::vector<Elem> r = a.c;
    std::vector<Elem> q(a.c.size() - b.c.size() + 1, 0);
    Elem lead_inv = f.inv(b.c.back());
    for (std::size_t k = q.size(); k-- > 0;) {
        Elem coef = f.mul(r[k + b.c.size() - 1], lead_inv);
        q[k] = coef;
        if (coef == 0) continue;
        for (std::size_t i = 0; i < b.c.size(); ++i)
            r[k + i] = f.sub(r[k + i], f.mul(coef, b.c[i]));
    }
    return {poly_from(std::move(q)), poly_from(std::move(r))};
}

Poly poly_mod(const FiniteField& f, const Poly& a, const Poly& b) {
    return poly_divmod(f, a, b).second;
}

Poly poly_monic(const FiniteField& f, const Poly& a) {
    if (a.zero()) return a;
    return poly_scale(f, f.inv(a.c.back()), a);
}

Poly poly_gcd(const FiniteField& f, Poly a, Poly b) {
    while (!b.zero()) {
        Poly r = poly_mod(f, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return poly_monic(f, a);
}

Poly poly_derivative(const FiniteField& f, const Poly& a) {
    if (a.c.size() <= 1) return Poly{};
    std::vector<Elem> c(a.c.size() - 1);
    for (std::size_t i = 1; i < a.c.size(); ++i)
        c[i - 1] = f.mul(f.from_int(static_cast<std::int64_t>(i)), a.c[i]);
    return poly_from(std::move(c));
}

Poly poly_pow_mod(const FiniteField& f, Poly base, const mpz_class& k, const Poly& m) {
    if (k < 0) fail(errc::internal, "negative polynomial exponent");
    Poly r = poly_constant(1);
    base = poly_mod(f, base, m);
    mpz_class n = k;
    while (n > 0) {
        if (mpz_odd_p(n.get_mpz_t())) r = poly_mod(f, poly_mul(f, r, base), m);
        base = poly_mod(f, poly_mul(f, base, base), m);
        n >>= 1;
    }
    return r;
}

Elem poly_eval(const FiniteField& f, const Poly& a, Elem x) {
    Elem r = 0;
    for (std::size_t i = a.c.size(); i-- > 0;) r = f.add(f.mul(r, x), a.c[i]);
    return r;
}

std::string print_poly(const FiniteField& f, const Poly& a, const std::string& var) {
    if (a.zero()) return "0";
    std::ostringstream os;
    bool first = true;
    bool ext = f.e() >= 2;
    for (std::size_t i = a.c.size(); i-- > 0;) {
        if (a.c[i] == 0) continue;
        if (!first) os << "+";
        std::string cs = print_elem(f, a.c[i], "a");
        if (i == 0) {
            if (ext && cs.find('+') != std::string::npos)
                os << "(" << cs << ")";
            else
                os << cs;
        } else {
            if (a.c[i] != 1) {
                if (cs.find('+') != std::string::npos || (ext && cs.find('a') != std::string::npos))
                    os << "(" << cs << ")*";
                else
                    os << cs << "*";
            }
            os << var;
            if (i > 1) os << "^" << i;
        }
        first = false;
    }
    return os.str();
}

// ---- factorization ----

namespace {

mpz_class q_power(std::uint64_t q, unsigned d) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), q, d);
    return r;
}

Poly random_poly(const FiniteField& f, SplitMix& rng, int max_deg) {
    std::vector<Elem> c(static_cast<std::size_t>(max_deg) + 1);
    for (auto& x : c) x = rng.next() % f.q();
    return poly_from(std::move(c));
}

// equal-degree splitting of a monic squarefree product of degree-d irreducibles
void edf(const FiniteField& f, const Poly& g, unsigned d, SplitMix& rng,
         std::vector<Poly>& out) {
    if (static_cast<unsigned>(g.degree()) == d) {
        out.push_back(g);
        return;
    }
    Poly s;
    for (;;) {
        Poly r = random_poly(f, rng, g.degree() - 1);
        if (r.degree() < 1) continue;
        if (f.p() != 2) {
            mpz_class m = (q_power(f.q(), d) - 1) / 2;
            Poly w = poly_pow_mod(f, r, m, g);
            w = poly_sub(f, w, poly_constant(1));
            s = poly_gcd(f, w, g);
        } else {
            // trace splitting in characteristic 2
            unsigned k = d * f.e();
            Poly t = poly_mod(f, r, g), acc = t;
            for (unsigned i = 1; i < k; ++i) {
                t = poly_mod(f, poly_mul(f, t, t), g);
                acc = poly_add(f, acc, t);
            }
            s = poly_gcd(f, acc, g);
        }
        if (s.degree() > 0 && s.degree() < g.degree()) break;
    }
    edf(f, s, d, rng, out);
    edf(f, poly_divmod(f, g, s).first, d, rng, out);
}

// distinct irreducible factors of a monic squarefree polynomial
std::vector<Poly> factor_squarefree(const FiniteField& f, Poly g, SplitMix& rng) {
    std::vector<Poly> out;
    Poly x = poly_x(f);
    Poly h = poly_mod(f, x, g);
    for (unsigned d = 1; 2 * d <= static_cast<unsigned>(g.degree()); ++d) {
        h = poly_pow_mod(f, h, mpz_class(static_cast<unsigned long>(f.q())), g);
        Poly gd = poly_gcd(f, poly_sub(f, h, x), g);
        if (gd.degree() > 0) {
            edf(f, gd, d, rng, out);
            g = poly_divmod(f, g, gd).first;
            h = poly_mod(f, h, g);
        }
    }
    if (g.degree() > 0) out.push_back(g);
    return out;
}

// coefficientwise p-th root of a polynomial with vanishing derivative
Poly pth_root(const FiniteField& f, const Poly& a) {
    std::uint64_t p = f.p();
    std::vector<Elem> c(a.c.size() / p + 1, 0);
    mpz_class exp = static_cast<unsigned long>(f.q() / p);
    for (std::size_t i = 0; i * p < a.c.size(); ++i) c[i] = f.pow(a.c[i * p], exp);
    return poly_from(std::move(c));
}

unsigned divide_out(const FiniteField& f, Poly& a, const Poly& pi) {
    unsigned m = 0;
    for (;;) {
        auto [q, r] = poly_divmod(f, a, pi);
        if (!r.zero()) return m;
        a = q;
        ++m;
    }
}

}  // namespace

Factorization factor(const FiniteField& f, const Poly& a) {
    if (a.zero()) fail(errc::zero_polynomial, "factor of the zero polynomial");
    Factorization out;
    out.unit = a.c.back();
    Poly g = poly_monic(f, a);
    SplitMix rng{0x5eedf00dcafeull};
    std::map<Poly, unsigned> acc;
    unsigned mult_scale = 1;
    while (g.degree() > 0) {
        Poly d = poly_derivative(f, g);
        if (d.zero()) {
            g = pth_root(f, g);
            mult_scale *= static_cast<unsigned>(f.p());
            continue;
        }
        Poly sf = poly_divmod(f, g, poly_gcd(f, g, d)).first;
        for (const Poly& pi : factor_squarefree(f, sf, rng)) {
            unsigned m = divide_out(f, g, pi);
            acc[pi] += m * mult_scale;
        }
    }
    out.factors.assign(acc.begin(), acc.end());
    std::sort(out.factors.begin(), out.factors.end(), [](const auto& x, const auto& y) {
        if (x.first.degree() != y.first.degree()) return x.first.degree() < y.first.degree();
        return x.first.c < y.first.c;
    });
    return out;
}

bool is_irreducible(const FiniteField& f, const Poly& a) {
    int n = a.degree();
    if (n <= 0) return false;
    if (n == 1) return true;
    Poly m = poly_monic(f, a);
    Poly x = poly_x(f);
    // Rabin: t^{q^n} = t mod m, and no fixed subfield at maximal proper divisors
    Poly xq = poly_pow_mod(f, x, q_power(f.q(), static_cast<unsigned>(n)), m);
    if (!(poly_sub(f, xq, x).zero())) return false;
    for (auto& [l, mult] : factor_u64(static_cast<std::uint64_t>(n))) {
        Poly h = poly_pow_mod(f, x, q_power(f.q(), static_cast<unsigned>(n) / l), m);
        Poly g = poly_gcd(f, poly_sub(f, h, x), m);
        if (g.degree() != 0) return false;
    }
    return true;
}

std::vector<Elem> roots(const FiniteField& f, const Poly& a) {
    std::vector<Elem> out;
    if (a.zero()) fail(errc::zero_polynomial, "roots of the zero polynomial");
    for (auto& [pi, mult] : factor(f, a).factors)
        if (pi.degree() == 1) out.push_back(f.neg(pi.c[0]));
    std::sort(out.begin(), out.end());
    return out;
}

// ---- embeddings ----

FieldHom identity_hom(const FiniteField& f) {
    Elem x = f.e() == 1 ? 0 : static_cast<Elem>(f.p());  // class of the variable
    return FieldHom{f, f, x};
}

FieldHom canonical_hom(const FiniteField& e, const FiniteField& l) {
    if (e.p() != l.p() || l.e() % e.e() != 0)
        fail(errc::not_subfield, "no embedding between these fields");
    if (e.e() == l.e()) return identity_hom(e);
    // least root of the source modulus in the target
    std::vector<Elem> c(e.modulus().size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = l.from_int(static_cast<std::int64_t>(e.modulus()[i]));
    auto r = roots(l, poly_from(std::move(c)));
    if (r.empty()) fail(errc::internal, "modulus has no root in the extension");
    return FieldHom{e, l, r.front()};
}

Elem apply_hom(const FieldHom& h, Elem x) {
    auto d = unpack(x, h.source.p(), h.source.e());
    Elem r = 0;
    for (std::size_t i = d.size(); i-- > 0;)
        r = h.target.add(h.target.mul(r, h.root_image),
                         h.target.from_int(static_cast<std::int64_t>(d[i])));
    return r;
}

FieldHom compose_hom(const FieldHom& outer, const FieldHom& inner) {
    if (inner.target != outer.source) fail(errc::not_subfield, "homs do not compose");
    return FieldHom{inner.source, outer.target, apply_hom(outer, inner.root_image)};
}

Elem norm_along(const FieldHom& h, Elem x_in_target) {
    if (x_in_target == 0) fail(errc::zero_element, "norm of zero");
    const FiniteField& E = h.source;
    const FiniteField& L = h.target;
    std::uint64_t n = (L.q() - 1) / (E.q() - 1);
    Elem y = L.pow(x_in_target, mpz_class(static_cast<unsigned long>(n)));
    // pull back along h through discrete logs
    std::uint64_t r = L.dlog(y);
    std::uint64_t s = L.dlog(apply_hom(h, E.generator()));
    std::uint64_t mod = L.q() - 1;
    mpz_class sg = gcd(mpz_class(static_cast<unsigned long>(s)), mpz_class(static_cast<unsigned long>(mod)));
    std::uint64_t g = sg.get_ui();
    if (r % g != 0) fail(errc::internal, "norm image not in the subfield");
    mpz_class minv;
    mpz_class sm(static_cast<unsigned long>(s / g)), mm(static_cast<unsigned long>(mod / g));
    if (mm == 1)
        minv = 0;
    else if (mpz_invert(minv.get_mpz_t(), sm.get_mpz_t(), mm.get_mpz_t()) == 0)
        fail(errc::internal, "norm congruence not invertible");
    mpz_class k = (mpz_class(static_cast<unsigned long>(r / g)) * minv) % mm;
    return E.pow(E.generator(), k);
}

// ---- rational functions ----

RatFunc rat_make(const FiniteField& f, Poly num, Poly den) {
    if (den.zero()) fail(errc::zero_polynomial, "zero denominator");
    if (num.zero()) return RatFunc{Poly{}, poly_constant(1)};
    Poly g = poly_gcd(f, num, den);
    if (g.degree() > 0) {
        num = poly_divmod(f, num, g).first;
        den = poly_divmod(f, den, g).first;
    }
    Elem lead = den.c.back();
    if (lead != 1) {
        Elem li = f.inv(lead);
        num = poly_scale(f, li, num);
        den = poly_scale(f, li, den);
    }
    return RatFunc{std::move(num), std::move(den)};
}

RatFunc rat_from_poly(Poly p) { return RatFunc{std::move(p), poly_constant(1)}; }
RatFunc rat_one() { return RatFunc{poly_constant(1), poly_constant(1)}; }

RatFunc rat_add(const FiniteField& f, const RatFunc& a, const RatFunc& b) {
    Poly num = poly_add(f, poly_mul(f, a.num, b.den), poly_mul(f, b.num, a.den));
    return rat_make(f, std::move(num), poly_mul(f, a.den, b.den));
}

RatFunc rat_neg(const FiniteField& f, const RatFunc& a) { return RatFunc{poly_neg(f, a.num), a.den}; }

RatFunc rat_sub(const FiniteField& f, const RatFunc& a, const RatFunc& b) {
    return rat_add(f, a, rat_neg(f, b));
}

RatFunc rat_mul(const FiniteField& f, const RatFunc& a, const RatFunc& b) {
    return rat_make(f, poly_mul(f, a.num, b.num), poly_mul(f, a.den, b.den));
}

RatFunc rat_div(const FiniteField& f, const RatFunc& a, const RatFunc& b) {
    if (b.zero()) fail(errc::zero_polynomial, "division by zero rational function");
    return rat_make(f, poly_mul(f, a.num, b.den), poly_mul(f, a.den, b.num));
}

RatFunc rat_pow(const FiniteField& f, const RatFunc& a, std::int64_t k) {
    if (k == 0) return rat_one();
    RatFunc base = a;
    if (k < 0) {
        base = rat_div(f, rat_one(), a);
        k = -k;
    }
    RatFunc r = rat_one();
    while (k) {
        if (k & 1) r = rat_mul(f, r, base);
        base = rat_mul(f, base, base);
        k >>= 1;
    }
    return r;
}

bool rat_is_constant(const RatFunc& a) { return a.num.degree() <= 0 && a.den.degree() <= 0; }

RatFunc rat_invert_var(const FiniteField& f, const RatFunc& a) {
    if (a.zero()) return a;
    auto rev = [](const Poly& p) {
        std::vector<Elem> c(p.c.rbegin(), p.c.rend());
        return poly_from(std::move(c));
    };
    int dn = a.num.degree(), dd = a.den.degree();
    Poly num = rev(a.num), den = rev(a.den);
    // a(1/s) = s^(dd-dn) * rev(num)/rev(den)
    int shift = dd - dn;
    if (shift > 0) {
        std::vector<Elem> s(static_cast<std::size_t>(shift) + 1, 0);
        s.back() = 1;
        num = poly_mul(f, num, poly_from(std::move(s)));
    } else if (shift < 0) {
        std::vector<Elem> s(static_cast<std::size_t>(-shift) + 1, 0);
        s.back() = 1;
        den = poly_mul(f, den, poly_from(std::move(s)));
    }
    return rat_make(f, std::move(num), std::move(den));
}

std::string print_rat(const FiniteField& f, const RatFunc& a, const std::string& var) {
    if (a.zero()) return "0";
    std::string n = print_poly(f, a.num, var);
    if (a.den.degree() == 0 && a.den.c[0] == 1) return n;
    std::string d = print_poly(f, a.den, var);
    std::string np = a.num.c.size() > 1 ? "(" + n + ")" : n;
    std::string dp = a.den.c.size() > 1 ? "(" + d + ")" : d;
    return np + "/" + dp;
}

// ---- places ----

Place finite_place(const FiniteField& base, Poly pi) {
    pi = poly_monic(base, pi);
    if (!is_irreducible(base, pi)) fail(errc::internal, "place polynomial not irreducible");
    if (static_cast<std::uint64_t>(base.q()) == 0) fail(errc::internal, "bad base");
    return Place{base, false, std::move(pi)};
}

Place infinite_place(const FiniteField& base) { return Place{base, true, Poly{}}; }

bool place_equal(const Place& a, const Place& b) {
    return a.base == b.base && a.infinite == b.infinite && a.pi == b.pi;
}

bool place_less(const Place& a, const Place& b) {
    if (a.infinite != b.infinite) return !a.infinite;  // finite places first
    if (a.infinite) return false;
    if (a.pi.degree() != b.pi.degree()) return a.pi.degree() < b.pi.degree();
    return a.pi.c < b.pi.c;
}

std::string print_place(const Place& v, const std::string& var) {
    if (v.infinite) return "inf";
    return print_poly(v.base, v.pi, var);
}

FiniteField residue_field(const Place& v) {
    return canonical_field(v.base.p(), v.base.e() * v.degree());
}

std::int64_t valuation(const Place& v, const RatFunc& a) {
    if (a.zero()) fail(errc::zero_element, "valuation of zero");
    const FiniteField& f = v.base;
    if (v.infinite) return a.den.degree() - a.num.degree();
    auto count = [&](Poly g) {
        std::int64_t m = 0;
        for (;;) {
            auto [q, r] = poly_divmod(f, g, v.pi);
            if (!r.zero()) return m;
            g = q;
            ++m;
        }
    };
    return count(a.num) - count(a.den);
}

namespace {

struct ReductionData {
    FieldHom incl;  // base -> residue field
    Elem rho;       // chosen root of pi in the residue field
};

ReductionData& reduction_data(const Place& v) {
    static std::map<std::tuple<std::uint64_t, unsigned, std::vector<Elem>>, ReductionData> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(v.base.p(), v.base.e(), v.pi.c);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    FiniteField kappa = residue_field(v);
    FieldHom incl = canonical_hom(v.base, kappa);
    std::vector<Elem> c(v.pi.c.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = apply_hom(incl, v.pi.c[i]);
    auto rs = roots(kappa, poly_from(std::move(c)));
    if (rs.empty()) fail(errc::internal, "place polynomial has no root in residue field");
    return cache.emplace(key, ReductionData{incl, rs.front()}).first->second;
}

}  // namespace

Elem reduce_at(const Place& v, const RatFunc& a) {
    if (a.zero()) fail(errc::zero_element, "reduction of zero");
    if (valuation(v, a) != 0) fail(errc::internal, "reduction of a non-unit");
    const FiniteField& f = v.base;
    if (v.infinite) return f.div(a.num.c.back(), a.den.c.back());
    const ReductionData& rd = reduction_data(v);
    FiniteField kappa = rd.incl.target;
    auto eval = [&](const Poly& g) {
        Elem r = 0;
        for (std::size_t i = g.c.size(); i-- > 0;)
            r = kappa.add(kappa.mul(r, rd.rho), apply_hom(rd.incl, g.c[i]));
        return r;
    };
    Elem n = eval(a.num), d = eval(a.den);
    if (d == 0) fail(errc::internal, "denominator vanished at place of valuation zero");
    return kappa.div(n, d);
}

PlaceKey place_key(const Place& v) {
    if (v.infinite) return {};
    return PlaceKey(v.pi.c.begin(), v.pi.c.end());
}

Place place_from_key(const FiniteField& base, const PlaceKey& k) {
    if (k.empty()) return infinite_place(base);
    std::vector<Elem> c(k.begin(), k.end());
    return finite_place(base, poly_from(std::move(c)));
}

}  // namespace gersten::gfield
