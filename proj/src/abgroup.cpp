#include "gersten/abgroup.hpp"

#include <sstream>

#include "gersten/error.hpp"

namespace gersten::abgroup {

FgAbGroup FgAbGroup::free(std::size_t r) {
    FgAbGroup g;
    g.rank_ = r;
    return g;
}

FgAbGroup FgAbGroup::cyclic(const mpz_class& n) {
    if (n < 0) fail(errc::internal, "cyclic order must be nonnegative");
    if (n == 0) return free(1);
    FgAbGroup g;
    if (n > 1) g.torsion_.push_back(n);
    return g;
}

FgAbGroup FgAbGroup::of(std::size_t rank, std::vector<mpz_class> torsion) {
    for (std::size_t i = 0; i < torsion.size(); ++i) {
        if (torsion[i] < 2) fail(errc::internal, "invariant factor below 2");
        if (i + 1 < torsion.size() && torsion[i + 1] % torsion[i] != 0)
            fail(errc::internal, "invariant factors not a divisibility chain");
    }
    FgAbGroup g;
    g.rank_ = rank;
    g.torsion_ = std::move(torsion);
    return g;
}

FgAbGroup FgAbGroup::quotient_of_free(std::size_t n, const IntMat& rel) {
    if (rel.cols() > 0 && rel.rows() != n) fail(errc::internal, "relation shape mismatch");
    auto snf = smith_normal_form(rel);
    std::vector<mpz_class> torsion;
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < std::min(rel.rows(), rel.cols()); ++i) {
        const mpz_class& d = snf.d.at(i, i);
        if (d == 0) continue;
        ++nonzero;
        if (d > 1) torsion.push_back(d);
    }
    return of(n - nonzero, std::move(torsion));
}

FgAbGroup FgAbGroup::direct_sum(const FgAbGroup& a, const FgAbGroup& b) {
    std::size_t n = a.dim() + b.dim();
    IntMat rel(n, a.torsion_count() + b.torsion_count());
    std::size_t j = 0;
    for (std::size_t i = 0; i < a.torsion_count(); ++i, ++j) rel.at(i, j) = a.torsion()[i];
    for (std::size_t i = 0; i < b.torsion_count(); ++i, ++j)
        rel.at(a.dim() + i, j) = b.torsion()[i];
    return quotient_of_free(n, rel);
}

IntMat FgAbGroup::relation_cols() const {
    IntMat r(dim(), torsion_.size());
    for (std::size_t i = 0; i < torsion_.size(); ++i) r.at(i, i) = torsion_[i];
    return r;
}

std::vector<mpz_class> FgAbGroup::reduce(std::vector<mpz_class> v) const {
    if (v.size() != dim()) fail(errc::internal, "coordinate size mismatch");
    for (std::size_t i = 0; i < torsion_.size(); ++i) {
        mpz_class r;
        mpz_fdiv_r(r.get_mpz_t(), v[i].get_mpz_t(), torsion_[i].get_mpz_t());
        v[i] = r;
    }
    return v;
}

std::string FgAbGroup::to_string() const {
    if (trivial()) return "0";
    std::ostringstream os;
    bool first = true;
    if (rank_ == 1) {
        os << "Z";
        first = false;
    } else if (rank_ > 1) {
        os << "Z^" << rank_;
        first = false;
    }
    for (const auto& d : torsion_) {
        if (!first) os << " + ";
        os << "Z/" << d;
        first = false;
    }
    return os.str();
}

AbHom::AbHom(FgAbGroup source, FgAbGroup target, IntMat m)
    : source_(std::move(source)), target_(std::move(target)), m_(std::move(m)) {
    if (m_.rows() != target_.dim() || m_.cols() != source_.dim())
        fail(errc::internal, "hom matrix shape mismatch");
    // column images of torsion generators must be annihilated by their orders
    for (std::size_t j = 0; j < source_.torsion_count(); ++j) {
        const mpz_class& d = source_.torsion()[j];
        for (std::size_t i = 0; i < target_.dim(); ++i) {
            mpz_class x = d * m_.at(i, j);
            if (i < target_.torsion_count()) {
                if (x % target_.torsion()[i] != 0)
                    fail(errc::internal, "matrix does not respect torsion");
            } else if (x != 0) {
                fail(errc::internal, "matrix does not respect torsion");
            }
        }
    }
}

AbHom AbHom::zero(const FgAbGroup& source, const FgAbGroup& target) {
    return AbHom(source, target, IntMat(target.dim(), source.dim()));
}

AbHom AbHom::identity(const FgAbGroup& g) { return AbHom(g, g, IntMat::identity(g.dim())); }

std::vector<mpz_class> AbHom::apply(const std::vector<mpz_class>& v) const {
    return target_.reduce(m_.apply(v));
}

bool AbHom::is_zero() const {
    for (std::size_t j = 0; j < m_.cols(); ++j) {
        auto v = target_.reduce(m_.col(j));
        for (const auto& x : v)
            if (x != 0) return false;
    }
    return true;
}

AbHom compose(const AbHom& g, const AbHom& f) {
    if (!(f.target() == g.source()))
        fail(errc::internal, "compose: source/target mismatch");
    return AbHom(f.source(), g.target(), g.matrix() * f.matrix());
}

Subquotient::Subquotient(const FgAbGroup& ambient, const IntMat& sub_gens,
                         const IntMat& rel_gens)
    : ambient_(ambient) {
    const std::size_t n = ambient.dim();
    if ((sub_gens.cols() && sub_gens.rows() != n) || (rel_gens.cols() && rel_gens.rows() != n))
        fail(errc::internal, "subquotient generator shape mismatch");

    IntMat amb_rel = ambient.relation_cols();
    IntMat span = IntMat(n, 0).hcat(sub_gens).hcat(amb_rel);  // U = <sub> + relations
    auto snf = smith_normal_form(span);

    // basis of the lattice U: nonzero diagonal entries carried back by uinv
    std::vector<std::vector<mpz_class>> bcols;
    for (std::size_t i = 0; i < std::min(span.rows(), span.cols()); ++i)
        if (snf.d.at(i, i) != 0) {
            auto c = snf.uinv.col(i);
            for (auto& x : c) x *= snf.d.at(i, i);
            bcols.push_back(std::move(c));
        }
    IntMat basis = bcols.empty() ? IntMat(n, 0) : IntMat::from_cols(bcols);
    const std::size_t u = basis.cols();

    // W = <rel> + relations, expressed in the basis of U
    IntMat wgens = IntMat(n, 0).hcat(rel_gens).hcat(amb_rel);
    IntMat coeff(u, wgens.cols());
    for (std::size_t j = 0; j < wgens.cols(); ++j) {
        auto x = solve(basis, wgens.col(j));
        if (!x) fail(errc::containment, "relators do not lie in the subgroup");
        coeff.set_col(j, *x);
    }

    auto qs = smith_normal_form(coeff);
    btilde_ = basis * qs.uinv;
    diag_.assign(u, mpz_class(0));
    for (std::size_t i = 0; i < std::min(coeff.rows(), coeff.cols()); ++i) diag_[i] = qs.d.at(i, i);

    std::vector<mpz_class> torsion;
    std::vector<std::vector<mpz_class>> lifts_torsion, lifts_free;
    coord_of_col_.assign(u, -1);
    for (std::size_t i = 0; i < u; ++i) {
        if (diag_[i] == 1) continue;  // collapses in the quotient
        if (diag_[i] == 0) {
            lifts_free.push_back(btilde_.col(i));
        } else {
            torsion.push_back(diag_[i]);
            lifts_torsion.push_back(btilde_.col(i));
        }
    }
    group_ = FgAbGroup::of(lifts_free.size(), torsion);
    std::vector<std::vector<mpz_class>> lifts = lifts_torsion;
    lifts.insert(lifts.end(), lifts_free.begin(), lifts_free.end());
    lift_ = lifts.empty() ? IntMat(n, 0) : IntMat::from_cols(lifts);

    std::size_t t_at = 0, f_at = torsion.size();
    for (std::size_t i = 0; i < u; ++i) {
        if (diag_[i] == 1) continue;
        coord_of_col_[i] = static_cast<int>(diag_[i] == 0 ? f_at++ : t_at++);
    }
}

std::vector<mpz_class> Subquotient::express(const std::vector<mpz_class>& ambient_vec) const {
    auto x = solve(btilde_, ambient_vec);
    if (!x) fail(errc::containment, "vector not in the subgroup");
    std::vector<mpz_class> q(group_.dim());
    for (std::size_t i = 0; i < x->size(); ++i) {
        if (coord_of_col_[i] < 0) continue;
        q[static_cast<std::size_t>(coord_of_col_[i])] = (*x)[i];
    }
    return group_.reduce(std::move(q));
}

SubObject kernel(const AbHom& h) {
    const FgAbGroup& src = h.source();
    const FgAbGroup& tgt = h.target();
    // x with h(x) = 0 in the target: solutions of [M | R_target] (x,y) = 0
    IntMat stacked = h.matrix().hcat(tgt.relation_cols());
    IntMat ker = kernel_lattice(stacked);
    std::vector<std::vector<mpz_class>> xs;
    for (std::size_t j = 0; j < ker.cols(); ++j) {
        auto c = ker.col(j);
        xs.emplace_back(c.begin(), c.begin() + static_cast<long>(src.dim()));
    }
    IntMat sub = xs.empty() ? IntMat(src.dim(), 0) : IntMat::from_cols(xs);
    Subquotient sq(src, sub, IntMat(src.dim(), 0));
    return {sq.group(), AbHom(sq.group(), src, sq.lift())};
}

QuotObject cokernel(const AbHom& h) {
    const FgAbGroup& tgt = h.target();
    Subquotient sq(tgt, IntMat::identity(tgt.dim()), h.matrix());
    IntMat proj(sq.group().dim(), tgt.dim());
    for (std::size_t j = 0; j < tgt.dim(); ++j) {
        std::vector<mpz_class> e(tgt.dim());
        e[j] = 1;
        proj.set_col(j, sq.express(e));
    }
    return {sq.group(), AbHom(tgt, sq.group(), proj)};
}

SubObject image(const AbHom& h) {
    const FgAbGroup& tgt = h.target();
    Subquotient sq(tgt, h.matrix(), IntMat(tgt.dim(), 0));
    return {sq.group(), AbHom(sq.group(), tgt, sq.lift())};
}

FgAbGroup subquotient(const FgAbGroup& g, const std::vector<std::vector<mpz_class>>& sub,
                      const std::vector<std::vector<mpz_class>>& rel) {
    IntMat s = sub.empty() ? IntMat(g.dim(), 0) : IntMat::from_cols(sub);
    IntMat r = rel.empty() ? IntMat(g.dim(), 0) : IntMat::from_cols(rel);
    return Subquotient(g, s, r).group();
}

std::optional<std::vector<mpz_class>> preimage(const AbHom& h, const std::vector<mpz_class>& v) {
    IntMat stacked = h.matrix().hcat(h.target().relation_cols());
    auto x = solve(stacked, v);
    if (!x) return std::nullopt;
    std::vector<mpz_class> r(x->begin(), x->begin() + static_cast<long>(h.source().dim()));
    return h.source().reduce(std::move(r));
}

bool hom_equal(const AbHom& a, const AbHom& b) {
    if (!(a.source() == b.source()) || !(a.target() == b.target())) return false;
    for (std::size_t j = 0; j < a.matrix().cols(); ++j) {
        auto x = a.target().reduce(a.matrix().col(j));
        auto y = b.target().reduce(b.matrix().col(j));
        if (x != y) return false;
    }
    return true;
}

}  // namespace gersten::abgroup

namespace gersten {

const char* errc_name(errc c) {
    switch (c) {
        case errc::not_prime: return "NotPrime";
        case errc::size_bound: return "SizeBound";
        case errc::zero_polynomial: return "ZeroPolynomial";
        case errc::not_subfield: return "NotSubfield";
        case errc::zero_element: return "ZeroElement";
        case errc::zero_entry: return "ZeroEntry";
        case errc::field_mismatch: return "FieldMismatch";
        case errc::unsupported_extension: return "UnsupportedExtension";
        case errc::containment: return "ContainmentError";
        case errc::degenerate_config: return "DegenerateConfig";
        case errc::schema: return "SchemaError";
        case errc::inconsistency: return "InconsistencyError";
        case errc::need_support_hint: return "NeedSupportHint";
        case errc::missing_fiber: return "MissingFiber";
        case errc::unsupported_dimension: return "UnsupportedDimension";
        case errc::unsupported_scheme: return "UnsupportedScheme";
        case errc::unsupported_morphism: return "UnsupportedMorphism";
        case errc::unsupported_field: return "UnsupportedField";
        case errc::unsupported_realization: return "UnsupportedRealization";
        case errc::exactness_violation: return "ExactnessViolation";
        case errc::not_exhaustive: return "NotExhaustive";
        case errc::not_stabilized: return "NotStabilized";
        case errc::parse: return "ParseError";
        case errc::internal: return "InternalError";
    }
    return "UnknownError";
}

}  // namespace gersten
