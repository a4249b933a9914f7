#pragma once

#include <string>
#include <vector>

#include "gersten/intmat.hpp"

namespace gersten::abgroup {

// Finitely generated abelian group in canonical form: free rank plus an
// invariant-factor chain d_1 | d_2 | ... (each >= 2). Coordinates are
// [torsion generators..., free generators...]; two groups are equal iff
// (rank, torsion) agree.
class FgAbGroup {
  public:
    FgAbGroup() = default;  // trivial group
    static FgAbGroup free(std::size_t r);
    static FgAbGroup cyclic(const mpz_class& n);  // Z/n, with Z/0 = Z and Z/1 = 0
    static FgAbGroup of(std::size_t rank, std::vector<mpz_class> torsion);
    static FgAbGroup direct_sum(const FgAbGroup& a, const FgAbGroup& b);
    // invariants of Z^n / (columns of rel)
    static FgAbGroup quotient_of_free(std::size_t n, const IntMat& rel);

    std::size_t rank() const { return rank_; }
    const std::vector<mpz_class>& torsion() const { return torsion_; }
    std::size_t torsion_count() const { return torsion_.size(); }
    std::size_t dim() const { return rank_ + torsion_.size(); }
    bool trivial() const { return dim() == 0; }

    // columns d_i * e_i for the torsion generators
    IntMat relation_cols() const;
    // canonical representative: torsion coordinates reduced into [0, d_i)
    std::vector<mpz_class> reduce(std::vector<mpz_class> v) const;

    const std::vector<std::string>& labels() const { return labels_; }
    void set_labels(std::vector<std::string> l) { labels_ = std::move(l); }

    std::string to_string() const;  // "0", "Z", "Z^2 + Z/2 + Z/6", ...

    friend bool operator==(const FgAbGroup& a, const FgAbGroup& b) {
        return a.rank_ == b.rank_ && a.torsion_ == b.torsion_;
    }

  private:
    std::size_t rank_ = 0;
    std::vector<mpz_class> torsion_;
    std::vector<std::string> labels_;
};

// Homomorphism as an integer matrix between chosen presentations.
class AbHom {
  public:
    AbHom() = default;  // zero map between trivial groups
    AbHom(FgAbGroup source, FgAbGroup target, IntMat m);
    static AbHom zero(const FgAbGroup& source, const FgAbGroup& target);
    static AbHom identity(const FgAbGroup& g);

    const FgAbGroup& source() const { return source_; }
    const FgAbGroup& target() const { return target_; }
    const IntMat& matrix() const { return m_; }

    std::vector<mpz_class> apply(const std::vector<mpz_class>& v) const;
    bool is_zero() const;  // zero modulo the target relations

  private:
    FgAbGroup source_, target_;
    IntMat m_;
};

AbHom compose(const AbHom& g, const AbHom& f);  // g after f

// Presented subquotient <sub>/<rel> of an ambient group: carries the
// canonical group, generator lifts into ambient coordinates, and a
// constructive `express` (throws containment when the vector is outside).
class Subquotient {
  public:
    Subquotient(const FgAbGroup& ambient, const IntMat& sub_gens, const IntMat& rel_gens);

    const FgAbGroup& ambient() const { return ambient_; }
    const FgAbGroup& group() const { return group_; }
    const IntMat& lift() const { return lift_; }  // ambient_dim x group dim
    std::vector<mpz_class> express(const std::vector<mpz_class>& ambient_vec) const;

  private:
    FgAbGroup ambient_;
    FgAbGroup group_;
    IntMat btilde_;                 // adapted basis of <sub_gens> + relations
    std::vector<mpz_class> diag_;   // order of each btilde column in the quotient (0 = free)
    std::vector<int> coord_of_col_; // btilde column -> group coordinate, -1 = dropped
    IntMat lift_;
};

struct SubObject {
    FgAbGroup group;
    AbHom inclusion;  // group -> ambient
};

struct QuotObject {
    FgAbGroup group;
    AbHom projection;  // ambient -> group
};

SubObject kernel(const AbHom& h);
QuotObject cokernel(const AbHom& h);
SubObject image(const AbHom& h);
FgAbGroup subquotient(const FgAbGroup& g, const std::vector<std::vector<mpz_class>>& sub,
                      const std::vector<std::vector<mpz_class>>& rel);

// some x with h(x) = v in the target (modulo its relations), if any
std::optional<std::vector<mpz_class>> preimage(const AbHom& h, const std::vector<mpz_class>& v);

bool hom_equal(const AbHom& a, const AbHom& b);  // same matrix modulo target relations

}  // namespace gersten::abgroup
