#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

namespace gersten::abgroup {

// Dense integer matrix, row-major. Elements are column vectors: a hom is
// an (target_dim x source_dim) matrix acting by left multiplication.
class IntMat {
  public:
    IntMat() = default;
    IntMat(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols) {}
    IntMat(std::size_t rows, std::size_t cols, std::vector<mpz_class> data);

    static IntMat identity(std::size_t n);
    static IntMat from_rows(const std::vector<std::vector<mpz_class>>& rows);
    static IntMat from_cols(const std::vector<std::vector<mpz_class>>& cols);

    std::size_t rows() const { return r_; }
    std::size_t cols() const { return c_; }
    mpz_class& at(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
    const mpz_class& at(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

    std::vector<mpz_class> col(std::size_t j) const;
    std::vector<mpz_class> row(std::size_t i) const;
    void set_col(std::size_t j, const std::vector<mpz_class>& v);
    IntMat transpose() const;
    bool is_zero() const;

    friend IntMat operator*(const IntMat& x, const IntMat& y);
    friend bool operator==(const IntMat& x, const IntMat& y) = default;

    std::vector<mpz_class> apply(const std::vector<mpz_class>& v) const;

    // columns of `m` appended on the right
    IntMat hcat(const IntMat& m) const;

  private:
    std::size_t r_ = 0, c_ = 0;
    std::vector<mpz_class> a_;
};

struct SmithResult {
    IntMat u, d, v;        // u*m*v == d, u and v unimodular, d diagonal with d1 | d2 | ...
    IntMat uinv, vinv;     // exact inverses, tracked during reduction
};

SmithResult smith_normal_form(const IntMat& m);

// Basis of the integer kernel lattice {x : m x = 0}, as columns.
IntMat kernel_lattice(const IntMat& m);

// One integer solution of m x = b, if any.
std::optional<std::vector<mpz_class>> solve(const IntMat& m, const std::vector<mpz_class>& b);

// Column span of `sub` contained in column span of `super`?
bool lattice_contains(const IntMat& super, const IntMat& sub);

// Basis (as columns) of the intersection of the two column spans.
IntMat lattice_intersect(const IntMat& a, const IntMat& b);

}  // namespace gersten::abgroup
