#include "gersten/intmat.hpp"

#include "gersten/error.hpp"

namespace gersten::abgroup {

IntMat::IntMat(std::size_t rows, std::size_t cols, std::vector<mpz_class> data)
    : r_(rows), c_(cols), a_(std::move(data)) {
    if (a_.size() != r_ * c_) fail(errc::internal, "matrix data size mismatch");
}

IntMat IntMat::identity(std::size_t n) {
    IntMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

IntMat IntMat::from_rows(const std::vector<std::vector<mpz_class>>& rows) {
    if (rows.empty()) return IntMat();
    IntMat m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols()) fail(errc::internal, "ragged rows");
        for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) = rows[i][j];
    }
    return m;
}

IntMat IntMat::from_cols(const std::vector<std::vector<mpz_class>>& cols) {
    if (cols.empty()) return IntMat();
    IntMat m(cols[0].size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].size() != m.rows()) fail(errc::internal, "ragged cols");
        for (std::size_t i = 0; i < m.rows(); ++i) m.at(i, j) = cols[j][i];
    }
    return m;
}

std::vector<mpz_class> IntMat::col(std::size_t j) const {
    std::vector<mpz_class> v(r_);
    for (std::size_t i = 0; i < r_; ++i) v[i] = at(i, j);
    return v;
}

std::vector<mpz_class> IntMat::row(std::size_t i) const {
    std::vector<mpz_class> v(c_);
    for (std::size_t j = 0; j < c_; ++j) v[j] = at(i, j);
    return v;
}

void IntMat::set_col(std::size_t j, const std::vector<mpz_class>& v) {
    for (std::size_t i = 0; i < r_; ++i) at(i, j) = v[i];
}

IntMat IntMat::transpose() const {
    IntMat t(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
        for (std::size_t j = 0; j < c_; ++j) t.at(j, i) = at(i, j);
    return t;
}

bool IntMat::is_zero() const {
    for (const auto& x : a_)
        if (x != 0) return false;
    return true;
}

IntMat operator*(const IntMat& x, const IntMat& y) {
    if (x.cols() != y.rows()) fail(errc::internal, "matrix product shape mismatch");
    IntMat z(x.rows(), y.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < x.cols(); ++k) {
            if (x.at(i, k) == 0) continue;
            for (std::size_t j = 0; j < y.cols(); ++j) z.at(i, j) += x.at(i, k) * y.at(k, j);
        }
    return z;
}

std::vector<mpz_class> IntMat::apply(const std::vector<mpz_class>& v) const {
    if (v.size() != c_) fail(errc::internal, "apply shape mismatch");
    std::vector<mpz_class> w(r_);
    for (std::size_t i = 0; i < r_; ++i)
        for (std::size_t j = 0; j < c_; ++j)
            if (at(i, j) != 0) w[i] += at(i, j) * v[j];
    return w;
}

IntMat IntMat::hcat(const IntMat& m) const {
    if (r_ != m.rows() && c_ != 0 && m.cols() != 0) fail(errc::internal, "hcat shape mismatch");
    std::size_t rows = std::max(r_, m.rows());
    IntMat z(rows, c_ + m.cols());
    for (std::size_t i = 0; i < r_; ++i)
        for (std::size_t j = 0; j < c_; ++j) z.at(i, j) = at(i, j);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) z.at(i, c_ + j) = m.at(i, j);
    return z;
}

namespace {

// Each elementary operation on (d, u) is mirrored with its inverse on uinv so
// that u * uinv stays the identity; likewise for (d, v, vinv).

void swap_rows(IntMat& m, IntMat& u, IntMat& uinv, std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < m.cols(); ++k) std::swap(m.at(i, k), m.at(j, k));
    for (std::size_t k = 0; k < u.cols(); ++k) std::swap(u.at(i, k), u.at(j, k));
    for (std::size_t k = 0; k < uinv.rows(); ++k) std::swap(uinv.at(k, i), uinv.at(k, j));
}

void swap_cols(IntMat& m, IntMat& v, IntMat& vinv, std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < m.rows(); ++k) std::swap(m.at(k, i), m.at(k, j));
    for (std::size_t k = 0; k < v.rows(); ++k) std::swap(v.at(k, i), v.at(k, j));
    for (std::size_t k = 0; k < vinv.cols(); ++k) std::swap(vinv.at(i, k), vinv.at(j, k));
}

// row[i] -= q * row[j]
void row_op(IntMat& m, IntMat& u, IntMat& uinv, std::size_t i, std::size_t j,
            const mpz_class& q) {
    if (q == 0) return;
    for (std::size_t k = 0; k < m.cols(); ++k) m.at(i, k) -= q * m.at(j, k);
    for (std::size_t k = 0; k < u.cols(); ++k) u.at(i, k) -= q * u.at(j, k);
    for (std::size_t k = 0; k < uinv.rows(); ++k) uinv.at(k, j) += q * uinv.at(k, i);
}

// col[i] -= q * col[j]
void col_op(IntMat& m, IntMat& v, IntMat& vinv, std::size_t i, std::size_t j,
            const mpz_class& q) {
    if (q == 0) return;
    for (std::size_t k = 0; k < m.rows(); ++k) m.at(k, i) -= q * m.at(k, j);
    for (std::size_t k = 0; k < v.rows(); ++k) v.at(k, i) -= q * v.at(k, j);
    for (std::size_t k = 0; k < vinv.cols(); ++k) vinv.at(j, k) += q * vinv.at(i, k);
}

void negate_row(IntMat& m, IntMat& u, IntMat& uinv, std::size_t i) {
    for (std::size_t k = 0; k < m.cols(); ++k) m.at(i, k) = -m.at(i, k);
    for (std::size_t k = 0; k < u.cols(); ++k) u.at(i, k) = -u.at(i, k);
    for (std::size_t k = 0; k < uinv.rows(); ++k) uinv.at(k, i) = -uinv.at(k, i);
}

}  // namespace

SmithResult smith_normal_form(const IntMat& m) {
    IntMat d = m;
    IntMat u = IntMat::identity(m.rows());
    IntMat v = IntMat::identity(m.cols());
    IntMat uinv = IntMat::identity(m.rows());
    IntMat vinv = IntMat::identity(m.cols());
    const std::size_t n = std::min(m.rows(), m.cols());

    for (std::size_t t = 0; t < n; ++t) {
        // pivot: nonzero entry of least absolute value in the remaining block
        std::size_t pi = t, pj = t;
        bool found = false;
        mpz_class best;
        for (std::size_t i = t; i < d.rows(); ++i)
            for (std::size_t j = t; j < d.cols(); ++j) {
                if (d.at(i, j) == 0) continue;
                mpz_class a = abs(d.at(i, j));
                if (!found || a < best) {
                    found = true;
                    best = a;
                    pi = i;
                    pj = j;
                }
            }
        if (!found) break;
        swap_rows(d, u, uinv, t, pi);
        swap_cols(d, v, vinv, t, pj);

        for (;;) {
            bool clean = true;
            for (std::size_t i = t + 1; i < d.rows(); ++i) {
                if (d.at(i, t) == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), d.at(i, t).get_mpz_t(), d.at(t, t).get_mpz_t());
                row_op(d, u, uinv, i, t, q);
                if (d.at(i, t) != 0) {
                    swap_rows(d, u, uinv, t, i);
                    clean = false;
                }
            }
            for (std::size_t j = t + 1; j < d.cols(); ++j) {
                if (d.at(t, j) == 0) continue;
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), d.at(t, j).get_mpz_t(), d.at(t, t).get_mpz_t());
                col_op(d, v, vinv, j, t, q);
                if (d.at(t, j) != 0) {
                    swap_cols(d, v, vinv, t, j);
                    clean = false;
                }
            }
            if (!clean) continue;
            // pivot must divide the rest of the block
            bool divides = true;
            for (std::size_t i = t + 1; i < d.rows() && divides; ++i)
                for (std::size_t j = t + 1; j < d.cols() && divides; ++j)
                    if (d.at(i, j) % d.at(t, t) != 0) {
                        // fold the offending row into row t and restart
                        row_op(d, u, uinv, t, i, mpz_class(-1));
                        divides = false;
                    }
            if (divides) break;
        }
        if (d.at(t, t) < 0) negate_row(d, u, uinv, t);
    }
    return {std::move(u), std::move(d), std::move(v), std::move(uinv), std::move(vinv)};
}

IntMat kernel_lattice(const IntMat& m) {
    auto snf = smith_normal_form(m);
    const IntMat& d = snf.d;
    const IntMat& v = snf.v;
    std::vector<std::vector<mpz_class>> cols;
    const std::size_t n = m.cols();
    for (std::size_t j = 0; j < n; ++j) {
        bool zero = j >= m.rows() || d.at(j, j) == 0;
        if (zero) cols.push_back(v.col(j));
    }
    if (cols.empty()) return IntMat(n, 0);
    return IntMat::from_cols(cols);
}

std::optional<std::vector<mpz_class>> solve(const IntMat& m, const std::vector<mpz_class>& b) {
    if (b.size() != m.rows()) fail(errc::internal, "solve shape mismatch");
    auto snf = smith_normal_form(m);
    const IntMat& d = snf.d;
    const IntMat& v = snf.v;
    std::vector<mpz_class> c = snf.u.apply(b);
    std::vector<mpz_class> y(m.cols());
    const std::size_t n = std::min(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (i < n && d.at(i, i) != 0) {
            if (c[i] % d.at(i, i) != 0) return std::nullopt;
            y[i] = c[i] / d.at(i, i);
        } else if (c[i] != 0) {
            return std::nullopt;
        }
    }
    return v.apply(y);
}

bool lattice_contains(const IntMat& super, const IntMat& sub) {
    for (std::size_t j = 0; j < sub.cols(); ++j)
        if (!solve(super, sub.col(j))) return false;
    return true;
}

IntMat lattice_intersect(const IntMat& a, const IntMat& b) {
    // x in span(a) /\ span(b): a s = b t, kernel of [a | -b]
    IntMat neg = b;
    for (std::size_t i = 0; i < neg.rows(); ++i)
        for (std::size_t j = 0; j < neg.cols(); ++j) neg.at(i, j) = -neg.at(i, j);
    IntMat stacked = a.hcat(neg);
    IntMat ker = kernel_lattice(stacked);
    std::vector<std::vector<mpz_class>> cols;
    for (std::size_t j = 0; j < ker.cols(); ++j) {
        auto full = ker.col(j);
        std::vector<mpz_class> s(full.begin(), full.begin() + static_cast<long>(a.cols()));
        cols.push_back(a.apply(s));
    }
    if (cols.empty()) return IntMat(a.rows(), 0);
    return IntMat::from_cols(cols);
}

}  // namespace gersten::abgroup
