#include "gersten/spectra.hpp"

#include <algorithm>
#include <sstream>

#include "gersten/error.hpp"
#include "json.hpp"

namespace gersten::spectra {

using abgroup::AbHom;
using abgroup::FgAbGroup;
using abgroup::IntMat;
using abgroup::Subquotient;

namespace {

const FgAbGroup& zero_group() {
    static FgAbGroup z;
    return z;
}

std::string bidx(const BiIndex& i) {
    return "(" + std::to_string(i.p) + "," + std::to_string(i.q) + ")";
}

IntMat cols_of(const std::vector<std::vector<mpz_class>>& cols, std::size_t dim) {
    return cols.empty() ? IntMat(dim, 0) : IntMat::from_cols(cols);
}

// lattice spanned by the image of a hom together with the target relations
IntMat image_lattice(const AbHom& h) {
    return h.matrix().hcat(h.target().relation_cols());
}

// lattice of the kernel of a hom inside its source
IntMat kernel_lattice_of(const AbHom& h) {
    auto k = abgroup::kernel(h);
    return k.inclusion.matrix().hcat(h.source().relation_cols());
}

bool same_lattice(const IntMat& a, const IntMat& b) {
    return abgroup::lattice_contains(a, b) && abgroup::lattice_contains(b, a);
}

}  // namespace

const FgAbGroup& ExactCoupleData::d_at(const BiIndex& i) const {
    auto it = D.find(i);
    return it == D.end() ? zero_group() : it->second;
}

const FgAbGroup& ExactCoupleData::e_at(const BiIndex& i) const {
    auto it = E.find(i);
    return it == E.end() ? zero_group() : it->second;
}

AbHom ExactCoupleData::differential(const BiIndex& i) const {
    BiIndex mid{i.p - 1, i.q};
    BiIndex tgt{mid.p + beta_bidegree.p, mid.q + beta_bidegree.q};
    auto g = gamma.find(i);
    auto b = beta.find(mid);
    if (g == gamma.end() || b == beta.end())
        return AbHom::zero(e_at(i), e_at(tgt));
    return abgroup::compose(b->second, g->second);
}

void ExactCoupleData::validate() const {
    // exactness at D: im(alpha into) = ker(beta out)
    for (const auto& [i, grp] : D) {
        BiIndex prev{i.p - 1, i.q + 1};
        auto a = alpha.find(prev);
        auto b = beta.find(i);
        if (a == alpha.end() || b == beta.end()) continue;  // window edge
        if (!same_lattice(image_lattice(a->second), kernel_lattice_of(b->second)))
            fail(errc::exactness_violation, "at D" + bidx(i));
    }
    // exactness at E: im(beta) = ker(gamma)
    for (const auto& [i, grp] : E) {
        BiIndex src{i.p - beta_bidegree.p, i.q - beta_bidegree.q};
        auto b = beta.find(src);
        auto g = gamma.find(i);
        if (b == beta.end() || g == gamma.end()) continue;
        if (!same_lattice(image_lattice(b->second), kernel_lattice_of(g->second)))
            fail(errc::exactness_violation, "at E" + bidx(i));
    }
    // exactness at D again: im(gamma into) = ker(alpha out)
    for (const auto& [i, grp] : D) {
        BiIndex esrc{i.p + 1, i.q};
        auto g = gamma.find(esrc);
        auto a = alpha.find(i);
        if (g == gamma.end() || a == alpha.end()) continue;
        if (!same_lattice(image_lattice(g->second), kernel_lattice_of(a->second)))
            fail(errc::exactness_violation, "at D" + bidx(i) + " (gamma/alpha)");
    }
}

ExactCoupleData derive(const ExactCoupleData& c) {
    ExactCoupleData out;
    out.beta_bidegree = BiIndex{c.beta_bidegree.p - 1, c.beta_bidegree.q + 1};

    std::map<BiIndex, Subquotient> dsub, esub;

    // D' = image of alpha
    for (const auto& [i, grp] : c.D) {
        BiIndex prev{i.p - 1, i.q + 1};
        auto a = c.alpha.find(prev);
        if (a == c.alpha.end()) continue;
        Subquotient sq(grp, a->second.matrix(), IntMat(grp.dim(), 0));
        out.D.emplace(i, sq.group());
        dsub.emplace(i, std::move(sq));
    }

    // E' = ker d / im d
    for (const auto& [i, grp] : c.E) {
        BiIndex into{i.p - (c.beta_bidegree.p - 1), i.q - c.beta_bidegree.q};
        if (!c.E.count(into)) continue;  // need the incoming differential
        AbHom d_out = c.differential(i);
        AbHom d_in = c.differential(into);
        if (!(d_in.target() == grp)) continue;
        auto ker = abgroup::kernel(d_out);
        Subquotient sq(grp, ker.inclusion.matrix(), d_in.matrix());
        out.E.emplace(i, sq.group());
        esub.emplace(i, std::move(sq));
    }

    // alpha' : restriction of alpha
    for (const auto& [i, sq] : dsub) {
        BiIndex tgt{i.p + 1, i.q - 1};
        auto a = c.alpha.find(i);
        if (a == c.alpha.end()) continue;
        auto t = dsub.find(tgt);
        if (t == dsub.end()) continue;
        IntMat m(t->second.group().dim(), sq.group().dim());
        for (std::size_t j = 0; j < sq.group().dim(); ++j)
            m.set_col(j, t->second.express(a->second.matrix().apply(sq.lift().col(j))));
        out.alpha.emplace(i, AbHom(sq.group(), t->second.group(), m));
    }

    // beta' : alpha-preimage followed by beta
    for (const auto& [i, sq] : dsub) {
        BiIndex prev{i.p - 1, i.q + 1};
        BiIndex etgt{prev.p + c.beta_bidegree.p, prev.q + c.beta_bidegree.q};
        auto a = c.alpha.find(prev);
        auto b = c.beta.find(prev);
        if (a == c.alpha.end() || b == c.beta.end()) continue;
        auto t = esub.find(etgt);
        if (t == esub.end()) continue;
        IntMat m(t->second.group().dim(), sq.group().dim());
        for (std::size_t j = 0; j < sq.group().dim(); ++j) {
            auto pre = abgroup::preimage(a->second, sq.lift().col(j));
            if (!pre) fail(errc::internal, "derived beta: generator has no alpha preimage");
            m.set_col(j, t->second.express(b->second.matrix().apply(*pre)));
        }
        out.beta.emplace(i, AbHom(sq.group(), t->second.group(), m));
    }

    // gamma' : induced by gamma on cycle representatives
    for (const auto& [i, sq] : esub) {
        BiIndex tgt{i.p - 1, i.q};
        auto g = c.gamma.find(i);
        if (g == c.gamma.end()) continue;
        auto t = dsub.find(tgt);
        if (t == dsub.end()) continue;
        IntMat m(t->second.group().dim(), sq.group().dim());
        for (std::size_t j = 0; j < sq.group().dim(); ++j)
            m.set_col(j, t->second.express(g->second.matrix().apply(sq.lift().col(j))));
        out.gamma.emplace(i, AbHom(sq.group(), t->second.group(), m));
    }

    out.validate();
    return out;
}

// ---- filtered complexes ----

void FilteredComplex::validate() const {
    if (groups.size() != d.size() + 1 && !(groups.size() == 1 && d.empty()))
        fail(errc::internal, "complex shape mismatch");
    for (std::size_t n = 0; n < d.size(); ++n) {
        if (!(d[n].source() == groups[n]) || !(d[n].target() == groups[n + 1]))
            fail(errc::internal, "differential endpoints mismatch");
        if (n + 1 < d.size() && !abgroup::compose(d[n + 1], d[n]).is_zero())
            fail(errc::internal, "d^2 != 0 in the input complex");
    }
    // filtration: generators nested and stable under d
    for (std::size_t r = 0; r < filt_gens.size(); ++r) {
        if (filt_gens[r].size() != groups.size())
            fail(errc::internal, "filtration layer has wrong length");
        for (std::size_t n = 0; n < groups.size(); ++n) {
            IntMat cur = cols_of(filt_gens[r][n], groups[n].dim());
            IntMat outer = r == 0 ? IntMat::identity(groups[n].dim())
                                  : cols_of(filt_gens[r - 1][n], groups[n].dim());
            IntMat outer_l = outer.hcat(groups[n].relation_cols());
            if (!abgroup::lattice_contains(outer_l, cur))
                fail(errc::not_exhaustive, "filtration layers are not nested");
            if (n + 1 < groups.size()) {
                IntMat tgt = cols_of(filt_gens[r][n + 1], groups[n + 1].dim())
                                 .hcat(groups[n + 1].relation_cols());
                for (std::size_t j = 0; j < cur.cols(); ++j)
                    if (!abgroup::solve(tgt, d[n].matrix().apply(cur.col(j))))
                        fail(errc::not_exhaustive, "filtration is not a subcomplex");
            }
        }
    }
}

namespace {

// presented homology of a three-term stretch given by generator lifts into a
// fixed ambient group
struct PresentedLevel {
    Subquotient span;  // the subgroup or subquotient of the ambient
};

struct HomologyAt {
    Subquotient classes;  // inside span.group()
    FgAbGroup group;
};

struct LevelComplex {
    // per degree: presentation of the level (sub or quotient) and its
    // induced differential
    std::vector<Subquotient> level;
    std::vector<AbHom> dd;
    std::vector<HomologyAt> h;

    std::vector<mpz_class> class_rep_in_ambient(int n, std::size_t gen) const {
        auto in_level = h[static_cast<std::size_t>(n)].classes.lift().col(gen);
        return level[static_cast<std::size_t>(n)].lift().apply(in_level);
    }

    std::vector<mpz_class> express_class(int n, const std::vector<mpz_class>& ambient_vec) const {
        auto lv = level[static_cast<std::size_t>(n)].express(ambient_vec);
        return h[static_cast<std::size_t>(n)].classes.express(lv);
    }
};

LevelComplex build_level(const FilteredComplex& fc,
                         const std::vector<IntMat>& sub_gens,
                         const std::vector<IntMat>& rel_gens) {
    LevelComplex lc;
    std::size_t len = fc.groups.size();
    for (std::size_t n = 0; n < len; ++n)
        lc.level.emplace_back(fc.groups[n], sub_gens[n], rel_gens[n]);
    for (std::size_t n = 0; n + 1 < len; ++n) {
        IntMat m(lc.level[n + 1].group().dim(), lc.level[n].group().dim());
        for (std::size_t j = 0; j < lc.level[n].group().dim(); ++j) {
            auto img = fc.d[n].matrix().apply(lc.level[n].lift().col(j));
            m.set_col(j, lc.level[n + 1].express(img));
        }
        lc.dd.emplace_back(lc.level[n].group(), lc.level[n + 1].group(), m);
    }
    for (std::size_t n = 0; n < len; ++n) {
        const FgAbGroup& g = lc.level[n].group();
        IntMat ker = n < lc.dd.size() ? abgroup::kernel(lc.dd[n]).inclusion.matrix()
                                      : IntMat::identity(g.dim());
        IntMat im = n > 0 ? lc.dd[n - 1].matrix() : IntMat(g.dim(), 0);
        Subquotient classes(g, ker, im);
        FgAbGroup grp = classes.group();
        lc.h.push_back(HomologyAt{std::move(classes), std::move(grp)});
    }
    return lc;
}

}  // namespace

namespace {

struct Tower {
    std::map<int, LevelComplex> phi, gr;
    int N = 0, m = 0, pad = 0;
};

Tower build_tower(const FilteredComplex& fc) {
    Tower tw;
    tw.N = fc.top_degree();
    tw.m = fc.filtration_length();
    const int m = tw.m;
    // the derivation reach along the window grows quadratically with the
    // page number, so the index padding must too
    tw.pad = (m + 2) * (m + 3) / 2 + 2;

    // levels r in [-pad, m+1+pad]; r <= 0 is the whole complex, r >= m+1 zero
    auto gens_for = [&](int r) {
        std::vector<IntMat> g(fc.groups.size());
        for (std::size_t n = 0; n < fc.groups.size(); ++n) {
            if (r <= 0)
                g[n] = IntMat::identity(fc.groups[n].dim());
            else if (r >= m + 1)
                g[n] = IntMat(fc.groups[n].dim(), 0);
            else
                g[n] = cols_of(fc.filt_gens[static_cast<std::size_t>(r - 1)][n],
                               fc.groups[n].dim());
        }
        return g;
    };
    std::vector<IntMat> empty_rel(fc.groups.size());
    for (std::size_t n = 0; n < fc.groups.size(); ++n)
        empty_rel[n] = IntMat(fc.groups[n].dim(), 0);

    // the levels repeat outside [0, m+1]; build each distinct one once
    LevelComplex phi_full = build_level(fc, gens_for(0), empty_rel);
    LevelComplex phi_zero = build_level(fc, gens_for(m + 1), empty_rel);
    LevelComplex gr_trivial = build_level(fc, gens_for(0), gens_for(0));
    LevelComplex gr_zero = build_level(fc, gens_for(m + 1), gens_for(m + 1));
    for (int r = -tw.pad; r <= m + 1 + tw.pad; ++r) {
        if (r < 0) {
            tw.phi.emplace(r, phi_full);
            tw.gr.emplace(r, gr_trivial);
        } else if (r >= m + 1) {
            tw.phi.emplace(r, phi_zero);
            tw.gr.emplace(r, gr_zero);
        } else {
            tw.phi.emplace(r, build_level(fc, gens_for(r), empty_rel));
            tw.gr.emplace(r, build_level(fc, gens_for(r), gens_for(r + 1)));
        }
    }
    return tw;
}

}  // namespace

ExactCoupleData couple_from_filtered(const FilteredComplex& fc) {
    fc.validate();
    Tower tw = build_tower(fc);
    const int N = tw.N, m = tw.m, pad = tw.pad;
    auto& phi = tw.phi;
    auto& gr = tw.gr;
    auto in_deg = [&](int n) { return n >= 0 && n <= N; };

    ExactCoupleData couple;
    couple.beta_bidegree = BiIndex{0, 0};
    for (int r = -pad; r <= m + 1 + pad; ++r) {
        for (int n = -pad - 1; n <= N + pad + 1; ++n) {
            BiIndex i{-r, -(n - r)};  // s = -r, t chosen so that -s-t = n
            i.q = -n + r;
            couple.D.emplace(i, in_deg(n) ? phi.at(r).h[static_cast<std::size_t>(n)].group
                                          : zero_group());
            couple.E.emplace(i, in_deg(n) ? gr.at(r).h[static_cast<std::size_t>(n)].group
                                          : zero_group());
        }
    }
    for (int r = -pad; r <= m + 1 + pad; ++r) {
        for (int n = -pad - 1; n <= N + pad + 1; ++n) {
            BiIndex i{-r, -n + r};
            const FgAbGroup& dsrc = couple.D.at(i);
            // alpha: H^n(Phi^r) -> H^n(Phi^{r-1})
            if (couple.D.count(BiIndex{i.p + 1, i.q - 1})) {
                const FgAbGroup& dtgt = couple.D.at(BiIndex{i.p + 1, i.q - 1});
                IntMat mm(dtgt.dim(), dsrc.dim());
                if (in_deg(n) && r - 1 >= -pad) {
                    for (std::size_t j = 0; j < dsrc.dim(); ++j) {
                        auto rep = phi.at(r).class_rep_in_ambient(n, j);
                        mm.set_col(j, phi.at(r - 1).express_class(n, rep));
                    }
                }
                couple.alpha.emplace(i, AbHom(dsrc, dtgt, mm));
            }
            // beta: H^n(Phi^r) -> H^n(gr^r)
            {
                const FgAbGroup& etgt = couple.E.at(i);
                IntMat mm(etgt.dim(), dsrc.dim());
                if (in_deg(n)) {
                    for (std::size_t j = 0; j < dsrc.dim(); ++j) {
                        auto rep = phi.at(r).class_rep_in_ambient(n, j);
                        mm.set_col(j, gr.at(r).express_class(n, rep));
                    }
                }
                couple.beta.emplace(i, AbHom(dsrc, etgt, mm));
            }
            // gamma: H^n(gr^r) -> H^{n+1}(Phi^{r+1})
            if (couple.D.count(BiIndex{i.p - 1, i.q})) {
                const FgAbGroup& esrc = couple.E.at(i);
                const FgAbGroup& dtgt = couple.D.at(BiIndex{i.p - 1, i.q});
                IntMat mm(dtgt.dim(), esrc.dim());
                if (in_deg(n) && in_deg(n + 1) && r + 1 <= m + 1 + pad) {
                    for (std::size_t j = 0; j < esrc.dim(); ++j) {
                        auto rep = gr.at(r).class_rep_in_ambient(n, j);
                        auto img = fc.d[static_cast<std::size_t>(n)].matrix().apply(rep);
                        mm.set_col(j, phi.at(r + 1).express_class(n + 1, img));
                    }
                }
                couple.gamma.emplace(i, AbHom(esrc, dtgt, mm));
            }
        }
    }
    couple.validate();
    return couple;
}

PagesResult pages(const FilteredComplex& fc) {
    fc.validate();
    Tower tw = build_tower(fc);
    const int N = tw.N, m = tw.m;
    auto& phi = tw.phi;
    ExactCoupleData couple = couple_from_filtered(fc);

    PagesResult out;
    auto emit_page = [&](const ExactCoupleData& c, int page_r) {
        SpectralPage pg;
        pg.r = page_r;
        for (const auto& [i, grp] : c.E) {
            int rr = -i.p;
            int ww = -i.q;
            if (rr < 0 || rr > m || (rr + ww) < 0 || (rr + ww) > N) continue;
            pg.entries.emplace(BiIndex{rr, ww}, grp);
            AbHom dd = c.differential(i);
            if (!dd.is_zero()) pg.differentials.emplace(BiIndex{rr, ww}, dd);
        }
        // d o d = 0 on the page, re-verified
        for (const auto& [i, grp] : c.E) {
            AbHom d1 = c.differential(i);
            BiIndex next{i.p - 1 + (c.beta_bidegree.p), i.q + c.beta_bidegree.q};
            AbHom d2 = c.differential(next);
            if (d1.matrix().cols() && d2.matrix().cols() && !(d1.target() == d2.source())) continue;
            if (d1.matrix().cols() && !abgroup::compose(d2, d1).is_zero())
                fail(errc::internal, "page differential does not square to zero");
        }
        out.pages.push_back(std::move(pg));
    };

    ExactCoupleData current = couple;
    emit_page(current, 1);
    for (int page_r = 2; page_r <= m + 2; ++page_r) {
        current = derive(current);
        emit_page(current, page_r);
    }
    out.stable_r = m + 2;
    for (int k = static_cast<int>(out.pages.size()); k-- > 0;) {
        if (out.pages[static_cast<std::size_t>(k)].differentials.empty())
            out.stable_r = out.pages[static_cast<std::size_t>(k)].r;
        else
            break;
    }

    // abutment filtration: N^r H^n = im(H^n(Phi^r) -> H^n)
    for (int n = 0; n <= N; ++n) {
        const LevelComplex& full = phi.at(0);
        FgAbGroup hn = full.h[static_cast<std::size_t>(n)].group;
        out.filtration.total[n] = hn;
        std::vector<FgAbGroup> filt, graded;
        std::vector<IntMat> images;
        for (int r = 0; r <= m + 1; ++r) {
            std::vector<std::vector<mpz_class>> gens;
            const LevelComplex& lev = phi.at(r);
            for (std::size_t j = 0; j < lev.h[static_cast<std::size_t>(n)].group.dim(); ++j) {
                auto rep = lev.class_rep_in_ambient(n, j);
                gens.push_back(full.express_class(n, rep));
            }
            IntMat g = cols_of(gens, hn.dim());
            images.push_back(g);
            filt.push_back(Subquotient(hn, g, IntMat(hn.dim(), 0)).group());
        }
        for (int r = 0; r <= m; ++r)
            graded.push_back(
                Subquotient(hn, images[static_cast<std::size_t>(r)],
                            images[static_cast<std::size_t>(r + 1)])
                    .group());
        out.filtration.filtration[n] = std::move(filt);
        out.filtration.graded[n] = std::move(graded);
    }

    // engine self-check: graded pieces match the last page
    const SpectralPage& einf = out.last();
    for (int n = 0; n <= N; ++n)
        for (int r = 0; r <= m; ++r) {
            auto it = einf.entries.find(BiIndex{r, n - r});
            const FgAbGroup& e = it == einf.entries.end() ? zero_group() : it->second;
            const FgAbGroup& g = out.filtration.graded.at(n)[static_cast<std::size_t>(r)];
            if (!(g == e))
                fail(errc::internal, "E_infinity disagrees with the graded abutment at (p,q)=(" +
                                         std::to_string(r) + "," + std::to_string(n - r) +
                                         "): page " + e.to_string() + " vs graded " +
                                         g.to_string());
        }
    return out;
}

const SpectralPage& PagesResult::page(int r) const {
    for (const auto& p : pages)
        if (p.r == r) return p;
    fail(errc::not_stabilized, "page " + std::to_string(r) + " was not computed");
}

// ---- coniveau assembly ----

std::vector<gfield::Place> support_places(const gfield::FiniteField& base, unsigned degree_bound,
                                          const std::vector<gfield::Poly>& hints) {
    std::map<gfield::PlaceKey, gfield::Place> acc;
    for (unsigned deg = 1; deg <= degree_bound; ++deg) {
        std::uint64_t count = 1;
        for (unsigned i = 0; i < deg; ++i) count *= base.q();
        for (std::uint64_t enc = 0; enc < count; ++enc) {
            std::vector<gfield::Elem> c(deg + 1);
            std::uint64_t e = enc;
            for (unsigned i = 0; i < deg; ++i) {
                c[i] = e % base.q();
                e /= base.q();
            }
            c[deg] = 1;
            gfield::Poly cand = gfield::poly_from(std::move(c));
            if (gfield::is_irreducible(base, cand)) {
                gfield::Place v = gfield::finite_place(base, cand);
                acc.emplace(gfield::place_key(v), v);
            }
        }
    }
    for (const gfield::Poly& h : hints) {
        if (h.degree() < 1) continue;
        for (auto& [pi, mult] : gfield::factor(base, h).factors) {
            gfield::Place v = gfield::finite_place(base, pi);
            acc.emplace(gfield::place_key(v), v);
        }
    }
    std::vector<gfield::Place> out;
    for (auto& [k, v] : acc) out.push_back(v);
    std::sort(out.begin(), out.end(), gfield::place_less);
    return out;
}

ConiveauResult assemble_coniveau(std::shared_ptr<const schememod::SchemeDescription> X,
                                 Realization table, int weight,
                                 const std::vector<gfield::Place>& support) {
    if (table != Realization::motivic)
        fail(errc::unsupported_realization, "only the motivic table is provided");
    const schememod::SchemeDescription& S = *X;
    bool is_point = S.kind == schememod::SchemeKind::point;
    bool is_curve = S.kind == schememod::SchemeKind::affine_line ||
                    S.kind == schememod::SchemeKind::proj_line;
    if (!is_point && !is_curve)
        fail(errc::unsupported_scheme, "coniveau assembly covers point, A^1 and P^1");
    if (weight < 0 || (is_curve && weight > 1))
        fail(errc::unsupported_realization,
             "the motivic K^M table pins weights 0 and 1 on curves");

    auto phi = cyclemod::km_instance();
    ConiveauResult out;
    out.weight = weight;
    out.support = support;

    if (is_point) {
        // one column; the q = n row is K^M_n of the point, all else zero
        FilteredComplex fc;
        int n = std::max(weight, 0);
        auto grp = cyclemod::evaluate(phi, milnor::finite_field_ref(S.base), weight).group;
        for (int k = 0; k < n; ++k) fc.groups.push_back(FgAbGroup());
        fc.groups.push_back(grp);
        for (int k = 0; k + 1 < static_cast<int>(fc.groups.size()); ++k)
            fc.d.push_back(AbHom::zero(fc.groups[static_cast<std::size_t>(k)],
                                       fc.groups[static_cast<std::size_t>(k) + 1]));
        out.ss = pages(fc);
        out.row.c0 = grp;
        out.row.c1 = FgAbGroup();
        out.row.d = AbHom::zero(grp, FgAbGroup());
        auto exact = cyclecx::chow(X, phi, 0, weight);
        out.exact_diagonal = exact.group;
        out.exact_diagonal_note = exact.note;
        return out;
    }

    out.row = cyclecx::bounded_gersten_complex(S, phi, weight, support);

    FilteredComplex fc;
    const int n = weight;
    for (int k = 0; k < n; ++k) fc.groups.push_back(FgAbGroup());
    fc.groups.push_back(out.row.c0);
    fc.groups.push_back(out.row.c1);
    for (int k = 0; k + 1 < static_cast<int>(fc.groups.size()); ++k) {
        if (k == n)
            fc.d.push_back(out.row.d);
        else
            fc.d.push_back(AbHom::zero(fc.groups[static_cast<std::size_t>(k)],
                                       fc.groups[static_cast<std::size_t>(k) + 1]));
    }
    // coniveau filtration: Phi^1 is the codimension >= 1 column
    std::vector<std::vector<std::vector<mpz_class>>> layer(fc.groups.size());
    std::vector<std::vector<mpz_class>> c1_gens;
    for (std::size_t j = 0; j < out.row.c1.dim(); ++j) {
        std::vector<mpz_class> e(out.row.c1.dim());
        e[j] = 1;
        c1_gens.push_back(std::move(e));
    }
    layer[static_cast<std::size_t>(n) + 1] = c1_gens;
    fc.filt_gens.push_back(std::move(layer));

    out.ss = pages(fc);

    auto exact = cyclecx::chow(X, phi, 1, weight);
    out.exact_diagonal = exact.group;
    out.exact_diagonal_note = exact.note;
    // the bounded diagonal must already agree with the exact solver value
    auto it = out.ss.last().entries.find(BiIndex{1, weight});
    const FgAbGroup& bounded = it == out.ss.last().entries.end() ? zero_group() : it->second;
    if (!(bounded == out.exact_diagonal))
        fail(errc::internal, "support-bounded diagonal disagrees with the exact Chow solver");
    return out;
}

FiltrationReport coniveau_filtration_report(const PagesResult& ss,
                                            const std::string& abutment_name) {
    if (ss.pages.empty()) fail(errc::not_stabilized, "no pages computed");
    FiltrationReport rep;
    for (const auto& [n, filt] : ss.filtration.filtration) {
        std::vector<std::pair<std::string, FgAbGroup>> steps;
        for (std::size_t r = 0; r < filt.size(); ++r)
            steps.emplace_back(
                "N^" + std::to_string(r) + " " + abutment_name + "^" + std::to_string(n),
                filt[r]);
        rep.steps.emplace(n, std::move(steps));
    }
    return rep;
}

std::string page_to_json(const SpectralPage& page) {
    nlohmann::json j;
    j["r"] = page.r;
    j["entries"] = nlohmann::json::array();
    for (const auto& [i, grp] : page.entries) {
        nlohmann::json e;
        e["p"] = i.p;
        e["q"] = i.q;
        e["rank"] = grp.rank();
        auto tor = nlohmann::json::array();
        for (const auto& t : grp.torsion()) {
            if (!t.fits_slong_p()) fail(errc::internal, "torsion too large for the page dump");
            tor.push_back(t.get_si());
        }
        e["torsion"] = tor;
        j["entries"].push_back(e);
    }
    j["differentials"] = nlohmann::json::array();
    for (const auto& [i, dd] : page.differentials) {
        nlohmann::json e;
        e["from"] = {i.p, i.q};
        e["to"] = {i.p + page.r, i.q - page.r + 1};
        auto rows = nlohmann::json::array();
        for (std::size_t r = 0; r < dd.matrix().rows(); ++r) {
            auto row = nlohmann::json::array();
            for (std::size_t c = 0; c < dd.matrix().cols(); ++c) {
                const mpz_class& x = dd.matrix().at(r, c);
                if (!x.fits_slong_p()) fail(errc::internal, "entry too large for the page dump");
                row.push_back(x.get_si());
            }
            rows.push_back(row);
        }
        e["matrix"] = rows;
        j["differentials"].push_back(e);
    }
    return j.dump();
}

}  // namespace gersten::spectra
