#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gersten/abgroup.hpp"
#include "gersten/cyclecx.hpp"

namespace gersten::spectra {

struct BiIndex {
    int p = 0, q = 0;
    friend auto operator<=>(const BiIndex&, const BiIndex&) = default;
};

// Classical exact couple with alpha of bidegree (1,-1), beta (0,0), gamma
// (-1,0) and d = beta o gamma. Absent indices are zero groups; exactness is
// certified at every bidegree whose full triangle lies inside the stored
// window, and derivation shrinks the window by one index in each direction.
struct ExactCoupleData {
    std::map<BiIndex, abgroup::FgAbGroup> D, E;
    std::map<BiIndex, abgroup::AbHom> alpha;  // D_{p,q} -> D_{p+1,q-1}
    std::map<BiIndex, abgroup::AbHom> beta;   // D_{p,q} -> E_{p+b1,q+b2}
    std::map<BiIndex, abgroup::AbHom> gamma;  // E_{p,q} -> D_{p-1,q}
    BiIndex beta_bidegree{0, 0};              // becomes (-r+1, r-1) on the r-th couple

    const abgroup::FgAbGroup& d_at(const BiIndex& i) const;
    const abgroup::FgAbGroup& e_at(const BiIndex& i) const;
    // d = beta o gamma out of E_{p,q}
    abgroup::AbHom differential(const BiIndex& i) const;
    // throws ExactnessViolation naming the bidegree
    void validate() const;
};

ExactCoupleData derive(const ExactCoupleData& couple);

struct SpectralPage {
    int r = 1;
    // cohomological labels: entries E_r^{p,q}, differentials (p,q) ->
    // (p+r, q-r+1)
    std::map<BiIndex, abgroup::FgAbGroup> entries;
    std::map<BiIndex, abgroup::AbHom> differentials;
};

struct AbutmentFiltration {
    // per total degree n: H^n, the decreasing filtration N^0 >= N^1 >= ...,
    // and its graded pieces
    std::map<int, abgroup::FgAbGroup> total;
    std::map<int, std::vector<abgroup::FgAbGroup>> filtration;
    std::map<int, std::vector<abgroup::FgAbGroup>> graded;
};

// Bounded cochain complex C^0 -> ... -> C^N with a decreasing filtration
// Phi^0 = C >= Phi^1 >= ... >= Phi^m >= Phi^{m+1} = 0 by subcomplexes;
// filt_gens[r][n] holds generator columns of Phi^{r+1} in degree n (Phi^0
// is the whole complex and is implicit).
struct FilteredComplex {
    std::vector<abgroup::FgAbGroup> groups;
    std::vector<abgroup::AbHom> d;
    std::vector<std::vector<std::vector<std::vector<mpz_class>>>> filt_gens;

    int top_degree() const { return static_cast<int>(groups.size()) - 1; }
    int filtration_length() const { return static_cast<int>(filt_gens.size()); }
    void validate() const;  // shapes, d^2 = 0, nesting, d(Phi) in Phi
};

struct PagesResult {
    std::vector<SpectralPage> pages;  // index 0 holds E_1
    AbutmentFiltration filtration;
    int stable_r = 1;

    const SpectralPage& page(int r) const;
    const SpectralPage& last() const { return pages.back(); }
};

// the exact couple of the filtration tower D = H(Phi^r), E = H(gr^r),
// validated on construction
ExactCoupleData couple_from_filtered(const FilteredComplex& fc);

PagesResult pages(const FilteredComplex& fc);

enum class Realization { motivic };

struct ConiveauResult {
    PagesResult ss;
    cyclecx::BoundedComplex row;        // the q = n row, as built by cyclecx
    int weight = 0;
    std::vector<gfield::Place> support;
    std::string exact_diagonal_note;    // chow-backed E_2^{n,n}
    abgroup::FgAbGroup exact_diagonal;  // exact value of E_2^{n,n}
};

// support places: all monic irreducible places of degree <= degree_bound,
// together with the factors of the hint polynomials
std::vector<gfield::Place> support_places(const gfield::FiniteField& base, unsigned degree_bound,
                                          const std::vector<gfield::Poly>& hints = {});

ConiveauResult assemble_coniveau(std::shared_ptr<const schememod::SchemeDescription> X,
                                 Realization table, int weight,
                                 const std::vector<gfield::Place>& support);

// the coniveau filtration on the abutment with named graded pieces
struct FiltrationReport {
    std::map<int, std::vector<std::pair<std::string, abgroup::FgAbGroup>>> steps;  // per degree
};

FiltrationReport coniveau_filtration_report(const PagesResult& ss,
                                            const std::string& abutment_name);

std::string page_to_json(const SpectralPage& page);

}  // namespace gersten::spectra
