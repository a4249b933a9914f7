#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "gersten/cyclemod.hpp"
#include "gersten/schememod.hpp"

namespace gersten::cyclecx {

// Finite-support cochain in C^p(X; phi)_i: the component at a point x lies
// in phi_{i-p}(kappa(x)). Place-indexed components keep their places in a
// side table so ids never need reparsing.
struct CycleChain {
    std::shared_ptr<const schememod::SchemeDescription> scheme;
    cyclemod::CycleModuleInstance phi;
    int p = 0;
    int i = 0;
    std::map<std::string, milnor::MilnorElement> components;
    std::map<std::string, gfield::Place> places;

    bool is_zero() const;
};

CycleChain zero_chain(std::shared_ptr<const schememod::SchemeDescription> scheme,
                      cyclemod::CycleModuleInstance phi, int p, int i);
void set_component(CycleChain& c, const std::string& id, milnor::MilnorElement value);
void set_place_component(CycleChain& c, const gfield::Place& v, milnor::MilnorElement value);
CycleChain add(const CycleChain& a, const CycleChain& b);
CycleChain scale(const CycleChain& a, const mpz_class& n);
bool equal(const CycleChain& a, const CycleChain& b);

// degree-2 symbol at the generic point of a line configuration: entries are
// monomials scalar * prod forms[i]^{e_i} with total degree zero
struct FormMonomial {
    gfield::Elem scalar = 1;
    std::map<int, int> exps;
};
struct P2Symbol {
    std::vector<FormMonomial> entries;
};

// coefficient group of the module at a scheme point; UnsupportedField for
// formal residue fields (the generic point of a surface)
abgroup::FgAbGroup evaluate_point(const cyclemod::CycleModuleInstance& phi,
                                  const schememod::SchemePoint& x, int n);

// point-to-point differential through the normalization fiber, zero when y
// is not a specialization of x
milnor::MilnorElement point_differential(const schememod::SchemeDescription& X,
                                         const cyclemod::CycleModuleInstance& phi,
                                         const std::string& x_id, const std::string& y_id,
                                         const milnor::MilnorElement& xi,
                                         const std::optional<gfield::Place>& y_place = {});

// d^p assembled over all stored targets; support is computed exactly
CycleChain differential(const CycleChain& c);

// first differential of a generic-point symbol on a line configuration
CycleChain d0_line_config(std::shared_ptr<const schememod::SchemeDescription> scheme,
                          const cyclemod::CycleModuleInstance& phi, const P2Symbol& xi);

struct SquareZeroLedger {
    bool zero = true;
    std::vector<std::string> lines;  // residue ledger, one entry per contribution
};

SquareZeroLedger check_square_zero_symbol(std::shared_ptr<const schememod::SchemeDescription> X,
                                          const cyclemod::CycleModuleInstance& phi,
                                          const P2Symbol& xi);

cyclemod::Report check_square_zero(std::shared_ptr<const schememod::SchemeDescription> X,
                                   unsigned samples, std::uint64_t seed);

struct ChowResult {
    int p = 0, i = 0;
    abgroup::FgAbGroup group;
    bool exact = true;
    std::string note;
    std::vector<CycleChain> generators;
    // principality: some x with d0(x) = z (equality mod l for reduced
    // instances); nullopt when z is not a boundary
    std::function<std::optional<milnor::MilnorElement>(const CycleChain&)> witness;
    // coordinates of the class of z in `group`
    std::function<std::vector<mpz_class>(const CycleChain&)> class_of;
};

ChowResult chow(std::shared_ptr<const schememod::SchemeDescription> X,
                const cyclemod::CycleModuleInstance& phi, int p, int i,
                const schememod::SupportHint& bound = {});

abgroup::FgAbGroup unramified(const schememod::SchemeDescription& X,
                              const cyclemod::CycleModuleInstance& phi, int i);

// proper pushforward to the point; the chain must be supported on closed points
CycleChain pushforward_to_point(const CycleChain& c);

// flat pullback along the structure map of a curve over the point
CycleChain pullback_structure(std::shared_ptr<const schememod::SchemeDescription> curve,
                              const CycleChain& on_point);
// flat pullback along an open immersion between the built-in curves
CycleChain pullback_open(std::shared_ptr<const schememod::SchemeDescription> smaller,
                         const CycleChain& c);

// CH^*-module structure: a 0-cycle (K_0-valued closed-point chain) acting on
// a generic-point chain through uniformizer symbols
CycleChain ch_action(const CycleChain& zero_cycle, const CycleChain& c);

// the bounded Gersten row used by the coniveau assembly; coordinates of c0
// are [constant torsion part, then one free generator per support place],
// of c1 one block per place (plus infinity last when X is proper)
struct BoundedComplex {
    abgroup::FgAbGroup c0, c1;
    abgroup::AbHom d;
    std::vector<gfield::Place> columns;  // C^1 coordinate order
    std::vector<gfield::Place> support;  // C^0 free coordinate order
};

BoundedComplex bounded_gersten_complex(const schememod::SchemeDescription& X,
                                       const cyclemod::CycleModuleInstance& phi, int n,
                                       const std::vector<gfield::Place>& support);

}  // namespace gersten::cyclecx
