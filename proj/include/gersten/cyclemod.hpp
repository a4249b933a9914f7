#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gersten/abgroup.hpp"
#include "gersten/milnor.hpp"

namespace gersten::cyclemod {

// Evaluation of a cycle module on a function field is not finitely
// generated; it is described structurally instead of materialized.
struct FunctionFieldShape {
    abgroup::FgAbGroup constant_part;
    std::string family;
    std::function<abgroup::FgAbGroup(const gfield::Place&)> place_part;
};

struct GroupDescriptor {
    bool materialized = true;
    abgroup::FgAbGroup group;
    FunctionFieldShape shape;
};

// The structural data of a cycle premodule on the supported fields. The
// four maps delegate to milnor (reduced mod l when l > 0); they are plain
// std::functions so test fixtures can tamper with them.
struct CycleModuleInstance {
    std::string name;
    unsigned ell = 0;  // 0 = integral coefficients
    int offset = 0;    // grading offset of the instance

    std::function<milnor::MilnorElement(const gfield::Place&, const milnor::MilnorElement&)>
        residue;
    std::function<milnor::MilnorElement(const milnor::Extension&, const milnor::MilnorElement&)>
        corestrict;
    std::function<milnor::MilnorElement(const milnor::Extension&, const milnor::MilnorElement&)>
        norm_map;
    std::function<milnor::MilnorElement(const milnor::Symbol&, const milnor::MilnorElement&)>
        action;
};

CycleModuleInstance km_instance();
CycleModuleInstance km_mod_instance(unsigned ell);

GroupDescriptor evaluate(const CycleModuleInstance& m, const milnor::FieldRef& f, int n);

// canonical representative modulo l (identity for the integral instance)
milnor::MilnorElement reduce_element(const CycleModuleInstance& m, milnor::MilnorElement x);
bool equal_mod(const CycleModuleInstance& m, const milnor::MilnorElement& a,
               const milnor::MilnorElement& b);
bool is_zero_mod(const CycleModuleInstance& m, const milnor::MilnorElement& a);

struct CheckEntry {
    std::string check;
    unsigned samples = 0;
    std::vector<std::string> failures;
};

struct Report {
    std::vector<CheckEntry> entries;
    bool ok() const;
    std::string to_json() const;
};

// randomized premodule coherences: corestriction functoriality, N o cor =
// [L:E], projection formula, residue/corestriction compatibility for
// constant-field extensions, and the residue anchors that pin the tame
// symbol convention
Report check_premodule_coherences(const CycleModuleInstance& m, unsigned samples,
                                  std::uint64_t seed);

// exact residue support of x, including infinity when its residue is nonzero
std::vector<gfield::Place> check_fd(const CycleModuleInstance& m, const milnor::MilnorElement& x);

}  // namespace gersten::cyclemod
