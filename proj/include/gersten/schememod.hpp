#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gersten/milnor.hpp"

namespace gersten::schememod {

enum class SchemeKind { point, affine_line, proj_line, line_config, disjoint_union, abstract };

// Residue field of a point: a supported FieldRef, or a formal function
// field of transcendence degree >= 2 (carried as data only).
struct ResidueField {
    bool formal = false;
    milnor::FieldRef ref;
    gfield::FiniteField formal_base;
    std::vector<std::string> vars;
};

struct SchemePoint {
    std::string id;
    int codim = 0;
    ResidueField residue;
};

// one point t of the normalization fiber above y
struct FiberComponent {
    gfield::Place t_place;          // valuation on kappa(x) via the parametrization
    gfield::FiniteField t_field;    // kappa(t)
    gfield::FieldHom phi;           // kappa(y) -> kappa(t)
    std::string uniformizer;        // element descriptor
};

struct StoredIncidence {
    std::string x, y;
    std::vector<FiberComponent> fiber;
    bool user_certified = false;  // abstract schemes: fiber data taken on trust
};

// linear form a0 x + a1 y + a2 z on P^2
struct LinearForm {
    std::array<gfield::Elem, 3> a{0, 0, 0};
    friend bool operator==(const LinearForm&, const LinearForm&) = default;
};

struct LineData {
    LinearForm form;
    std::array<gfield::Elem, 3> A, B;  // parametrization t -> A + t B, infinity -> B
    std::string id;
};

struct IntersectionPoint {
    std::array<gfield::Elem, 3> coords;  // first nonzero coordinate scaled to 1
    std::vector<std::pair<int, gfield::Place>> on_lines;  // line index, parameter place
    std::string id;
};

struct SupportHint {
    std::vector<gfield::Poly> polys;
    bool empty() const { return polys.empty(); }
};

class SchemeDescription {
  public:
    SchemeKind kind = SchemeKind::point;
    int dimension = 0;
    gfield::FiniteField base;

    // curves
    bool has_infinity = false;
    std::set<gfield::PlaceKey> removed;  // punctures of the affine line

    // line configurations
    std::vector<LineData> lines;
    std::vector<IntersectionPoint> intersections;

    // point / abstract / unions
    std::vector<SchemePoint> stored_points;
    std::vector<StoredIncidence> stored_incidences;
    bool user_certified = false;

    std::string name() const;
};

SchemeDescription builtin_point(const gfield::FiniteField& kappa);
SchemeDescription builtin_affine_line(const gfield::FiniteField& base);
SchemeDescription builtin_proj_line(const gfield::FiniteField& base);
// the affine line minus the given places
SchemeDescription builtin_punctured_line(const gfield::FiniteField& base,
                                         const std::vector<gfield::Place>& removed);
SchemeDescription builtin_line_config(const gfield::FiniteField& base,
                                      const std::vector<LinearForm>& forms);
SchemeDescription builtin_disjoint_union(const std::vector<SchemeDescription>& parts);

// abstract descriptions: JSON document in the documented schema
SchemeDescription load_abstract(const std::string& json_text);
std::string to_abstract_json(const SchemeDescription& x);

std::vector<SchemePoint> points_of_codim(const SchemeDescription& x, int p,
                                         const SupportHint& hint = {});

bool specializes(const SchemeDescription& x, const std::string& from_id, const std::string& to_id);
std::vector<FiberComponent> fibers(const SchemeDescription& x, const std::string& from_id,
                                   const std::string& to_id);

// ids used across chains, reports and JSON dumps
std::string generic_point_id();
std::string place_point_id(const gfield::Place& v);
std::optional<gfield::Place> place_of_point_id(const gfield::FiniteField& base,
                                               const std::string& id);

// restriction of a linear form to a line, as a polynomial in the parameter
gfield::Poly restrict_form(const SchemeDescription& x, int line_index, const LinearForm& m);

}  // namespace gersten::schememod
