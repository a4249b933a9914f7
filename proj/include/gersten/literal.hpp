#pragma once

#include <string>

#include "gersten/cyclecx.hpp"
#include "gersten/milnor.hpp"

namespace gersten::literal {

// "F5", "F9", "F5(t)", "F9(s)" -> field reference; q must be a prime power
milnor::FieldRef parse_field(const std::string& text);

// rational function in the field's variable (and `a` for the coefficient
// generator when the base field is not prime)
gfield::RatFunc parse_element(const milnor::FieldRef& field, const std::string& text);

// "{t, t-2}" or "{t, t-2; F5(t)}"; the inline field overrides the argument
milnor::Symbol parse_symbol(const milnor::FieldRef& field, const std::string& text);
milnor::Symbol parse_symbol_with_inline_field(const std::string& text);

// "t", "t^2+1", "inf"
gfield::Place parse_place(const gfield::FiniteField& base, const std::string& text);

std::string element_to_json(const milnor::MilnorElement& x);
std::string chain_to_json(const cyclecx::CycleChain& c, const std::string& scheme_name);

}  // namespace gersten::literal
