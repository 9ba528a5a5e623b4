#pragma once

#include "quotver/frac.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace qv {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Expressions use + - * / ^, integer literals, parentheses and identifiers.
// Multiplication must be explicit. Exponents are (possibly negative) integers.

// Polynomial over Q in the given variable names; division only by nonzero
// rational constants.
Poly parse_poly(const std::string& text, const std::vector<std::string>& names);

// Element of the fraction field of a chart ring. Identifiers are chart
// coordinates or the relation symbol of the ring context, which stands for
// the uniformizer.
Frac parse_frac(const RingPtr& ring, const std::string& text);

}  // namespace qv
