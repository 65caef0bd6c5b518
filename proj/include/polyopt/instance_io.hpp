#pragma once

#include <iosfwd>
#include <string>

#include "polyopt/polynomial.hpp"

namespace polyopt {

// JSON instance format:
//   { "n": 2,
//     "objective": [ {"coef": -1.0, "expo": [1, 0]}, ... ],
//     "constraints": [ {"name": "ball", "terms": [ ... ]} ],
//     "box": [[-1.0, 1.0], [-1.0, 1.0]] }
// "box" and constraint names are optional; exponent vectors must have length
// n with non-negative integer entries, and the objective term list must be
// non-empty. Structural problems raise std::runtime_error.
PopInstance parse_instance(std::istream& in);
PopInstance parse_instance_text(const std::string& text);
PopInstance load_instance(const std::string& path);

// Canonical serialization: terms in graded-lex order, optional fields only
// when present. parse(serialize(parse(doc))) == parse(doc).
std::string serialize_instance(const PopInstance& inst, int indent = 2);

}  // namespace polyopt
