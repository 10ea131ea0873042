#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace nsp {

// Exact rational arithmetic keeps cost comparisons, rule confidences and
// class scores free of floating-point drift; pruning decisions and
// threshold tests are therefore deterministic.
using Rat = boost::rational<long long>;

// Accepts "7", "-3", "3/2", "1.25", "-0.5". Throws ParseError otherwise
// (including division by zero in the x/y form).
Rat parse_rational(std::string_view text);

// "7" when the denominator is 1, otherwise "num/den" in lowest terms.
std::string to_string(const Rat& r);

double to_double(const Rat& r);

}  // namespace nsp
