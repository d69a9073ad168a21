#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace haarmoment {

// Exact rational scalar used for every coefficient formula. The N_d
// expressions cancel catastrophically in double for moderate d, so all
// closed forms are evaluated over Q and converted at the API boundary.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace haarmoment
