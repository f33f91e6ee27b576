#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace collatzflow {

// Exact arithmetic everywhere: orbit values for alpha >= 5 outgrow any fixed
// width, and the identities checked by this library are integer/rational
// equalities that floating point would mask.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

/// base^exp with exp >= 0.
inline Int pow_int(const Int& base, unsigned exp) {
    return boost::multiprecision::pow(base, exp);
}

inline Int pow2(unsigned exp) {
    return Int(1) << exp;
}

inline std::string to_string(const Int& v) { return v.str(); }

inline std::string to_string(const Rat& v) {
    return boost::multiprecision::numerator(v).str() + "/" +
           boost::multiprecision::denominator(v).str();
}

/// Largest integer magnitude that survives a round trip through an IEEE
/// double (JSON number): 2^53 - 1.
inline bool fits_json_number(const Int& v) {
    static const Int kMaxSafe = (Int(1) << 53) - 1;
    return v >= -kMaxSafe && v <= kMaxSafe;
}

}  // namespace collatzflow
