#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace ifslab {

using BigInt = boost::multiprecision::cpp_int;

// 256 binary digits; every "extended precision" evaluation goes through this.
using Real = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

using i128 = __int128;

// Raised when an enumeration would exceed a configured size cap.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, double estimated)
      : std::runtime_error(what), estimated_(estimated) {}
  double estimated_cardinality() const { return estimated_; }

 private:
  double estimated_;
};

// Malformed textual specs (TSpec, IFS, measure, rate function, ranges).
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A continued fraction was asked for more quotients than it can provide.
class InsufficientDepth : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace ifslab
