#ifndef MELSB_TYPES_H_
#define MELSB_TYPES_H_

#include <complex>
#include <stdexcept>
#include <string>

namespace melsb {

using Complex = std::complex<double>;

// Thrown when inputs violate an operation's contract (shapes, ranges).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown for malformed or missing data (files, ground truth, silence).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cartesian position in meters.
struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double Distance(const Position& a, const Position& b);

inline constexpr double kSpeedOfSound = 343.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

}  // namespace melsb

#endif  // MELSB_TYPES_H_
