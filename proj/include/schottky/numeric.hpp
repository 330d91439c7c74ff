#pragma once

#include <gmpxx.h>

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace schottky {

using Int = mpz_class;
using Rat = mpq_class;

// Rational a/b in canonical form.
inline Rat rat(const Int& num, const Int& den) {
  if (den == 0) throw std::invalid_argument("rat: zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Rat rat(long num, long den) { return rat(Int(num), Int(den)); }

inline Int floor_sqrt(const Int& a) {
  if (a < 0) throw std::invalid_argument("floor_sqrt: negative argument");
  Int r;
  mpz_sqrt(r.get_mpz_t(), a.get_mpz_t());
  return r;
}

// sqrt(a) + sqrt(b) <= sqrt(c) for nonnegative rationals, decided exactly.
// Equivalent to c - a - b >= 0 and (c - a - b)^2 >= 4ab.
inline bool sum_sqrt_le(const Rat& a, const Rat& b, const Rat& c) {
  Rat t = c - a - b;
  if (t < 0) return false;
  return t * t >= 4 * a * b;
}

// sqrt(a) + sqrt(b) < sqrt(c), decided exactly.
inline bool sum_sqrt_lt(const Rat& a, const Rat& b, const Rat& c) {
  Rat t = c - a - b;
  if (t <= 0) return false;
  return t * t > 4 * a * b;
}

// sqrt(a) <= sqrt(b) + sqrt(c): negation of sqrt(b) + sqrt(c) < sqrt(a).
inline bool sqrt_le_sum_sqrt(const Rat& a, const Rat& b, const Rat& c) {
  return !sum_sqrt_lt(b, c, a);
}

}  // namespace schottky

namespace Eigen {

template <>
struct NumTraits<mpz_class> : GenericNumTraits<mpz_class> {
  typedef mpz_class Real;
  typedef mpz_class NonInteger;
  typedef mpz_class Nested;
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 1,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 30,
    MulCost = 50
  };
};

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  typedef mpq_class Real;
  typedef mpq_class NonInteger;
  typedef mpq_class Nested;
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 150,
    MulCost = 100
  };
};

}  // namespace Eigen
