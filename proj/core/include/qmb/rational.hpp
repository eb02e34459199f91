#pragma once

#include <gmpxx.h>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <cstdint>
#include <string>
#include <type_traits>

namespace qmb {

// mpq_class keeps values canonical after every arithmetic operation; the
// helpers below canonicalize on construction from a numerator/denominator.
using Rat = mpq_class;

Rat rat(long num, long den = 1);
Rat rat_pow(const Rat& base, long exponent);
std::string to_string(const Rat& r);
double to_double(const Rat& r);
bool is_integer(const Rat& r);

// Scalar glue shared by the Rat and double instantiations of the jet code.
inline bool is_zero(const Rat& r) { return sgn(r) == 0; }
inline bool is_zero(double d) { return d == 0.0; }

template <class S>
S from_rat(const Rat& r);
template <>
inline Rat from_rat<Rat>(const Rat& r) { return r; }
template <>
inline double from_rat<double>(const Rat& r) { return r.get_d(); }

template <class S>
S from_int(long v) {
  if constexpr (std::is_same_v<S, Rat>) {
    return Rat(v);
  } else {
    return static_cast<S>(v);
  }
}

// Random rationals for identity testing: numerator in [-num_bound, num_bound],
// denominator in [1, den_bound].
class RatSampler {
 public:
  explicit RatSampler(std::uint64_t seed, long num_bound = 100, long den_bound = 20);

  Rat sample();
  Rat nonzero();
  Rat positive();
  long integer(long lo, long hi);
  double uniform(double lo, double hi);
  boost::random::mt19937_64& engine() { return engine_; }

 private:
  boost::random::mt19937_64 engine_;
  long num_bound_;
  long den_bound_;
};

// Deterministic seed mixing for per-case sub-streams.
std::uint64_t mix_seed(std::uint64_t seed, const std::string& tag);

}  // namespace qmb
