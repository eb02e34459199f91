#include "qmb/rational.hpp"

#include "qmb/errors.hpp"

#include <boost/random/uniform_real_distribution.hpp>

namespace qmb {

Rat rat(long num, long den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

Rat rat_pow(const Rat& base, long exponent) {
  if (exponent < 0) {
    if (sgn(base) == 0) throw DomainError("zero to a negative power");
    return rat_pow(Rat(1) / base, -exponent);
  }
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exponent));
  Rat r(num, den);
  r.canonicalize();
  return r;
}

std::string to_string(const Rat& r) { return r.get_str(); }

double to_double(const Rat& r) { return r.get_d(); }

bool is_integer(const Rat& r) { return r.get_den() == 1; }

RatSampler::RatSampler(std::uint64_t seed, long num_bound, long den_bound)
    : engine_(seed), num_bound_(num_bound), den_bound_(den_bound) {}

Rat RatSampler::sample() {
  boost::random::uniform_int_distribution<long> num(-num_bound_, num_bound_);
  boost::random::uniform_int_distribution<long> den(1, den_bound_);
  long n = num(engine_);
  long d = den(engine_);
  return rat(n, d);
}

Rat RatSampler::nonzero() {
  for (;;) {
    Rat r = sample();
    if (sgn(r) != 0) return r;
  }
}

Rat RatSampler::positive() {
  Rat r = nonzero();
  return sgn(r) < 0 ? Rat(-r) : r;
}

long RatSampler::integer(long lo, long hi) {
  boost::random::uniform_int_distribution<long> d(lo, hi);
  return d(engine_);
}

double RatSampler::uniform(double lo, double hi) {
  boost::random::uniform_real_distribution<double> d(lo, hi);
  return d(engine_);
}

std::uint64_t mix_seed(std::uint64_t seed, const std::string& tag) {
  // FNV-1a over the tag, then a splitmix64 finalizer with the seed.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL + h;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace qmb
