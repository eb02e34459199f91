#pragma once

#include "qmb/jet.hpp"
#include "qmb/rational.hpp"

#include <string>
#include <vector>

namespace qmb::test {

// every admissible coefficient random, the constant optionally forced to 0
inline MJet<Rat> random_jet(const LayoutPtr& L, RatSampler& rng, bool zero_constant = false) {
  MJet<Rat> a(L);
  for (std::size_t i = zero_constant ? 1 : 0; i < L->size(); ++i) {
    const int* e = L->exps(i);
    a.set(std::vector<int>(e, e + L->nvars()), rng.sample());
  }
  return a;
}

inline MJet<Rat> var(const LayoutPtr& L, const std::string& name) { return MJet<Rat>::variable(L, name); }
inline MJet<Rat> cst(const LayoutPtr& L, const Rat& c) { return MJet<Rat>::constant(L, c); }

}  // namespace qmb::test
