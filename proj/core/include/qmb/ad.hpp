#pragma once

// Forward-mode AD on double jets: elementary functions composed at the
// jet's center value.

#include "qmb/jet.hpp"

#include <vector>

namespace qmb {

// f(g) where coeffs are the Taylor coefficients of f about g's center value.
MJet<double> apply_taylor(const MJet<double>& g, const std::vector<double>& coeffs);

MJet<double> jet_sin(const MJet<double>& g);
MJet<double> jet_cos(const MJet<double>& g);
MJet<double> jet_exp(const MJet<double>& g);
MJet<double> jet_cosh(const MJet<double>& g);
MJet<double> jet_sinh(const MJet<double>& g);
MJet<double> jet_recip(const MJet<double>& g);
MJet<double> jet_div(const MJet<double>& a, const MJet<double>& b);
MJet<double> jet_atan(const MJet<double>& g);

}  // namespace qmb
