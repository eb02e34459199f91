#pragma once

#include "qmb/evolve.hpp"
#include "qmb/rational.hpp"
#include "qmb/residual.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qmb {

using Json = nlohmann::ordered_json;

std::string tool_version();

struct Case {
  std::string id;
  std::string paper_ref;
  bool pass = true;
  Json detail = Json::object();
};

// Top level {tool_version, seed, suite, cases:[{id, paper_ref, verdict, detail}]}.
struct Report {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<Case> cases;

  bool all_pass() const;
  void sort_cases();
  Json to_json() const;
  std::string dump() const;  // two-space indent, trailing newline
};

struct SuiteOptions {
  std::uint64_t seed = 42;
  int trials = 20;
  int workers = 0;      // 0: hardware concurrency
  bool timing = false;  // wall times make reports non-reproducible, so off by default
};

// Runs tasks on a bounded pool; results come back in task order.
std::vector<Case> run_cases(const std::vector<std::function<Case()>>& tasks, int workers, bool timing);

Report bell_suite(const SuiteOptions& opt);
Report identity_suite(const SuiteOptions& opt);

struct BreatherSuiteOptions {
  std::string profile = "all";  // mkdv | gamma0 | decomposition | gardner | fd | all
  int nt = 21;
  int nx = 41;
  double tolerance = 1e-8;
  double control_floor = 1e-3;  // negative controls must exceed this
};

std::vector<std::string> breather_profiles();
Report breather_suite(const SuiteOptions& opt, const BreatherSuiteOptions& b);

struct ReduceOptions {
  int q = 3;
  Rat alpha = 1;
  Rat F1 = 1;
  std::optional<Rat> m, F3;  // default to the q = 3 values -32 alpha^2, -F1^3/2
  Rat F2 = 1;                // even q
  Rat c1 = 1;
};

Report reduce_suite(const SuiteOptions& opt, const ReduceOptions& r);

struct EvolveSuiteOptions {
  double alpha = 0.5;
  int modes = 1024;
  double length = 40.0;
  double dt = 0.0;  // 0: default
  double periods = 1.0;
  double deviation_tol = 1e-4;
  double l2_tol = 1e-8;
  double mass_tol = 1e-13;
  double reversal_tol = 1e-6;
  bool halving = true;
  bool reversal = true;
};

Report evolve_suite(const SuiteOptions& opt, const EvolveSuiteOptions& e);

// Every suite at default settings, cases prefixed with the suite name.
Report report_all(const SuiteOptions& opt);

}  // namespace qmb
