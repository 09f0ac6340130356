#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace andersonlab::cli {

struct Check {
  std::string name;       // invariant id, e.g. "gamma-inverse-pair"
  std::string statement;  // what is asserted
  std::string measured;   // formatted measurement
  std::string bound;      // formatted threshold
  bool pass = false;
};

struct VerifyReport {
  std::string profile;
  std::vector<Check> checks;

  bool pass() const;
  std::vector<std::string> failures() const;
  // Fixed-width table; contains no timings, so reruns are byte-identical.
  std::string text() const;
  json to_json() const;
};

// Profiles: "noise-zero", "full" and one per acceptance experiment
// (reconstruction, bernstein, renormalization, noise-cauchy, gamma,
// norm-equivalence, perturbation, conservation, duhamel, strichartz, nls).
const std::vector<std::string>& verify_profiles();
VerifyReport run_verify(const std::string& profile, const json& cfg);

}  // namespace andersonlab::cli
