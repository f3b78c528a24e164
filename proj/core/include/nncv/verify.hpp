#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nncv/networks.hpp"

namespace nncv {

struct VerifyCheck {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
};

/// Self-contained property checks: analytic vs numeric gradients, arrangement
/// region counts against the combinatorial bound, the membership partition of
/// unity, and the inclusion-exclusion union area against brute-force
/// counting. All randomness derives from the given seed.
std::vector<VerifyCheck> run_verification(std::uint64_t seed);

/// Random lines in verified general position with hard margins: pairwise
/// angles >= 0.2 rad and pairwise intersection separations >= 0.12, all
/// intersections inside [-3,4]^2. Probing such a set over line_probe_box()
/// with a 4096 grid finds every region of the arrangement.
std::vector<AffineFn> well_separated_lines(std::mt19937_64& rng, int n);

/// Probe box large enough for well_separated_lines() sets.
BoundingBox line_probe_box();

}  // namespace nncv
