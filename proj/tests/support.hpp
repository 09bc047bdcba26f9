#pragma once

// Shared fixtures: the reference case solved once per test binary.

#include "qtunnel/config.hpp"
#include "qtunnel/solver.hpp"

namespace qtunnel::testing {

inline const ProblemConfig& reference() {
  static const ProblemConfig cfg = reference_config();
  return cfg;
}

inline const PlaneSolution<double>& reference_solution() {
  static const PlaneSolution<double> sol =
      solve_plane(reference().geometry, reference().material, reference().truncation);
  return sol;
}

inline const TimeWeights<double>& reference_weights() {
  static const TimeWeights<double> w =
      build_time_weights(reference().material, reference().schedule, reference().geometry.R);
  return w;
}

}  // namespace qtunnel::testing
