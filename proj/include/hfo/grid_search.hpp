#pragma once

#include "hfo/objective.hpp"
#include "hfo/types.hpp"

namespace hfo {

struct GridSearchResult {
  Vec3 argmin = Vec3::Zero();
  double value = 0.0;
  long long evaluated = 0;
};

/// Exhaustive minimization of 1/2 u'M u + b'u over the lattice
/// lo + k * resolution inside the box (the upper faces are always included).
/// Ties resolve to the lexicographically smallest lattice index, so both
/// execution paths return the same point.
GridSearchResult grid_search_box_qp(const Mat3& M, const Vec3& b, const InputBox& box,
                                    double resolution, Exec exec = Exec::Parallel);

/// Grid search for the optimal input of obj under the steady-state map H and
/// disturbance d.
GridSearchResult grid_search_optimal_input(const QuadObjective& obj, const Mat63& H,
                                           const Vec6& d, double resolution,
                                           Exec exec = Exec::Parallel);

}  // namespace hfo
