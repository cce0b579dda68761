#pragma once

#include "hfo/experiments.hpp"

namespace fixture {

// The reference rendezvous scenario as shipped (gamma outside the
// admissible range at unit mass, so the stepsize check is off).
inline hfo::ExperimentConfig reference() {
  hfo::ExperimentConfig c;
  c.strict_stepsize = false;
  return c;
}

// Same scenario with a chaser heavy enough for gamma = 0.1 to be admissible.
inline hfo::ExperimentConfig admissible() {
  hfo::ExperimentConfig c;
  c.orbit.m_c = 1e4;
  c.strict_stepsize = true;
  return c;
}

inline hfo::StabilizedPlant reference_plant() { return hfo::build_plant(reference()); }

}  // namespace fixture
