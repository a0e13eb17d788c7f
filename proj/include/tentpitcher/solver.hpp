#pragma once

#include "tentpitcher/patch.hpp"

namespace tentpitcher {

// Deterministic stand-in for the numerical solver's error indicator.  The
// "error" of an element is its spatial diameter divided by the local target
// length scale (the scale field's minimum over the element).  Above xi1 the
// patch is rejected and the offending inflow facets are refined; below xi2
// the outflow facet is marked coarsenable.
struct MockSolver {
  WavespeedField target_scale = WavespeedField::constant(
      std::numeric_limits<double>::infinity());
  double xi1 = std::numeric_limits<double>::infinity();
  double xi2 = 0.0;

  struct Evaluation {
    bool accepted = true;
    std::vector<int> refine_tris;       // front leaves to bisect
    std::vector<int> coarsenable_tris;  // outflow facets below xi2
  };

  Evaluation evaluate(const Patch& patch) const;

  static MockSolver accept_all() { return MockSolver{}; }
};

}  // namespace tentpitcher
