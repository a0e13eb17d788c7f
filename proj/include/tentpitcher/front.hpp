#pragma once

#include <memory>

#include "tentpitcher/field.hpp"
#include "tentpitcher/triangulation.hpp"

namespace tentpitcher {

// A snapshot of the advancing front: a time value per vertex over the
// current leaf triangulation.  Fronts are values; advance_vertex returns a
// new front sharing the triangulation.  The owning driver mutates the
// triangulation only between snapshots.
struct Front {
  std::shared_ptr<const FrontTriangulation> tri;
  std::vector<double> tau;

  Front() = default;
  Front(std::shared_ptr<const FrontTriangulation> t, std::vector<double> tau_)
      : tri(std::move(t)), tau(std::move(tau_)) {}

  static Front flat(std::shared_ptr<const FrontTriangulation> t, double t0);

  double time(int v) const { return tau[v]; }

  // Spacetime realization of leaf cell t.
  STSimplex facet(int t) const;

  double min_time() const;
  double max_time() const;
};

// Magnitude of the gradient of tau restricted to leaf cell t: the slope of
// the front facet.  Throws DegenerateSimplex on degenerate cells.
double gradient_mag(const Front& front, int t);

// Gradient of tau along the segment (x, y) in space.
double edge_gradient(const Front& front, int x, int y);

// All vertices p with tau(p) <= tau(q) for every neighbor q.  Non-empty for
// any non-empty front.  Sorted by vertex id.
std::vector<int> local_minima(const Front& front);

bool is_local_minimum(const Front& front, int p);

// New front with tau(p) advanced by dt >= 0; everything else unchanged.
Front advance_vertex(const Front& front, int p, double dt);

// True iff every leaf facet's gradient is strictly below the field's
// minimum slope over that facet.
bool is_causal(const Front& front, const WavespeedField& field);

}  // namespace tentpitcher
