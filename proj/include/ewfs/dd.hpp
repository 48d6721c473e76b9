#pragma once

#include <cstddef>
#include <vector>

#include <gmpxx.h>

namespace ewfs {

using Rat = mpq_class;
using RatVec = std::vector<Rat>;
using RatMat = std::vector<RatVec>;

int rat_rank(RatMat m);
// Basis of {y : M y = 0}.
RatMat rat_kernel(const RatMat& m);

// Extreme rays of the pointed cone {y : M y >= 0}, via the incremental
// double description method in exact rational arithmetic. Rays come back as
// primitive integer vectors. Throws std::invalid_argument when the cone has
// a nontrivial lineality space and SizeGuardError past max_rays.
RatMat dd_extreme_rays(const RatMat& m, std::size_t max_rays = 200000);

// Exact H-representation: A x <= b together with C x = d.
struct ExactHRep {
  RatMat A;
  RatVec b;
  RatMat C;
  RatVec d;
};

// H -> V: vertices of the polytope. Throws UnboundedError when a recession
// direction survives; an empty polytope yields an empty list.
RatMat polytope_vertices(const ExactHRep& h, std::size_t max_rays = 200000);

// V -> H: facets of conv(points) plus the affine-hull equalities.
ExactHRep polytope_facets(const RatMat& points, std::size_t max_rays = 200000);

}  // namespace ewfs
