#pragma once

#include <cstdint>

#include "fracindex/configurations.hpp"
#include "fracindex/definiteness.hpp"

namespace fracindex {

// How point sets are drawn for the per-H spectral tests. Circle factors also
// get an equispaced set and an antipodal-quadruple scan; product spaces get
// the H = 1/2 perturbation witness.
struct IndexSamplerSpec {
  int points_per_set = 50;
  int random_sets = 4;
  std::uint64_t seed = 1;
};

struct HGrid {
  double h_min = 0.3;
  double h_max = 1.0;
  double step = 0.05;
};

IndexBracket estimate_fractional_index(const SpaceDescriptor& space,
                                       const IndexSamplerSpec& sampler, const HGrid& grid,
                                       int per_h_budget, double tol_scale = kDefaultTolScale);

}  // namespace fracindex
