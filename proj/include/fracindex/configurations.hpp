#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fracindex/definiteness.hpp"
#include "fracindex/spaces.hpp"

namespace fracindex {

// Four points on the designated circle at angles (base, base+a, base+pi,
// base+pi+a) with coefficients (1, -1, 1, -1): the two antipodal pairs whose
// quadratic form vanishes at H = 1/2.
Configuration antipodal_quadruple(const SpaceDescriptor& space, double base_angle,
                                  double offset_a);

struct ConditionGReport {
  std::vector<int> span_dims;  // per configuration point
  int space_dim = 0;
  bool pass = false;
};

// Spanning condition: minimal directions from each P_i to the other points
// must span the full tangent space.
ConditionGReport check_condition_g(const SpaceDescriptor& space, const Configuration& config);

struct WitnessCertificate {
  Configuration base;
  double base_form = 0.0;
  int perturbed_index = 0;          // point that loses half of its coefficient
  TangentVector direction;          // unit, perpendicular to the span at that point
  double H = 0.5;
  std::vector<double> eps_values;
  std::vector<double> forms;        // perturbed-form value per eps
  std::vector<double> form_lower;   // equal to forms except for bound-evaluated spaces
  std::vector<double> form_upper;
  std::vector<double> slopes;       // forms / eps^{2H}
  double expected_slope = 0.0;      // c_i^2 / 2
  double threshold = 0.0;           // certification cut: 10x evaluation tolerance
  double certifying_eps = 0.0;      // smallest eps with a certified positive form
  bool certified = false;
};

struct PerturbOptions {
  std::vector<double> eps_schedule{1e-1, 1e-2, 1e-3, 1e-4};
  double perpendicular_tol = 1e-8;
};

// Splits c_i between P_i and P_{n+1} = exp_{P_i}(eps * direction) and scans
// the eps schedule for a certified positive form. Throws
// Errc::no_positivity_found when the schedule is exhausted.
WitnessCertificate perturb_witness(const SpaceDescriptor& space, const Configuration& config,
                                   int point_index, const TangentVector& direction, double H,
                                   const PerturbOptions& opts = {});

struct CriticalSearchResult {
  Configuration config;
  double form = 0.0;
  bool critical = false;
  int restarts_used = 0;
};

// Alternating minimization of |form|: spectral coefficients (exact inner
// step) against derivative-free coordinate moves of the points.
CriticalSearchResult search_critical(const SpaceDescriptor& space, int n_points, double H,
                                     int multistart_budget, std::uint64_t seed);

enum class WitnessStatus { certified, g_not_failing, no_positivity_found };

struct WitnessReport {
  WitnessStatus status = WitnessStatus::g_not_failing;
  ConditionGReport condition_g;
  std::optional<WitnessCertificate> certificate;
};

struct WitnessOptions {
  double base_angle = 0.0;
  double offset_a = kPi / 2.0;
  PerturbOptions perturb;
};

// Antipodal quadruple on the designated minimal closed geodesic, condition
// (G), and on failure the perpendicular perturbation witness. H must be 1/2.
WitnessReport witness_pipeline(const SpaceDescriptor& space, double H,
                               const WitnessOptions& opts = {});

}  // namespace fracindex
