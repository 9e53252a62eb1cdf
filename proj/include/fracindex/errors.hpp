#pragma once

#include <stdexcept>
#include <string>

namespace fracindex {

enum class Errc {
  out_of_chart,
  analytic_unavailable,
  no_circle_factor,
  coincident_points,
  degenerate_offset,
  degenerate_chart,
  disconnected,
  no_convergence,
  eigen_failure,
  not_critical,
  direction_not_perpendicular,
  no_positivity_found,
  excess_clipping,
  too_few_samples,
  budget_exhausted,
  precondition,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace fracindex
