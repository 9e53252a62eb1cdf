#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracindex/configurations.hpp"
#include "fracindex/definiteness.hpp"
#include "fracindex/discrete_geodesics.hpp"
#include "fracindex/index_estimate.hpp"
#include "fracindex/sampler.hpp"
#include "fracindex/spaces.hpp"

namespace fracindex {

using nlohmann::json;

// {"space": "circle"|"sphere"|"hyperbolic"|"euclidean"|"cylinder"|
//  "flat_torus"|"warped", parameters as named fields;
//  "warp": {"kind": "quadratic", "a": real} encodes f(z) = 1 + a z^2}
json space_to_json(const SpaceDescriptor& space);
SpaceDescriptor space_from_json(const json& j);

json point_to_json(const PointCoord& p);
PointCoord point_from_json(const json& j);

json configuration_to_json(const Configuration& config);
Configuration configuration_from_json(const json& j);

json gram_report_to_json(const CenteredGramReport& report, bool include_matrix = false);
json bracket_to_json(const IndexBracket& bracket);
json certificate_to_json(const SpaceDescriptor& space, const WitnessCertificate& cert);
json condition_g_to_json(const ConditionGReport& report);
json variogram_to_json(const std::vector<VariogramEntry>& entries);

// {"chart": "hyperboloid"|"warped", "z_min", "z_max", warp parameters}
json chart_to_json(const ParametricChart& chart);
ParametricChart chart_from_json(const json& j);

// CSV writers. All floats use round-trip precision for reproducibility.
void write_distance_csv(std::ostream& os, const SpaceDescriptor& space,
                        const std::vector<PointCoord>& points, double H);
void write_spectrum_csv(std::ostream& os, const Eigen::VectorXd& spectrum);
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m);
void write_realizations_csv(std::ostream& os, const Eigen::MatrixXd& realizations);
void write_variogram_csv(std::ostream& os, const std::vector<VariogramEntry>& entries);
void write_field_csv(std::ostream& os, const GeodesicGraph& graph,
                     const std::vector<double>& field);

// Columnar binary realizations: magic "FFLD", u32 version, u32 n_samples,
// u32 n_points, then per-point columns of little-endian f64.
void write_ffld(std::ostream& os, const Eigen::MatrixXd& realizations);
Eigen::MatrixXd read_ffld(std::istream& is);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace fracindex
