#include "fracindex/json_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <ostream>
#include <istream>

namespace fracindex {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json space_to_json(const SpaceDescriptor& space) {
  json j;
  j["space"] = space_name(space);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle> || std::is_same_v<T, Cylinder>) {
          j["L"] = s.circumference;
        } else if constexpr (std::is_same_v<T, Sphere>) {
          j["dim"] = s.dim;
          j["radius"] = s.radius;
        } else if constexpr (std::is_same_v<T, Hyperbolic> || std::is_same_v<T, Euclidean>) {
          j["dim"] = s.dim;
        } else if constexpr (std::is_same_v<T, FlatTorus>) {
          j["L"] = s.circumferences;
        } else if constexpr (std::is_same_v<T, WarpedCircleProduct>) {
          j["L"] = s.circumference;
          j["warp"] = {{"kind", "quadratic"}, {"a", s.warp.quadratic_a}};
          if (s.warp.z0 != 0.0) j["z0"] = s.warp.z0;
        }
      },
      space);
  return j;
}

SpaceDescriptor space_from_json(const json& j) {
  const std::string name = j.at("space").get<std::string>();
  SpaceDescriptor space;
  if (name == "circle") {
    space = Circle{j.at("L").get<double>()};
  } else if (name == "sphere") {
    space = Sphere{j.at("dim").get<int>(), j.value("radius", 1.0)};
  } else if (name == "hyperbolic") {
    space = Hyperbolic{j.at("dim").get<int>()};
  } else if (name == "euclidean") {
    space = Euclidean{j.at("dim").get<int>()};
  } else if (name == "cylinder") {
    space = Cylinder{j.at("L").get<double>()};
  } else if (name == "flat_torus") {
    space = FlatTorus{j.at("L").get<std::vector<double>>()};
  } else if (name == "warped") {
    WarpedCircleProduct w;
    w.circumference = j.value("L", kTwoPi);
    if (j.contains("warp")) {
      const auto& wj = j.at("warp");
      if (wj.value("kind", "quadratic") != "quadratic")
        throw Error(Errc::precondition, "only quadratic warps are serializable");
      w.warp.quadratic_a = wj.value("a", 1.0);
    }
    w.warp.z0 = j.value("z0", 0.0);
    space = w;
  } else {
    throw Error(Errc::precondition, "unknown space kind: " + name);
  }
  validate_space(space);
  return space;
}

json point_to_json(const PointCoord& p) { return json(p.x); }

PointCoord point_from_json(const json& j) { return {j.get<std::vector<double>>()}; }

json configuration_to_json(const Configuration& config) {
  json pts = json::array();
  for (const auto& p : config.points) pts.push_back(point_to_json(p));
  return {{"points", pts}, {"coeffs", config.coefficients}};
}

Configuration configuration_from_json(const json& j) {
  Configuration config;
  for (const auto& p : j.at("points")) config.points.push_back(point_from_json(p));
  config.coefficients = j.at("coeffs").get<std::vector<double>>();
  return config;
}

json gram_report_to_json(const CenteredGramReport& report, bool include_matrix) {
  json j;
  j["H"] = report.H;
  j["max_eigenvalue"] = report.max_eigenvalue;
  j["tolerance"] = report.tolerance;
  j["verdict"] = report.verdict == Verdict::violation ? "violation" : "no-violation";
  j["spectrum"] = std::vector<double>(report.spectrum.data(),
                                      report.spectrum.data() + report.spectrum.size());
  if (report.violating_coefficients) {
    const auto& c = *report.violating_coefficients;
    j["violating_coefficients"] = std::vector<double>(c.data(), c.data() + c.size());
  }
  if (include_matrix) {
    json rows = json::array();
    for (int i = 0; i < report.power_matrix.rows(); ++i) {
      json row = json::array();
      for (int k = 0; k < report.power_matrix.cols(); ++k) row.push_back(report.power_matrix(i, k));
      rows.push_back(row);
    }
    j["power_matrix"] = rows;
  }
  return j;
}

json bracket_to_json(const IndexBracket& bracket) {
  json j;
  j["grid_step"] = bracket.grid_step;
  if (bracket.evidence_H) {
    j["evidence_H"] = *bracket.evidence_H;
    j["beta_lower"] = *bracket.beta_lower();
  }
  if (bracket.violation_H) {
    j["violation_H"] = *bracket.violation_H;
    j["beta_upper"] = *bracket.beta_upper();
  }
  if (bracket.witness) j["witness"] = configuration_to_json(*bracket.witness);
  if (!bracket.inconclusive_H.empty()) j["inconclusive_H"] = bracket.inconclusive_H;
  j["note"] = "evidence_H is one-sided: absence of a violation is not a proof";
  return j;
}

json certificate_to_json(const SpaceDescriptor& space, const WitnessCertificate& cert) {
  json base = configuration_to_json(cert.base);
  base["form"] = cert.base_form;
  json j;
  j["space"] = space_to_json(space);
  j["H"] = cert.H;
  j["base_config"] = base;
  j["perturbed_index"] = cert.perturbed_index;
  j["direction"] = cert.direction.components;
  j["eps_values"] = cert.eps_values;
  j["forms"] = cert.forms;
  if (cert.form_lower != cert.forms) {
    j["form_lower"] = cert.form_lower;
    j["form_upper"] = cert.form_upper;
  }
  j["slope_estimates"] = cert.slopes;
  j["expected_slope"] = cert.expected_slope;
  j["threshold"] = cert.threshold;
  j["certified"] = cert.certified;
  if (cert.certified) j["certifying_eps"] = cert.certifying_eps;
  return j;
}

json condition_g_to_json(const ConditionGReport& report) {
  return {{"span_dims", report.span_dims},
          {"space_dim", report.space_dim},
          {"pass", report.pass}};
}

json variogram_to_json(const std::vector<VariogramEntry>& entries) {
  json arr = json::array();
  for (const auto& e : entries)
    arr.push_back({{"i", e.i},
                   {"j", e.j},
                   {"empirical", e.empirical},
                   {"target", e.target},
                   {"z_score", e.z_score}});
  return arr;
}

json chart_to_json(const ParametricChart& chart) {
  json j;
  j["chart"] = chart.kind == ParametricChart::Kind::hyperboloid ? "hyperboloid" : "warped";
  j["z_min"] = chart.z_min;
  j["z_max"] = chart.z_max;
  if (chart.kind == ParametricChart::Kind::warped) {
    j["warp"] = {{"kind", "quadratic"}, {"a", chart.warp.quadratic_a}};
    if (chart.circumference != kTwoPi) j["L"] = chart.circumference;
  }
  return j;
}

ParametricChart chart_from_json(const json& j) {
  const std::string kind = j.at("chart").get<std::string>();
  const double z_min = j.at("z_min").get<double>();
  const double z_max = j.at("z_max").get<double>();
  if (!(z_min < z_max)) throw Error(Errc::precondition, "need z_min < z_max");
  if (kind == "hyperboloid") return ParametricChart::hyperboloid(z_min, z_max);
  if (kind == "warped") {
    double a = 1.0;
    if (j.contains("warp")) a = j.at("warp").value("a", 1.0);
    return ParametricChart::warped_quadratic(a, z_min, z_max, j.value("L", kTwoPi));
  }
  throw Error(Errc::precondition, "unknown chart kind: " + kind);
}

void write_distance_csv(std::ostream& os, const SpaceDescriptor& space,
                        const std::vector<PointCoord>& points, double H) {
  os << "i,j,d,d_pow_2H\n";
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = distance(space, points[i], points[j]);
      os << i << ',' << j << ',' << format_double(d) << ','
         << format_double(power_distance(d, 2.0 * H)) << '\n';
    }
}

void write_spectrum_csv(std::ostream& os, const Eigen::VectorXd& spectrum) {
  os << "index,eigenvalue\n";
  for (int i = 0; i < spectrum.size(); ++i)
    os << i << ',' << format_double(spectrum(i)) << '\n';
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

void write_realizations_csv(std::ostream& os, const Eigen::MatrixXd& realizations) {
  write_matrix_csv(os, realizations);
}

void write_variogram_csv(std::ostream& os, const std::vector<VariogramEntry>& entries) {
  os << "i,j,empirical,target,z_score\n";
  for (const auto& e : entries)
    os << e.i << ',' << e.j << ',' << format_double(e.empirical) << ','
       << format_double(e.target) << ',' << format_double(e.z_score) << '\n';
}

void write_field_csv(std::ostream& os, const GeodesicGraph& graph,
                     const std::vector<double>& field) {
  os << "theta,z,distance\n";
  for (int v = 0; v < graph.vertex_count(); ++v)
    os << format_double(graph.theta_of(v)) << ',' << format_double(graph.z_of(v)) << ','
       << format_double(field[v]) << '\n';
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = char((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
         std::uint32_t(b[3]) << 24;
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = char((bits >> (8 * i)) & 0xff);
  os.write(b, 8);
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_ffld(std::ostream& os, const Eigen::MatrixXd& realizations) {
  os.write("FFLD", 4);
  put_u32(os, 1);
  put_u32(os, (std::uint32_t)realizations.rows());
  put_u32(os, (std::uint32_t)realizations.cols());
  for (int j = 0; j < realizations.cols(); ++j)
    for (int i = 0; i < realizations.rows(); ++i) put_f64(os, realizations(i, j));
}

Eigen::MatrixXd read_ffld(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (std::strncmp(magic, "FFLD", 4) != 0)
    throw Error(Errc::precondition, "not an FFLD stream");
  const std::uint32_t version = get_u32(is);
  if (version != 1) throw Error(Errc::precondition, "unsupported FFLD version");
  const std::uint32_t rows = get_u32(is);
  const std::uint32_t cols = get_u32(is);
  Eigen::MatrixXd m(rows, cols);
  for (std::uint32_t j = 0; j < cols; ++j)
    for (std::uint32_t i = 0; i < rows; ++i) m(i, j) = get_f64(is);
  if (!is) throw Error(Errc::precondition, "truncated FFLD stream");
  return m;
}

}  // namespace fracindex
