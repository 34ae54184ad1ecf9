#include "oslab/serialize.hpp"

#include <cmath>
#include <iomanip>
#include <limits>

namespace oslab {

namespace {

Json real(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json optional_real(const std::optional<double>& x) { return x ? real(*x) : Json(nullptr); }

void csv_real(std::ostream& out, double x) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
}

}  // namespace

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(real(v(i)));
  return a;
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(real(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const SystemSpec& spec) {
  Json j;
  j["kind"] = std::string(to_string(spec.kind));
  switch (spec.kind) {
    case SystemKind::henon:
      j["a"] = real(spec.henon_a);
      j["b"] = real(spec.henon_b);
      break;
    case SystemKind::perturbed_toral:
      j["matrix"] = to_json(spec.matrix);
      j["delta"] = real(spec.delta);
      break;
    default:
      j["matrix"] = to_json(spec.matrix);
  }
  return j;
}

Json to_json(const ExponentEstimate& e) {
  Json j;
  j["exponents"] = to_json(e.values);
  j["horizon"] = e.horizon;
  j["renorm_period"] = e.renorm_period;
  j["residual"] = real(e.residual);
  j["sum"] = real(e.values.sum());
  return j;
}

Json to_json(const SplittingSample& s) {
  Json j;
  j["base"] = to_json(s.base);
  j["dims"] = s.dims;
  Json ex = Json::array();
  for (double x : s.exponent_estimates) ex.push_back(real(x));
  j["exponents"] = std::move(ex);
  Json blocks = Json::array();
  for (const auto& e : s.spaces) blocks.push_back(to_json(Matrix(e.basis().transpose())));
  j["blocks"] = std::move(blocks);  // each block: its orthonormal basis vectors
  return j;
}

Json to_json(const PeriodicOrbit& po) {
  Json j;
  j["period"] = po.period;
  Json pts = Json::array();
  for (const auto& p : po.points) pts.push_back(to_json(p));
  j["points"] = std::move(pts);
  j["exponents"] = to_json(po.exponents);
  j["eigen_moduli"] = to_json(po.eigen_moduli);
  j["block_dims"] = po.block_dims;
  j["residual"] = real(po.residual);
  j["hyperbolic"] = po.hyperbolic;
  return j;
}

Json to_json(const PesinReport& r) {
  Json j;
  j["pass"] = r.pass;
  j["worst_margins"] = {{"a", real(r.a_margin)}, {"b", real(r.b_margin)}, {"c", real(r.c_margin)}};
  j["params"] = {{"alpha", real(r.params.alpha)},     {"beta", real(r.params.beta)},
                 {"epsilon", real(r.params.epsilon)}, {"k", r.params.k},
                 {"m_range", r.params.m_range},       {"n_range", r.params.n_range},
                 {"much_greater_factor", 10}};
  j["window_note"] = "certifies |m| <= m_range and 1 <= n <= n_range only";
  Json per_m = Json::array();
  for (const auto& m : r.cocycle_margins) {
    per_m.push_back({{"m", m.m}, {"a", real(m.a)}, {"b", real(m.b)}, {"c", real(m.c)}});
  }
  j["cocycle_margins"] = std::move(per_m);
  if (!r.audit.empty()) {
    Json audit = Json::array();
    for (const auto& e : r.audit) audit.push_back({e.m, e.n, real(e.a), real(e.b)});
    j["audit"] = {{"columns", {"m", "n", "a", "b"}}, {"rows", std::move(audit)}};
  }
  return j;
}

Json to_json(const MeasureStats& m) {
  Json j;
  j["exponents"] = to_json(m.exponents);
  j["block_dims"] = m.block_dims;
  j["mean_distance"] = to_json(m.mean_distance);
  j["mean_angle"] = to_json(m.mean_angle);
  j["independence"] = real(m.independence);
  j["horizon"] = m.horizon;
  return j;
}

Json to_json(const GapReport& g) {
  Json j;
  j["verdict"] = std::string(to_string(g.verdict));
  j["gap"] = real(g.gap);
  if (g.gaps.size() > 0) j["gaps"] = to_json(g.gaps);
  if (!g.note.empty()) j["note"] = g.note;
  return j;
}

Json to_json(const CoverageReport& c) {
  Json j;
  j["verdict"] = std::string(to_string(c.verdict));
  j["coverage"] = real(c.coverage);
  j["eta"] = real(c.eta);
  j["evaluated"] = c.evaluated;
  j["covered"] = c.covered;
  j["estimation_failures"] = c.estimation_failures;
  j["pesin_rejected"] = c.pesin_rejected;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Json to_json(const ApproximationReport& r) {
  Json j;
  j["system"] = to_json(r.system);
  const VerifyConfig& c = r.config;
  j["config"] = {{"orbit_horizon", c.orbit_horizon},
                 {"splitting_horizon", c.splitting_horizon},
                 {"stats_horizon", c.stats_horizon},
                 {"epsilon", real(c.epsilon)},
                 {"eta", real(c.eta)},
                 {"samples", c.samples},
                 {"block_gap", real(c.block_gap)},
                 {"max_period", c.search.max_period},
                 {"seed", c.seed}};
  j["overall"] = std::string(to_string(r.overall()));
  j["verdicts"] = {{"exponents", std::string(to_string(r.exponents.verdict))},
                   {"mean_distance", std::string(to_string(r.mean_distance.verdict))},
                   {"independence", std::string(to_string(r.independence.verdict))},
                   {"splitting", std::string(to_string(r.splitting.verdict))}};
  j["epsilon"] = real(c.epsilon);
  j["eta"] = real(c.eta);
  j["exponent_gap"] = to_json(r.exponents);
  j["mean_distance_gap"] = to_json(r.mean_distance);
  j["independence_gap"] = to_json(r.independence);
  j["splitting_coverage"] = to_json(r.splitting);
  j["weak_star_discrepancy"] = optional_real(r.weak_star);
  j["orbits_found"] = r.orbits_found;
  j["reference"] = r.reference ? to_json(*r.reference) : Json(nullptr);
  j["orbit"] = r.orbit ? to_json(*r.orbit) : Json(nullptr);
  j["orbit_stats"] = r.orbit_stats ? to_json(*r.orbit_stats) : Json(nullptr);
  j["errors"] = r.errors;
  return j;
}

Json document(const std::string& kind, const Json& body) {
  Json j;
  j["schema"] = kSchema;
  j["kind"] = kind;
  for (const auto& [k, v] : body.items()) j[k] = v;
  return j;
}

Json exponents_document(const ExponentEstimate& e, const SystemSpec& spec) {
  Json body = to_json(e);
  body["system"] = to_json(spec);
  return document("exponents", body);
}

Json splitting_document(const SplittingSample& s, const SystemSpec& spec) {
  Json body = to_json(s);
  body["system"] = to_json(spec);
  return document("splitting", body);
}

Json periodic_document(const std::vector<PeriodicOrbit>& orbits, const SystemSpec& spec) {
  Json list = Json::array();
  for (const auto& po : orbits) list.push_back(to_json(po));
  Json body;
  body["system"] = to_json(spec);
  body["count"] = orbits.size();
  body["orbits"] = std::move(list);
  return document("periodic", body);
}

Json pesin_document(const PesinReport& r, const Point& x, const SystemSpec& spec) {
  Json body;
  body["system"] = to_json(spec);
  body["point"] = to_json(x);
  const Json report = to_json(r);
  for (const auto& [k, v] : report.items()) body[k] = v;
  return document("pesin", body);
}

Json verify_document(const ApproximationReport& r) { return document("verify", to_json(r)); }

void check_document(const Json& doc, const std::string& kind) {
  if (!doc.is_object()) throw ValidationError("document is not a JSON object");
  if (!doc.contains("schema") || doc["schema"] != kSchema) throw ValidationError("schema tag missing or unknown");
  if (!doc.contains("kind") || doc["kind"] != kind) throw ValidationError("document kind is not '" + kind + "'");
}

void write_exponents_csv(std::ostream& out, const ExponentEstimate& e) {
  out << "index,exponent\n";
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    out << i << ',';
    csv_real(out, e.values(i));
    out << '\n';
  }
}

void write_splitting_csv(std::ostream& out, const SplittingSample& s) {
  const int d = s.ambient_dim();
  out << "block,dim,exponent,vector";
  for (int i = 0; i < d; ++i) out << ",c" << i;
  out << '\n';
  for (int b = 0; b < s.block_count(); ++b) {
    const Matrix& basis = s.spaces[static_cast<std::size_t>(b)].basis();
    for (Eigen::Index v = 0; v < basis.cols(); ++v) {
      out << b << ',' << s.dims[static_cast<std::size_t>(b)] << ',';
      csv_real(out, s.exponent_estimates[static_cast<std::size_t>(b)]);
      out << ',' << v;
      for (Eigen::Index i = 0; i < basis.rows(); ++i) {
        out << ',';
        csv_real(out, basis(i, v));
      }
      out << '\n';
    }
  }
}

void write_periodic_csv(std::ostream& out, const std::vector<PeriodicOrbit>& orbits) {
  const int d = orbits.empty() ? 0 : static_cast<int>(orbits.front().points.front().size());
  out << "orbit,period,residual,step";
  for (int i = 0; i < d; ++i) out << ",x" << i;
  out << '\n';
  for (std::size_t o = 0; o < orbits.size(); ++o) {
    const PeriodicOrbit& po = orbits[o];
    for (std::size_t k = 0; k < po.points.size(); ++k) {
      out << o << ',' << po.period << ',';
      csv_real(out, po.residual);
      out << ',' << k;
      for (Eigen::Index i = 0; i < po.points[k].size(); ++i) {
        out << ',';
        csv_real(out, po.points[k](i));
      }
      out << '\n';
    }
  }
}

void write_pesin_csv(std::ostream& out, const PesinReport& r) {
  out << "m,a,b,c\n";
  const double eps = r.params.epsilon;
  for (const auto& m : r.cocycle_margins) {
    const double allowance = eps * r.params.k + eps * std::abs(m.m);
    out << m.m << ',';
    csv_real(out, m.a + allowance);
    out << ',';
    csv_real(out, m.b + allowance);
    out << ',';
    csv_real(out, m.c + allowance);
    out << '\n';
  }
}

void write_coverage_csv(std::ostream& out, const CoverageReport& c) {
  const int d = c.samples.empty() ? 0 : static_cast<int>(c.samples.front().point.size());
  out << "sample";
  for (int i = 0; i < d; ++i) out << ",x" << i;
  out << ",distance,nearest,covered\n";
  for (std::size_t s = 0; s < c.samples.size(); ++s) {
    const auto& e = c.samples[s];
    out << s;
    for (Eigen::Index i = 0; i < e.point.size(); ++i) {
      out << ',';
      csv_real(out, e.point(i));
    }
    out << ',';
    csv_real(out, e.distance);
    out << ',' << e.nearest << ',' << (e.distance < c.eta ? 1 : 0) << '\n';
  }
}

}  // namespace oslab
