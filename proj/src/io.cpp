#include "posg/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace posg {

namespace {

template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j.at(key).get<T>();
}

}  // namespace

Json to_json(const WeightedSpace& space) {
  return {{"dim", space.dim()}, {"weights", to_json(space.weights())}, {"p", space.p_exponent()}};
}

Json to_json(const VecD& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Json to_json(const MatD& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(VecD(m.row(i).transpose())));
  return rows;
}

Json to_json(const HypothesisCheck& check) {
  return {{"name", check.name},
          {"status", to_string(check.status)},
          {"value", check.value},
          {"detail", check.detail}};
}

Json to_json(const ConvergenceReport& report, bool include_matrices) {
  Json j = {{"converged", report.converged},
            {"mode", report.mode == ConvergenceReport::Mode::strong ? "strong" : "operator_norm"},
            {"horizon", report.horizon_used},
            {"step", report.step},
            {"tolerance", report.tolerance},
            {"tail_residual", report.tail_residual},
            {"final_residual",
             report.residual_trace.empty() ? 0.0 : report.residual_trace.back().second},
            {"projection_defect", report.projection_defect},
            {"commutation_defect", report.commutation_defect},
            {"rank", report.rank},
            {"rank_threshold", report.rank_threshold},
            {"escaped_mass", report.escaped_mass},
            {"approximate", report.approximate}};
  if (include_matrices) {
    j["terminal"] = to_json(report.terminal);
    if (report.limit) j["limit"] = to_json(*report.limit);
  }
  return j;
}

Json to_json(const OrbitConvergence& report) {
  return {{"converged", report.converged},
          {"tail_diameter", report.tail_diameter},
          {"terminal", to_json(report.terminal)},
          {"escaped_mass", report.escaped_mass}};
}

Json to_json(const LowerBoundReport& report) {
  Json hyps = Json::array();
  for (const auto& h : report.hypothesis_log) hyps.push_back(to_json(h));
  return {{"kind", to_string(report.kind)},
          {"bound", to_json(report.bound)},
          {"norm_of_bound", report.norm_of_bound},
          {"certified", report.certified},
          {"final_deficiency",
           report.deficiency_trace.empty() ? 0.0 : report.deficiency_trace.back().second},
          {"hypotheses", hyps},
          {"horizon", report.horizon},
          {"tolerance", report.tolerance},
          {"shrink_factor", report.shrink_factor},
          {"fell_back_to_zero", report.fell_back_to_zero},
          {"fixed_point", report.fixed_point},
          {"rounds", report.rounds},
          {"escaped_mass", report.escaped_mass},
          {"approximate", report.approximate}};
}

Json to_json(const CertifierReport& report) {
  Json hyps = Json::array();
  for (const auto& h : report.hypotheses) hyps.push_back(to_json(h));
  Json j = {{"theorem", report.theorem},
            {"hypotheses", hyps},
            {"hypothesis", to_string(report.hypothesis)},
            {"conclusion", to_string(report.conclusion)},
            {"converse", to_string(report.converse)},
            {"vertex_bound_norms", to_json(report.vertex_bound_norms)},
            {"epsilon", report.epsilon},
            {"positivity_floor", report.positivity_floor},
            {"limit_floor", report.limit_floor},
            {"horizon", report.horizon},
            {"tolerance", report.tolerance},
            {"approximate", report.approximate},
            {"notes", report.notes}};
  if (report.convergence) j["convergence"] = to_json(*report.convergence);
  if (report.bound_report) j["bound"] = to_json(*report.bound_report);
  if (report.predicted_limit) j["predicted_limit"] = to_json(*report.predicted_limit);
  if (report.fixed_vector) j["fixed_vector"] = to_json(*report.fixed_vector);
  if (report.limit_functional) j["limit_functional"] = to_json(*report.limit_functional);
  return j;
}

Json to_json(const EmbeddedConsistencyReport& report) {
  Json embedded = Json::array();
  for (std::size_t i = 0; i < report.steps.size(); ++i) {
    Json e = to_json(report.embedded[i]);
    e["embedding_step"] = report.steps[i];
    embedded.push_back(std::move(e));
  }
  return {{"steps", report.steps},
          {"embedded", embedded},
          {"continuous", to_json(report.continuous)},
          {"embedded_limits_coincide", report.embedded_limits_coincide},
          {"agrees_with_continuous", report.agrees_with_continuous},
          {"rank_one_shortcut", report.rank_one_shortcut},
          {"rank_one_prediction_verified", report.rank_one_prediction_verified},
          {"discrepancy", report.discrepancy},
          {"max_pairwise_distance", report.max_pairwise_distance},
          {"tolerance", report.tolerance}};
}

Json to_json(const PositiveOperator& op) {
  Json j = {{"space", to_json(op.space())}, {"approximate", op.approximate()}};
  if (const auto* t = std::get_if<TransportKernel>(&op.kernel())) {
    j["kind"] = "transport";
    j["sigma"] = t->sigma;
    j["gains"] = to_json(t->gains);
  } else if (const auto* s = std::get_if<SparseKernel>(&op.kernel())) {
    j["kind"] = "sparse";
    Json entries = Json::array();
    for (Index col = 0; col < s->matrix.outerSize(); ++col) {
      for (SparseD::InnerIterator it(s->matrix, col); it; ++it) {
        entries.push_back({it.row(), it.col(), it.value()});
      }
    }
    j["entries"] = entries;
  } else if (const auto* r = std::get_if<RankOneKernel>(&op.kernel())) {
    j["kind"] = "rank_one";
    j["functional"] = to_json(r->functional.coefficients);
    j["vector"] = to_json(r->vector);
  } else if (const auto* d = std::get_if<DiagonalKernel>(&op.kernel())) {
    j["kind"] = "diagonal";
    j["multiplier"] = to_json(d->multiplier);
  } else {
    j["kind"] = "dense";
    j["matrix"] = to_json(materialize(op));
  }
  return j;
}

WeightedSpace space_from_json(const Json& j) {
  const double p = j.value("p", 1.0);
  if (j.contains("weights")) return WeightedSpace(vector_from_json(j.at("weights")), p);
  return WeightedSpace::counting(field<Index>(j, "dim"), p);
}

VecD vector_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("expected a numeric array");
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const VecD>(values.data(), static_cast<Index>(values.size()));
}

MatD matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j.at(0).size());
  MatD m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const VecD row = vector_from_json(j.at(static_cast<std::size_t>(i)));
    if (row.size() != cols) throw ConfigError("ragged matrix rows");
    m.row(i) = row.transpose();
  }
  return m;
}

PositiveOperator operator_from_json(const Json& j) {
  const auto kind = field<std::string>(j, "kind");
  auto space_for = [&](Index dim) {
    return j.contains("space") ? space_from_json(j.at("space")) : WeightedSpace::counting(dim);
  };
  PositiveOperator op = [&] {
    if (kind == "dense") {
      MatD m = matrix_from_json(j.at("matrix"));
      const auto space = space_for(m.rows());
      return PositiveOperator::dense(space, std::move(m));
    }
    if (kind == "sparse") {
      const auto space = space_from_json(field<Json>(j, "space"));
      std::vector<Triplet> triplets;
      for (const auto& e : field<Json>(j, "entries")) {
        triplets.emplace_back(e.at(0).get<Index>(), e.at(1).get<Index>(), e.at(2).get<double>());
      }
      return PositiveOperator::sparse(space, triplets);
    }
    if (kind == "transport") {
      const auto sigma = field<std::vector<Index>>(j, "sigma");
      const auto space = space_for(static_cast<Index>(sigma.size()));
      if (!j.contains("gains")) return fp_of_finite_map({sigma, space});
      return PositiveOperator::transport(space, sigma, vector_from_json(j.at("gains")));
    }
    if (kind == "rank_one") {
      VecD v = vector_from_json(field<Json>(j, "vector"));
      const auto space = space_for(v.size());
      return PositiveOperator::rank_one(space,
                                        Functional{vector_from_json(field<Json>(j, "functional"))},
                                        std::move(v));
    }
    if (kind == "diagonal") {
      VecD m = vector_from_json(field<Json>(j, "multiplier"));
      return PositiveOperator::diagonal(space_for(m.size()), std::move(m));
    }
    if (kind == "identity") {
      return PositiveOperator::identity(space_from_json(field<Json>(j, "space")));
    }
    throw ConfigError("unknown operator kind '" + kind + "'");
  }();
  return op.with_approximate(j.value("approximate", false));
}

IntervalMap interval_map_from_json(const Json& j) {
  if (field<std::string>(j, "kind") != "piecewise_affine") {
    throw ConfigError("interval maps must have kind 'piecewise_affine'");
  }
  std::vector<Branch> branches;
  for (const auto& b : field<Json>(j, "branches")) {
    const auto domain = field<std::vector<double>>(b, "domain");
    if (domain.size() != 2) throw ConfigError("branch domain must be [a, b]");
    branches.emplace_back(
        AffineBranch{domain[0], domain[1], field<double>(b, "slope"), field<double>(b, "intercept")});
  }
  return IntervalMap(std::move(branches));
}

FiniteMap finite_map_from_json(const Json& j) {
  if (field<std::string>(j, "kind") != "finite") throw ConfigError("finite maps must have kind 'finite'");
  auto sigma = field<std::vector<Index>>(j, "sigma");
  const auto dim = static_cast<Index>(sigma.size());
  auto space = j.contains("space") ? space_from_json(j.at("space")) : WeightedSpace::counting(dim);
  return {std::move(sigma), std::move(space)};
}

void write_traces_csv(std::ostream& out, const std::vector<NamedTrace>& traces) {
  out << "t,quantity,value\n" << std::setprecision(17);
  for (const auto& trace : traces) {
    for (const auto& [t, v] : trace.samples) out << t << ',' << trace.quantity << ',' << v << '\n';
  }
}

void write_coo_csv(std::ostream& out, const PositiveOperator& op) {
  out << "row,col,value\n" << std::setprecision(17);
  if (const auto* s = std::get_if<SparseKernel>(&op.kernel())) {
    for (Index col = 0; col < s->matrix.outerSize(); ++col) {
      for (SparseD::InnerIterator it(s->matrix, col); it; ++it) {
        out << it.row() << ',' << it.col() << ',' << it.value() << '\n';
      }
    }
    return;
  }
  const MatD m = materialize(op);
  for (Index col = 0; col < m.cols(); ++col) {
    for (Index row = 0; row < m.rows(); ++row) {
      if (m(row, col) != 0.0) out << row << ',' << col << ',' << m(row, col) << '\n';
    }
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw Error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace posg
