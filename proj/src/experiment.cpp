#include "posg/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace posg {

namespace {

struct Expectation {
  std::string name;
  bool expected;
  bool observed;
};

Json expectations_json(const std::vector<Expectation>& list, bool& all_matched) {
  Json out = Json::array();
  all_matched = true;
  for (const auto& e : list) {
    const bool matched = e.expected == e.observed;
    all_matched &= matched;
    out.push_back({{"name", e.name}, {"expected", e.expected}, {"observed", e.observed},
                   {"matched", matched}});
  }
  return out;
}

GalleryOptions options_of(const ExperimentConfig& c) {
  GalleryOptions o;
  o.dim = c.dim;
  o.horizon = c.horizon;
  o.tol = c.tol;
  o.p = c.p;
  o.t0 = c.t0;
  o.seed = c.seed;
  return o;
}

Json instance_header(const GalleryInstance& inst, const ExperimentConfig& config) {
  return {{"id", inst.id},
          {"description", inst.description},
          {"dim", inst.dim},
          {"horizon", inst.horizon},
          {"tolerance", config.tol},
          {"p", inst.semigroup.space().p_exponent()},
          {"mode", config.mode},
          {"seed", config.seed},
          {"semigroup", inst.semigroup.mode() == Semigroup::Mode::discrete ? "discrete" : "continuous"},
          {"sample_step", inst.semigroup.sample_step()},
          {"positivity_exempt", inst.semigroup.positivity_exempt()},
          {"approximate", inst.semigroup.approximate()},
          {"shift_type", inst.shift_type},
          {"horizon_coupling_ok", !inst.shift_type || inst.horizon <= inst.dim - 8}};
}

Json structure_json(const GalleryInstance& inst) {
  const PositiveOperator& op = inst.semigroup.step_operator();
  Json j = {{"kind", op.kind_name()},
            {"conservative", inst.semigroup.conservative()},
            {"lattice_homomorphism", is_lattice_homomorphism(op)},
            {"adjoint_lattice_homomorphism", adjoint_is_lattice_homomorphism(op)}};
  if (!inst.semigroup.positivity_exempt() && inst.semigroup.space().is_al()) {
    j["markov_defect"] = markov_defect(op);
  }
  if (inst.fp_type) j["measure_preserving"] = is_measure_preserving(op);
  return j;
}

// Rational orbit of e_1 against the float orbit; for example-4-3 also the closed form.
Json exact_orbit_json(const GalleryInstance& inst, std::vector<Expectation>& expectations) {
  const MatQ& m = *inst.exact_matrix;
  const Index n = m.rows();
  const Index steps = std::min<Index>(n - 2, 40);
  VecQ x = VecQ::Zero(n);
  x(1) = 1;
  VecD y = unit<double>(n, 1);
  double deviation = 0.0;
  Index formula_mismatches = 0;
  for (Index k = 1; k <= steps; ++k) {
    x = m * x;
    y = apply(inst.semigroup.step_operator(), y);
    for (Index i = 0; i < n; ++i) deviation = std::max(deviation, std::abs(to_double(x(i)) - y(i)));
    if (inst.id == "example-4-3") {
      const Rational c = example_4_3_c(k);
      VecQ expected = VecQ::Zero(n);
      expected(0) = Rational(1) - c;
      expected(k + 1) = c;
      if (x != expected) ++formula_mismatches;
    }
  }
  Json j = {{"steps", steps}, {"max_float_deviation", deviation}};
  expectations.push_back({"rational and float orbits agree within 1e-12", true, deviation <= 1e-12});
  if (inst.id == "example-4-3") {
    j["closed_form_mismatches"] = formula_mismatches;
    j["c_5"] = example_4_3_c(5).str();
    expectations.push_back({"T^n e_1 = (1 - c_n) e_0 + c_n e_{n+1} exactly", true,
                            formula_mismatches == 0});
  }
  return j;
}

VecD resolve_h(const std::string& spec, const GalleryInstance& inst) {
  const Index n = inst.dim;
  if (spec == "perron-half") return 0.5 * invariant_density(inst.semigroup.step_operator());
  if (spec == "zero") return VecD::Zero(n);
  if (spec.size() > 1 && spec[0] == 'e' &&
      std::all_of(spec.begin() + 1, spec.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    const Index k = std::stol(spec.substr(1));
    if (k >= n) throw ConfigError("h = " + spec + " is outside the space");
    return unit<double>(n, k);
  }
  VecD h = vector_from_json(read_json_file(spec));
  inst.semigroup.space().check(h.size(), "h");
  return h;
}

int exit_for(ConclusionStatus status) {
  switch (status) {
    case ConclusionStatus::verified:
      return kExitOk;
    case ConclusionStatus::violated:
      return kExitViolation;
    case ConclusionStatus::inconclusive:
    case ConclusionStatus::not_applicable:
      return kExitInapplicable;
  }
  return kExitInapplicable;
}

Index horizon_of(const GalleryInstance& inst) { return std::max<Index>(inst.horizon, 2); }

}  // namespace

ExperimentConfig config_from_json(const Json& j, ExperimentConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {"command", "instance", "checker", "dominated", "dim",
                                              "horizon", "tol", "p", "t0", "epsilon", "h", "mode",
                                              "format", "out", "seed", "cells"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  try {
    if (j.contains("instance")) c.instance = j["instance"].get<std::string>();
    if (j.contains("checker")) c.checker = j["checker"].get<std::string>();
    if (j.contains("dominated")) c.dominated = j["dominated"].get<std::string>();
    if (j.contains("dim")) c.dim = j["dim"].get<Index>();
    if (j.contains("horizon")) c.horizon = j["horizon"].get<Index>();
    if (j.contains("tol")) c.tol = j["tol"].get<double>();
    if (j.contains("p")) c.p = j["p"].get<double>();
    if (j.contains("t0")) c.t0 = j["t0"].get<double>();
    if (j.contains("epsilon")) c.epsilon = j["epsilon"].get<double>();
    if (j.contains("h")) c.h = j["h"].get<std::string>();
    if (j.contains("mode")) c.mode = j["mode"].get<std::string>();
    if (j.contains("format")) c.format = j["format"].get<std::string>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("cells")) c.cells = j["cells"].get<Index>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  validate(c);
  return c;
}

void validate(const ExperimentConfig& c) {
  if (!(c.tol > 0.0)) throw ConfigError("tol must be > 0");
  if (!(c.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(c.t0 > 0.0)) throw ConfigError("t0 must be > 0");
  if (!(c.p >= 1.0)) throw ConfigError("p must be >= 1");
  if (c.dim && *c.dim < 1) throw ConfigError("dim must be >= 1");
  if (c.horizon && *c.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (c.mode != "float" && c.mode != "rational") throw ConfigError("mode must be float or rational");
  if (c.format != "json" && c.format != "csv") throw ConfigError("format must be json or csv");
}

GalleryInstance resolve_instance(const std::string& instance, const ExperimentConfig& config) {
  if (instance.empty()) throw ConfigError("no instance given");
  for (const auto& e : gallery_entries()) {
    if (e.id == instance) return make_instance(instance, options_of(config));
  }
  if (!std::filesystem::exists(instance)) {
    throw ConfigError("'" + instance + "' is neither a gallery id nor a file");
  }
  const Json j = read_json_file(instance);
  if (j.contains("gallery")) return make_instance(j["gallery"].get<std::string>(), options_of(config));

  GalleryInstance inst{std::filesystem::path(instance).stem().string(), "inline spec",
                       Semigroup::discrete(PositiveOperator::identity(WeightedSpace::counting(1)))};
  const std::string kind = j.value("kind", "");
  if (kind == "continuous") {
    MatD q = matrix_from_json(j.at("rate_matrix"));
    WeightedSpace space =
        j.contains("space") ? space_from_json(j["space"]) : WeightedSpace::counting(q.rows());
    inst.semigroup = Semigroup::continuous(std::move(space), std::move(q), std::nullopt,
                                           j.value("sample_step", 0.5));
  } else if (kind == "finite") {
    inst.semigroup = Semigroup::discrete(fp_of_finite_map(finite_map_from_json(j)));
    inst.fp_type = true;
  } else {
    inst.semigroup = Semigroup::discrete(operator_from_json(j));
  }
  inst.dim = inst.semigroup.dim();
  inst.horizon = config.horizon.value_or(200);
  return inst;
}

ExperimentResult run_gallery(const ExperimentConfig& config) {
  validate(config);
  GalleryInstance inst = resolve_instance(config.instance, config);
  const Semigroup& s = inst.semigroup;
  const Index horizon = horizon_of(inst);
  ExperimentResult result;
  result.name = inst.id;
  Json& report = result.report;
  report["schema"] = kReportSchema;
  report["instance"] = instance_header(inst, config);
  report["structure"] = structure_json(inst);
  std::vector<Expectation> expected;
  bool any_violation = false;

  if (s.positivity_exempt() || s.mode() == Semigroup::Mode::continuous) {
    std::vector<double> steps;
    if (inst.id == "rotation") steps = {config.t0, 0.5 * config.t0};
    const auto emb = embedded_discrete_consistency(s, steps, horizon, config.tol);
    report["embedded"] = to_json(emb);
    result.traces.push_back({"continuous_residual", emb.continuous.residual_trace});
    if (inst.id == "rotation") {
      expected.push_back({"embedded at t0 converges", true, emb.embedded[0].converged});
      expected.push_back({"embedded at t0/2 converges", false, emb.embedded[1].converged});
      expected.push_back({"full semigroup converges", false, emb.continuous.converged});
    } else {
      expected.push_back({"embedded limits agree with the continuous limit", true,
                          emb.agrees_with_continuous});
    }
  }

  if (!s.positivity_exempt()) {
    const auto strong = detect_strong_convergence(s, horizon, config.tol);
    report["strong"] = to_json(strong);
    result.traces.push_back({"strong_residual", strong.residual_trace});

    if (inst.fp_type || inst.reference_limit) {
      const auto norm = operator_norm_convergence(s, horizon, config.tol, inst.reference_limit);
      report["operator_norm"] = to_json(norm);
      result.traces.push_back({"norm_residual", norm.residual_trace});
      if (inst.fp_type) {
        const bool mp = is_measure_preserving(s.step_operator());
        const double id_defect = column_norm(
            s.space(), materialize(s.step_operator()) - MatD::Identity(inst.dim, inst.dim));
        // No measure-preserving transfer operator other than the identity converges in norm.
        expected.push_back({"not (measure preserving, norm convergent, non-identity)", true,
                            !(mp && norm.converged && id_defect > config.tol)});
      }
      if (inst.id == "two-point") {
        expected.push_back({"norm convergent", true, norm.converged});
        expected.push_back({"measure preserving", false, is_measure_preserving(s.step_operator())});
      }
      if (inst.id == "cyclic" || inst.id == "doubling-ulam" || inst.id == "tent-ulam") {
        expected.push_back({"norm convergent", false, norm.converged});
      }
    }

    if (inst.dim > 1 && s.mode() == Semigroup::Mode::discrete) {
      const Norm selector = inst.psi ? Norm::weighted_by(*inst.psi) : Norm::al();
      const auto bound = individual_lower_bound_estimate(s, unit<double>(inst.dim, 1), horizon,
                                                         0.95, config.tol, selector);
      report["individual_bound_e1"] = to_json(bound);
      result.traces.push_back({"individual_deficiency", bound.deficiency_trace});
      if (inst.id == "example-4-3") {
        expected.push_back({"individual bound of e_1 is non-zero", true, bound.norm_of_bound > 0.0});
      }
    }

    const std::map<std::string, bool> converges = {
        {"example-4-3", false}, {"example-5-4", true}, {"example-6-6", false},
        {"two-point", true},    {"collapse", true},    {"cyclic", false},
        {"identity", true},     {"primitive", true},   {"block-diagonal", true},
        {"generator", true}};
    if (auto it = converges.find(inst.id); it != converges.end()) {
      expected.push_back({"strongly convergent", it->second, strong.converged});
    }
  }

  if (inst.envelope) {
    const VecD e1 = unit<double>(inst.dim, 1);
    const auto env = detect_orbit_convergence(*inst.envelope, e1, horizon, config.tol, Norm::al());
    const auto native = detect_orbit_convergence(s, e1, horizon, config.tol, Norm::p());
    report["envelope_orbit_e1"] = to_json(env);
    report["native_orbit_e1"] = to_json(native);
    result.traces.push_back({"envelope_distance_to_terminal", env.distance_to_terminal});
    result.traces.push_back({"native_distance_to_terminal", native.distance_to_terminal});
    const auto psi = psi_lower_bound_certify(s, unit<double>(inst.dim, 0), *inst.psi,
                                             VecD::Ones(inst.dim), horizon, config.tol);
    report["psi_certifier"] = to_json(psi);
    any_violation |= psi.conclusion == ConclusionStatus::violated;
    expected.push_back({"native l^p orbit of e_1 converges", false, native.converged});
    expected.push_back({"psi certifier predicts a limit", false,
                        psi.conclusion == ConclusionStatus::verified});
  }

  if (config.mode == "rational") {
    if (inst.exact_matrix) {
      report["exact_orbit_e1"] = exact_orbit_json(inst, expected);
    } else {
      report["exact_orbit_e1"] = {{"available", false}};
    }
  }

  bool all_matched = true;
  report["expectations"] = expectations_json(expected, all_matched);
  report["all_expectations_matched"] = all_matched;
  result.exit_code = all_matched && !any_violation ? kExitOk : kExitViolation;
  return result;
}

ExperimentResult run_check(const ExperimentConfig& config) {
  validate(config);
  GalleryInstance inst = resolve_instance(config.instance, config);
  const Semigroup& s = inst.semigroup;
  const Index horizon = horizon_of(inst);
  ExperimentResult result;
  result.name = inst.id + "-" + config.checker;
  Json& report = result.report;
  report["schema"] = kReportSchema;
  report["instance"] = instance_header(inst, config);
  report["checker"] = config.checker;

  auto certified = [&](const CertifierReport& r) {
    report["report"] = to_json(r);
    if (r.convergence) result.traces.push_back({"strong_residual", r.convergence->residual_trace});
    if (r.bound_report) result.traces.push_back({"deficiency", r.bound_report->deficiency_trace});
    result.exit_code = exit_for(r.conclusion);
    if (r.converse == ConclusionStatus::violated) result.exit_code = kExitViolation;
  };

  try {
    const std::string& c = config.checker;
    if (c == "lasota-yorke") {
      const VecD h = resolve_h(config.h, inst);
      report["h"] = to_json(h);
      certified(lasota_yorke_certify(s, h, horizon, config.tol));
    } else if (c == "individual-bounds") {
      certified(individual_bounds_certify(s, config.epsilon, horizon, config.tol));
    } else if (c == "domination") {
      const auto sub = resolve_instance(config.dominated, config);
      certified(domination_transfer(s, sub.semigroup, horizon, config.tol));
    } else if (c == "ding") {
      certified(ding_certify(s, horizon, config.tol));
    } else if (c == "rigidity") {
      certified(lattice_homo_rigidity(s, horizon, config.tol));
    } else if (c == "psi") {
      const Functional psi = inst.psi.value_or(Functional::norm_functional(inst.dim));
      const VecD h = config.h == "perron-half" ? unit<double>(inst.dim, 0) : resolve_h(config.h, inst);
      certified(psi_lower_bound_certify(s, h, psi, VecD::Ones(inst.dim), horizon, config.tol));
    } else if (c == "embedded") {
      const auto emb = embedded_discrete_consistency(s, {}, horizon, config.tol);
      report["report"] = to_json(emb);
      result.traces.push_back({"continuous_residual", emb.continuous.residual_trace});
    } else if (c == "strong") {
      const auto r = detect_strong_convergence(s, horizon, config.tol);
      report["report"] = to_json(r, true);
      result.traces.push_back({"strong_residual", r.residual_trace});
    } else if (c == "norm") {
      const auto r = operator_norm_convergence(s, horizon, config.tol, inst.reference_limit);
      report["report"] = to_json(r, true);
      result.traces.push_back({"norm_residual", r.residual_trace});
    } else {
      throw ConfigError("unknown checker '" + c + "'");
    }
  } catch (const PreconditionNotCertified& e) {
    report["report"] = {{"conclusion", "not_applicable"}, {"error", e.what()}};
    result.exit_code = kExitInapplicable;
  } catch (const StructuralGateError& e) {
    report["report"] = {{"conclusion", "not_applicable"}, {"error", e.what()}};
    result.exit_code = kExitInapplicable;
  }
  return result;
}

ExperimentResult run_ulam(const ExperimentConfig& config, const std::filesystem::path& map_file) {
  validate(config);
  const Json j = read_json_file(map_file);
  ExperimentResult result;
  result.name = map_file.stem().string();
  const std::string kind = j.value("kind", "");
  const PositiveOperator op = [&] {
    if (kind == "finite") return fp_of_finite_map(finite_map_from_json(j));
    if (config.cells < 2) throw ConfigError("ulam build needs --cells >= 2");
    return ulam_matrix(interval_map_from_json(j), config.cells);
  }();
  Json& report = result.report;
  report["schema"] = kReportSchema;
  report["operator"] = to_json(op);
  report["markov"] = is_markov(op);
  report["measure_preserving"] = is_measure_preserving(op);
  report["approximate"] = op.approximate();
  try {
    report["invariant_density"] = to_json(invariant_density(op, config.tol));
  } catch (const NonConvergence& e) {
    report["invariant_density"] = nullptr;
    report["invariant_density_error"] = e.what();
  }
  if (config.format == "csv") {
    std::ostringstream coo;
    write_coo_csv(coo, op);
    report["coo_csv"] = coo.str();
  }
  return result;
}

void emit(const ExperimentResult& result, const ExperimentConfig& config, std::ostream& out) {
  if (config.out.empty()) {
    if (config.format == "csv") {
      if (result.report.contains("coo_csv")) {
        out << result.report["coo_csv"].get<std::string>();
      } else {
        write_traces_csv(out, result.traces);
      }
    } else {
      out << result.report.dump(2) << '\n';
    }
    return;
  }
  const std::filesystem::path dir(config.out);
  write_file_atomic(dir / (result.name + ".json"), result.report.dump(2) + "\n");
  std::ostringstream csv;
  if (result.report.contains("coo_csv")) {
    csv << result.report["coo_csv"].get<std::string>();
  } else {
    write_traces_csv(csv, result.traces);
  }
  write_file_atomic(dir / (result.name + ".csv"), csv.str());
  out << result.name << ": exit " << result.exit_code << " -> " << (dir / result.name).string()
      << ".{json,csv}\n";
}

int combine_exit_codes(const std::vector<int>& codes) {
  int worst = kExitOk;
  for (int c : codes) {
    if (c == kExitViolation || c == kExitUsage) return c;
    if (c == kExitInapplicable) worst = kExitInapplicable;
  }
  return worst;
}

}  // namespace posg
