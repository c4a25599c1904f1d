// posg: gallery runs, certifier checks, Ulam discretization and the acceptance suite.

#include "posg/acceptance.hpp"
#include "posg/experiment.hpp"

#include "CLI11.hpp"

#include <future>
#include <iostream>
#include <optional>

namespace {

using namespace posg;

struct Flags {
  std::string config_file;
  std::optional<Index> dim;
  std::optional<Index> horizon;
  std::optional<double> tol;
  std::optional<double> p;
  std::optional<double> t0;
  std::optional<double> epsilon;
  std::optional<std::string> mode;
  std::optional<std::string> format;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> h;
  std::optional<std::string> dominated;
  std::optional<Index> cells;
  std::string instance;
};

ExperimentConfig build_config(const Flags& f, std::string* command) {
  ExperimentConfig c;
  if (!f.config_file.empty()) {
    const Json j = read_json_file(f.config_file);
    if (command && j.contains("command")) *command = j["command"].get<std::string>();
    c = config_from_json(j, c);
  }
  if (f.dim) c.dim = f.dim;
  if (f.horizon) c.horizon = f.horizon;
  if (f.tol) c.tol = *f.tol;
  if (f.p) c.p = *f.p;
  if (f.t0) c.t0 = *f.t0;
  if (f.epsilon) c.epsilon = *f.epsilon;
  if (f.mode) c.mode = *f.mode;
  if (f.format) c.format = *f.format;
  if (f.out) c.out = *f.out;
  if (f.seed) c.seed = *f.seed;
  if (f.h) c.h = *f.h;
  if (f.dominated) c.dominated = *f.dominated;
  if (f.cells) c.cells = *f.cells;
  if (!f.instance.empty()) c.instance = f.instance;
  validate(c);
  return c;
}

int run_gallery_ids(const ExperimentConfig& base, const std::vector<std::string>& ids) {
  std::vector<std::future<ExperimentResult>> jobs;
  for (const auto& id : ids) {
    ExperimentConfig c = base;
    c.instance = id;
    jobs.push_back(std::async(std::launch::async, [c] { return run_gallery(c); }));
  }
  std::vector<int> codes;
  for (auto& job : jobs) {
    const ExperimentResult r = job.get();
    emit(r, base, std::cout);
    codes.push_back(r.exit_code);
  }
  return combine_exit_codes(codes);
}

int run_suite(int criterion) {
  bool ok = true;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (criterion != 0 && id != criterion) continue;
    const CriterionResult r = run_criterion(id);
    print(std::cout, r);
    ok &= r.passed();
  }
  return ok ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positive operator semigroups: convergence diagnostics and lower-bound certifiers"};
  app.require_subcommand(0, 1);
  // Global flags may follow the subcommand.
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config_file, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--dim", f.dim, "truncation dimension N");
  app.add_option("--horizon", f.horizon, "number of sampled steps");
  app.add_option("--tol", f.tol, "tolerance");
  app.add_option("--p", f.p, "l^p exponent");
  app.add_option("--t0", f.t0, "rotation period");
  app.add_option("--epsilon", f.epsilon, "lower-bound floor for individual-bounds");
  app.add_option("--mode", f.mode, "rational or float")->check(CLI::IsMember({"rational", "float"}));
  app.add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", f.out, "output directory");
  app.add_option("--seed", f.seed, "seed of the random instances");

  auto* gallery = app.add_subcommand("gallery", "named example operators");
  gallery->require_subcommand(1);
  auto* list = gallery->add_subcommand("list", "list instance ids");
  auto* run = gallery->add_subcommand("run", "run the diagnostics of one or more instances");
  std::vector<std::string> ids;
  run->add_option("ids", ids, "instance ids")->required();

  auto* ulam = app.add_subcommand("ulam", "Ulam discretization of an interval map");
  ulam->require_subcommand(1);
  auto* build = ulam->add_subcommand("build", "build the Ulam matrix");
  std::string map_file;
  build->add_option("map", map_file, "map spec (JSON)")->required()->check(CLI::ExistingFile);
  build->add_option("--cells", f.cells, "number of uniform cells")->required();

  auto* check = app.add_subcommand("check", "run one certifier");
  // --h names the lower bound, so help is long-only here.
  check->set_help_flag("--help", "print this help message and exit");
  std::string checker;
  check->add_option("certifier", checker,
                    "lasota-yorke | individual-bounds | domination | ding | rigidity | psi | "
                    "embedded | strong | norm")
      ->required();
  check->add_option("--instance", f.instance, "gallery id or JSON spec")->required();
  check->add_option("--h", f.h, "perron-half | zero | e<k> | JSON file");
  check->add_option("--dominated", f.dominated, "dominated instance for domination");

  auto* suite = app.add_subcommand("suite", "acceptance suite");
  suite->require_subcommand(1);
  auto* acceptance = suite->add_subcommand("acceptance", "run the acceptance criteria");
  int criterion = 0;
  acceptance->add_option("--criterion", criterion, "run a single criterion (1-8)")
      ->check(CLI::Range(1, kCriterionCount));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    std::string command;
    ExperimentConfig config = build_config(f, &command);
    if (*list) {
      for (const auto& e : gallery_entries()) std::cout << e.id << "\t" << e.description << "\n";
      return kExitOk;
    }
    if (*run) return run_gallery_ids(config, ids);
    if (*build) {
      const ExperimentResult r = run_ulam(config, map_file);
      emit(r, config, std::cout);
      return r.exit_code;
    }
    if (*check) {
      config.checker = checker;
      const ExperimentResult r = run_check(config);
      emit(r, config, std::cout);
      return r.exit_code;
    }
    if (*acceptance) return run_suite(criterion);

    // No subcommand: the config file names the command.
    if (command == "gallery") return run_gallery_ids(config, {config.instance});
    if (command == "check") {
      const ExperimentResult r = run_check(config);
      emit(r, config, std::cout);
      return r.exit_code;
    }
    if (command == "ulam") {
      const ExperimentResult r = run_ulam(config, config.instance);
      emit(r, config, std::cout);
      return r.exit_code;
    }
    if (command == "suite") return run_suite(0);
    std::cerr << app.help();
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitViolation;
  }
}
