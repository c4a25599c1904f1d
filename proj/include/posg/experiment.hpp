#pragma once

#include "posg/gallery.hpp"
#include "posg/io.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace posg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInapplicable = 2;
inline constexpr int kExitUsage = 64;

/**
 * @brief One experiment. JSON schema (all keys optional):
 *
 *   {"instance": "example-4-3" | "path/to/spec.json",
 *    "checker": "lasota-yorke" | "individual-bounds" | "domination" | "ding" |
 *               "rigidity" | "psi" | "embedded" | "strong" | "norm",
 *    "dominated": instance, "dim": int, "horizon": int, "tol": number,
 *    "p": number, "t0": number, "epsilon": number, "h": string,
 *    "mode": "float" | "rational", "format": "json" | "csv", "out": dir,
 *    "seed": int, "cells": int}
 *
 * Unknown keys and non-positive tolerances are rejected with ConfigError.
 */
struct ExperimentConfig {
  std::string instance;
  std::string checker;
  std::string dominated;
  std::optional<Index> dim;
  std::optional<Index> horizon;
  double tol = 1e-9;
  double p = 2.0;
  double t0 = 1.0;
  double epsilon = 1e-6;
  /// perron-half | zero | e<k> | path to a JSON array.
  std::string h = "perron-half";
  std::string mode = "float";
  std::string format = "json";
  std::string out;
  std::uint64_t seed = 20240607;
  Index cells = 0;
};

/// Overlays the keys of `j` onto `base`.
ExperimentConfig config_from_json(const Json& j, ExperimentConfig base = {});
void validate(const ExperimentConfig& config);

struct ExperimentResult {
  std::string name;
  Json report;
  std::vector<NamedTrace> traces;
  int exit_code = kExitOk;
};

/// Gallery id, or a JSON file holding {"gallery": id} or an operator, finite map or
/// {"kind": "continuous", "rate_matrix": ...} spec.
GalleryInstance resolve_instance(const std::string& instance, const ExperimentConfig& config);

/// Runs the standard diagnostics of an instance and checks its expected outcomes.
ExperimentResult run_gallery(const ExperimentConfig& config);
/// Runs one certifier; exit 0 verified, 2 not applicable or inconclusive, 1 violated.
ExperimentResult run_check(const ExperimentConfig& config);
/// Ulam matrix of an interval map, or the transfer operator of a finite map.
ExperimentResult run_ulam(const ExperimentConfig& config, const std::filesystem::path& map_file);

/// Writes <out>/<name>.json and <out>/<name>.csv when `out` is set; otherwise
/// prints the report (json) or the traces (csv).
void emit(const ExperimentResult& result, const ExperimentConfig& config, std::ostream& out);

/// Worst of several exit codes: violation over inapplicable over ok.
int combine_exit_codes(const std::vector<int>& codes);

}  // namespace posg
