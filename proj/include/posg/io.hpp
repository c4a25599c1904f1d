#pragma once

#include "posg/frobenius_perron.hpp"
#include "posg/lower_bounds.hpp"

#include "json.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace posg {

using Json = nlohmann::json;

inline constexpr const char* kReportSchema = "posg-report/1";

Json to_json(const WeightedSpace& space);
Json to_json(const VecD& v);
/// Row-major nested arrays.
Json to_json(const MatD& m);
Json to_json(const HypothesisCheck& check);
Json to_json(const ConvergenceReport& report, bool include_matrices = false);
Json to_json(const OrbitConvergence& report);
Json to_json(const LowerBoundReport& report);
Json to_json(const CertifierReport& report);
Json to_json(const EmbeddedConsistencyReport& report);
/// {"kind": ..., "space": ...} plus the kernel data; composite kernels are materialized.
Json to_json(const PositiveOperator& op);

WeightedSpace space_from_json(const Json& j);
VecD vector_from_json(const Json& j);
MatD matrix_from_json(const Json& j);

/**
 * @brief Operator spec. Kinds: dense {matrix}, sparse {entries: [[i, j, v]]},
 * transport {sigma, gains}, rank_one {functional, vector}, diagonal
 * {multiplier}, identity. "space" is optional and defaults to counting weights.
 */
PositiveOperator operator_from_json(const Json& j);

/// {"kind": "piecewise_affine", "branches": [{"domain": [a, b], "slope": s, "intercept": c}]}
IntervalMap interval_map_from_json(const Json& j);
/// {"kind": "finite", "sigma": [...], "space"?: ...}
FiniteMap finite_map_from_json(const Json& j);

/// A named trace for CSV export.
struct NamedTrace {
  std::string quantity;
  Trace samples;
};

/// CSV with header t,quantity,value.
void write_traces_csv(std::ostream& out, const std::vector<NamedTrace>& traces);
/// COO rows: row,col,value.
void write_coo_csv(std::ostream& out, const PositiveOperator& op);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

Json read_json_file(const std::filesystem::path& path);

}  // namespace posg
