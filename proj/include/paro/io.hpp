#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "paro/par.hpp"
#include "paro/solvers.hpp"
#include "paro/statbench.hpp"

namespace paro {

// Shortest round-trip decimal form; infinities and NaN spelled out.
std::string format_number(double v);

// Writes to a temp file in the same directory, then renames into place.
void write_text_atomic(const std::string& path, const std::string& content);

std::string join_csv_row(const std::vector<std::string>& cells);

// Columns: iter,F,f,psi,eta,step_norm,qrate,crit_residual. The criticality
// cell is empty on rows where it was not sampled.
void write_trace_csv(const IterateTrace& trace, const std::string& path);

// {"family": ..., "levels": [...], "slopes": [...], "gap": ...}; only the
// fields the family uses are emitted, intercepts are always recomputed. An
// infinite final slope is spelled "inf".
nlohmann::json par_to_json(const ParSpec& par);
ParSpec par_from_json(const nlohmann::json& j);

// CSV with d feature columns then the response column, plus a <path>.meta.json
// sidecar carrying the truth vector and the generating spec.
void save_dataset_csv(const RegressionDataset& dataset, const std::string& path);
RegressionDataset load_dataset_csv(const std::string& path);

}  // namespace paro
