#ifndef POQG_REPORT_HPP
#define POQG_REPORT_HPP

#include <string>
#include <vector>

#include "json.hpp"
#include "poqg/eval.hpp"
#include "poqg/wilcoxon.hpp"

namespace poqg {

// All artifact renderers return the full file content as a string. Callers
// write the bytes verbatim; every function here is deterministic in its
// inputs (sorted rows, canonical method order, shortest-round-trip doubles),
// so identical runs produce identical files.

// One row per (dataset, method, fold). Undefined metrics render as empty
// cells. With variant_metrics the two nonstandard columns are appended.
std::string eval_folds_csv(const std::vector<EvalReport>& reports, bool variant_metrics);

// Per-cell aggregates as JSON (keys sorted by nlohmann's object ordering).
nlohmann::json eval_summary_json(const std::vector<EvalReport>& reports);

// metric,method,wins rows for both metrics.
std::string winning_times_csv(const std::vector<ComparisonTable>& tables);

// One row per (metric, baseline) comparison.
std::string wilcoxon_csv(const std::vector<ComparisonTable>& tables);

// Human-readable report: per-metric mean tables with the best method per
// dataset in bold, winning-times rows, and the signed-rank test tables.
std::string comparison_markdown(const std::vector<EvalReport>& reports,
                                const std::vector<ComparisonTable>& tables);

// synthetic_index,anchor_id,proxima_id,orion_id,q1,q2 for every generated
// point (pre-cleaning), indices referring to the resampler's input rows.
std::string provenance_csv(const ResampleResult& r);

// Fixed 4-decimal rendering for the markdown tables.
std::string format_fixed4(double v);

} // namespace poqg

#endif
