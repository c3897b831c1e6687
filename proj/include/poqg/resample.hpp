#ifndef POQG_RESAMPLE_HPP
#define POQG_RESAMPLE_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "poqg/dataset.hpp"

namespace poqg {

// One synthetic point. Every resampler here interpolates between two parent
// rows of the input dataset:
//
//   point == weight_a * row(parent_a) + weight_b * row(parent_b)
//
// with weight_a + weight_b == 1. `anchor` is the minority row the draw was
// anchored at (for plain interpolation methods parent_a == anchor). Indices
// always refer to rows of the dataset the resampler was given, never to rows
// of its output, so provenance can be audited after cleaning steps.
struct SyntheticRecord {
    std::size_t anchor = 0;
    std::size_t parent_a = 0;
    std::size_t parent_b = 0;
    double weight_a = 0.0;
    double weight_b = 0.0;
};

struct RowOrigin {
    bool synthetic = false;
    std::size_t index = 0; // input row id, or position in `synthetics`
};

struct ResampleResult {
    Dataset data;                            // rows that survive generation + cleaning
    std::vector<RowOrigin> origins;          // one per row of `data`
    std::vector<SyntheticRecord> synthetics; // all generated points, pre-cleaning
    std::size_t n_original = 0;              // size of the input dataset
    std::vector<std::size_t> removed_original;    // input rows dropped by cleaning, ascending
    std::size_t removed_synthetic = 0;            // synthetic rows dropped by cleaning
    std::size_t degenerate_weight_pairs = 0;      // q-weight both-zero fallbacks
    std::vector<std::string> notes;               // non-fatal warnings for the caller to surface
};

// Checks the internal consistency of a result against its input: shapes,
// origin bookkeeping, provenance indices in range, synthetic rows matching
// their records. Throws InternalError on violation.
void audit_result(const Dataset& input, const ResampleResult& r);

enum class Method {
    none,
    adasyn,
    borderline_smote,
    smote,
    smote_enn,
    smote_tomek,
    poqg,
};

// Stable identifier used in CLI arguments, file names and artifact columns.
std::string method_id(Method m);
// Display name used in report tables.
std::string method_display_name(Method m);
// Parses a method id; throws ConfigError listing the valid ids.
Method parse_method(const std::string& id);
// All methods in canonical report column order (method "none" first).
const std::vector<Method>& all_methods();

} // namespace poqg

#endif
