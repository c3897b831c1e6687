#ifndef POQG_BASELINES_HPP
#define POQG_BASELINES_HPP

#include <cstdint>
#include <vector>

#include "poqg/resample.hpp"

namespace poqg {

struct BaselineConfig {
    std::size_t k_neighbors = 5; // interpolation / danger-assessment neighbors
    std::size_t enn_k = 3;       // neighbors for the edited-nearest-neighbor vote
    enum class Borderline { one, two } borderline_kind = Borderline::two;
    std::uint64_t seed = 0;
};

void validate(const BaselineConfig& cfg);

// Classic minority oversampling: anchor sampled uniformly from the minority
// rows, one of its k nearest minority neighbors sampled uniformly, synthetic
// point at anchor + lambda (neighbor - anchor) with lambda ~ U[0, 1). Always
// generates exactly enough points to balance the classes.
ResampleResult smote(const Dataset& d, const BaselineConfig& cfg);

// smote followed by Tomek-link cleaning of the combined data: in every
// cross-class pair of mutual nearest neighbors, the majority member is
// dropped.
ResampleResult smote_tomek(const Dataset& d, const BaselineConfig& cfg);

// smote followed by edited-nearest-neighbor cleaning of the combined data:
// any row (either class, original or synthetic) whose enn_k nearest
// neighbors vote against its label is dropped; tied votes keep the row.
ResampleResult smote_enn(const Dataset& d, const BaselineConfig& cfg);

// Adaptive allocation: each minority row gets synthetics in proportion to
// the share of majority rows among its k nearest neighbors (all classes),
// rounded by largest remainder so the total is exact. Interpolation itself
// is smote-style between minority rows. If every ratio is zero the
// allocation falls back to uniform and a note is recorded on the result.
ResampleResult adasyn(const Dataset& d, const BaselineConfig& cfg);

// Oversamples only "danger" minority rows: those with at least half but not
// all of their k nearest neighbors (all classes) in the majority. Kind one
// interpolates toward minority neighbors only; kind two also interpolates
// toward the majority rows among the anchor's k nearest with lambda ~
// U[0, 0.5), keeping the point in the half nearer the anchor.
ResampleResult borderline_smote(const Dataset& d, const BaselineConfig& cfg);

// Cleaning primitives on an arbitrary labeled dataset; exposed for tests.
// Both return row indices to drop, ascending.
std::vector<std::size_t> tomek_link_majority_rows(const Dataset& d);
std::vector<std::size_t> enn_removal_rows(const Dataset& d, std::size_t k);

// Largest-remainder rounding of `weights` (nonnegative, positive sum) to
// integer counts summing exactly to `total`. Remainder ties go to the lower
// index.
std::vector<std::size_t> largest_remainder_allocation(const std::vector<double>& weights,
                                                      std::size_t total);

} // namespace poqg

#endif
