#ifndef POQG_NEIGHBORS_HPP
#define POQG_NEIGHBORS_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "poqg/dataset.hpp"

namespace poqg {

// k nearest neighbors of one anchor row, sorted ascending by (distance, row
// index) so results are total-ordered even with duplicate points.
struct NeighborSet {
    std::size_t anchor;
    std::vector<std::size_t> neighbors;
    std::vector<double> distances;
};

// The majority instance closest to a minority anchor, plus its density once
// majority_density has been evaluated for it.
struct MajorityContext {
    std::size_t anchor = 0;
    std::size_t majority = 0;
    double distance = 0.0;
    std::optional<double> density;
};

enum class DensityDenominator { majority, all };

// k nearest rows of class `label` around `anchor` (which must itself have
// that label and is never its own neighbor). Exact brute-force search.
NeighborSet knn_within_class(const Dataset& d, int label, std::size_t anchor, std::size_t k);

// k nearest rows of any class around `anchor` (excluding the anchor).
NeighborSet knn_all(const Dataset& d, std::size_t anchor, std::size_t k);

// Nearest majority (label 0) row to `anchor`; ties broken by row index.
// density is left unset.
MajorityContext nearest_majority(const Dataset& d, std::size_t anchor);

// Mean distance from `majority_row` to every majority row (its own zero term
// included). The `all` denominator divides by the full dataset size instead
// of the majority count; the sum always runs over majority rows only.
double majority_density(const Dataset& d, std::size_t majority_row,
                        DensityDenominator denom = DensityDenominator::majority);

} // namespace poqg

#endif
