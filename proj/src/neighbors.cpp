#include "poqg/neighbors.hpp"

#include <algorithm>

#include "poqg/errors.hpp"

namespace poqg {

namespace {

NeighborSet knn_among(const Dataset& d, std::size_t anchor, std::size_t k,
                      const std::vector<std::size_t>& candidates, const char* pool_name) {
    if (k == 0) {
        throw ConfigError("k must be positive");
    }
    // candidates may include the anchor itself; it is skipped below.
    std::size_t available = candidates.size();
    for (std::size_t c : candidates) {
        if (c == anchor) {
            --available;
        }
    }
    if (available < k) {
        throw DataError(std::string(pool_name) + " has " + std::to_string(available) +
                        " candidate rows around row " + std::to_string(anchor) +
                        ", fewer than k=" + std::to_string(k));
    }

    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(available);
    const auto a = d.features.row(anchor);
    for (std::size_t c : candidates) {
        if (c == anchor) {
            continue;
        }
        order.emplace_back(squared_distance(a, d.features.row(c)), c);
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());

    NeighborSet out;
    out.anchor = anchor;
    out.neighbors.reserve(k);
    out.distances.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.neighbors.push_back(order[i].second);
        out.distances.push_back(std::sqrt(order[i].first));
    }
    return out;
}

} // namespace

NeighborSet knn_within_class(const Dataset& d, int label, std::size_t anchor, std::size_t k) {
    if (anchor >= d.size()) {
        throw InternalError("knn_within_class: anchor out of range");
    }
    if (d.labels[anchor] != label) {
        throw InternalError("knn_within_class: row " + std::to_string(anchor) +
                            " does not have label " + std::to_string(label));
    }
    const char* pool = label == 1 ? "minority class" : "majority class";
    return knn_among(d, anchor, k, d.rows_of(label), pool);
}

NeighborSet knn_all(const Dataset& d, std::size_t anchor, std::size_t k) {
    if (anchor >= d.size()) {
        throw InternalError("knn_all: anchor out of range");
    }
    std::vector<std::size_t> all(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        all[i] = i;
    }
    return knn_among(d, anchor, k, all, "dataset");
}

MajorityContext nearest_majority(const Dataset& d, std::size_t anchor) {
    const std::vector<std::size_t> majority = d.rows_of(0);
    if (majority.empty()) {
        throw DataError("no majority rows; cannot find a nearest majority instance");
    }
    const auto a = d.features.row(anchor);
    MajorityContext ctx;
    ctx.anchor = anchor;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m : majority) {
        const double d2 = squared_distance(a, d.features.row(m));
        if (d2 < best) {
            best = d2;
            ctx.majority = m;
        }
    }
    ctx.distance = std::sqrt(best);
    return ctx;
}

double majority_density(const Dataset& d, std::size_t majority_row, DensityDenominator denom) {
    if (majority_row >= d.size()) {
        throw InternalError("majority_density: row out of range");
    }
    const std::vector<std::size_t> majority = d.rows_of(0);
    if (majority.empty()) {
        throw DataError("no majority rows; density is undefined");
    }
    const auto p = d.features.row(majority_row);
    double sum = 0.0;
    for (std::size_t m : majority) {
        sum += euclidean(p, d.features.row(m));
    }
    const std::size_t n = denom == DensityDenominator::majority ? majority.size() : d.size();
    return sum / static_cast<double>(n);
}

} // namespace poqg
