#include "poqg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poqg/errors.hpp"
#include "poqg/neighbors.hpp"
#include "poqg/rng.hpp"

namespace poqg {

namespace {

std::size_t balance_deficit(const Dataset& d) {
    const std::size_t n_min = d.count_of(1);
    const std::size_t n_maj = d.size() - n_min;
    return n_maj > n_min ? n_maj - n_min : 0;
}

void require_minority_pool(const Dataset& d, std::size_t k) {
    const std::size_t n_min = d.count_of(1);
    if (n_min < k + 1) {
        throw DataError("minority class has " + std::to_string(n_min) +
                        " rows; k_neighbors=" + std::to_string(k) + " needs at least " +
                        std::to_string(k + 1));
    }
}

ResampleResult make_identity_result(const Dataset& d) {
    ResampleResult r;
    r.data = d;
    r.n_original = d.size();
    r.origins.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        r.origins.push_back({false, i});
    }
    return r;
}

void interpolate_append(ResampleResult& r, const Dataset& d, std::size_t anchor,
                        std::size_t neighbor, double lambda) {
    const auto a = d.features.row(anchor);
    const auto b = d.features.row(neighbor);
    std::vector<double> x(a.size());
    for (std::size_t c = 0; c < a.size(); ++c) {
        x[c] = a[c] + lambda * (b[c] - a[c]);
    }
    r.data.features.append_row(x);
    r.data.labels.push_back(1);
    r.origins.push_back({true, r.synthetics.size()});
    r.synthetics.push_back({anchor, anchor, neighbor, 1.0 - lambda, lambda});
}

// Drops the given rows (indices into r.data, ascending) and updates the
// origin bookkeeping.
void apply_removals(ResampleResult& r, const std::vector<std::size_t>& rows) {
    if (rows.empty()) {
        return;
    }
    std::vector<bool> drop(r.data.size(), false);
    for (std::size_t row : rows) {
        drop[row] = true;
        if (r.origins[row].synthetic) {
            ++r.removed_synthetic;
        } else {
            r.removed_original.push_back(r.origins[row].index);
        }
    }
    std::sort(r.removed_original.begin(), r.removed_original.end());

    Dataset kept;
    kept.feature_names = r.data.feature_names;
    kept.features = Matrix(0, r.data.dim());
    std::vector<RowOrigin> kept_origins;
    for (std::size_t i = 0; i < r.data.size(); ++i) {
        if (drop[i]) {
            continue;
        }
        kept.features.append_row(r.data.features.row(i));
        kept.labels.push_back(r.data.labels[i]);
        kept_origins.push_back(r.origins[i]);
    }
    r.data = std::move(kept);
    r.origins = std::move(kept_origins);
}

// Nearest row to `i` other than itself; ties by lower row index.
std::size_t nearest_other(const Dataset& d, std::size_t i) {
    const auto p = d.features.row(i);
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = i;
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (j == i) {
            continue;
        }
        const double d2 = squared_distance(p, d.features.row(j));
        if (d2 < best) {
            best = d2;
            arg = j;
        }
    }
    return arg;
}

} // namespace

void validate(const BaselineConfig& cfg) {
    if (cfg.k_neighbors < 1) {
        throw ConfigError("k_neighbors must be positive");
    }
    if (cfg.enn_k < 1) {
        throw ConfigError("enn_k must be positive");
    }
}

std::vector<std::size_t> largest_remainder_allocation(const std::vector<double>& weights,
                                                      std::size_t total) {
    if (weights.empty()) {
        throw InternalError("largest_remainder_allocation: no weights");
    }
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w)) {
            throw InternalError("largest_remainder_allocation: weights must be finite and nonnegative");
        }
        sum += w;
    }
    if (!(sum > 0.0)) {
        throw InternalError("largest_remainder_allocation: weight sum must be positive");
    }

    std::vector<std::size_t> counts(weights.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    remainders.reserve(weights.size());
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double share = weights[i] / sum * static_cast<double>(total);
        counts[i] = static_cast<std::size_t>(std::floor(share));
        assigned += counts[i];
        remainders.emplace_back(share - std::floor(share), i);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (std::size_t r = 0; assigned < total; ++r, ++assigned) {
        ++counts[remainders[r % remainders.size()].second];
    }
    return counts;
}

ResampleResult smote(const Dataset& d, const BaselineConfig& cfg) {
    validate(cfg);
    validate(d);
    const std::size_t n_synth = balance_deficit(d);
    ResampleResult r = make_identity_result(d);
    if (n_synth == 0) {
        return r;
    }
    require_minority_pool(d, cfg.k_neighbors);
    const std::vector<std::size_t> minority = d.rows_of(1);
    std::vector<NeighborSet> nn;
    nn.reserve(minority.size());
    for (std::size_t m : minority) {
        nn.push_back(knn_within_class(d, 1, m, cfg.k_neighbors));
    }
    RngStream rng(cfg.seed);
    for (std::size_t s = 0; s < n_synth; ++s) {
        const std::size_t a = rng.uniform_index(minority.size());
        const std::size_t neighbor = nn[a].neighbors[rng.uniform_index(cfg.k_neighbors)];
        interpolate_append(r, d, minority[a], neighbor, rng.uniform());
    }
    return r;
}

std::vector<std::size_t> tomek_link_majority_rows(const Dataset& d) {
    validate(d);
    if (d.size() < 2) {
        return {};
    }
    std::vector<std::size_t> nn(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        nn[i] = nearest_other(d, i);
    }
    std::vector<std::size_t> removals;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::size_t j = nn[i];
        if (i < j && nn[j] == i && d.labels[i] != d.labels[j]) {
            removals.push_back(d.labels[i] == 0 ? i : j);
        }
    }
    std::sort(removals.begin(), removals.end());
    return removals;
}

std::vector<std::size_t> enn_removal_rows(const Dataset& d, std::size_t k) {
    validate(d);
    if (k < 1) {
        throw ConfigError("enn_k must be positive");
    }
    if (d.size() < k + 1) {
        throw DataError("edited-nearest-neighbor cleaning needs more than k=" + std::to_string(k) +
                        " rows, got " + std::to_string(d.size()));
    }
    std::vector<std::size_t> removals;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const NeighborSet nn = knn_all(d, i, k);
        std::size_t agree = 0;
        for (std::size_t n : nn.neighbors) {
            if (d.labels[n] == d.labels[i]) {
                ++agree;
            }
        }
        // Strict-majority disagreement drops the row; ties keep it.
        if (2 * agree < k) {
            removals.push_back(i);
        }
    }
    return removals;
}

ResampleResult smote_tomek(const Dataset& d, const BaselineConfig& cfg) {
    ResampleResult r = smote(d, cfg);
    apply_removals(r, tomek_link_majority_rows(r.data));
    return r;
}

ResampleResult smote_enn(const Dataset& d, const BaselineConfig& cfg) {
    ResampleResult r = smote(d, cfg);
    apply_removals(r, enn_removal_rows(r.data, cfg.enn_k));
    return r;
}

ResampleResult adasyn(const Dataset& d, const BaselineConfig& cfg) {
    validate(cfg);
    validate(d);
    const std::size_t n_synth = balance_deficit(d);
    ResampleResult r = make_identity_result(d);
    if (n_synth == 0) {
        return r;
    }
    require_minority_pool(d, cfg.k_neighbors);
    if (d.size() < cfg.k_neighbors + 1) {
        throw DataError("dataset too small for k_neighbors=" + std::to_string(cfg.k_neighbors));
    }

    const std::vector<std::size_t> minority = d.rows_of(1);
    std::vector<double> ratios;
    ratios.reserve(minority.size());
    double ratio_sum = 0.0;
    for (std::size_t m : minority) {
        const NeighborSet nn = knn_all(d, m, cfg.k_neighbors);
        std::size_t majority_neighbors = 0;
        for (std::size_t n : nn.neighbors) {
            if (d.labels[n] == 0) {
                ++majority_neighbors;
            }
        }
        ratios.push_back(static_cast<double>(majority_neighbors) /
                         static_cast<double>(cfg.k_neighbors));
        ratio_sum += ratios.back();
    }
    if (ratio_sum == 0.0) {
        // No minority row sees any majority neighbor; fall back to a uniform
        // allocation rather than failing the whole run.
        std::fill(ratios.begin(), ratios.end(), 1.0);
        r.notes.push_back("adasyn: all difficulty ratios are zero, using uniform allocation");
    }
    const std::vector<std::size_t> allocation = largest_remainder_allocation(ratios, n_synth);

    std::vector<NeighborSet> pools;
    pools.reserve(minority.size());
    for (std::size_t m : minority) {
        pools.push_back(knn_within_class(d, 1, m, cfg.k_neighbors));
    }
    RngStream rng(cfg.seed);
    for (std::size_t a = 0; a < minority.size(); ++a) {
        for (std::size_t s = 0; s < allocation[a]; ++s) {
            const std::size_t neighbor = pools[a].neighbors[rng.uniform_index(cfg.k_neighbors)];
            interpolate_append(r, d, minority[a], neighbor, rng.uniform());
        }
    }
    return r;
}

ResampleResult borderline_smote(const Dataset& d, const BaselineConfig& cfg) {
    validate(cfg);
    validate(d);
    const std::size_t n_synth = balance_deficit(d);
    ResampleResult r = make_identity_result(d);
    if (n_synth == 0) {
        return r;
    }
    require_minority_pool(d, cfg.k_neighbors);
    if (d.size() < cfg.k_neighbors + 1) {
        throw DataError("dataset too small for k_neighbors=" + std::to_string(cfg.k_neighbors));
    }

    const std::vector<std::size_t> minority = d.rows_of(1);
    std::vector<std::size_t> danger;                      // indices into `minority`
    std::vector<std::vector<std::size_t>> majority_near;  // per danger anchor
    for (std::size_t a = 0; a < minority.size(); ++a) {
        const NeighborSet nn = knn_all(d, minority[a], cfg.k_neighbors);
        std::vector<std::size_t> majority_rows;
        for (std::size_t n : nn.neighbors) {
            if (d.labels[n] == 0) {
                majority_rows.push_back(n);
            }
        }
        const std::size_t m = majority_rows.size();
        if (2 * m >= cfg.k_neighbors && m < cfg.k_neighbors) {
            danger.push_back(a);
            majority_near.push_back(std::move(majority_rows));
        }
    }
    if (danger.empty()) {
        throw DataError("no minority row qualifies as borderline; use plain smote on this data");
    }

    std::vector<NeighborSet> pools;
    pools.reserve(danger.size());
    for (std::size_t a : danger) {
        pools.push_back(knn_within_class(d, 1, minority[a], cfg.k_neighbors));
    }
    const bool kind_two = cfg.borderline_kind == BaselineConfig::Borderline::two;
    RngStream rng(cfg.seed);
    for (std::size_t s = 0; s < n_synth; ++s) {
        const std::size_t a = rng.uniform_index(danger.size());
        if (kind_two && rng.uniform() < 0.5) {
            // Interpolate toward a nearby majority row, staying in the half
            // of the segment nearer the anchor.
            const std::size_t neighbor = majority_near[a][rng.uniform_index(majority_near[a].size())];
            interpolate_append(r, d, minority[danger[a]], neighbor, 0.5 * rng.uniform());
        } else {
            const std::size_t neighbor = pools[a].neighbors[rng.uniform_index(cfg.k_neighbors)];
            interpolate_append(r, d, minority[danger[a]], neighbor, rng.uniform());
        }
    }
    return r;
}

} // namespace poqg
