#include "poqg/oversampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "poqg/errors.hpp"

namespace poqg {

namespace {

std::size_t pick_from_cumulative(const std::vector<double>& cumulative, double u) {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
    return std::min(i, cumulative.size() - 1);
}

} // namespace

void validate(const PoqgConfig& cfg) {
    if (cfg.k < 2) {
        throw ConfigError("k must be at least 2, got " + std::to_string(cfg.k));
    }
    if (cfg.alpha < 0.0) {
        throw ConfigError("alpha must be nonnegative, got " + format_double(cfg.alpha));
    }
    if (!(cfg.beta > 0.0)) {
        throw ConfigError("beta must be positive, got " + format_double(cfg.beta));
    }
    if (!(cfg.q > 0.0) || !(cfg.q < 3.0)) {
        throw ConfigError("q must lie in (0, 3), got " + format_double(cfg.q));
    }
    if (!(cfg.eps_div > 0.0)) {
        throw ConfigError("eps_div must be positive, got " + format_double(cfg.eps_div));
    }
}

WeightTable relative_weights(const Dataset& d, const NeighborSet& nn, const MajorityContext& ctx,
                             double alpha, double eps_div) {
    if (nn.anchor != ctx.anchor) {
        throw InternalError("relative_weights: neighbor set and majority context disagree on the anchor");
    }
    if (!ctx.density) {
        throw InternalError("relative_weights: density has not been computed");
    }
    if (!(eps_div > 0.0)) {
        throw ConfigError("eps_div must be positive");
    }

    WeightTable t;
    t.anchor = nn.anchor;
    t.neighbors = nn.neighbors;
    t.raw.reserve(nn.neighbors.size());
    const auto witness = d.features.row(ctx.majority);
    const double anchor_term = ctx.distance + eps_div;
    const double density_term = std::pow(*ctx.density + eps_div, alpha);
    for (std::size_t n : nn.neighbors) {
        const double dn = euclidean(d.features.row(n), witness);
        t.raw.push_back((dn + eps_div) / anchor_term / density_term);
    }
    return t;
}

void normalize_weights(WeightTable& t) {
    if (t.raw.empty()) {
        throw InternalError("normalize_weights: empty weight table");
    }
    double sum = 0.0;
    for (double w : t.raw) {
        if (!(w > 0.0)) {
            throw InternalError("normalize_weights: nonpositive raw weight");
        }
        sum += w;
    }
    t.normalized.resize(t.raw.size());
    for (std::size_t i = 0; i < t.raw.size(); ++i) {
        t.normalized[i] = t.raw[i] / sum;
    }
}

void cumulative_weights(WeightTable& t) {
    if (t.normalized.size() != t.raw.size() || t.raw.empty()) {
        throw InternalError("cumulative_weights: normalize_weights has not run");
    }
    t.cumulative.resize(t.normalized.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < t.normalized.size(); ++i) {
        acc += t.normalized[i];
        t.cumulative[i] = acc;
    }
}

std::pair<std::size_t, std::size_t> select_proxima_orion(const WeightTable& t, RngStream& rng,
                                                         bool with_replacement) {
    if (t.cumulative.size() != t.neighbors.size() || t.cumulative.empty()) {
        throw InternalError("select_proxima_orion: cumulative weights have not been computed");
    }
    if (!with_replacement && t.neighbors.size() < 2) {
        throw ConfigError("drawing two distinct neighbors needs k >= 2");
    }

    const std::size_t i = pick_from_cumulative(t.cumulative, rng.uniform());
    std::size_t j;
    if (with_replacement) {
        j = pick_from_cumulative(t.cumulative, rng.uniform());
    } else {
        // Second draw over the remaining neighbors, renormalized.
        const double u = rng.uniform() * (1.0 - t.normalized[i]);
        double acc = 0.0;
        j = t.neighbors.size(); // sentinel
        for (std::size_t n = 0; n < t.neighbors.size(); ++n) {
            if (n == i) {
                continue;
            }
            acc += t.normalized[n];
            if (u < acc) {
                j = n;
                break;
            }
        }
        if (j == t.neighbors.size()) {
            // Rounding pushed u past the last remaining entry.
            j = t.neighbors.size() - 1;
            if (j == i) {
                --j;
            }
        }
    }
    return {t.neighbors[i], t.neighbors[j]};
}

double q_gaussian_weight(double distance, double beta, double q) {
    if (!(beta > 0.0)) {
        throw ConfigError("beta must be positive");
    }
    if (distance < 0.0) {
        throw InternalError("q_gaussian_weight: negative distance");
    }
    const double u = (distance / beta) * (distance / beta);
    if (q == 1.0) {
        return std::exp(-0.5 * u);
    }
    const double base = 1.0 - (1.0 - q) * u;
    if (base <= 0.0) {
        return 0.0;
    }
    return std::pow(base, 1.0 / (1.0 - q));
}

QGaussianWeights normalize_q_weights(double raw1, double raw2, std::size_t* degenerate_count) {
    if (raw1 < 0.0 || raw2 < 0.0 || !std::isfinite(raw1) || !std::isfinite(raw2)) {
        throw InternalError("normalize_q_weights: raw weights must be finite and nonnegative");
    }
    const double sum = raw1 + raw2;
    if (sum <= 0.0) {
        if (degenerate_count) {
            ++*degenerate_count;
        }
        return {0.5, 0.5};
    }
    return {raw1 / sum, raw2 / sum};
}

std::vector<double> generate_synthetic(std::span<const double> anchor,
                                       std::span<const double> proxima,
                                       std::span<const double> orion, QGaussianWeights w) {
    if (anchor.size() != proxima.size() || anchor.size() != orion.size()) {
        throw InternalError("generate_synthetic: dimension mismatch");
    }
    std::vector<double> x(anchor.size());
    for (std::size_t c = 0; c < anchor.size(); ++c) {
        x[c] = anchor[c] + w.q1 * (proxima[c] - anchor[c]) + w.q2 * (orion[c] - anchor[c]);
    }
    return x;
}

ResampleResult oversample(const Dataset& d, const PoqgConfig& cfg) {
    validate(cfg);
    validate(d);
    const std::vector<std::size_t> minority = d.rows_of(1);
    const std::size_t n_min = minority.size();
    const std::size_t n_maj = d.size() - n_min;
    if (n_min < cfg.k + 1) {
        throw DataError("minority class has " + std::to_string(n_min) + " rows; k=" +
                        std::to_string(cfg.k) + " needs at least " + std::to_string(cfg.k + 1));
    }
    if (n_maj == 0) {
        throw DataError("no majority rows; nothing to balance against");
    }

    const std::size_t n_synth = cfg.target ? *cfg.target : (n_maj > n_min ? n_maj - n_min : 0);

    // Anchor geometry is fixed for the whole pass: neighbors, nearest
    // majority witness, its density, and the sampling weights.
    std::map<std::size_t, double> density_cache;
    std::vector<WeightTable> tables;
    tables.reserve(n_min);
    for (std::size_t anchor : minority) {
        NeighborSet nn = knn_within_class(d, 1, anchor, cfg.k);
        MajorityContext ctx = nearest_majority(d, anchor);
        auto cached = density_cache.find(ctx.majority);
        if (cached == density_cache.end()) {
            cached = density_cache
                         .emplace(ctx.majority,
                                  majority_density(d, ctx.majority, cfg.density_denominator))
                         .first;
        }
        ctx.density = cached->second;
        WeightTable t = relative_weights(d, nn, ctx, cfg.alpha, cfg.eps_div);
        normalize_weights(t);
        cumulative_weights(t);
        tables.push_back(std::move(t));
    }

    ResampleResult r;
    r.data = d;
    r.n_original = d.size();
    r.origins.reserve(d.size() + n_synth);
    for (std::size_t i = 0; i < d.size(); ++i) {
        r.origins.push_back({false, i});
    }

    RngStream rng(cfg.seed);
    for (std::size_t s = 0; s < n_synth; ++s) {
        const std::size_t a = cfg.round_robin_anchors ? s % n_min : rng.uniform_index(n_min);
        const WeightTable& t = tables[a];
        const auto [proxima, orion] = select_proxima_orion(t, rng, cfg.with_replacement);
        const auto anchor_row = d.features.row(t.anchor);
        const double w1 = q_gaussian_weight(euclidean(anchor_row, d.features.row(proxima)),
                                            cfg.beta, cfg.q);
        const double w2 = q_gaussian_weight(euclidean(anchor_row, d.features.row(orion)),
                                            cfg.beta, cfg.q);
        const QGaussianWeights w = normalize_q_weights(w1, w2, &r.degenerate_weight_pairs);
        const std::vector<double> x =
            generate_synthetic(anchor_row, d.features.row(proxima), d.features.row(orion), w);
        r.data.features.append_row(x);
        r.data.labels.push_back(1);
        r.origins.push_back({true, r.synthetics.size()});
        r.synthetics.push_back({t.anchor, proxima, orion, w.q1, w.q2});
    }
    return r;
}

} // namespace poqg
