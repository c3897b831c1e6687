#ifndef POQG_OVERSAMPLER_HPP
#define POQG_OVERSAMPLER_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "poqg/neighbors.hpp"
#include "poqg/resample.hpp"
#include "poqg/rng.hpp"

namespace poqg {

struct PoqgConfig {
    std::size_t k = 5;     // minority neighbors per anchor
    double alpha = 0.5;    // density penalty exponent
    double beta = 0.1;     // q-Gaussian width
    double q = 1.5;        // q-Gaussian shape
    std::uint64_t seed = 0;
    double eps_div = 1e-9; // guard added to distances and density before dividing
    std::optional<std::size_t> target; // synthetic count; unset balances the classes
    DensityDenominator density_denominator = DensityDenominator::majority;
    bool with_replacement = false;  // ablation: Proxima and Orion may coincide
    bool round_robin_anchors = false; // ablation: cycle anchors instead of sampling
};

// Throws ConfigError on out-of-range parameters.
void validate(const PoqgConfig& cfg);

// Per-anchor sampling weights over the anchor's minority neighbors.
// raw -> normalized -> cumulative are filled in by the three steps below.
struct WeightTable {
    std::size_t anchor = 0;
    std::vector<std::size_t> neighbors;
    std::vector<double> raw;
    std::vector<double> normalized;
    std::vector<double> cumulative;
};

// Raw weight of each neighbor n of the anchor:
//
//   w(n) = (dist(n, m) + eps) / (dist(anchor, m) + eps) * 1 / (rho + eps)^alpha
//
// where m is the anchor's nearest majority row (ctx.majority), rho its
// density (ctx.density, which must be set), and eps = eps_div. Weights are
// strictly positive; neighbors far from the local majority witness score
// higher, anchors near dense majority regions are damped.
WeightTable relative_weights(const Dataset& d, const NeighborSet& nn, const MajorityContext& ctx,
                             double alpha, double eps_div);

// Scales raw weights to sum to one.
void normalize_weights(WeightTable& t);

// Inclusive prefix sums of the normalized weights. The per-neighbor
// probability is recoverable as the difference of adjacent entries.
void cumulative_weights(WeightTable& t);

// Draws the two interpolation parents (Proxima first, then Orion) from the
// categorical distribution given by the table. Without replacement (the
// default) the second draw renormalizes over the remaining neighbors and the
// two row ids are distinct. Returns dataset row ids.
std::pair<std::size_t, std::size_t> select_proxima_orion(const WeightTable& t, RngStream& rng,
                                                         bool with_replacement = false);

// q-Gaussian kernel weight of a point at the given distance:
//
//   q == 1:  exp(-(d/beta)^2 / 2)
//   q != 1:  [1 - (1-q)(d/beta)^2]^(1/(1-q)), clamped to 0 where the base
//            is nonpositive (compact support for q < 1)
//
// Note the q != 1 family tends to exp(-(d/beta)^2) as q -> 1: the 1/2 factor
// lives only in the q == 1 branch. Both branches are kept in this
// conventional form on purpose.
double q_gaussian_weight(double distance, double beta, double q);

struct QGaussianWeights {
    double q1 = 0.0;
    double q2 = 0.0;
};

// Normalizes two raw kernel weights to sum to one. If both are zero (both
// parents outside a q < 1 kernel's support) the pair falls back to 0.5/0.5
// and `degenerate_count`, when given, is incremented.
QGaussianWeights normalize_q_weights(double raw1, double raw2,
                                     std::size_t* degenerate_count = nullptr);

// x = anchor + q1 (proxima - anchor) + q2 (orion - anchor). Because
// q1 + q2 == 1 this is the point q1 * proxima + q2 * orion on the segment
// between the parents.
std::vector<double> generate_synthetic(std::span<const double> anchor,
                                       std::span<const double> proxima,
                                       std::span<const double> orion, QGaussianWeights w);

// Full oversampling pass: for each synthetic point, sample an anchor
// uniformly from the minority rows, draw (Proxima, Orion) from its weight
// table, and interpolate with normalized q-Gaussian weights. Appends the
// synthetic rows (label 1) after the original rows.
ResampleResult oversample(const Dataset& d, const PoqgConfig& cfg);

} // namespace poqg

#endif
