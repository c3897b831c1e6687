// Test-side oracles: independent brute-force implementations the suite
// checks the optimized library code against, plus small test utilities.
// Everything here favors obviousness over speed.
#ifndef POQG_TESTS_ORACLES_HPP
#define POQG_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "poqg/dataset.hpp"
#include "poqg/rng.hpp"

#include <unistd.h>

namespace oracles {

inline std::filesystem::path fixture_path(const std::string& name) {
    return std::filesystem::path(POQG_FIXTURE_DIR) / name;
}

inline std::filesystem::path make_temp_dir(const std::string& tag) {
    const auto p = std::filesystem::temp_directory_path() /
                   ("poqg_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

// Builds a dataset from a row-major value buffer, as stored in frozen.hpp.
inline poqg::Dataset dataset_from_rows(std::size_t dim, const std::vector<double>& x,
                                       const std::vector<int>& labels) {
    poqg::Dataset d;
    d.features = poqg::Matrix(0, dim);
    for (std::size_t r = 0; r * dim < x.size(); ++r) {
        std::vector<double> row(x.begin() + static_cast<std::ptrdiff_t>(r * dim),
                                x.begin() + static_cast<std::ptrdiff_t>((r + 1) * dim));
        d.features.append_row(row);
    }
    d.labels = labels;
    for (std::size_t c = 0; c < dim; ++c) {
        d.feature_names.push_back("f" + std::to_string(c));
    }
    return d;
}

// k nearest rows to `anchor` by full scan and stable ordering on
// (squared distance, index). label = -1 searches every row, otherwise only
// rows with that label. The anchor itself is excluded.
inline std::vector<std::size_t> brute_knn(const poqg::Dataset& d, std::size_t anchor,
                                          std::size_t k, int label) {
    std::vector<std::pair<double, std::size_t>> order;
    const auto a = d.features.row(anchor);
    for (std::size_t j = 0; j < d.size(); ++j) {
        if (j == anchor || (label >= 0 && d.labels[j] != label)) {
            continue;
        }
        order.emplace_back(poqg::squared_distance(a, d.features.row(j)), j);
    }
    if (order.size() < k) {
        throw std::runtime_error("brute_knn: pool smaller than k");
    }
    std::sort(order.begin(), order.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) {
        out[i] = order[i].second;
    }
    return out;
}

// ROC-AUC by trapezoidal integration of the ROC curve, sweeping score
// thresholds from high to low with tied scores grouped.
inline double trapezoid_auc(std::span<const double> scores, std::span<const int> labels) {
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });
    double pos = 0.0;
    double neg = 0.0;
    for (int l : labels) {
        (l == 1 ? pos : neg) += 1.0;
    }
    if (pos == 0.0 || neg == 0.0) {
        throw std::runtime_error("trapezoid_auc: needs both classes");
    }
    double tp = 0.0, fp = 0.0, prev_tp = 0.0, prev_fp = 0.0, area = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] == 1 ? tp : fp) += 1.0;
            ++j;
        }
        area += (fp - prev_fp) * (tp + prev_tp) / 2.0;
        prev_tp = tp;
        prev_fp = fp;
        i = j;
    }
    return area / (pos * neg);
}

struct EnumeratedWilcoxon {
    double r_plus = 0.0;
    double r_minus = 0.0;
    std::size_t n_effective = 0;
    double p_value = 1.0;
};

// Exact two-sided signed-rank p by enumerating all 2^n sign assignments of
// the observed ranks (n <= ~20). Ranks are computed count-wise rather than
// sort-wise so the oracle shares no logic with the library.
inline EnumeratedWilcoxon wilcoxon_enumerate(std::span<const double> a,
                                             std::span<const double> b) {
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) {
            diffs.push_back(a[i] - b[i]);
        }
    }
    const std::size_t n = diffs.size();
    if (n == 0 || n > 20) {
        throw std::runtime_error("wilcoxon_enumerate: unsupported n");
    }
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n; ++i) {
        double below = 0.0, equal = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double di = std::abs(diffs[i]);
            const double dj = std::abs(diffs[j]);
            if (dj < di) {
                below += 1.0;
            } else if (dj == di) {
                equal += 1.0;
            }
        }
        ranks[i] = below + (equal + 1.0) / 2.0;
    }
    EnumeratedWilcoxon r;
    r.n_effective = n;
    for (std::size_t i = 0; i < n; ++i) {
        (diffs[i] > 0.0 ? r.r_plus : r.r_minus) += ranks[i];
    }
    const double w_obs = std::min(r.r_plus, r.r_minus);
    const std::size_t total = std::size_t(1) << n;
    std::size_t at_or_below = 0;
    for (std::size_t mask = 0; mask < total; ++mask) {
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::size_t(1) << i)) {
                w += ranks[i];
            }
        }
        if (w <= w_obs + 1e-9) {
            ++at_or_below;
        }
    }
    r.p_value = std::min(1.0, 2.0 * static_cast<double>(at_or_below) /
                                  static_cast<double>(total));
    return r;
}

// Regularized incomplete gamma functions (series for P, Lentz continued
// fraction for Q), good to ~1e-14 relative; basis for the chi-square
// survival function.
inline double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) {
            break;
        }
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_continued_fraction(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) {
            break;
        }
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double chi2_sf(double x, double df) {
    if (x < 0.0 || df <= 0.0) {
        throw std::runtime_error("chi2_sf: bad arguments");
    }
    if (x == 0.0) {
        return 1.0;
    }
    const double a = df / 2.0;
    const double t = x / 2.0;
    return t < a + 1.0 ? 1.0 - gamma_p_series(a, t) : gamma_q_continued_fraction(a, t);
}

// Goodness-of-fit p-value for observed counts against expected
// probabilities.
inline double chi_square_gof_p(const std::vector<std::size_t>& observed,
                               const std::vector<double>& probs) {
    if (observed.size() != probs.size() || observed.size() < 2) {
        throw std::runtime_error("chi_square_gof_p: bad inputs");
    }
    double total = 0.0;
    for (std::size_t c : observed) {
        total += static_cast<double>(c);
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double expected = probs[i] * total;
        if (expected <= 0.0) {
            throw std::runtime_error("chi_square_gof_p: zero expected count");
        }
        const double diff = static_cast<double>(observed[i]) - expected;
        stat += diff * diff / expected;
    }
    return chi2_sf(stat, static_cast<double>(observed.size() - 1));
}

// Random two-blob dataset for property tests: majority around the origin,
// minority offset along the first axis.
inline poqg::Dataset random_dataset(poqg::RngStream& rng, std::size_t n_maj, std::size_t n_min,
                                    std::size_t dim, double offset = 1.5, double spread = 0.8) {
    poqg::Dataset d;
    d.features = poqg::Matrix(0, dim);
    for (std::size_t j = 0; j < dim; ++j) {
        d.feature_names.push_back("f" + std::to_string(j));
    }
    std::vector<double> row(dim);
    for (std::size_t i = 0; i < n_maj + n_min; ++i) {
        const bool minority = i >= n_maj;
        for (std::size_t j = 0; j < dim; ++j) {
            row[j] = rng.normal() * (minority ? spread : 1.0) +
                     (minority && j == 0 ? offset : 0.0);
        }
        d.features.append_row(row);
        d.labels.push_back(minority ? 1 : 0);
    }
    return d;
}

} // namespace oracles

#endif
