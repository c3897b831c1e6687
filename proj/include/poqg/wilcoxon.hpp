#ifndef POQG_WILCOXON_HPP
#define POQG_WILCOXON_HPP

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "poqg/eval.hpp"

namespace poqg {

// Signed-rank bookkeeping shared by the test and the report layer: zero
// differences are dropped, absolute differences are ranked ascending with
// average ranks for ties, and the ranks split into positive and negative
// sums. No minimum sample size here.
struct SignedRankSums {
    double r_plus = 0.0;
    double r_minus = 0.0;
    std::size_t n_effective = 0;
    std::size_t zeros_dropped = 0;
    std::vector<double> ranks; // ranks of the nonzero differences, input order
};

SignedRankSums signed_rank_sums(std::span<const double> a, std::span<const double> b);

// Largest n for which the exact permutation distribution is enumerated;
// beyond it a normal approximation with tie and continuity corrections is
// used.
inline constexpr std::size_t kWilcoxonExactLimit = 25;

struct WilcoxonResult {
    double r_plus = 0.0;
    double r_minus = 0.0;
    std::size_t n_effective = 0;
    std::size_t zeros_dropped = 0;
    double p_value = 1.0;
    enum class PMethod { exact, normal_approx } p_method = PMethod::exact;
};

// Two-sided Wilcoxon signed-rank test of paired samples a vs b. Requires at
// least 5 nonzero differences; throws DataError below that or when every
// difference is zero.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

// One reference-vs-baseline comparison over the datasets both were
// evaluated on. `test` is unset when too few pairs remain and the caller
// asked for lenient handling.
struct MethodComparison {
    std::string baseline;
    std::size_t n_common = 0;   // datasets with both means defined
    std::size_t n_excluded = 0; // datasets dropped for an undefined mean
    std::optional<WilcoxonResult> test;
    std::optional<std::string> note; // reason test is unset
};

struct ComparisonTable {
    std::string metric; // "g_mean" or "roc_auc"
    std::vector<MethodComparison> rows;
    // Per-method winning times over the common datasets: each dataset
    // contributes 1 split evenly among the methods sharing its best mean.
    std::vector<std::pair<std::string, double>> winning_times;
};

// Winning times of each method over the given reports: every dataset
// contributes 1, split evenly among the methods sharing its best mean for
// `metric`. Methods appear in canonical order; datasets where every mean is
// undefined contribute nothing.
std::vector<std::pair<std::string, double>> winning_times(const std::vector<EvalReport>& reports,
                                                          const std::string& metric);

// Builds the comparison table for one metric from per-(dataset, method)
// evaluation reports. The reference method "poqg" must be present. With
// allow_insufficient=false (the default) fewer than 5 usable pairs for any
// baseline is an error; with it, the affected row carries a note instead of
// a test.
ComparisonTable compare_methods(const std::vector<EvalReport>& reports, const std::string& metric,
                                bool allow_insufficient = false);

} // namespace poqg

#endif
