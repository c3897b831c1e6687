#include "poqg/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "poqg/errors.hpp"

namespace poqg {

SignedRankSums signed_rank_sums(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InternalError("signed_rank_sums: paired samples must have equal length");
    }
    std::vector<double> diffs;
    diffs.reserve(a.size());
    SignedRankSums s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (!std::isfinite(d)) {
            throw DataError("signed_rank_sums: non-finite difference at pair " + std::to_string(i));
        }
        if (d == 0.0) {
            ++s.zeros_dropped;
        } else {
            diffs.push_back(d);
        }
    }
    s.n_effective = diffs.size();
    if (diffs.empty()) {
        return s;
    }

    std::vector<std::size_t> order(diffs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return std::abs(diffs[x]) < std::abs(diffs[y]);
    });

    s.ranks.resize(diffs.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && std::abs(diffs[order[j]]) == std::abs(diffs[order[i]])) {
            ++j;
        }
        const double rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) {
            s.ranks[order[t]] = rank;
        }
        i = j;
    }
    for (std::size_t t = 0; t < diffs.size(); ++t) {
        (diffs[t] > 0.0 ? s.r_plus : s.r_minus) += s.ranks[t];
    }
    return s;
}

namespace {

// Exact two-sided p-value by enumerating the null distribution of W+ over
// all 2^n sign assignments. Average ranks are multiples of 1/2, so doubling
// them makes every achievable sum an integer and the distribution a small
// integer-indexed table. Subset counts stay below 2^n <= 2^25, exact in a
// double.
double exact_p_value(const std::vector<double>& ranks, double statistic) {
    std::vector<std::size_t> doubled(ranks.size());
    std::size_t total = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
        total += doubled[i];
    }
    std::vector<double> count(total + 1, 0.0);
    count[0] = 1.0;
    for (std::size_t r : doubled) {
        for (std::size_t s = total; s + 1 >= r + 1; --s) {
            if (count[s - r] != 0.0) {
                count[s] += count[s - r];
            }
        }
    }
    const auto threshold = static_cast<std::size_t>(std::llround(2.0 * statistic));
    double below = 0.0;
    for (std::size_t s = 0; s <= threshold && s <= total; ++s) {
        below += count[s];
    }
    const double p = 2.0 * below / std::pow(2.0, static_cast<double>(ranks.size()));
    return std::min(1.0, p);
}

double approx_p_value(const SignedRankSums& s) {
    const double n = static_cast<double>(s.n_effective);
    const double mu = n * (n + 1.0) / 4.0;
    // Tie correction: each group of t equal ranks removes (t^3 - t)/48.
    std::map<double, std::size_t> groups;
    for (double r : s.ranks) {
        ++groups[r];
    }
    double tie_term = 0.0;
    for (const auto& [rank, t] : groups) {
        const double td = static_cast<double>(t);
        tie_term += (td * td * td - td) / 48.0;
    }
    const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term;
    if (!(var > 0.0)) {
        throw DataError("signed-rank variance is zero (all ranks tied); no test possible");
    }
    const double t_stat = std::min(s.r_plus, s.r_minus);
    const double numer = std::max(0.0, std::abs(t_stat - mu) - 0.5); // continuity correction
    const double z = numer / std::sqrt(var);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

} // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    const SignedRankSums s = signed_rank_sums(a, b);
    if (s.n_effective == 0) {
        throw DataError("all paired differences are zero; the samples are identical");
    }
    if (s.n_effective < 5) {
        throw DataError("insufficient pairs: " + std::to_string(s.n_effective) +
                        " nonzero differences, need at least 5");
    }
    WilcoxonResult r;
    r.r_plus = s.r_plus;
    r.r_minus = s.r_minus;
    r.n_effective = s.n_effective;
    r.zeros_dropped = s.zeros_dropped;
    if (s.n_effective <= kWilcoxonExactLimit) {
        r.p_method = WilcoxonResult::PMethod::exact;
        r.p_value = exact_p_value(s.ranks, std::min(s.r_plus, s.r_minus));
    } else {
        r.p_method = WilcoxonResult::PMethod::normal_approx;
        r.p_value = approx_p_value(s);
    }
    return r;
}

namespace {

// dataset -> method -> mean metric value
using CellMap = std::map<std::string, std::map<std::string, std::optional<double>>>;

CellMap pivot_reports(const std::vector<EvalReport>& reports, const std::string& metric,
                      std::set<std::string>& methods_present) {
    if (metric != "g_mean" && metric != "roc_auc") {
        throw ConfigError("unknown metric '" + metric + "'; valid metrics: g_mean, roc_auc");
    }
    const bool use_g = metric == "g_mean";
    CellMap cells;
    for (const EvalReport& r : reports) {
        auto& cell = cells[r.dataset_id][r.method];
        const std::optional<double> value = use_g ? r.mean_g_mean : r.mean_roc_auc;
        if (cell && value && *cell != *value) {
            throw ConfigError("conflicting reports for dataset '" + r.dataset_id + "', method '" +
                              r.method + "'");
        }
        cell = value;
        methods_present.insert(r.method);
    }
    return cells;
}

} // namespace

std::vector<std::pair<std::string, double>> winning_times(const std::vector<EvalReport>& reports,
                                                          const std::string& metric) {
    std::set<std::string> methods_present;
    const CellMap cells = pivot_reports(reports, metric, methods_present);

    // Best mean wins its dataset; exact ties split the win evenly.
    std::map<std::string, double> wins;
    for (const auto& [dataset, row] : cells) {
        double best = -std::numeric_limits<double>::infinity();
        std::vector<std::string> winners;
        for (const auto& [method, value] : row) {
            if (!value) {
                continue;
            }
            if (*value > best) {
                best = *value;
                winners = {method};
            } else if (*value == best) {
                winners.push_back(method);
            }
        }
        for (const std::string& w : winners) {
            wins[w] += 1.0 / static_cast<double>(winners.size());
        }
    }
    std::vector<std::pair<std::string, double>> result;
    for (Method m : all_methods()) {
        const std::string id = method_id(m);
        if (methods_present.contains(id)) {
            result.emplace_back(id, wins[id]);
        }
    }
    return result;
}

ComparisonTable compare_methods(const std::vector<EvalReport>& reports, const std::string& metric,
                                bool allow_insufficient) {
    std::set<std::string> methods_present;
    const CellMap cells = pivot_reports(reports, metric, methods_present);
    if (!methods_present.contains("poqg")) {
        throw ConfigError("compare_methods: reference method 'poqg' is missing from the reports");
    }

    ComparisonTable table;
    table.metric = metric;
    table.winning_times = winning_times(reports, metric);

    for (Method m : all_methods()) {
        const std::string id = method_id(m);
        if (id == "poqg" || !methods_present.contains(id)) {
            continue;
        }
        MethodComparison row;
        row.baseline = id;
        std::vector<double> ref;
        std::vector<double> base;
        for (const auto& [dataset, values] : cells) {
            const auto ri = values.find("poqg");
            const auto bi = values.find(id);
            const std::optional<double> rv = ri == values.end() ? std::nullopt : ri->second;
            const std::optional<double> bv = bi == values.end() ? std::nullopt : bi->second;
            if (rv && bv) {
                ref.push_back(*rv);
                base.push_back(*bv);
            } else {
                ++row.n_excluded;
            }
        }
        row.n_common = ref.size();
        if (row.n_common < 5 && !allow_insufficient) {
            throw DataError("poqg vs " + id + ": only " + std::to_string(row.n_common) +
                            " common datasets, need at least 5");
        }
        try {
            row.test = wilcoxon_signed_rank(ref, base);
        } catch (const DataError& e) {
            if (!allow_insufficient) {
                throw;
            }
            row.note = e.what();
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace poqg
