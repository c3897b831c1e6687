#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "frozen.hpp"
#include "oracles.hpp"
#include "poqg/errors.hpp"
#include "poqg/wilcoxon.hpp"

using namespace poqg;

namespace {

EvalReport report(const std::string& dataset, const std::string& method,
                  std::optional<double> g_mean, std::optional<double> auc) {
    EvalReport r;
    r.dataset_id = dataset;
    r.method = method;
    r.classifier = "knn";
    r.n_folds = 5;
    r.mean_g_mean = g_mean;
    r.mean_roc_auc = auc;
    return r;
}

} // namespace

TEST_CASE("signed rank sums handle ties and zeros by hand") {
    // diffs: +0.3, -0.3, +0.5, 0, +0.2. The zero drops; |0.2| ranks 1, the
    // tied |0.3|s average to 2.5 each, |0.5| ranks 4.
    const std::vector<double> a{1.3, 1.0, 2.0, 4.0, 5.2};
    const std::vector<double> b{1.0, 1.3, 1.5, 4.0, 5.0};
    const SignedRankSums s = signed_rank_sums(a, b);
    CHECK(s.n_effective == 4);
    CHECK(s.zeros_dropped == 1);
    CHECK(s.r_plus == doctest::Approx(7.5).epsilon(1e-15));
    CHECK(s.r_minus == doctest::Approx(2.5).epsilon(1e-15));
    REQUIRE(s.ranks.size() == 4);
    CHECK(s.ranks[0] == 2.5);
    CHECK(s.ranks[1] == 2.5);
    CHECK(s.ranks[2] == 4.0);
    CHECK(s.ranks[3] == 1.0);
}

TEST_CASE("six uniformly positive differences give the textbook result") {
    const std::vector<double> b{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    std::vector<double> a = b;
    const std::vector<double> delta{0.12, 0.25, 0.31, 0.47, 0.58, 0.66};
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] += delta[i];
    }
    const WilcoxonResult r = wilcoxon_signed_rank(a, b);
    CHECK(r.r_plus == 21.0);
    CHECK(r.r_minus == 0.0);
    CHECK(r.n_effective == 6);
    CHECK(r.p_method == WilcoxonResult::PMethod::exact);
    CHECK(r.p_value == doctest::Approx(0.03125).epsilon(1e-15));
}

TEST_CASE("wilcoxon matches the frozen reference cases") {
    for (const frozen::WilcoxonCase& wc : frozen::wilcoxon_cases()) {
        CAPTURE(wc.name);
        const WilcoxonResult r = wilcoxon_signed_rank(wc.a, wc.b);
        CHECK(r.r_plus == doctest::Approx(wc.r_plus).epsilon(1e-12));
        CHECK(r.r_minus == doctest::Approx(wc.r_minus).epsilon(1e-12));
        CHECK(r.n_effective == wc.n_effective);
        if (wc.exact) {
            CHECK(r.p_method == WilcoxonResult::PMethod::exact);
            CHECK(r.p_value == doctest::Approx(wc.p_value).epsilon(1e-12));
        } else {
            CHECK(r.p_method == WilcoxonResult::PMethod::normal_approx);
            CHECK(r.p_value == doctest::Approx(wc.p_value).epsilon(1e-10));
        }
    }
}

TEST_CASE("exact p-values agree with full enumeration on random small samples") {
    RngStream rng(501);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 5 + rng.uniform_index(8); // 5..12
        std::vector<double> a(n);
        std::vector<double> b(n);
        for (std::size_t i = 0; i < n; ++i) {
            b[i] = rng.uniform();
            double delta = (rng.uniform() - 0.45) * 0.8;
            if (trial % 3 == 0) {
                // Quantize to force tied |differences|.
                delta = std::round(delta * 5.0) / 5.0;
            }
            a[i] = b[i] + delta;
        }
        std::size_t nonzero = 0;
        for (std::size_t i = 0; i < n; ++i) {
            nonzero += a[i] != b[i];
        }
        if (nonzero < 5) {
            continue;
        }
        const WilcoxonResult got = wilcoxon_signed_rank(a, b);
        const oracles::EnumeratedWilcoxon want = oracles::wilcoxon_enumerate(a, b);
        REQUIRE(got.p_method == WilcoxonResult::PMethod::exact);
        CHECK(got.r_plus == doctest::Approx(want.r_plus).epsilon(1e-12));
        CHECK(got.r_minus == doctest::Approx(want.r_minus).epsilon(1e-12));
        CHECK(got.n_effective == want.n_effective);
        CHECK(got.p_value == doctest::Approx(want.p_value).epsilon(1e-12));
    }
}

TEST_CASE("the exact method hands over to the approximation past the limit") {
    const auto make = [](std::size_t n) {
        std::vector<double> a(n);
        std::vector<double> b(n);
        RngStream rng(n);
        for (std::size_t i = 0; i < n; ++i) {
            b[i] = static_cast<double>(i) + 1.0;
            a[i] = b[i] + rng.uniform() - 0.45;
        }
        return std::pair{a, b};
    };
    const auto [a25, b25] = make(kWilcoxonExactLimit);
    CHECK(wilcoxon_signed_rank(a25, b25).p_method == WilcoxonResult::PMethod::exact);
    const auto [a26, b26] = make(kWilcoxonExactLimit + 1);
    CHECK(wilcoxon_signed_rank(a26, b26).p_method == WilcoxonResult::PMethod::normal_approx);
}

TEST_CASE("wilcoxon rejects degenerate inputs") {
    using doctest::Contains;
    const std::vector<double> same{1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK_THROWS_WITH_AS(wilcoxon_signed_rank(same, same), Contains("zero"), DataError);

    const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> b{1.5, 2.5, 3.5, 4.5};
    CHECK_THROWS_AS(wilcoxon_signed_rank(a, b), DataError);

    const std::vector<double> mismatched{1.0, 2.0};
    CHECK_THROWS_AS(wilcoxon_signed_rank(a, mismatched), InternalError);

    // Five pairs with one zero difference leaves four: still too few.
    const std::vector<double> a5{1.0, 2.0, 3.0, 4.0, 5.0};
    const std::vector<double> b5{1.5, 2.5, 3.5, 4.5, 5.0};
    CHECK_THROWS_AS(wilcoxon_signed_rank(a5, b5), DataError);
}

TEST_CASE("p-values are two-sided and capped at one") {
    // Perfectly balanced ranks: p must clamp to 1.
    const std::vector<double> a{1.1, 1.9, 3.3, 3.7, 5.5, 5.3};
    const std::vector<double> b{1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    const WilcoxonResult r = wilcoxon_signed_rank(a, b);
    CHECK(r.p_value <= 1.0);
    CHECK(r.p_value > 0.0);
}

TEST_CASE("compare_methods pairs the reference against every baseline") {
    std::vector<EvalReport> reports;
    const std::vector<std::string> datasets{"d1", "d2", "d3", "d4", "d5", "d6"};
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        const double base = 0.70 + 0.02 * static_cast<double>(i);
        reports.push_back(report(datasets[i], "poqg", base + 0.05, base + 0.03));
        reports.push_back(report(datasets[i], "smote", base, base + 0.01));
        reports.push_back(report(datasets[i], "none", base - 0.10, base - 0.08));
    }

    const ComparisonTable t = compare_methods(reports, "g_mean");
    CHECK(t.metric == "g_mean");
    REQUIRE(t.rows.size() == 2); // one row per baseline, none and smote
    for (const MethodComparison& row : t.rows) {
        CHECK(row.n_common == 6);
        CHECK(row.n_excluded == 0);
        REQUIRE(row.test.has_value());
        // poqg dominates both baselines on every dataset.
        CHECK(row.test->r_minus == 0.0);
        CHECK(row.test->p_value < 0.05);
    }

    // Winning times: poqg takes all six datasets.
    bool found = false;
    for (const auto& [method, wins] : t.winning_times) {
        if (method == "poqg") {
            CHECK(wins == 6.0);
            found = true;
        } else {
            CHECK(wins == 0.0);
        }
    }
    CHECK(found);
}

TEST_CASE("compare_methods requires the reference method") {
    std::vector<EvalReport> reports;
    for (const char* ds : {"d1", "d2", "d3", "d4", "d5"}) {
        reports.push_back(report(ds, "smote", 0.8, 0.8));
        reports.push_back(report(ds, "none", 0.7, 0.7));
    }
    CHECK_THROWS_AS(compare_methods(reports, "g_mean"), ConfigError);
}

TEST_CASE("compare_methods rejects conflicting duplicate cells and bad metrics") {
    std::vector<EvalReport> reports;
    reports.push_back(report("d1", "poqg", 0.8, 0.8));
    reports.push_back(report("d1", "poqg", 0.9, 0.9)); // same cell, different value
    CHECK_THROWS_AS(compare_methods(reports, "g_mean"), ConfigError);

    const std::vector<EvalReport> ok{report("d1", "poqg", 0.8, 0.8)};
    CHECK_THROWS_AS(compare_methods(ok, "f1"), ConfigError);
}

TEST_CASE("too few usable pairs: strict errors, lenient annotates") {
    std::vector<EvalReport> reports;
    // Four complete datasets plus one where the baseline mean is undefined.
    for (const char* ds : {"d1", "d2", "d3", "d4"}) {
        reports.push_back(report(ds, "poqg", 0.8, 0.8));
        reports.push_back(report(ds, "smote", 0.7, 0.7));
    }
    reports.push_back(report("d5", "poqg", 0.8, 0.8));
    reports.push_back(report("d5", "smote", std::nullopt, std::nullopt));

    CHECK_THROWS_AS(compare_methods(reports, "g_mean", false), DataError);

    const ComparisonTable t = compare_methods(reports, "g_mean", true);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].n_common == 4);
    CHECK(t.rows[0].n_excluded == 1);
    CHECK(!t.rows[0].test.has_value());
    REQUIRE(t.rows[0].note.has_value());
    CHECK(t.rows[0].note->find("4") != std::string::npos);
}

TEST_CASE("winning times split exact ties and work without the reference") {
    std::vector<EvalReport> reports;
    // d1: smote and none tie exactly; d2: none wins alone.
    reports.push_back(report("d1", "smote", 0.8, 0.8));
    reports.push_back(report("d1", "none", 0.8, 0.8));
    reports.push_back(report("d2", "smote", 0.6, 0.6));
    reports.push_back(report("d2", "none", 0.9, 0.9));
    // d3: both undefined, contributes nothing.
    reports.push_back(report("d3", "smote", std::nullopt, std::nullopt));
    reports.push_back(report("d3", "none", std::nullopt, std::nullopt));

    const auto wins = winning_times(reports, "g_mean");
    REQUIRE(wins.size() == 2);
    // Canonical order puts none before smote.
    CHECK(wins[0].first == "none");
    CHECK(wins[0].second == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(wins[1].first == "smote");
    CHECK(wins[1].second == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("chi-square survival oracle matches the frozen reference") {
    // The oracle backs the sampling goodness-of-fit tests elsewhere, so pin
    // it against independently computed values here.
    for (const frozen::Chi2Case& c : frozen::chi2_cases()) {
        CAPTURE(c.x);
        CAPTURE(c.df);
        const double got = oracles::chi2_sf(c.x, c.df);
        CHECK(got == doctest::Approx(c.sf).epsilon(1e-10));
    }
}
