#include "poqg/report.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include "poqg/errors.hpp"

namespace poqg {

namespace {

std::string opt_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

// Reports sorted by dataset, then canonical method order.
std::vector<const EvalReport*> sorted_reports(const std::vector<EvalReport>& reports) {
    std::map<std::string, int> method_rank;
    int rank = 0;
    for (Method m : all_methods()) {
        method_rank[method_id(m)] = rank++;
    }
    std::vector<const EvalReport*> out;
    out.reserve(reports.size());
    for (const EvalReport& r : reports) {
        out.push_back(&r);
    }
    std::sort(out.begin(), out.end(), [&](const EvalReport* a, const EvalReport* b) {
        if (a->dataset_id != b->dataset_id) {
            return a->dataset_id < b->dataset_id;
        }
        return method_rank.at(a->method) < method_rank.at(b->method);
    });
    return out;
}

std::vector<std::string> present_methods_in_order(const std::vector<EvalReport>& reports) {
    std::set<std::string> present;
    for (const EvalReport& r : reports) {
        present.insert(r.method);
    }
    std::vector<std::string> out;
    for (Method m : all_methods()) {
        if (present.contains(method_id(m))) {
            out.push_back(method_id(m));
        }
    }
    return out;
}

} // namespace

std::string format_fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string eval_folds_csv(const std::vector<EvalReport>& reports, bool variant_metrics) {
    std::string out = "dataset,method,classifier,fold,tpr,tnr,fpr,g_mean,balanced_accuracy,roc_auc";
    if (variant_metrics) {
        out += ",gmean_tprfpr,auc_midpoint";
    }
    out += '\n';
    for (const EvalReport* r : sorted_reports(reports)) {
        for (const FoldOutcome& f : r->folds) {
            const MetricsReport& m = f.metrics;
            out += r->dataset_id + ',' + r->method + ',' + r->classifier + ',' +
                   std::to_string(f.fold) + ',' + opt_cell(m.tpr) + ',' + opt_cell(m.tnr) + ',' +
                   opt_cell(m.fpr) + ',' + opt_cell(m.g_mean) + ',' +
                   opt_cell(m.balanced_accuracy) + ',' + opt_cell(m.roc_auc);
            if (variant_metrics) {
                out += ',' + opt_cell(m.gmean_tprfpr) + ',' + opt_cell(m.auc_midpoint);
            }
            out += '\n';
        }
    }
    return out;
}

nlohmann::json eval_summary_json(const std::vector<EvalReport>& reports) {
    nlohmann::json cells = nlohmann::json::array();
    for (const EvalReport* r : sorted_reports(reports)) {
        nlohmann::json cell;
        cell["dataset"] = r->dataset_id;
        cell["method"] = r->method;
        cell["classifier"] = r->classifier;
        cell["n_folds"] = r->n_folds;
        cell["undefined_folds"] = r->undefined_folds;
        cell["mean_g_mean"] = r->mean_g_mean ? nlohmann::json(*r->mean_g_mean) : nlohmann::json();
        cell["std_g_mean"] = r->std_g_mean ? nlohmann::json(*r->std_g_mean) : nlohmann::json();
        cell["mean_roc_auc"] = r->mean_roc_auc ? nlohmann::json(*r->mean_roc_auc) : nlohmann::json();
        cell["std_roc_auc"] = r->std_roc_auc ? nlohmann::json(*r->std_roc_auc) : nlohmann::json();
        cells.push_back(std::move(cell));
    }
    nlohmann::json summary;
    summary["cells"] = std::move(cells);
    return summary;
}

std::string winning_times_csv(const std::vector<ComparisonTable>& tables) {
    std::string out = "metric,method,wins\n";
    for (const ComparisonTable& t : tables) {
        for (const auto& [method, wins] : t.winning_times) {
            out += t.metric + ',' + method + ',' + format_double(wins) + '\n';
        }
    }
    return out;
}

std::string wilcoxon_csv(const std::vector<ComparisonTable>& tables) {
    std::string out =
        "metric,baseline,n_common,n_excluded,n_effective,zeros_dropped,r_plus,r_minus,"
        "p_value,p_method,significant_0.05\n";
    for (const ComparisonTable& t : tables) {
        for (const MethodComparison& row : t.rows) {
            out += t.metric + ',' + row.baseline + ',' + std::to_string(row.n_common) + ',' +
                   std::to_string(row.n_excluded) + ',';
            if (row.test) {
                const WilcoxonResult& w = *row.test;
                out += std::to_string(w.n_effective) + ',' + std::to_string(w.zeros_dropped) +
                       ',' + format_double(w.r_plus) + ',' + format_double(w.r_minus) + ',' +
                       format_double(w.p_value) + ',' +
                       (w.p_method == WilcoxonResult::PMethod::exact ? "exact" : "normal_approx") +
                       ',' + (w.p_value < 0.05 ? "yes" : "no");
            } else {
                out += ",,,,,";
            }
            out += '\n';
        }
    }
    return out;
}

std::string provenance_csv(const ResampleResult& r) {
    std::string out = "synthetic_index,anchor_id,proxima_id,orion_id,q1,q2\n";
    for (std::size_t i = 0; i < r.synthetics.size(); ++i) {
        const SyntheticRecord& s = r.synthetics[i];
        out += std::to_string(i) + ',' + std::to_string(s.anchor) + ',' +
               std::to_string(s.parent_a) + ',' + std::to_string(s.parent_b) + ',' +
               format_double(s.weight_a) + ',' + format_double(s.weight_b) + '\n';
    }
    return out;
}

std::string comparison_markdown(const std::vector<EvalReport>& reports,
                                const std::vector<ComparisonTable>& tables) {
    const std::vector<std::string> methods = present_methods_in_order(reports);
    std::set<std::string> dataset_set;
    std::map<std::pair<std::string, std::string>, const EvalReport*> cell;
    for (const EvalReport& r : reports) {
        dataset_set.insert(r.dataset_id);
        cell[{r.dataset_id, r.method}] = &r;
    }
    const std::vector<std::string> datasets(dataset_set.begin(), dataset_set.end());

    std::map<std::string, std::string> display;
    for (Method m : all_methods()) {
        display[method_id(m)] = method_display_name(m);
    }

    std::string md = "# Resampling comparison\n";

    for (const ComparisonTable& t : tables) {
        const bool use_g = t.metric == "g_mean";
        md += "\n## Mean " + std::string(use_g ? "G-Mean" : "ROC-AUC") + " (" +
              std::to_string(datasets.size()) + " datasets)\n\n";
        md += "| Dataset |";
        for (const std::string& m : methods) {
            md += ' ' + display.at(m) + " |";
        }
        md += "\n|---|";
        for (std::size_t i = 0; i < methods.size(); ++i) {
            md += "---|";
        }
        md += '\n';
        for (const std::string& ds : datasets) {
            double best = -std::numeric_limits<double>::infinity();
            for (const std::string& m : methods) {
                const auto it = cell.find({ds, m});
                if (it == cell.end()) {
                    continue;
                }
                const auto v = use_g ? it->second->mean_g_mean : it->second->mean_roc_auc;
                if (v && *v > best) {
                    best = *v;
                }
            }
            md += "| " + ds + " |";
            for (const std::string& m : methods) {
                const auto it = cell.find({ds, m});
                const auto v = it == cell.end()
                                   ? std::nullopt
                                   : (use_g ? it->second->mean_g_mean : it->second->mean_roc_auc);
                if (!v) {
                    md += " n/a |";
                } else if (*v == best) {
                    md += " **" + format_fixed4(*v) + "** |";
                } else {
                    md += ' ' + format_fixed4(*v) + " |";
                }
            }
            md += '\n';
        }
        std::map<std::string, double> wins(t.winning_times.begin(), t.winning_times.end());
        md += "| Winning times |";
        for (const std::string& m : methods) {
            const auto it = wins.find(m);
            md += ' ' + (it == wins.end() ? std::string("0") : format_double(it->second)) + " |";
        }
        md += '\n';
    }

    md += "\n## Signed-rank tests (PO-QG vs baselines)\n\n"
          "| Metric | Comparison | R+ | R- | n | p-value | Significant at 0.05 |\n"
          "|---|---|---|---|---|---|---|\n";
    for (const ComparisonTable& t : tables) {
        for (const MethodComparison& row : t.rows) {
            md += "| " + t.metric + " | PO-QG vs " + display.at(row.baseline) + " | ";
            if (row.test) {
                const WilcoxonResult& w = *row.test;
                md += format_double(w.r_plus) + " | " + format_double(w.r_minus) + " | " +
                      std::to_string(w.n_effective) + " | " + format_double(w.p_value) +
                      (w.p_method == WilcoxonResult::PMethod::normal_approx ? " (approx)" : "") +
                      " | " + (w.p_value < 0.05 ? "yes" : "no") + " |\n";
            } else {
                md += "n/a | n/a | " + std::to_string(row.n_common) + " | " +
                      (row.note ? *row.note : std::string("n/a")) + " | n/a |\n";
            }
        }
    }
    return md;
}

} // namespace poqg
