#include "poqg/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "poqg/errors.hpp"
#include "poqg/methods.hpp"
#include "poqg/parallel.hpp"
#include "poqg/report.hpp"
#include "poqg/rng.hpp"

namespace poqg {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kDefaultGrid = "k=5,7,10;alpha=0.3,0.5,0.7;beta=0.05,0.1,0.2;q=1.3,1.5,1.7";

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << content;
    if (!out) {
        throw DataError("write failed for " + path.string());
    }
}

std::uint64_t env_seed() {
    const char* raw = std::getenv("POQG_SEED");
    if (!raw || !*raw) {
        return 0;
    }
    const std::string s(raw);
    if (!std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw ConfigError("POQG_SEED must be a nonnegative integer, got '" + s + "'");
    }
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw ConfigError("POQG_SEED out of range: '" + s + "'");
    }
}

// ---------------------------------------------------------------------------
// json helpers: the exec layer re-validates everything so that replayed (and
// possibly hand-edited) run.json files fail with real messages.

void expect_object(const json& j, const std::string& ctx) {
    if (!j.is_object()) {
        throw ConfigError(ctx + " must be a JSON object");
    }
}

void expect_keys(const json& j, const std::set<std::string>& keys, const std::string& ctx) {
    expect_object(j, ctx);
    for (const auto& [key, value] : j.items()) {
        if (!keys.contains(key)) {
            throw ConfigError(ctx + ": unknown key '" + key + "'");
        }
    }
    for (const std::string& key : keys) {
        if (!j.contains(key)) {
            throw ConfigError(ctx + ": missing key '" + key + "'");
        }
    }
}

double get_num(const json& j, const char* key, const std::string& ctx) {
    if (!j.at(key).is_number()) {
        throw ConfigError(ctx + ": '" + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

std::size_t get_size(const json& j, const char* key, const std::string& ctx) {
    if (!j.at(key).is_number_unsigned() && !j.at(key).is_number_integer()) {
        throw ConfigError(ctx + ": '" + key + "' must be a nonnegative integer");
    }
    const auto v = j.at(key).get<std::int64_t>();
    if (v < 0) {
        throw ConfigError(ctx + ": '" + key + "' must be nonnegative, got " + std::to_string(v));
    }
    return static_cast<std::size_t>(v);
}

bool get_bool(const json& j, const char* key, const std::string& ctx) {
    if (!j.at(key).is_boolean()) {
        throw ConfigError(ctx + ": '" + key + "' must be true or false");
    }
    return j.at(key).get<bool>();
}

std::string get_str(const json& j, const char* key, const std::string& ctx) {
    if (!j.at(key).is_string()) {
        throw ConfigError(ctx + ": '" + key + "' must be a string");
    }
    return j.at(key).get<std::string>();
}

PoqgConfig poqg_from_json(const json& j, std::uint64_t seed) {
    const std::string ctx = "poqg config";
    expect_keys(j,
                {"k", "alpha", "beta", "q", "eps_div", "target", "density_denominator",
                 "with_replacement", "round_robin_anchors"},
                ctx);
    PoqgConfig c;
    c.k = get_size(j, "k", ctx);
    c.alpha = get_num(j, "alpha", ctx);
    c.beta = get_num(j, "beta", ctx);
    c.q = get_num(j, "q", ctx);
    c.eps_div = get_num(j, "eps_div", ctx);
    if (!j.at("target").is_null()) {
        c.target = get_size(j, "target", ctx);
    }
    const std::string denom = get_str(j, "density_denominator", ctx);
    if (denom == "majority") {
        c.density_denominator = DensityDenominator::majority;
    } else if (denom == "all") {
        c.density_denominator = DensityDenominator::all;
    } else {
        throw ConfigError(ctx + ": density_denominator must be 'majority' or 'all', got '" +
                          denom + "'");
    }
    c.with_replacement = get_bool(j, "with_replacement", ctx);
    c.round_robin_anchors = get_bool(j, "round_robin_anchors", ctx);
    c.seed = seed;
    validate(c);
    return c;
}

BaselineConfig baseline_from_json(const json& j, std::uint64_t seed) {
    const std::string ctx = "baseline config";
    expect_keys(j, {"k_neighbors", "enn_k", "borderline_kind"}, ctx);
    BaselineConfig c;
    c.k_neighbors = get_size(j, "k_neighbors", ctx);
    c.enn_k = get_size(j, "enn_k", ctx);
    const std::string kind = get_str(j, "borderline_kind", ctx);
    if (kind == "one") {
        c.borderline_kind = BaselineConfig::Borderline::one;
    } else if (kind == "two") {
        c.borderline_kind = BaselineConfig::Borderline::two;
    } else {
        throw ConfigError(ctx + ": borderline_kind must be 'one' or 'two', got '" + kind + "'");
    }
    c.seed = seed;
    validate(c);
    return c;
}

ClassifierConfig classifier_from_json(const json& j) {
    const std::string ctx = "classifier config";
    expect_keys(j, {"id", "knn_k", "epochs", "learning_rate"}, ctx);
    ClassifierConfig c;
    c.id = get_str(j, "id", ctx);
    c.knn_k = get_size(j, "knn_k", ctx);
    c.epochs = get_size(j, "epochs", ctx);
    c.learning_rate = get_num(j, "learning_rate", ctx);
    validate(c);
    return c;
}

// ---------------------------------------------------------------------------
// input loading

Dataset load_input(const std::string& input, const std::string& format,
                   const std::string& label_column, const std::string& minority_label,
                   bool scale) {
    std::string fmt = format;
    if (fmt == "auto") {
        const std::string ext = fs::path(input).extension().string();
        if (ext == ".dat" || ext == ".keel" || ext == ".arff") {
            fmt = "keel";
        } else if (ext == ".csv") {
            fmt = "csv";
        } else {
            throw ConfigError("cannot infer the format of '" + input +
                              "' from its extension; pass --format keel or --format csv");
        }
    }
    Dataset d;
    if (fmt == "keel") {
        d = load_keel(input);
    } else if (fmt == "csv") {
        d = load_csv(input, label_column, minority_label);
    } else {
        throw ConfigError("format must be auto, keel or csv, got '" + fmt + "'");
    }
    if (d.count_of(1) == 0 || d.count_of(0) == 0) {
        throw DataError(input + ": both classes must be present after label mapping");
    }
    return scale ? minmax_scale(d) : d;
}

std::string dataset_id_of(const std::string& input) {
    const std::string stem = fs::path(input).stem().string();
    if (stem.empty()) {
        throw ConfigError("cannot derive a dataset id from '" + input + "'");
    }
    return stem;
}

MethodConfig method_config(Method m, const json& params, std::uint64_t seed) {
    MethodConfig cfg;
    cfg.method = m;
    cfg.poqg = poqg_from_json(params.at("poqg"), seed);
    cfg.baseline = baseline_from_json(params.at("baseline"), seed);
    return cfg;
}

void write_run_json(const std::string& command, const json& params, const fs::path& outdir) {
    json run;
    run["tool"] = "poqg";
    run["version"] = 1;
    run["command"] = command;
    run["params"] = params;
    write_file(outdir / "run.json", run.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// executors: each consumes the canonical params object (also stored in
// run.json, which is how replay re-enters these functions).

void exec_resample(const json& params, const fs::path& outdir, std::ostream& out) {
    const std::string ctx = "resample params";
    expect_keys(params,
                {"input", "format", "label_column", "minority_label", "scale", "method", "seed",
                 "poqg", "baseline"},
                ctx);
    const std::uint64_t seed = get_size(params, "seed", ctx);
    const Method method = parse_method(get_str(params, "method", ctx));
    const MethodConfig cfg = method_config(method, params, seed);
    const Dataset d = load_input(get_str(params, "input", ctx), get_str(params, "format", ctx),
                                 get_str(params, "label_column", ctx),
                                 get_str(params, "minority_label", ctx),
                                 get_bool(params, "scale", ctx));

    const ResampleResult r = run_resampler(d, cfg, seed);

    fs::create_directories(outdir);
    std::vector<int> flags(r.data.size());
    for (std::size_t i = 0; i < r.origins.size(); ++i) {
        flags[i] = r.origins[i].synthetic ? 1 : 0;
    }
    save_csv(r.data, outdir / "resampled.csv", &flags);
    write_file(outdir / "provenance.csv", provenance_csv(r));
    write_run_json("resample", params, outdir);

    const DatasetStats before = stats(d);
    const DatasetStats after = stats(r.data);
    for (const std::string& note : r.notes) {
        out << "note: " << note << "\n";
    }
    if (r.degenerate_weight_pairs > 0) {
        out << "note: " << r.degenerate_weight_pairs
            << " synthetic points used the 0.5/0.5 weight fallback (both kernel weights zero)\n";
    }
    out << "rows: " << before.n_rows << " (" << before.n_majority << " majority / "
        << before.n_minority << " minority) -> " << after.n_rows << " (" << after.n_majority
        << " / " << after.n_minority << ")\n"
        << "synthetics: " << r.synthetics.size() << ", removed: " << r.removed_original.size()
        << " original, " << r.removed_synthetic << " synthetic\n"
        << "artifacts: resampled.csv, provenance.csv, run.json in " << outdir.string() << "\n";
}

struct NamedDataset {
    std::string id;
    Dataset data;
};

std::vector<NamedDataset> load_inputs(const json& params, const std::string& ctx) {
    if (!params.at("inputs").is_array() || params.at("inputs").empty()) {
        throw ConfigError(ctx + ": 'inputs' must be a nonempty array of paths");
    }
    std::vector<NamedDataset> datasets;
    std::set<std::string> seen;
    for (const json& item : params.at("inputs")) {
        if (!item.is_string()) {
            throw ConfigError(ctx + ": 'inputs' entries must be strings");
        }
        const std::string path = item.get<std::string>();
        const std::string id = dataset_id_of(path);
        if (!seen.insert(id).second) {
            throw ConfigError(ctx + ": duplicate dataset id '" + id +
                              "'; input file stems must be unique");
        }
        datasets.push_back({id, load_input(path, get_str(params, "format", ctx),
                                           get_str(params, "label_column", ctx),
                                           get_str(params, "minority_label", ctx),
                                           get_bool(params, "scale", ctx))});
    }
    return datasets;
}

void exec_compare(const json& params, const fs::path& outdir, std::ostream& out,
                  std::ostream& err, bool verbose) {
    const std::string ctx = "compare params";
    expect_keys(params,
                {"inputs", "format", "label_column", "minority_label", "scale", "methods",
                 "folds", "seed", "threads", "paper_literal", "classifier", "poqg", "baseline"},
                ctx);
    const std::uint64_t seed = get_size(params, "seed", ctx);
    const std::size_t folds = get_size(params, "folds", ctx);
    const std::size_t threads = get_size(params, "threads", ctx);
    const bool variant_metrics = get_bool(params, "paper_literal", ctx);
    const ClassifierConfig clf = classifier_from_json(params.at("classifier"));

    if (!params.at("methods").is_array() || params.at("methods").empty()) {
        throw ConfigError(ctx + ": 'methods' must be a nonempty array");
    }
    std::vector<Method> methods;
    std::set<std::string> method_seen;
    for (const json& item : params.at("methods")) {
        if (!item.is_string()) {
            throw ConfigError(ctx + ": 'methods' entries must be strings");
        }
        const std::string id = item.get<std::string>();
        if (!method_seen.insert(id).second) {
            throw ConfigError(ctx + ": duplicate method '" + id + "'");
        }
        methods.push_back(parse_method(id));
    }
    // Validate method configs before the long-running part.
    for (Method m : methods) {
        (void)method_config(m, params, seed);
    }

    const std::vector<NamedDataset> datasets = load_inputs(params, ctx);

    struct Cell {
        const NamedDataset* dataset;
        Method method;
    };
    std::vector<Cell> cells;
    for (const NamedDataset& d : datasets) {
        for (Method m : methods) {
            cells.push_back({&d, m});
        }
    }
    std::vector<EvalReport> reports(cells.size());
    std::mutex log_mutex;
    parallel_for(cells.size(), threads, [&](std::size_t i) {
        const Cell& cell = cells[i];
        reports[i] = cross_validate(cell.dataset->data, cell.dataset->id,
                                    method_config(cell.method, params, seed), clf, folds, seed);
        if (verbose) {
            double wall = 0.0;
            for (const FoldOutcome& f : reports[i].folds) {
                wall += f.wall_seconds;
            }
            const std::lock_guard<std::mutex> lock(log_mutex);
            err << cell.dataset->id << " x " << method_id(cell.method) << " done ("
                << format_fixed4(wall) << "s)\n";
        }
    });

    std::vector<ComparisonTable> tables;
    const bool have_reference = method_seen.contains("poqg");
    for (const std::string& metric : {std::string("g_mean"), std::string("roc_auc")}) {
        if (have_reference && methods.size() > 1) {
            tables.push_back(compare_methods(reports, metric, /*allow_insufficient=*/true));
        } else {
            ComparisonTable t;
            t.metric = metric;
            t.winning_times = winning_times(reports, metric);
            tables.push_back(std::move(t));
        }
    }
    if (!have_reference) {
        err << "note: method 'poqg' not in the run; no signed-rank comparisons\n";
    }

    fs::create_directories(outdir);
    write_file(outdir / "eval_folds.csv", eval_folds_csv(reports, variant_metrics));
    json summary = eval_summary_json(reports);
    summary["config"] = params;
    write_file(outdir / "eval_summary.json", summary.dump(2) + "\n");
    write_file(outdir / "winning_times.csv", winning_times_csv(tables));
    write_file(outdir / "wilcoxon.csv", wilcoxon_csv(tables));
    write_file(outdir / "report.md", comparison_markdown(reports, tables));
    write_run_json("compare", params, outdir);

    out << "evaluated " << datasets.size() << " dataset(s) x " << methods.size() << " method(s), "
        << folds << "-fold\n"
        << "artifacts: eval_folds.csv, eval_summary.json, winning_times.csv, wilcoxon.csv, "
           "report.md, run.json in "
        << outdir.string() << "\n";
}

struct GridSpec {
    std::vector<std::size_t> k{5, 7, 10};
    std::vector<double> alpha{0.3, 0.5, 0.7};
    std::vector<double> beta{0.05, 0.1, 0.2};
    std::vector<double> q{1.3, 1.5, 1.7};
};

GridSpec parse_grid(const std::string& spec) {
    GridSpec g;
    std::set<std::string> seen;
    std::size_t start = 0;
    while (start <= spec.size()) {
        const std::size_t end = std::min(spec.find(';', start), spec.size());
        const std::string part = spec.substr(start, end - start);
        start = end + 1;
        if (part.empty()) {
            if (end == spec.size()) {
                break;
            }
            throw ConfigError("grid: empty segment in '" + spec + "'");
        }
        const std::size_t eq = part.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("grid: segment '" + part + "' is not name=v1,v2,...");
        }
        const std::string name = part.substr(0, eq);
        if (!seen.insert(name).second) {
            throw ConfigError("grid: parameter '" + name + "' given twice");
        }
        std::vector<double> values;
        std::size_t vstart = eq + 1;
        while (vstart <= part.size()) {
            const std::size_t vend = std::min(part.find(',', vstart), part.size());
            const std::string tok = part.substr(vstart, vend - vstart);
            vstart = vend + 1;
            if (tok.empty()) {
                throw ConfigError("grid: empty value in segment '" + part + "'");
            }
            try {
                std::size_t used = 0;
                const double v = std::stod(tok, &used);
                if (used != tok.size() || !std::isfinite(v)) {
                    throw std::invalid_argument(tok);
                }
                values.push_back(v);
            } catch (const std::exception&) {
                throw ConfigError("grid: cannot parse value '" + tok + "' in segment '" + part +
                                  "'");
            }
            if (vend == part.size()) {
                break;
            }
        }
        if (values.empty()) {
            throw ConfigError("grid: parameter '" + name + "' has no values");
        }
        if (name == "k") {
            g.k.clear();
            for (double v : values) {
                if (v < 2.0 || v != std::floor(v)) {
                    throw ConfigError("grid: k values must be integers >= 2");
                }
                g.k.push_back(static_cast<std::size_t>(v));
            }
        } else if (name == "alpha") {
            g.alpha = values;
        } else if (name == "beta") {
            g.beta = values;
        } else if (name == "q") {
            g.q = values;
        } else {
            throw ConfigError("grid: unknown parameter '" + name + "' (valid: k, alpha, beta, q)");
        }
        if (end == spec.size()) {
            break;
        }
    }
    return g;
}

void exec_grid(const json& params, const fs::path& outdir, std::ostream& out, std::ostream& err,
               bool verbose) {
    const std::string ctx = "grid params";
    expect_keys(params,
                {"input", "format", "label_column", "minority_label", "scale", "grid", "folds",
                 "seed", "threads", "classifier", "poqg"},
                ctx);
    const std::uint64_t seed = get_size(params, "seed", ctx);
    const std::size_t folds = get_size(params, "folds", ctx);
    const std::size_t threads = get_size(params, "threads", ctx);
    const ClassifierConfig clf = classifier_from_json(params.at("classifier"));
    const PoqgConfig base_cfg = poqg_from_json(params.at("poqg"), seed);
    const GridSpec grid = parse_grid(get_str(params, "grid", ctx));

    const std::string input = get_str(params, "input", ctx);
    const std::string id = dataset_id_of(input);
    const Dataset d =
        load_input(input, get_str(params, "format", ctx), get_str(params, "label_column", ctx),
                   get_str(params, "minority_label", ctx), get_bool(params, "scale", ctx));

    std::vector<PoqgConfig> combos;
    for (std::size_t k : grid.k) {
        for (double alpha : grid.alpha) {
            for (double beta : grid.beta) {
                for (double q : grid.q) {
                    PoqgConfig c = base_cfg;
                    c.k = k;
                    c.alpha = alpha;
                    c.beta = beta;
                    c.q = q;
                    validate(c);
                    combos.push_back(c);
                }
            }
        }
    }

    std::vector<EvalReport> reports(combos.size());
    std::mutex log_mutex;
    parallel_for(combos.size(), threads, [&](std::size_t i) {
        MethodConfig cfg;
        cfg.method = Method::poqg;
        cfg.poqg = combos[i];
        reports[i] = cross_validate(d, id, cfg, clf, folds, seed);
        if (verbose) {
            const std::lock_guard<std::mutex> lock(log_mutex);
            err << "combo " << (i + 1) << "/" << combos.size() << " done\n";
        }
    });

    std::string csv = "k,alpha,beta,q,mean_g_mean,std_g_mean,mean_roc_auc,std_roc_auc,undefined_folds\n";
    auto opt_cell = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string();
    };
    std::size_t best = combos.size();
    for (std::size_t i = 0; i < combos.size(); ++i) {
        const PoqgConfig& c = combos[i];
        const EvalReport& r = reports[i];
        csv += std::to_string(c.k) + ',' + format_double(c.alpha) + ',' + format_double(c.beta) +
               ',' + format_double(c.q) + ',' + opt_cell(r.mean_g_mean) + ',' +
               opt_cell(r.std_g_mean) + ',' + opt_cell(r.mean_roc_auc) + ',' +
               opt_cell(r.std_roc_auc) + ',' + std::to_string(r.undefined_folds) + '\n';
        if (!r.mean_roc_auc) {
            continue;
        }
        if (best == combos.size()) {
            best = i;
            continue;
        }
        const EvalReport& b = reports[best];
        const double ga = r.mean_g_mean.value_or(-1.0);
        const double gb = b.mean_g_mean.value_or(-1.0);
        if (*r.mean_roc_auc > *b.mean_roc_auc ||
            (*r.mean_roc_auc == *b.mean_roc_auc && ga > gb)) {
            best = i;
        }
    }
    if (best == combos.size()) {
        throw DataError("no grid combination produced a defined mean ROC-AUC");
    }

    json best_json;
    best_json["k"] = combos[best].k;
    best_json["alpha"] = combos[best].alpha;
    best_json["beta"] = combos[best].beta;
    best_json["q"] = combos[best].q;
    best_json["mean_g_mean"] =
        reports[best].mean_g_mean ? json(*reports[best].mean_g_mean) : json();
    best_json["std_g_mean"] = reports[best].std_g_mean ? json(*reports[best].std_g_mean) : json();
    best_json["mean_roc_auc"] = json(*reports[best].mean_roc_auc);
    best_json["std_roc_auc"] =
        reports[best].std_roc_auc ? json(*reports[best].std_roc_auc) : json();
    best_json["undefined_folds"] = reports[best].undefined_folds;

    fs::create_directories(outdir);
    write_file(outdir / "grid.csv", csv);
    write_file(outdir / "best.json", best_json.dump(2) + "\n");
    write_run_json("grid", params, outdir);

    out << "swept " << combos.size() << " configurations (" << folds << "-fold) on " << id << "\n"
        << "best: k=" << combos[best].k << " alpha=" << format_double(combos[best].alpha)
        << " beta=" << format_double(combos[best].beta)
        << " q=" << format_double(combos[best].q)
        << " mean_roc_auc=" << format_double(*reports[best].mean_roc_auc) << "\n"
        << "artifacts: grid.csv, best.json, run.json in " << outdir.string() << "\n";
}

void exec_demo(const json& params, const fs::path& outdir, std::ostream& out) {
    const std::string ctx = "demo params";
    expect_keys(params, {"seed", "methods", "poqg", "baseline"}, ctx);
    const std::uint64_t seed = get_size(params, "seed", ctx);
    if (!params.at("methods").is_array() || params.at("methods").empty()) {
        throw ConfigError(ctx + ": 'methods' must be a nonempty array");
    }
    std::vector<Method> methods;
    std::set<std::string> seen;
    for (const json& item : params.at("methods")) {
        if (!item.is_string()) {
            throw ConfigError(ctx + ": 'methods' entries must be strings");
        }
        const std::string id = item.get<std::string>();
        if (!seen.insert(id).second) {
            throw ConfigError(ctx + ": duplicate method '" + id + "'");
        }
        const Method m = parse_method(id);
        if (m == Method::none) {
            throw ConfigError(ctx + ": method 'none' generates nothing to demonstrate");
        }
        methods.push_back(m);
    }

    const Dataset d = make_case_study(seed);
    fs::create_directories(outdir);
    save_csv(d, outdir / "case_study.csv");

    for (Method m : methods) {
        const std::string id = method_id(m);
        const ResampleResult r =
            run_resampler(d, method_config(m, params, seed), mix64(seed, hash64(id)));
        std::vector<int> flags(r.data.size());
        for (std::size_t i = 0; i < r.origins.size(); ++i) {
            flags[i] = r.origins[i].synthetic ? 1 : 0;
        }
        save_csv(r.data, outdir / (id + "_scatter.csv"), &flags);

        // All generated points (cleaning steps may have dropped some from the
        // scatter file) with their provenance.
        std::string synth = "f0,f1,anchor_id,proxima_id,orion_id,q1,q2\n";
        for (const SyntheticRecord& s : r.synthetics) {
            const auto a = d.features.row(s.parent_a);
            const auto b = d.features.row(s.parent_b);
            for (std::size_t c = 0; c < d.dim(); ++c) {
                synth += format_double(s.weight_a * a[c] + s.weight_b * b[c]) + ',';
            }
            synth += std::to_string(s.anchor) + ',' + std::to_string(s.parent_a) + ',' +
                     std::to_string(s.parent_b) + ',' + format_double(s.weight_a) + ',' +
                     format_double(s.weight_b) + '\n';
        }
        write_file(outdir / (id + "_synthetic.csv"), synth);
        out << id << ": " << r.synthetics.size() << " synthetic points, " << r.data.size()
            << " rows in " << id << "_scatter.csv\n";
    }
    write_run_json("demo", params, outdir);
    out << "artifacts in " << outdir.string() << "\n";
}

void exec_replay(const fs::path& run_path, const fs::path& outdir, std::ostream& out,
                 std::ostream& err) {
    std::ifstream in(run_path);
    if (!in) {
        throw DataError("cannot open " + run_path.string());
    }
    json run;
    try {
        in >> run;
    } catch (const json::exception& e) {
        throw ParseError(run_path.string() + ": invalid JSON: " + e.what());
    }
    expect_keys(run, {"tool", "version", "command", "params"}, "run.json");
    if (get_str(run, "tool", "run.json") != "poqg") {
        throw ConfigError(run_path.string() + ": not a poqg run file");
    }
    if (get_size(run, "version", "run.json") != 1) {
        throw ConfigError(run_path.string() + ": unsupported run file version");
    }
    const std::string command = get_str(run, "command", "run.json");
    const json& params = run.at("params");
    if (command == "resample") {
        exec_resample(params, outdir, out);
    } else if (command == "compare") {
        exec_compare(params, outdir, out, err, /*verbose=*/false);
    } else if (command == "grid") {
        exec_grid(params, outdir, out, err, /*verbose=*/false);
    } else if (command == "demo") {
        exec_demo(params, outdir, out);
    } else {
        throw ConfigError(run_path.string() + ": unknown command '" + command + "'");
    }
}

// ---------------------------------------------------------------------------
// option plumbing

struct PoqgOptions {
    std::size_t k = 5;
    double alpha = 0.5;
    double beta = 0.1;
    double q = 1.5;
    double eps_div = 1e-9;
    std::optional<std::size_t> target;
    std::string density_denominator = "majority";
    bool with_replacement = false;
    bool round_robin_anchors = false;

    void add_options(CLI::App* cmd, bool with_target) {
        cmd->add_option("--k", k, "Minority neighbors per anchor (poqg)");
        cmd->add_option("--alpha", alpha, "Density penalty exponent (poqg)");
        cmd->add_option("--beta", beta, "Kernel width (poqg)");
        cmd->add_option("--q", q, "Kernel shape in (0, 3) (poqg)");
        cmd->add_option("--eps-div", eps_div, "Division guard epsilon (poqg)");
        if (with_target) {
            cmd->add_option("--target", target,
                            "Synthetic point count; default balances the classes");
        }
        cmd->add_option("--density-denominator", density_denominator,
                        "Density mean over 'majority' rows or 'all' rows");
        cmd->add_flag("--with-replacement", with_replacement,
                      "Allow Proxima and Orion to coincide");
        cmd->add_flag("--round-robin-anchors", round_robin_anchors,
                      "Cycle anchors instead of sampling them");
    }

    json to_json() const {
        json j;
        j["k"] = k;
        j["alpha"] = alpha;
        j["beta"] = beta;
        j["q"] = q;
        j["eps_div"] = eps_div;
        j["target"] = target ? json(*target) : json();
        j["density_denominator"] = density_denominator;
        j["with_replacement"] = with_replacement;
        j["round_robin_anchors"] = round_robin_anchors;
        return j;
    }
};

struct BaselineOptions {
    std::size_t k_neighbors = 5;
    std::size_t enn_k = 3;
    std::string borderline_kind = "two";

    void add_options(CLI::App* cmd) {
        cmd->add_option("--k-neighbors", k_neighbors, "Baseline interpolation neighbors");
        cmd->add_option("--enn-k", enn_k, "Edited-nearest-neighbor vote size");
        cmd->add_option("--borderline-kind", borderline_kind, "Borderline variant: one or two");
    }

    json to_json() const {
        json j;
        j["k_neighbors"] = k_neighbors;
        j["enn_k"] = enn_k;
        j["borderline_kind"] = borderline_kind;
        return j;
    }
};

struct IoOptions {
    std::string format = "auto";
    std::string label_column = "class";
    std::string minority_label = "1";
    bool scale = false;

    void add_options(CLI::App* cmd) {
        cmd->add_option("--format", format, "Input format: auto, keel or csv");
        cmd->add_option("--label-column", label_column,
                        "CSV label column, 0-based index or header name");
        cmd->add_option("--minority-label", minority_label, "CSV label value mapped to class 1");
        cmd->add_flag("--scale", scale, "Min-max scale features to [0, 1] before anything else");
    }

    void fill(json& params) const {
        params["format"] = format;
        params["label_column"] = label_column;
        params["minority_label"] = minority_label;
        params["scale"] = scale;
    }
};

struct ClassifierOptions {
    std::string id = "knn";
    std::size_t knn_k = 5;
    std::size_t epochs = 300;
    double learning_rate = 0.1;

    void add_options(CLI::App* cmd) {
        cmd->add_option("--classifier", id, "Evaluation classifier: knn or logistic");
        cmd->add_option("--knn-k", knn_k, "Neighbors for the knn classifier");
        cmd->add_option("--epochs", epochs, "Gradient-descent epochs (logistic)");
        cmd->add_option("--learning-rate", learning_rate, "Gradient-descent step (logistic)");
    }

    json to_json() const {
        json j;
        j["id"] = id;
        j["knn_k"] = knn_k;
        j["epochs"] = epochs;
        j["learning_rate"] = learning_rate;
        return j;
    }
};

// Applies --config <file> values as defaults for options of `cmd` that were
// not given on the command line. Keys are long option names without the
// leading dashes; values must be scalars.
void apply_config_file(CLI::App* cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path + ": invalid JSON: " + std::string(e.what()));
    }
    expect_object(j, "config file " + path);
    for (const auto& [key, value] : j.items()) {
        if (key == "config") {
            throw ConfigError(path + ": 'config' cannot be set from a config file");
        }
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (!opt) {
            throw ConfigError(path + ": unknown key '" + key + "' for command '" +
                              cmd->get_name() + "'");
        }
        if (value.is_array() || value.is_object()) {
            throw ConfigError(path + ": key '" + key +
                              "': only scalar values are supported in config files");
        }
        const std::string str = value.is_string() ? value.get<std::string>() : value.dump();
        try {
            opt->default_val(str);
        } catch (const CLI::Error& e) {
            throw ConfigError(path + ": key '" + key + "': " + e.what());
        }
    }
}

std::optional<std::string> scan_flag_value(const std::vector<std::string>& args,
                                           const std::string& name) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == name) {
            if (i + 1 >= args.size()) {
                throw ConfigError(name + " requires a value");
            }
            return args[i + 1];
        }
        if (args[i].rfind(name + "=", 0) == 0) {
            return args[i].substr(name.size() + 1);
        }
    }
    return std::nullopt;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        CLI::App app{"Resampling toolkit for imbalanced binary classification"};
        app.name("poqg");
        app.require_subcommand(1);

        const std::uint64_t default_seed = env_seed();

        // --- resample ---
        auto* c_res = app.add_subcommand("resample", "Resample one dataset and write it with provenance");
        std::string res_input, res_outdir, res_method = "poqg", res_config;
        std::uint64_t res_seed = default_seed;
        IoOptions res_io;
        PoqgOptions res_poqg;
        BaselineOptions res_base;
        c_res->add_option("--input", res_input, "Dataset file (.dat/.arff = keel, .csv = csv)")
            ->required();
        c_res->add_option("--method", res_method, "Resampling method id");
        c_res->add_option("--seed", res_seed, "RNG seed (default: POQG_SEED or 0)");
        c_res->add_option("--outdir", res_outdir, "Output directory")->required();
        c_res->add_option("--config", res_config, "JSON file with option defaults");
        res_io.add_options(c_res);
        res_poqg.add_options(c_res, /*with_target=*/true);
        res_base.add_options(c_res);

        // --- compare ---
        auto* c_cmp = app.add_subcommand("compare", "Cross-validated method comparison with signed-rank tests");
        std::vector<std::string> cmp_inputs;
        std::vector<std::string> cmp_methods;
        for (Method m : all_methods()) {
            cmp_methods.push_back(method_id(m));
        }
        std::string cmp_outdir, cmp_config;
        std::uint64_t cmp_seed = default_seed;
        std::size_t cmp_folds = 5, cmp_threads = 0;
        bool cmp_paper_literal = false, cmp_verbose = false;
        IoOptions cmp_io;
        ClassifierOptions cmp_clf;
        PoqgOptions cmp_poqg;
        BaselineOptions cmp_base;
        c_cmp->add_option("--inputs", cmp_inputs, "Dataset files")->required()->delimiter(',');
        c_cmp->add_option("--methods", cmp_methods, "Method ids to evaluate")->delimiter(',');
        c_cmp->add_option("--folds", cmp_folds, "Stratified folds");
        c_cmp->add_option("--seed", cmp_seed, "RNG seed (default: POQG_SEED or 0)");
        c_cmp->add_option("--threads", cmp_threads, "Worker threads, 0 = hardware");
        c_cmp->add_flag("--paper-literal", cmp_paper_literal,
                        "Also report the nonstandard gmean_tprfpr and auc_midpoint columns");
        c_cmp->add_flag("--verbose", cmp_verbose, "Progress to stderr");
        c_cmp->add_option("--outdir", cmp_outdir, "Output directory")->required();
        c_cmp->add_option("--config", cmp_config, "JSON file with option defaults");
        cmp_io.add_options(c_cmp);
        cmp_clf.add_options(c_cmp);
        cmp_poqg.add_options(c_cmp, /*with_target=*/false);
        cmp_base.add_options(c_cmp);

        // --- grid ---
        auto* c_grid = app.add_subcommand("grid", "Hyperparameter sweep for the poqg method");
        std::string grid_input, grid_outdir, grid_config, grid_spec = kDefaultGrid;
        std::uint64_t grid_seed = default_seed;
        std::size_t grid_folds = 5, grid_threads = 0;
        bool grid_verbose = false;
        IoOptions grid_io;
        ClassifierOptions grid_clf;
        PoqgOptions grid_poqg;
        c_grid->add_option("--input", grid_input, "Dataset file")->required();
        c_grid->add_option("--grid", grid_spec, "Sweep spec, e.g. k=5,7;alpha=0.5;beta=0.1;q=1.5");
        c_grid->add_option("--folds", grid_folds, "Stratified folds");
        c_grid->add_option("--seed", grid_seed, "RNG seed (default: POQG_SEED or 0)");
        c_grid->add_option("--threads", grid_threads, "Worker threads, 0 = hardware");
        c_grid->add_flag("--verbose", grid_verbose, "Progress to stderr");
        c_grid->add_option("--outdir", grid_outdir, "Output directory")->required();
        c_grid->add_option("--config", grid_config, "JSON file with option defaults");
        grid_io.add_options(c_grid);
        grid_clf.add_options(c_grid);
        grid_poqg.add_options(c_grid, /*with_target=*/false);

        // --- demo ---
        auto* c_demo = app.add_subcommand("demo", "Run every method on a built-in 2-d case study");
        std::vector<std::string> demo_methods;
        for (Method m : all_methods()) {
            if (m != Method::none) {
                demo_methods.push_back(method_id(m));
            }
        }
        std::string demo_outdir, demo_config;
        std::uint64_t demo_seed = default_seed;
        PoqgOptions demo_poqg;
        BaselineOptions demo_base;
        c_demo->add_option("--methods", demo_methods, "Method ids to demonstrate")->delimiter(',');
        c_demo->add_option("--seed", demo_seed, "RNG seed (default: POQG_SEED or 0)");
        c_demo->add_option("--outdir", demo_outdir, "Output directory")->required();
        c_demo->add_option("--config", demo_config, "JSON file with option defaults");
        demo_poqg.add_options(c_demo, /*with_target=*/false);
        demo_base.add_options(c_demo);

        // --- replay ---
        auto* c_rep = app.add_subcommand("replay", "Re-run a recorded run.json into a new directory");
        std::string rep_run, rep_outdir;
        c_rep->add_option("run_json", rep_run, "Path to a run.json written by another command")
            ->required();
        c_rep->add_option("--outdir", rep_outdir, "Output directory")->required();

        // Config-file defaults must be in place before parsing; find the
        // active subcommand and its --config value by scanning the raw args.
        for (CLI::App* cmd : {c_res, c_cmp, c_grid, c_demo}) {
            if (args.empty() || args.front() != cmd->get_name()) {
                continue;
            }
            if (const auto cfg = scan_flag_value(args, "--config")) {
                apply_config_file(cmd, *cfg);
            }
        }

        std::vector<const char*> argv;
        argv.push_back("poqg");
        for (const std::string& a : args) {
            argv.push_back(a.c_str());
        }
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::CallForHelp& e) {
            out << app.help();
            return 0;
        } catch (const CLI::ParseError& e) {
            err << "usage error: " << e.what() << "\n";
            return 2;
        }

        if (c_res->parsed()) {
            json params;
            params["input"] = res_input;
            res_io.fill(params);
            params["method"] = res_method;
            params["seed"] = res_seed;
            params["poqg"] = res_poqg.to_json();
            params["baseline"] = res_base.to_json();
            exec_resample(params, res_outdir, out);
        } else if (c_cmp->parsed()) {
            json params;
            params["inputs"] = cmp_inputs;
            cmp_io.fill(params);
            params["methods"] = cmp_methods;
            params["folds"] = cmp_folds;
            params["seed"] = cmp_seed;
            params["threads"] = cmp_threads;
            params["paper_literal"] = cmp_paper_literal;
            params["classifier"] = cmp_clf.to_json();
            params["poqg"] = cmp_poqg.to_json();
            params["baseline"] = cmp_base.to_json();
            exec_compare(params, cmp_outdir, out, err, cmp_verbose);
        } else if (c_grid->parsed()) {
            json params;
            params["input"] = grid_input;
            grid_io.fill(params);
            params["grid"] = grid_spec;
            params["folds"] = grid_folds;
            params["seed"] = grid_seed;
            params["threads"] = grid_threads;
            params["classifier"] = grid_clf.to_json();
            params["poqg"] = grid_poqg.to_json();
            exec_grid(params, grid_outdir, out, err, grid_verbose);
        } else if (c_demo->parsed()) {
            json params;
            params["seed"] = demo_seed;
            params["methods"] = demo_methods;
            params["poqg"] = demo_poqg.to_json();
            params["baseline"] = demo_base.to_json();
            exec_demo(params, demo_outdir, out);
        } else if (c_rep->parsed()) {
            exec_replay(rep_run, rep_outdir, out, err);
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        err << "input error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 4;
    }
}

} // namespace poqg
