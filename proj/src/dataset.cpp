#include "poqg/dataset.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "poqg/errors.hpp"
#include "poqg/rng.hpp"

namespace poqg {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(line);
    }
    return lines;
}

bool parse_double(const std::string& token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (first != last && *first == '+') ++first;
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && p == last;
}

double parse_value(const std::string& token, std::size_t lineno, const std::string& column) {
    double v = 0.0;
    if (!parse_double(token, v)) {
        throw ParseError("line " + std::to_string(lineno) + ": cannot parse '" + token +
                         "' as a number in column " + column);
    }
    if (!std::isfinite(v)) {
        throw ParseError("line " + std::to_string(lineno) + ": non-finite value '" + token +
                         "' in column " + column);
    }
    return v;
}

// RFC 4180 style field splitter; quoted fields may contain commas and
// doubled quotes. Newlines inside quotes are not supported.
std::vector<std::string> split_csv(const std::string& line, std::size_t lineno) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) {
        throw ParseError("line " + std::to_string(lineno) + ": unterminated quote");
    }
    fields.push_back(cur);
    return fields;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_plain(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) {
        fields.push_back(trim(cur));
    }
    if (!line.empty() && line.back() == ',') {
        fields.push_back("");
    }
    return fields;
}

// Assigns 0/1 labels given per-row class strings: minority_value -> 1.
std::vector<int> map_labels(const std::vector<std::string>& values, const std::string& minority_value) {
    std::vector<int> labels(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        labels[i] = values[i] == minority_value ? 1 : 0;
    }
    return labels;
}

} // namespace

std::string format_double(double v) {
    std::array<char, 32> buf;
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), p);
}

std::vector<std::size_t> Dataset::rows_of(int label) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) {
            rows.push_back(i);
        }
    }
    return rows;
}

std::size_t Dataset::count_of(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.feature_names = feature_names;
    out.features = Matrix(rows.size(), dim());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = features.row(rows[i]);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
        out.labels.push_back(labels[rows[i]]);
    }
    return out;
}

void validate(const Dataset& d) {
    if (d.features.rows() != d.labels.size()) {
        throw DataError("dataset has " + std::to_string(d.features.rows()) + " feature rows but " +
                        std::to_string(d.labels.size()) + " labels");
    }
    if (!d.feature_names.empty() && d.feature_names.size() != d.dim()) {
        throw DataError("dataset has " + std::to_string(d.dim()) + " features but " +
                        std::to_string(d.feature_names.size()) + " feature names");
    }
    for (int label : d.labels) {
        if (label != 0 && label != 1) {
            throw DataError("labels must be 0 or 1, found " + std::to_string(label));
        }
    }
    for (std::size_t r = 0; r < d.features.rows(); ++r) {
        for (std::size_t c = 0; c < d.features.cols(); ++c) {
            if (!std::isfinite(d.features(r, c))) {
                throw DataError("non-finite feature value at row " + std::to_string(r) +
                                ", column " + std::to_string(c));
            }
        }
    }
}

DatasetStats stats(const Dataset& d) {
    DatasetStats s;
    s.n_rows = d.size();
    s.n_features = d.dim();
    s.n_minority = d.count_of(1);
    s.n_majority = d.count_of(0);
    s.imbalance_ratio = s.n_minority == 0
                            ? std::numeric_limits<double>::infinity()
                            : static_cast<double>(s.n_majority) / static_cast<double>(s.n_minority);
    return s;
}

std::vector<std::size_t> FoldPlan::test_rows(std::size_t fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] == fold) {
            rows.push_back(i);
        }
    }
    return rows;
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] != fold) {
            rows.push_back(i);
        }
    }
    return rows;
}

FoldPlan stratified_folds(const Dataset& d, std::size_t n_folds, std::uint64_t seed) {
    if (n_folds < 2) {
        throw ConfigError("n_folds must be at least 2, got " + std::to_string(n_folds));
    }
    validate(d);
    const std::size_t n_min = d.count_of(1);
    if (n_min < n_folds) {
        throw DataError("minority class has " + std::to_string(n_min) +
                        " rows, fewer than n_folds=" + std::to_string(n_folds));
    }

    FoldPlan plan;
    plan.n_folds = n_folds;
    plan.seed = seed;
    plan.assignments.assign(d.size(), 0);
    for (int label : {1, 0}) {
        std::vector<std::size_t> rows = d.rows_of(label);
        RngStream rng(mix64(seed, static_cast<std::uint64_t>(label) + 1));
        for (std::size_t i = rows.size(); i > 1; --i) {
            std::swap(rows[i - 1], rows[rng.uniform_index(i)]);
        }
        for (std::size_t pos = 0; pos < rows.size(); ++pos) {
            plan.assignments[rows[pos]] = pos % n_folds;
        }
    }
    return plan;
}

Dataset load_keel(const std::filesystem::path& path) {
    const std::vector<std::string> lines = read_lines(path);

    std::vector<std::string> attr_names;
    std::vector<bool> attr_numeric;
    std::vector<std::vector<std::string>> attr_domains; // nominal values, empty if numeric
    bool in_data = false;
    std::size_t data_line = 0;

    std::vector<std::vector<double>> feature_rows;
    std::vector<std::string> class_values;

    for (std::size_t li = 0; li < lines.size(); ++li) {
        const std::size_t lineno = li + 1;
        const std::string line = trim(lines[li]);
        if (line.empty() || line[0] == '%') {
            continue;
        }
        if (!in_data && line[0] == '@') {
            std::istringstream ss(line);
            std::string keyword;
            ss >> keyword;
            keyword = lower(keyword);
            if (keyword == "@relation") {
                continue;
            }
            if (keyword == "@inputs" || keyword == "@input" || keyword == "@outputs" ||
                keyword == "@output") {
                continue;
            }
            if (keyword == "@data") {
                in_data = true;
                data_line = lineno;
                continue;
            }
            if (keyword != "@attribute") {
                throw ParseError("line " + std::to_string(lineno) + ": unknown header keyword '" +
                                 keyword + "'");
            }
            std::string name;
            ss >> name;
            if (name.empty()) {
                throw ParseError("line " + std::to_string(lineno) + ": @attribute without a name");
            }
            std::string rest;
            std::getline(ss, rest);
            rest = trim(rest);
            const std::size_t brace = rest.find('{');
            if (brace != std::string::npos) {
                const std::size_t close = rest.find('}', brace);
                if (close == std::string::npos) {
                    throw ParseError("line " + std::to_string(lineno) +
                                     ": nominal domain missing closing '}'");
                }
                std::vector<std::string> domain;
                for (const std::string& v : split_plain(rest.substr(brace + 1, close - brace - 1))) {
                    if (!v.empty()) {
                        domain.push_back(v);
                    }
                }
                if (domain.empty()) {
                    throw ParseError("line " + std::to_string(lineno) + ": empty nominal domain");
                }
                attr_names.push_back(name);
                attr_numeric.push_back(false);
                attr_domains.push_back(domain);
            } else {
                const std::string type = lower(rest.empty() ? "" : rest.substr(0, rest.find_first_of(" \t[")));
                if (type != "real" && type != "integer" && type != "numeric") {
                    throw ParseError("line " + std::to_string(lineno) + ": attribute '" + name +
                                     "' has unsupported type '" + rest + "'");
                }
                attr_names.push_back(name);
                attr_numeric.push_back(true);
                attr_domains.emplace_back();
            }
            continue;
        }
        if (!in_data) {
            throw ParseError("line " + std::to_string(lineno) + ": data row before @data");
        }

        const std::vector<std::string> fields = split_plain(line);
        if (fields.size() != attr_names.size()) {
            throw ParseError("line " + std::to_string(lineno) + ": expected " +
                             std::to_string(attr_names.size()) + " values, got " +
                             std::to_string(fields.size()));
        }
        std::vector<double> row(fields.size() - 1);
        for (std::size_t c = 0; c + 1 < fields.size(); ++c) {
            if (fields[c] == "?") {
                throw ParseError("line " + std::to_string(lineno) + ": missing value in attribute '" +
                                 attr_names[c] + "'");
            }
            row[c] = parse_value(fields[c], lineno, attr_names[c]);
        }
        const std::string& cls = fields.back();
        if (!attr_domains.back().empty()) {
            const auto& domain = attr_domains.back();
            if (std::find(domain.begin(), domain.end(), cls) == domain.end()) {
                throw ParseError("line " + std::to_string(lineno) + ": class value '" + cls +
                                 "' is not in the declared domain");
            }
        }
        feature_rows.push_back(std::move(row));
        class_values.push_back(cls);
    }

    if (!in_data) {
        throw ParseError(path.string() + ": no @data section");
    }
    if (attr_names.size() < 2) {
        throw ParseError(path.string() + ": need at least one feature attribute and a class attribute");
    }
    for (std::size_t c = 0; c + 1 < attr_names.size(); ++c) {
        if (!attr_numeric[c]) {
            throw ParseError(path.string() + ": non-class attribute '" + attr_names[c] +
                             "' is nominal; only numeric features are supported");
        }
    }
    if (feature_rows.empty()) {
        throw ParseError(path.string() + ": empty data section after line " + std::to_string(data_line));
    }

    std::map<std::string, std::size_t> counts;
    for (const std::string& v : class_values) {
        ++counts[v];
    }
    if (counts.size() == 1) {
        throw DataError(path.string() + ": only one class value ('" + counts.begin()->first +
                        "') present");
    }
    if (counts.size() > 2) {
        std::string all;
        for (const auto& [v, n] : counts) {
            all += (all.empty() ? "'" : ", '") + v + "'";
        }
        throw DataError(path.string() + ": expected two class values, found " +
                        std::to_string(counts.size()) + ": " + all);
    }
    // Rarer class -> 1; on a tie the lexicographically smaller value wins.
    const auto& a = *counts.begin();
    const auto& b = *std::next(counts.begin());
    const std::string minority = a.second < b.second   ? a.first
                                 : b.second < a.second ? b.first
                                                       : std::min(a.first, b.first);

    Dataset d;
    d.feature_names.assign(attr_names.begin(), attr_names.end() - 1);
    d.features = Matrix(feature_rows.size(), attr_names.size() - 1);
    for (std::size_t r = 0; r < feature_rows.size(); ++r) {
        std::copy(feature_rows[r].begin(), feature_rows[r].end(), d.features.row(r).begin());
    }
    d.labels = map_labels(class_values, minority);
    validate(d);
    return d;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const std::string& minority_label) {
    const std::vector<std::string> lines = read_lines(path);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) {
            continue;
        }
        rows.push_back(split_csv(lines[li], li + 1));
        if (rows.size() > 1 && rows.back().size() != rows.front().size()) {
            throw ParseError("line " + std::to_string(li + 1) + ": expected " +
                             std::to_string(rows.front().size()) + " fields, got " +
                             std::to_string(rows.back().size()));
        }
    }
    if (rows.empty()) {
        throw ParseError(path.string() + ": file is empty");
    }
    const std::size_t width = rows.front().size();
    if (width < 2) {
        throw ParseError(path.string() + ": need at least one feature column and a label column");
    }

    const bool by_index = !label_column.empty() &&
                          std::all_of(label_column.begin(), label_column.end(),
                                      [](unsigned char c) { return std::isdigit(c); });
    std::size_t label_idx = 0;
    bool has_header = false;
    if (by_index) {
        label_idx = std::stoul(label_column);
        if (label_idx >= width) {
            throw ConfigError("label column index " + label_column + " out of range; file has " +
                              std::to_string(width) + " columns");
        }
        // Header detection: the first row is data only if every non-label
        // cell is numeric.
        for (std::size_t c = 0; c < width; ++c) {
            double v = 0.0;
            if (c != label_idx && !parse_double(rows.front()[c], v)) {
                has_header = true;
                break;
            }
        }
    } else {
        has_header = true;
        const auto& header = rows.front();
        const auto it = std::find(header.begin(), header.end(), label_column);
        if (it == header.end()) {
            throw ParseError(path.string() + ": no column named '" + label_column +
                             "' in the header row");
        }
        label_idx = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<std::string> feature_names;
    if (has_header) {
        for (std::size_t c = 0; c < width; ++c) {
            if (c != label_idx) {
                feature_names.push_back(rows.front()[c]);
            }
        }
    } else {
        for (std::size_t c = 0, f = 0; c < width; ++c) {
            if (c != label_idx) {
                feature_names.push_back("f" + std::to_string(f++));
            }
        }
    }

    const std::size_t first_data = has_header ? 1 : 0;
    if (rows.size() <= first_data) {
        throw ParseError(path.string() + ": no data rows");
    }

    Dataset d;
    d.feature_names = feature_names;
    d.features = Matrix(rows.size() - first_data, width - 1);
    std::vector<std::string> class_values;
    bool minority_seen = false;
    std::string majority_value;
    bool majority_seen = false;
    for (std::size_t r = first_data; r < rows.size(); ++r) {
        const std::size_t lineno = r + 1;
        std::size_t f = 0;
        for (std::size_t c = 0; c < width; ++c) {
            if (c == label_idx) {
                continue;
            }
            d.features(r - first_data, f) = parse_value(rows[r][c], lineno, feature_names[f]);
            ++f;
        }
        const std::string& cls = rows[r][label_idx];
        if (cls == minority_label) {
            minority_seen = true;
        } else if (!majority_seen) {
            majority_value = cls;
            majority_seen = true;
        } else if (cls != majority_value) {
            throw ParseError("line " + std::to_string(lineno) + ": label '" + cls +
                             "' is outside the binary pair ('" + minority_label + "', '" +
                             majority_value + "')");
        }
        class_values.push_back(cls);
    }
    if (!minority_seen) {
        throw DataError(path.string() + ": minority label '" + minority_label + "' never occurs");
    }
    if (!majority_seen) {
        throw DataError(path.string() + ": every row has the minority label '" + minority_label +
                        "'; a second class is required");
    }
    d.labels = map_labels(class_values, minority_label);
    validate(d);
    return d;
}

void save_csv(const Dataset& d, const std::filesystem::path& path,
              const std::vector<int>* synthetic_flags) {
    validate(d);
    if (synthetic_flags && synthetic_flags->size() != d.size()) {
        throw InternalError("save_csv: synthetic_flags size mismatch");
    }
    std::ofstream out(path, std::ios::binary); // binary: no platform newline translation
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    for (std::size_t c = 0; c < d.dim(); ++c) {
        const std::string name = c < d.feature_names.size() ? d.feature_names[c]
                                                            : "f" + std::to_string(c);
        out << csv_escape(name) << ',';
    }
    out << "class";
    if (synthetic_flags) {
        out << ",synthetic";
    }
    out << '\n';
    for (std::size_t r = 0; r < d.size(); ++r) {
        for (std::size_t c = 0; c < d.dim(); ++c) {
            out << format_double(d.features(r, c)) << ',';
        }
        out << d.labels[r];
        if (synthetic_flags) {
            out << ',' << (*synthetic_flags)[r];
        }
        out << '\n';
    }
    if (!out) {
        throw DataError("write failed for " + path.string());
    }
}

Dataset minmax_scale(const Dataset& d) {
    validate(d);
    Dataset out = d;
    for (std::size_t c = 0; c < d.dim(); ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < d.size(); ++r) {
            lo = std::min(lo, d.features(r, c));
            hi = std::max(hi, d.features(r, c));
        }
        const double range = hi - lo;
        for (std::size_t r = 0; r < d.size(); ++r) {
            out.features(r, c) = range == 0.0 ? 0.0 : (d.features(r, c) - lo) / range;
        }
    }
    return out;
}

Dataset make_case_study(std::uint64_t seed) {
    constexpr std::size_t n_majority = 202;
    constexpr std::size_t n_minority = 23;
    RngStream rng(mix64(seed, 0x6ca5e57ddULL));
    Dataset d;
    d.feature_names = {"f0", "f1"};
    d.features = Matrix(n_majority + n_minority, 2);
    d.labels.assign(n_majority + n_minority, 0);
    for (std::size_t i = 0; i < n_majority; ++i) {
        d.features(i, 0) = 1.3 * rng.normal();
        d.features(i, 1) = 1.3 * rng.normal();
    }
    for (std::size_t i = 0; i < n_minority; ++i) {
        d.features(n_majority + i, 0) = 2.1 + 0.55 * rng.normal();
        d.features(n_majority + i, 1) = 0.4 + 0.55 * rng.normal();
        d.labels[n_majority + i] = 1;
    }
    return d;
}

} // namespace poqg
