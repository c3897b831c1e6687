#include "poqg/resample.hpp"

#include <algorithm>
#include <cmath>

#include "poqg/errors.hpp"

namespace poqg {

void audit_result(const Dataset& input, const ResampleResult& r) {
    validate(r.data);
    if (r.n_original != input.size()) {
        throw InternalError("resample audit: n_original does not match the input");
    }
    if (r.origins.size() != r.data.size()) {
        throw InternalError("resample audit: one origin per output row required");
    }
    if (r.data.dim() != input.dim()) {
        throw InternalError("resample audit: feature dimension changed");
    }
    std::size_t kept_original = 0;
    for (std::size_t i = 0; i < r.origins.size(); ++i) {
        const RowOrigin& o = r.origins[i];
        if (o.synthetic) {
            if (o.index >= r.synthetics.size()) {
                throw InternalError("resample audit: synthetic origin out of range");
            }
            if (r.data.labels[i] != 1) {
                throw InternalError("resample audit: synthetic row is not labeled minority");
            }
            const SyntheticRecord& s = r.synthetics[o.index];
            const auto a = input.features.row(s.parent_a);
            const auto b = input.features.row(s.parent_b);
            for (std::size_t c = 0; c < input.dim(); ++c) {
                const double expect = s.weight_a * a[c] + s.weight_b * b[c];
                if (std::abs(expect - r.data.features(i, c)) > 1e-9) {
                    throw InternalError("resample audit: synthetic row does not match its record");
                }
            }
        } else {
            if (o.index >= input.size()) {
                throw InternalError("resample audit: original origin out of range");
            }
            if (r.data.labels[i] != input.labels[o.index]) {
                throw InternalError("resample audit: original row changed label");
            }
            ++kept_original;
        }
    }
    if (kept_original + r.removed_original.size() != input.size()) {
        throw InternalError("resample audit: original rows lost without being recorded as removed");
    }
    for (const SyntheticRecord& s : r.synthetics) {
        if (s.anchor >= input.size() || s.parent_a >= input.size() || s.parent_b >= input.size()) {
            throw InternalError("resample audit: provenance references a row outside the input");
        }
        if (input.labels[s.anchor] != 1) {
            throw InternalError("resample audit: anchor is not a minority row");
        }
        if (std::abs(s.weight_a + s.weight_b - 1.0) > 1e-9) {
            throw InternalError("resample audit: interpolation weights do not sum to one");
        }
    }
    for (std::size_t row : r.removed_original) {
        if (row >= input.size()) {
            throw InternalError("resample audit: removed row outside the input");
        }
    }
}

std::string method_id(Method m) {
    switch (m) {
    case Method::none: return "none";
    case Method::adasyn: return "adasyn";
    case Method::borderline_smote: return "borderline_smote";
    case Method::smote: return "smote";
    case Method::smote_enn: return "smote_enn";
    case Method::smote_tomek: return "smote_tomek";
    case Method::poqg: return "poqg";
    }
    throw InternalError("method_id: unknown method");
}

std::string method_display_name(Method m) {
    switch (m) {
    case Method::none: return "None";
    case Method::adasyn: return "ADASYN";
    case Method::borderline_smote: return "Boundary_SMOTE";
    case Method::smote: return "SMOTE";
    case Method::smote_enn: return "SMOTE-ENN";
    case Method::smote_tomek: return "SMOTE-TL";
    case Method::poqg: return "PO-QG";
    }
    throw InternalError("method_display_name: unknown method");
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = {
        Method::none,       Method::adasyn,    Method::borderline_smote, Method::smote,
        Method::smote_enn,  Method::smote_tomek, Method::poqg,
    };
    return methods;
}

Method parse_method(const std::string& id) {
    for (Method m : all_methods()) {
        if (method_id(m) == id) {
            return m;
        }
    }
    std::string valid;
    for (Method m : all_methods()) {
        valid += (valid.empty() ? "" : ", ") + method_id(m);
    }
    throw ConfigError("unknown method '" + id + "'; valid methods: " + valid);
}

} // namespace poqg
