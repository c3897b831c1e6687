#include "poqg/methods.hpp"

#include "poqg/errors.hpp"

namespace poqg {

namespace {

ResampleResult identity(const Dataset& d) {
    ResampleResult r;
    r.data = d;
    r.n_original = d.size();
    for (std::size_t i = 0; i < d.size(); ++i) {
        r.origins.push_back({false, i});
    }
    return r;
}

} // namespace

ResampleResult run_resampler(const Dataset& d, const MethodConfig& cfg, std::uint64_t seed) {
    ResampleResult r;
    switch (cfg.method) {
    case Method::none: {
        r = identity(d);
        break;
    }
    case Method::poqg: {
        PoqgConfig c = cfg.poqg;
        c.seed = seed;
        r = oversample(d, c);
        break;
    }
    default: {
        BaselineConfig c = cfg.baseline;
        c.seed = seed;
        switch (cfg.method) {
        case Method::smote: r = smote(d, c); break;
        case Method::smote_tomek: r = smote_tomek(d, c); break;
        case Method::smote_enn: r = smote_enn(d, c); break;
        case Method::adasyn: r = adasyn(d, c); break;
        case Method::borderline_smote: r = borderline_smote(d, c); break;
        default: throw InternalError("run_resampler: unhandled method");
        }
        break;
    }
    }
    audit_result(d, r);
    return r;
}

} // namespace poqg
