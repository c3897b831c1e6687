#ifndef POQG_METHODS_HPP
#define POQG_METHODS_HPP

#include "poqg/baselines.hpp"
#include "poqg/oversampler.hpp"
#include "poqg/resample.hpp"

namespace poqg {

// One configuration object covering every method; only the relevant part is
// read. Method none passes the data through untouched.
struct MethodConfig {
    Method method = Method::poqg;
    PoqgConfig poqg;
    BaselineConfig baseline;
};

// Runs the configured resampler with the given seed (overriding the seeds
// embedded in the sub-configs) and audits the result before returning it.
ResampleResult run_resampler(const Dataset& d, const MethodConfig& cfg, std::uint64_t seed);

} // namespace poqg

#endif
