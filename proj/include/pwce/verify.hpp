#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pwce {

struct SuiteResult {
    std::string suite;
    std::int64_t trials = 0;
    std::int64_t failures = 0;
    std::vector<std::string> notes;

    bool ok() const { return failures == 0; }
};

// Randomized property suites.  Each trial owns an RNG stream keyed by
// (seed, trial), so results do not depend on the thread schedule.
SuiteResult verify_schur_psd(std::int64_t trials, std::uint64_t seed);
SuiteResult verify_convolution(std::int64_t trials, std::uint64_t seed);
SuiteResult verify_charact(std::int64_t trials, std::uint64_t seed);
SuiteResult verify_kernel(std::int64_t trials, std::uint64_t seed);
SuiteResult verify_weights(std::int64_t trials, std::uint64_t seed);
SuiteResult verify_bounds(std::uint64_t seed);

// name in {schur-psd, convolution, charact, kernel, weights, bounds, all}
std::vector<SuiteResult> verify_suites(const std::string& name, std::int64_t trials,
                                       std::uint64_t seed);

}  // namespace pwce
