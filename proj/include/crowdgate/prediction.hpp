#pragma once

// Worker-count prediction: how many odd-replicated workers a question needs
// so that the majority answer reaches a target accuracy. A closed-form
// conservative bound caps a binary search over the exact majority tail.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "crowdgate/core.hpp"
#include "crowdgate/errors.hpp"

namespace crowdgate {

/// Largest replication this build evaluates exactly. The tail summation is
/// mode-centered and compensated, so it stays accurate through this cap.
inline constexpr std::int64_t kMaxSupportedWorkers = 9999;

namespace detail {

/// ln(i!) table, built once in long double so the per-call cost is a lookup.
inline const std::vector<double>& logFactorials() {
    static const std::vector<double> table = [] {
        std::vector<double> t(static_cast<std::size_t>(kMaxSupportedWorkers) + 2);
        long double acc = 0.0L;
        t[0] = 0.0;
        for (std::size_t i = 1; i < t.size(); ++i) {
            acc += std::log(static_cast<long double>(i));
            t[i] = static_cast<double>(acc);
        }
        return t;
    }();
    return table;
}

inline double logBinomialPmf(std::int64_t n, std::int64_t k, double mu) {
    const auto& lf = logFactorials();
    return lf[static_cast<std::size_t>(n)] - lf[static_cast<std::size_t>(k)] -
           lf[static_cast<std::size_t>(n - k)] +
           static_cast<double>(k) * std::log(mu) +
           static_cast<double>(n - k) * std::log1p(-mu);
}

inline void requireOdd(std::int64_t n) {
    if (n < 1 || n % 2 == 0)
        throw EvenWorkerCount("worker count must be a positive odd integer, got " +
                              std::to_string(n));
}

}  // namespace detail

/// Probability that a strict majority of n workers, each independently
/// correct with probability mu, answers correctly: the upper tail of
/// Binomial(n, mu) from ceil(n/2). n must be odd and at most the cap.
inline double expectedMajorityProb(std::int64_t n, double mu) {
    detail::requireOdd(n);
    if (n > kMaxSupportedWorkers)
        throw WorkerCapExceeded("worker count " + std::to_string(n) + " exceeds supported cap " +
                                std::to_string(kMaxSupportedWorkers));
    mu = clampAccuracy(mu);

    const std::int64_t lo = (n + 1) / 2;
    // start at the binomial mode (clamped into the tail) and walk outward so
    // the first term is the largest and never underflows
    std::int64_t mode = static_cast<std::int64_t>(std::floor(static_cast<double>(n + 1) * mu));
    mode = std::max(lo, std::min(mode, n));

    const double t0 = std::exp(detail::logBinomialPmf(n, mode, mu));
    const double up_ratio = mu / (1.0 - mu);
    const double down_ratio = (1.0 - mu) / mu;

    detail::KahanSum acc;
    acc.add(t0);
    double term = t0;
    for (std::int64_t k = mode; k < n; ++k) {
        // C(n,k+1)/C(n,k) = (n-k)/(k+1)
        term *= static_cast<double>(n - k) / static_cast<double>(k + 1) * up_ratio;
        acc.add(term);
    }
    term = t0;
    for (std::int64_t k = mode; k > lo; --k) {
        // C(n,k-1)/C(n,k) = k/(n-k+1)
        term *= static_cast<double>(k) / static_cast<double>(n - k + 1) * down_ratio;
        acc.add(term);
    }
    return std::min(1.0, std::max(0.0, acc.sum));
}

/// Majority-correct probability for workers with individual accuracies
/// (Poisson-binomial tail), by the O(n^2) convolution. Odd length required.
inline double exactMajorityProb(std::span<const double> accuracies) {
    const auto n = static_cast<std::int64_t>(accuracies.size());
    detail::requireOdd(n);

    std::vector<double> dp(accuracies.size() + 1, 0.0);
    dp[0] = 1.0;
    std::size_t filled = 0;
    for (double a : accuracies) {
        a = clampAccuracy(a);
        ++filled;
        for (std::size_t k = filled; k > 0; --k)
            dp[k] = dp[k] * (1.0 - a) + dp[k - 1] * a;
        dp[0] *= (1.0 - a);
    }
    detail::KahanSum acc;
    for (std::size_t k = static_cast<std::size_t>((n + 1) / 2); k < dp.size(); ++k)
        acc.add(dp[k]);
    return std::min(1.0, std::max(0.0, acc.sum));
}

/// Smallest odd worker count guaranteed to reach target accuracy C by the
/// exponential tail bound: n >= -ln(1-C) / (2 (mu - 1/2)^2). Safe but loose.
inline std::int64_t conservativeWorkerCount(double target_accuracy, double mean_accuracy) {
    if (!(target_accuracy > 0.0 && target_accuracy < 1.0))
        throw InvalidAccuracyTarget("target accuracy must lie in (0,1)");
    mean_accuracy = std::min(mean_accuracy, kAccuracyClampHi);
    if (!(mean_accuracy > 0.5))
        throw MeanAccuracyNotAboveHalf("mean worker accuracy must exceed 0.5");

    const double gap = mean_accuracy - 0.5;
    const double bound = -std::log1p(-target_accuracy) / (2.0 * gap * gap);
    std::int64_t n = std::max<std::int64_t>(detail::ceilSafe(bound), 1);
    if (n % 2 == 0) ++n;
    return n;
}

struct PredictionResult {
    std::int64_t conservative_n = 1;
    std::int64_t refined_n = 1;
    double expected_accuracy = 0.0;  // majority tail at refined_n
};

/// Tighten the conservative count: binary-search the smallest odd n whose
/// exact majority tail already meets C. The conservative count bounds the
/// search, so the result never exceeds it.
inline PredictionResult refinedWorkerCount(double target_accuracy, double mean_accuracy,
                                           std::int64_t n_max = kMaxSupportedWorkers) {
    PredictionResult result;
    result.conservative_n = conservativeWorkerCount(target_accuracy, mean_accuracy);
    if (result.conservative_n > n_max)
        throw WorkerCapExceeded("conservative count " + std::to_string(result.conservative_n) +
                                " exceeds cap " + std::to_string(n_max));

    // search over odd n = 2i - 1; the conservative count is feasible
    std::int64_t lo = 1, hi = (result.conservative_n + 1) / 2;
    while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (expectedMajorityProb(2 * mid - 1, mean_accuracy) >= target_accuracy)
            hi = mid;
        else
            lo = mid + 1;
    }
    result.refined_n = 2 * hi - 1;
    result.expected_accuracy = expectedMajorityProb(result.refined_n, mean_accuracy);
    return result;
}

}  // namespace crowdgate
