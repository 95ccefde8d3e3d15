#pragma once

// Worker accuracy estimation from injected golden questions: per-HIT
// scoring, cumulative smoothed profile updates, and the estimation-error
// metrics used by the sampling-rate experiments.

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "crowdgate/core.hpp"
#include "crowdgate/errors.hpp"

namespace crowdgate {

struct SamplingConfig {
    double alpha = 0.2;        // golden fraction per HIT
    std::size_t hit_size = 100;
    double smoothing = 1.0;    // pseudo-count added to each side

    void validate() const {
        if (!(alpha >= 0.0 && alpha < 1.0)) throw Error("golden rate must lie in [0,1)");
        if (hit_size < 1) throw Error("hit size must be at least 1");
        if (smoothing < 0.0) throw Error("smoothing must be non-negative");
    }
};

/// Golden answers scored for one worker on one HIT.
struct GoldenTally {
    std::uint64_t correct = 0;
    std::uint64_t total = 0;

    double accuracy() const {
        return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
    }
};

/// worker_id -> question_id -> answer given
using AnswerSheet = std::map<std::string, std::map<std::string, std::string>>;

/// Count each participating worker's correct golden answers in one HIT.
/// Every worker in the sheet must have answered every golden question.
inline std::map<std::string, GoldenTally> tallyGoldens(const HitBatch& hit,
                                                       const AnswerSheet& answers) {
    if (hit.golden_count == 0) throw NoGoldens("hit contains no golden questions");
    std::map<std::string, GoldenTally> tallies;
    for (const auto& [worker_id, sheet] : answers) {
        GoldenTally t;
        for (const auto& q : hit.questions) {
            if (!q.is_golden) continue;
            auto it = sheet.find(q.question_id);
            if (it == sheet.end())
                throw MissingAnswer("worker " + worker_id + " has no answer for golden " +
                                    q.question_id);
            t.total += 1;
            if (it->second == *q.ground_truth) t.correct += 1;
        }
        tallies[worker_id] = t;
    }
    return tallies;
}

/// Per-HIT accuracy view: correct goldens / golden count per worker.
inline std::map<std::string, double> scoreGoldens(const HitBatch& hit, const AnswerSheet& answers) {
    std::map<std::string, double> scores;
    for (const auto& [worker_id, tally] : tallyGoldens(hit, answers))
        scores[worker_id] = tally.accuracy();
    return scores;
}

/// Fold new golden results into a profile. The estimate is the smoothed
/// cumulative fraction (correct + s) / (total + 2s), clamped away from 0/1;
/// with no evidence and s > 0 it is the uninformative 0.5.
inline WorkerProfile updateProfile(const WorkerProfile& profile, std::uint64_t correct,
                                   std::uint64_t total, double smoothing = 1.0) {
    if (correct > total) throw Error("correct golden count exceeds total");
    if (smoothing < 0.0) throw Error("smoothing must be non-negative");
    const std::uint64_t new_correct = profile.golden_correct + correct;
    const std::uint64_t new_total = profile.golden_total + total;
    const double denom = static_cast<double>(new_total) + 2.0 * smoothing;
    const double a =
        denom == 0.0 ? 0.5 : (static_cast<double>(new_correct) + smoothing) / denom;
    return WorkerProfile(profile.worker_id, a, new_correct, new_total);
}

/// The two sampling-quality metrics: mean estimated accuracy, and mean
/// absolute deviation from the reference estimates (same worker set).
struct EstimationError {
    double mean_accuracy = 0.0;
    double mean_abs_error = 0.0;
};

inline EstimationError estimationError(const std::map<std::string, double>& estimates,
                                       const std::map<std::string, double>& reference) {
    if (estimates.empty()) throw WorkerSetMismatch("no workers to compare");
    if (estimates.size() != reference.size())
        throw WorkerSetMismatch("estimate and reference worker sets differ in size");
    detail::KahanSum mean, err;
    for (const auto& [worker_id, a] : estimates) {
        auto it = reference.find(worker_id);
        if (it == reference.end())
            throw WorkerSetMismatch("worker " + worker_id + " missing from reference");
        mean.add(a);
        err.add(std::abs(a - it->second));
    }
    const auto n = static_cast<double>(estimates.size());
    return {mean.sum / n, err.sum / n};
}

/// Mean estimated accuracy over a profile store.
inline double meanAccuracy(const ProfileMap& profiles) {
    if (profiles.empty()) throw WorkerSetMismatch("no profiles");
    detail::KahanSum acc;
    for (const auto& [worker_id, p] : profiles) acc.add(p.accuracy);
    return acc.sum / static_cast<double>(profiles.size());
}

}  // namespace crowdgate
