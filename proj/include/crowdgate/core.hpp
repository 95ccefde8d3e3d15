#pragma once

// Shared vocabulary types: answer domains, worker profiles, votes,
// observations, questions, and the HIT batch assembly + cost model.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "crowdgate/errors.hpp"

namespace crowdgate {

/// Accuracies live in the open interval (0,1); endpoints would push the
/// log-odds weights to +/-inf, so stored values are clamped away from them.
inline constexpr double kAccuracyClampLo = 1e-6;
inline constexpr double kAccuracyClampHi = 1.0 - 1e-6;

inline double clampAccuracy(double a) noexcept {
    return std::min(std::max(a, kAccuracyClampLo), kAccuracyClampHi);
}

/// Log-odds of a clamped accuracy, ln(a/(1-a)). The m-dependent part of a
/// vote weight is added separately (see workerConfidence).
inline double logOdds(double a) noexcept {
    a = clampAccuracy(a);
    return std::log(a) - std::log1p(-a);
}

enum class DomainMode {
    Fixed,      // the label set is the whole domain; m = labels.size()
    Estimated,  // labels only bound what was seen; m is estimated per observation
};

/// The set of answers a question can take. In Estimated mode the effective
/// domain size is inferred from the distinct answers actually observed.
struct AnswerDomain {
    std::vector<std::string> labels;
    DomainMode mode = DomainMode::Fixed;

    static AnswerDomain fixed(std::vector<std::string> labels) {
        AnswerDomain d;
        d.labels = std::move(labels);
        d.mode = DomainMode::Fixed;
        d.validate();
        return d;
    }

    static AnswerDomain estimated(std::vector<std::string> labels) {
        AnswerDomain d;
        d.labels = std::move(labels);
        d.mode = DomainMode::Estimated;
        d.validate();
        return d;
    }

    std::size_t size() const noexcept { return labels.size(); }

    bool contains(std::string_view label) const {
        return std::find(labels.begin(), labels.end(), label) != labels.end();
    }

    void validate() const {
        if (labels.empty()) throw Error("answer domain has no labels");
        if (mode == DomainMode::Fixed && labels.size() < 2)
            throw DomainTooSmall("fixed answer domain needs at least 2 labels");
        std::set<std::string_view> seen;
        for (const auto& l : labels) {
            if (l.empty()) throw Error("answer domain contains an empty label");
            if (!seen.insert(l).second)
                throw Error("duplicate label in answer domain: " + l);
        }
    }
};

/// One worker's reliability record. The accuracy is the probability the
/// worker answers any question correctly; golden tallies are the evidence
/// behind it. The log-odds weight is cached because fusion reuses it for
/// every vote the worker casts.
struct WorkerProfile {
    std::string worker_id;
    double accuracy = 0.5;
    std::uint64_t golden_correct = 0;
    std::uint64_t golden_total = 0;

    WorkerProfile() = default;
    WorkerProfile(std::string id, double a, std::uint64_t correct = 0, std::uint64_t total = 0)
        : worker_id(std::move(id)),
          accuracy(clampAccuracy(a)),
          golden_correct(correct),
          golden_total(total),
          log_odds_(logOdds(accuracy)) {
        if (correct > total)
            throw Error("worker " + worker_id + ": golden_correct exceeds golden_total");
    }

    double logOddsWeight() const noexcept { return log_odds_; }

  private:
    double log_odds_ = 0.0;
};

/// Ordered profile map; iteration order (and hence serialization order) is
/// deterministic by worker id.
using ProfileMap = std::map<std::string, WorkerProfile>;

struct Vote {
    std::string worker_id;
    std::string answer;
    std::size_t arrival_index = 0;       // position in arrival order, 0-based
    std::vector<std::string> keywords;   // free-text rationale tokens, may be empty
};

/// The votes received for one question. `complete()` means every planned
/// vote arrived; partial observations are the online case.
struct Observation {
    std::string question_id;
    std::vector<Vote> votes;
    std::size_t n_total = 0;  // planned vote count

    bool complete() const noexcept { return votes.size() == n_total; }

    std::size_t distinctAnswers() const {
        std::set<std::string_view> seen;
        for (const auto& v : votes) seen.insert(v.answer);
        return seen.size();
    }

    void validate(const AnswerDomain& domain) const {
        if (votes.size() > n_total)
            throw Error("observation " + question_id + " has more votes than planned");
        std::set<std::string_view> workers;
        for (const auto& v : votes) {
            if (!workers.insert(v.worker_id).second)
                throw DuplicateWorker("worker " + v.worker_id + " voted twice on " + question_id);
            if (!domain.contains(v.answer))
                throw Error("vote answer '" + v.answer + "' not in domain of " + question_id);
        }
    }
};

struct Question {
    std::string question_id;
    AnswerDomain domain;
    bool is_golden = false;
    std::optional<std::string> ground_truth;  // required when is_golden

    void validate() const {
        domain.validate();
        if (is_golden) {
            if (!ground_truth) throw Error("golden question " + question_id + " lacks ground truth");
            if (!domain.contains(*ground_truth))
                throw Error("ground truth of " + question_id + " not in its domain");
        }
    }
};

/// A standing query: what to ask, how sure the answer must be, and how much
/// crowd traffic it will generate per time window.
struct QuerySpec {
    std::vector<std::string> keywords;
    double required_accuracy = 0.9;   // target C in (0,1)
    AnswerDomain domain;
    std::int64_t timestamp = 0;
    double window = 1.0;              // time units covered, > 0
    std::uint64_t items_per_unit = 0; // arriving items per time unit

    void validate() const {
        if (!(required_accuracy > 0.0 && required_accuracy < 1.0))
            throw InvalidAccuracyTarget("required accuracy must lie in (0,1)");
        if (!(window > 0.0)) throw Error("query window must be positive");
        domain.validate();
    }
};

/// Per-assignment platform economics: a worker fee plus the platform surcharge.
struct CostModel {
    double worker_fee = 0.0;    // paid to the worker per assignment
    double platform_fee = 0.0;  // platform cut per assignment
};

/// Cost of publishing one HIT answered by n workers.
inline double hitCost(const CostModel& cost, std::int64_t n) {
    if (n < 1) throw Error("a hit needs at least one assignment");
    return (cost.worker_fee + cost.platform_fee) * static_cast<double>(n);
}

/// Cost of serving a query over its window: every item becomes a HIT.
inline double queryCost(const CostModel& cost, const QuerySpec& query, std::int64_t n) {
    query.validate();
    return hitCost(cost, n) * query.window * static_cast<double>(query.items_per_unit);
}

/// One published batch: B questions, of which golden_count carry known
/// answers for worker assessment, replicated to `replication` workers.
struct HitBatch {
    std::vector<Question> questions;
    std::size_t golden_count = 0;
    std::int64_t replication = 1;  // workers per question, odd
    double per_hit_cost = 0.0;
};

namespace detail {

/// ceil that tolerates float dust just above an integer boundary
/// (0.3 * 10 must count as 3, not 4).
inline std::int64_t ceilSafe(double x) {
    return static_cast<std::int64_t>(std::ceil(x - 1e-9));
}

/// Compensated accumulator for sums of many small probabilities.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) noexcept {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

}  // namespace detail

/// Assemble a HIT of `batch_size` questions with ceil(alpha * batch_size)
/// goldens mixed in at seed-determined positions. Golden questions are a
/// uniform sample of the pool; regular questions keep their input order.
inline HitBatch buildHitBatch(const std::vector<Question>& new_questions,
                              const std::vector<Question>& golden_pool,
                              double alpha,
                              std::size_t batch_size,
                              std::uint64_t rng_seed,
                              std::int64_t replication = 1,
                              const CostModel& cost = {}) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw Error("golden rate must lie in [0,1)");
    if (batch_size == 0) throw Error("batch size must be positive");
    if (replication < 1 || replication % 2 == 0)
        throw EvenWorkerCount("replication must be a positive odd integer");

    const auto golden_count =
        static_cast<std::size_t>(detail::ceilSafe(alpha * static_cast<double>(batch_size)));
    const std::size_t regular_count = batch_size - golden_count;
    if (golden_pool.size() < golden_count)
        throw InsufficientGoldens("golden pool holds " + std::to_string(golden_pool.size()) +
                                  " questions, batch needs " + std::to_string(golden_count));
    if (new_questions.size() < regular_count)
        throw InsufficientQuestions("have " + std::to_string(new_questions.size()) +
                                    " questions, batch needs " + std::to_string(regular_count));

    for (const auto& q : golden_pool)
        if (!q.is_golden || !q.ground_truth)
            throw Error("golden pool contains a question without ground truth");

    std::mt19937_64 rng(rng_seed);

    // uniform subset of the pool, input order preserved
    std::vector<std::size_t> pool_idx(golden_pool.size());
    for (std::size_t i = 0; i < pool_idx.size(); ++i) pool_idx[i] = i;
    std::vector<std::size_t> picked;
    picked.reserve(golden_count);
    std::sample(pool_idx.begin(), pool_idx.end(), std::back_inserter(picked), golden_count, rng);

    // uniform subset of batch positions for the goldens (sorted by construction)
    std::vector<std::size_t> positions(batch_size);
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
    std::vector<std::size_t> golden_pos;
    golden_pos.reserve(golden_count);
    std::sample(positions.begin(), positions.end(), std::back_inserter(golden_pos), golden_count,
                rng);

    HitBatch batch;
    batch.questions.resize(batch_size);
    batch.golden_count = golden_count;
    batch.replication = replication;
    batch.per_hit_cost = hitCost(cost, replication);

    std::size_t g = 0, r = 0;
    for (std::size_t pos = 0; pos < batch_size; ++pos) {
        if (g < golden_count && golden_pos[g] == pos) {
            batch.questions[pos] = golden_pool[picked[g]];
            ++g;
        } else {
            batch.questions[pos] = new_questions[r++];
        }
    }
    return batch;
}

}  // namespace crowdgate
