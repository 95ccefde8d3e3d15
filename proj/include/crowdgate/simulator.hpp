#pragma once

// Seeded Monte Carlo crowd: draw a worker pool from an accuracy
// distribution, calibrate the engine's profiles through golden questions,
// answer replicated questions, and measure what each decision strategy
// achieves and spends. Every random draw comes from a stream derived from
// (seed, purpose, trial, index), so runs are bit-reproducible.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "crowdgate/core.hpp"
#include "crowdgate/errors.hpp"
#include "crowdgate/online.hpp"
#include "crowdgate/prediction.hpp"
#include "crowdgate/rng.hpp"
#include "crowdgate/sampling.hpp"
#include "crowdgate/verification.hpp"

namespace crowdgate {

struct AccuracyDistribution {
    enum class Family { Beta, TruncatedNormal, PointMass };

    Family family = Family::PointMass;
    double beta_alpha = 0.0;   // Beta
    double beta_beta = 0.0;
    double normal_mean = 0.0;  // TruncatedNormal
    double normal_sd = 0.0;
    double lo = 0.0;
    double hi = 1.0;
    double mu = 0.5;           // PointMass

    static AccuracyDistribution beta(double a, double b) {
        AccuracyDistribution d;
        d.family = Family::Beta;
        d.beta_alpha = a;
        d.beta_beta = b;
        d.validate();
        return d;
    }

    static AccuracyDistribution truncatedNormal(double mean, double sd, double lo, double hi) {
        AccuracyDistribution d;
        d.family = Family::TruncatedNormal;
        d.normal_mean = mean;
        d.normal_sd = sd;
        d.lo = lo;
        d.hi = hi;
        d.validate();
        return d;
    }

    static AccuracyDistribution pointMass(double mu) {
        AccuracyDistribution d;
        d.family = Family::PointMass;
        d.mu = mu;
        d.validate();
        return d;
    }

    void validate() const {
        switch (family) {
            case Family::Beta:
                if (!(beta_alpha > 0.0) || !(beta_beta > 0.0))
                    throw InvalidDistribution("beta shape parameters must be positive");
                break;
            case Family::TruncatedNormal: {
                if (!(normal_sd > 0.0))
                    throw InvalidDistribution("truncated normal needs positive sd");
                if (!(lo >= 0.0 && lo < hi && hi <= 1.0))
                    throw InvalidDistribution("truncation window must satisfy 0 <= lo < hi <= 1");
                if (truncationMass() < 1e-12)
                    throw InvalidDistribution("truncation window carries no probability mass");
                break;
            }
            case Family::PointMass:
                if (!(mu > 0.0 && mu < 1.0))
                    throw InvalidDistribution("point mass must lie in (0,1)");
                break;
        }
    }

    /// Mean accuracy of the distribution (exact, not sampled).
    double meanAccuracy() const {
        switch (family) {
            case Family::Beta: return beta_alpha / (beta_alpha + beta_beta);
            case Family::TruncatedNormal: {
                const double a = (lo - normal_mean) / normal_sd;
                const double b = (hi - normal_mean) / normal_sd;
                const double z = truncationMass();
                return normal_mean + normal_sd * (stdNormalPdf(a) - stdNormalPdf(b)) / z;
            }
            case Family::PointMass: return mu;
        }
        return 0.5;
    }

    double sample(std::mt19937_64& rng) const {
        switch (family) {
            case Family::Beta: {
                std::gamma_distribution<double> ga(beta_alpha, 1.0);
                std::gamma_distribution<double> gb(beta_beta, 1.0);
                const double u = ga(rng);
                const double v = gb(rng);
                return clampAccuracy(u + v == 0.0 ? 0.5 : u / (u + v));
            }
            case Family::TruncatedNormal: {
                std::normal_distribution<double> normal(normal_mean, normal_sd);
                for (int i = 0; i < 100000; ++i) {
                    const double x = normal(rng);
                    if (x >= lo && x <= hi) return clampAccuracy(x);
                }
                throw InvalidDistribution("truncated normal rejection sampling failed");
            }
            case Family::PointMass: return clampAccuracy(mu);
        }
        return 0.5;
    }

  private:
    static double stdNormalPdf(double x) {
        return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::acos(-1.0));
    }
    static double stdNormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
    double truncationMass() const {
        const double a = (lo - normal_mean) / normal_sd;
        const double b = (hi - normal_mean) / normal_sd;
        return stdNormalCdf(b) - stdNormalCdf(a);
    }
};

/// One reproducible experiment: who answers, what is asked, how decisions
/// are made, and what everything costs.
struct Scenario {
    std::uint64_t seed = 1;
    std::size_t pool_size = 100;
    AccuracyDistribution accuracy_dist = AccuracyDistribution::beta(7.0, 3.0);
    AnswerDomain domain = AnswerDomain::fixed({"neg", "neu", "pos"});
    std::size_t num_questions = 1000;
    double target_accuracy = 0.9;
    TerminationStrategy strategy = TerminationStrategy::None;
    SamplingConfig sampling{};
    CostModel cost{};
    std::size_t trials = 1;

    std::size_t calibration_rounds = 2;         // golden HITs scored before the main phase
    bool use_true_accuracies = false;           // oracle mode: engine sees the true pool
    std::optional<std::int64_t> replication_override;  // force the per-question worker count
    double wrong_answer_skew = 0.0;             // 0 = wrong answers uniform over other labels

    void validate() const {
        accuracy_dist.validate();
        domain.validate();
        sampling.validate();
        if (pool_size < 1) throw Error("pool must hold at least one worker");
        if (num_questions < 1) throw Error("scenario needs at least one question");
        if (trials < 1) throw Error("scenario needs at least one trial");
        if (!(target_accuracy > 0.0 && target_accuracy < 1.0))
            throw InvalidAccuracyTarget("target accuracy must lie in (0,1)");
        if (!use_true_accuracies && calibration_rounds < 1)
            throw Error("estimated-profile mode needs at least one calibration round");
        if (replication_override && (*replication_override < 1 || *replication_override % 2 == 0))
            throw EvenWorkerCount("replication override must be a positive odd integer");
        if (!(wrong_answer_skew >= 0.0 && wrong_answer_skew < 1.0))
            throw Error("wrong-answer skew must lie in [0,1)");
    }
};

/// Simulated crowd with known true accuracies.
struct WorkerPool {
    std::vector<WorkerProfile> workers;

    double trueMean() const {
        if (workers.empty()) throw PoolTooSmall("empty worker pool");
        detail::KahanSum acc;
        for (const auto& w : workers) acc.add(w.accuracy);
        return acc.sum / static_cast<double>(workers.size());
    }

    ProfileMap asProfiles() const {
        ProfileMap m;
        for (const auto& w : workers) m.emplace(w.worker_id, w);
        return m;
    }
};

/// Draw pool_size workers i.i.d. from the accuracy distribution.
inline WorkerPool drawPool(const AccuracyDistribution& dist, std::size_t pool_size,
                           std::uint64_t seed) {
    dist.validate();
    if (pool_size < 1) throw PoolTooSmall("pool must hold at least one worker");
    auto rng = deriveRng(seed, Stream::PoolDraw);
    int width = 1;
    for (std::size_t v = pool_size; v >= 10; v /= 10) ++width;
    WorkerPool pool;
    pool.workers.reserve(pool_size);
    for (std::size_t i = 0; i < pool_size; ++i) {
        std::string id = std::to_string(i);
        id.insert(0, static_cast<std::size_t>(width) - std::min<std::size_t>(width, id.size()),
                  '0');
        pool.workers.emplace_back("w" + id, dist.sample(rng));
    }
    return pool;
}

/// One worker answers one question: the truth with probability a, otherwise
/// one of the other labels (uniform when skew is 0, geometrically tilted
/// toward earlier labels otherwise).
inline std::string simulateAnswer(double accuracy, const std::string& ground_truth,
                                  const AnswerDomain& domain, std::mt19937_64& rng,
                                  double skew = 0.0) {
    if (domain.size() < 2) throw DomainTooSmall("answer simulation needs at least 2 labels");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < clampAccuracy(accuracy)) return ground_truth;

    std::vector<const std::string*> others;
    others.reserve(domain.size() - 1);
    for (const auto& l : domain.labels)
        if (l != ground_truth) others.push_back(&l);
    if (skew == 0.0) {
        std::uniform_int_distribution<std::size_t> pick(0, others.size() - 1);
        return *others[pick(rng)];
    }
    double total = 0.0, w = 1.0;
    std::vector<double> weights(others.size());
    for (std::size_t i = 0; i < others.size(); ++i) {
        weights[i] = w;
        total += w;
        w *= (1.0 - skew);
    }
    double u = unit(rng) * total;
    for (std::size_t i = 0; i < others.size(); ++i) {
        u -= weights[i];
        if (u <= 0.0) return *others[i];
    }
    return *others.back();
}

/// Everything recorded about one question's collection, self-contained
/// enough for the replay subcommands: domain, consumed votes in arrival
/// order, the voters' engine-side profiles, and the cost charged.
struct TranscriptQuestion {
    std::string question_id;
    std::string hit_id;
    AnswerDomain domain;
    bool is_golden = false;
    std::optional<std::string> ground_truth;
    std::size_t n_planned = 0;
    std::vector<Vote> votes;                  // consumed prefix, arrival_index 0..n'-1
    std::vector<std::string> workers_drawn;   // all n drawn workers, arrival order
    double cost = 0.0;                        // fees charged for consumed votes only
    ProfileMap profiles;                      // engine profiles of the recorded voters

    Observation observation() const {
        Observation obs;
        obs.question_id = question_id;
        obs.votes = votes;
        obs.n_total = n_planned;
        return obs;
    }
};

struct Transcript {
    std::vector<TranscriptQuestion> questions;
};

/// Result of collecting one question.
struct QuestionRun {
    TranscriptQuestion record;
    std::vector<Vote> all_votes;  // full replication, arrival order
    ConfidenceTable table;        // fused table at stop time
    std::optional<std::string> half_winner;      // baselines on the full votes
    std::optional<std::string> majority_winner;
    std::size_t consumed = 0;
};

/// Publish one question to n distinct, uniformly drawn workers, generate
/// all answers and a random arrival order, then let the online session
/// consume votes until the strategy stops or the votes run out. The
/// baselines always see the full vote set; only consumed votes are paid.
inline QuestionRun runHit(const Scenario& scenario, const WorkerPool& pool,
                          const ProfileMap& engine_profiles, double mu_remaining,
                          const Question& question, std::int64_t n, std::uint64_t trial,
                          std::uint64_t question_index) {
    if (n < 1 || n % 2 == 0) throw EvenWorkerCount("replication must be a positive odd integer");
    if (pool.workers.size() < static_cast<std::size_t>(n))
        throw PoolTooSmall("pool of " + std::to_string(pool.workers.size()) +
                           " cannot seat " + std::to_string(n) + " workers");
    question.validate();
    if (!question.ground_truth) throw Error("simulated question needs a ground truth");

    auto worker_rng = deriveRng(scenario.seed, Stream::HitWorkers, trial, question_index);
    std::vector<std::size_t> idx(pool.workers.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<std::size_t> drawn;
    drawn.reserve(static_cast<std::size_t>(n));
    std::sample(idx.begin(), idx.end(), std::back_inserter(drawn),
                static_cast<std::size_t>(n), worker_rng);
    std::shuffle(drawn.begin(), drawn.end(), worker_rng);  // arrival order

    auto answer_rng = deriveRng(scenario.seed, Stream::HitAnswers, trial, question_index);
    QuestionRun run;
    run.all_votes.reserve(drawn.size());
    for (std::size_t i = 0; i < drawn.size(); ++i) {
        const auto& worker = pool.workers[drawn[i]];
        Vote vote;
        vote.worker_id = worker.worker_id;
        vote.answer = simulateAnswer(worker.accuracy, *question.ground_truth, question.domain,
                                     answer_rng, scenario.wrong_answer_skew);
        vote.arrival_index = i;
        run.all_votes.push_back(std::move(vote));
    }

    OnlineSession session(question.domain, static_cast<std::size_t>(n), mu_remaining,
                          scenario.strategy, VerificationConfig{}, question.question_id);
    for (const auto& vote : run.all_votes) {
        auto it = engine_profiles.find(vote.worker_id);
        if (it == engine_profiles.end())
            throw MissingProfile("no engine profile for worker " + vote.worker_id);
        run.table = session.pushAnswer(vote, it->second);
        run.consumed += 1;
        if (session.state() != SessionState::Collecting) break;
    }

    Observation full;
    full.question_id = question.question_id;
    full.votes = run.all_votes;
    full.n_total = static_cast<std::size_t>(n);
    run.half_winner = halfVoting(full);
    run.majority_winner = majorityVoting(full);

    auto& rec = run.record;
    rec.question_id = question.question_id;
    rec.hit_id = "t" + std::to_string(trial) + "_h" + std::to_string(question_index);
    rec.domain = question.domain;
    rec.is_golden = question.is_golden;
    rec.ground_truth = question.ground_truth;
    rec.n_planned = static_cast<std::size_t>(n);
    rec.votes.assign(run.all_votes.begin(),
                     run.all_votes.begin() + static_cast<std::ptrdiff_t>(run.consumed));
    for (const auto& vote : rec.votes)
        rec.profiles.emplace(vote.worker_id, engine_profiles.at(vote.worker_id));
    for (const auto& i : drawn) rec.workers_drawn.push_back(pool.workers[i].worker_id);
    rec.cost = hitCost(scenario.cost, 1) * static_cast<double>(run.consumed);
    return run;
}

namespace detail {

/// Truths and per-worker answers for one calibration round's golden slots.
/// Streams are keyed by (trial, round, worker), so any subset of questions
/// can be scored without disturbing other draws.
struct CalibrationRound {
    std::vector<std::string> truths;                    // per golden slot
    std::vector<std::vector<std::string>> answers;      // [worker][slot]
};

inline CalibrationRound calibrationRound(const Scenario& scenario, const WorkerPool& pool,
                                         std::uint64_t trial, std::uint64_t round,
                                         std::size_t slots) {
    CalibrationRound data;
    auto truth_rng = deriveRng(scenario.seed, Stream::Calibration, trial, round);
    std::uniform_int_distribution<std::size_t> pick(0, scenario.domain.size() - 1);
    data.truths.reserve(slots);
    for (std::size_t i = 0; i < slots; ++i)
        data.truths.push_back(scenario.domain.labels[pick(truth_rng)]);

    data.answers.resize(pool.workers.size());
    for (std::size_t w = 0; w < pool.workers.size(); ++w) {
        auto rng = deriveRng(scenario.seed, Stream::Calibration, trial,
                             (round << 20) ^ (w + 1) ^ 0x8000000000000000ULL);
        auto& row = data.answers[w];
        row.reserve(slots);
        for (std::size_t i = 0; i < slots; ++i)
            row.push_back(simulateAnswer(pool.workers[w].accuracy, data.truths[i],
                                         scenario.domain, rng, scenario.wrong_answer_skew));
    }
    return data;
}

}  // namespace detail

/// Estimate every pool worker's accuracy by publishing calibration HITs
/// with golden questions and scoring them; profiles accumulate across
/// rounds with the configured smoothing.
inline ProfileMap calibrateProfiles(const Scenario& scenario, const WorkerPool& pool,
                                    std::uint64_t trial) {
    const auto& cfg = scenario.sampling;
    const auto golden_count = static_cast<std::size_t>(
        detail::ceilSafe(cfg.alpha * static_cast<double>(cfg.hit_size)));
    if (golden_count == 0)
        throw NoGoldens("calibration requires a positive golden rate");

    ProfileMap profiles;
    for (const auto& w : pool.workers)
        profiles.emplace(w.worker_id, WorkerProfile(w.worker_id, 0.5));

    for (std::uint64_t round = 0; round < scenario.calibration_rounds; ++round) {
        const auto data = detail::calibrationRound(scenario, pool, trial, round, golden_count);

        // run the real batch assembly so golden placement follows the
        // production path, then score per worker
        std::vector<Question> goldens, fillers;
        const std::string stem =
            "cal_t" + std::to_string(trial) + "_r" + std::to_string(round) + "_";
        for (std::size_t i = 0; i < golden_count; ++i) {
            Question q;
            q.question_id = stem + "g" + std::to_string(i);
            q.domain = scenario.domain;
            q.is_golden = true;
            q.ground_truth = data.truths[i];
            goldens.push_back(std::move(q));
        }
        for (std::size_t i = 0; i < cfg.hit_size - golden_count; ++i) {
            Question q;
            q.question_id = stem + "q" + std::to_string(i);
            q.domain = scenario.domain;
            fillers.push_back(std::move(q));
        }
        const auto batch =
            buildHitBatch(fillers, goldens, cfg.alpha, cfg.hit_size,
                          deriveSeed(scenario.seed, Stream::BatchLayout, trial, round));

        AnswerSheet sheet;
        for (std::size_t w = 0; w < pool.workers.size(); ++w) {
            auto& per_worker = sheet[pool.workers[w].worker_id];
            for (std::size_t i = 0; i < golden_count; ++i)
                per_worker[stem + "g" + std::to_string(i)] = data.answers[w][i];
        }

        for (const auto& [worker_id, tally] : tallyGoldens(batch, sheet)) {
            auto it = profiles.find(worker_id);
            it->second = updateProfile(it->second, tally.correct, tally.total, cfg.smoothing);
        }
    }
    return profiles;
}

struct StrategyMetrics {
    std::string name;                // verification | half_voting | majority_voting
    double achieved_accuracy = 0.0;  // no-answer outcomes count as incorrect
    double no_answer_rate = 0.0;     // always 0 for verification
    double mean_votes = 0.0;         // votes actually consumed by the strategy
};

struct MetricsRecord {
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    std::size_t num_questions = 0;   // per trial
    double mu_true = 0.0;
    double mu_estimated = 0.0;       // what the engine believed
    std::int64_t conservative_n = 0; // from the final trial's prediction
    std::int64_t refined_n = 0;
    double mean_replication = 0.0;   // planned workers per question, averaged over trials
    std::vector<StrategyMetrics> per_strategy;
    double worker_savings = 0.0;     // 1 - consumed / planned votes
    double calibration_cost = 0.0;
    double collection_cost = 0.0;
    double total_cost = 0.0;
};

/// Run the full pipeline: calibrate profiles (or take the oracle's), size
/// the replication for the target accuracy, collect every question under
/// the scenario's strategy, and score all three decision rules against the
/// ground truth. Optionally records the transcript of every question.
inline MetricsRecord runExperiment(const Scenario& scenario, Transcript* transcript = nullptr) {
    scenario.validate();

    MetricsRecord metrics;
    metrics.seed = scenario.seed;
    metrics.trials = scenario.trials;
    metrics.num_questions = scenario.num_questions;

    std::uint64_t verify_correct = 0, half_correct = 0, majority_correct = 0;
    std::uint64_t half_none = 0, majority_none = 0, consumed_total = 0, planned_total = 0;
    detail::KahanSum mu_true_acc, mu_est_acc, calibration_cost, collection_cost;

    for (std::uint64_t trial = 0; trial < scenario.trials; ++trial) {
        const auto pool = drawPool(scenario.accuracy_dist, scenario.pool_size,
                                   deriveSeed(scenario.seed, Stream::PoolDraw, trial));
        mu_true_acc.add(pool.trueMean());

        ProfileMap profiles;
        if (scenario.use_true_accuracies) {
            profiles = pool.asProfiles();
        } else {
            profiles = calibrateProfiles(scenario, pool, trial);
            calibration_cost.add(static_cast<double>(scenario.calibration_rounds) *
                                 hitCost(scenario.cost, static_cast<std::int64_t>(
                                                            scenario.pool_size)));
        }
        const double mu_est = meanAccuracy(profiles);
        mu_est_acc.add(mu_est);

        const auto prediction = refinedWorkerCount(scenario.target_accuracy, mu_est);
        metrics.conservative_n = prediction.conservative_n;
        metrics.refined_n = prediction.refined_n;
        const std::int64_t n = scenario.replication_override.value_or(prediction.refined_n);
        planned_total += static_cast<std::uint64_t>(n) * scenario.num_questions;

        auto truth_rng = deriveRng(scenario.seed, Stream::GroundTruth, trial);
        std::uniform_int_distribution<std::size_t> pick(0, scenario.domain.size() - 1);

        for (std::uint64_t qi = 0; qi < scenario.num_questions; ++qi) {
            Question question;
            question.question_id = "t" + std::to_string(trial) + "_q" + std::to_string(qi);
            question.domain = scenario.domain;
            question.ground_truth = scenario.domain.labels[pick(truth_rng)];

            auto run = runHit(scenario, pool, profiles, mu_est, question, n, trial, qi);

            const auto& truth = *question.ground_truth;
            if (run.table.best == truth) ++verify_correct;
            if (run.half_winner) {
                if (*run.half_winner == truth) ++half_correct;
            } else {
                ++half_none;
            }
            if (run.majority_winner) {
                if (*run.majority_winner == truth) ++majority_correct;
            } else {
                ++majority_none;
            }
            consumed_total += run.consumed;
            collection_cost.add(run.record.cost);
            if (transcript) transcript->questions.push_back(std::move(run.record));
        }
    }

    const auto total_q = static_cast<double>(scenario.trials * scenario.num_questions);
    metrics.mu_true = mu_true_acc.sum / static_cast<double>(scenario.trials);
    metrics.mu_estimated = mu_est_acc.sum / static_cast<double>(scenario.trials);
    metrics.mean_replication = static_cast<double>(planned_total) / total_q;
    const double mean_consumed = static_cast<double>(consumed_total) / total_q;
    metrics.per_strategy = {
        {"verification", static_cast<double>(verify_correct) / total_q, 0.0, mean_consumed},
        {"half_voting", static_cast<double>(half_correct) / total_q,
         static_cast<double>(half_none) / total_q, metrics.mean_replication},
        {"majority_voting", static_cast<double>(majority_correct) / total_q,
         static_cast<double>(majority_none) / total_q, metrics.mean_replication},
    };
    metrics.worker_savings =
        1.0 - static_cast<double>(consumed_total) / static_cast<double>(planned_total);
    metrics.calibration_cost = calibration_cost.sum;
    metrics.collection_cost = collection_cost.sum;
    metrics.total_cost = metrics.calibration_cost + metrics.collection_cost;
    return metrics;
}

}  // namespace crowdgate
