// Acceptance gate for the crowd-answer engine: nine end-to-end guarantees,
// each validated in one run of this binary and reported as a single
// [PASS]/[FAIL] line. The exit code is the number of failed checks, so a
// zero exit means every guarantee held, within its runtime budget where one
// applies. Cross-checks lean on the independent long-double recomputations
// in oracles.hpp rather than on the library's own code paths.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "crowdgate/crowdgate.hpp"
#include "oracles.hpp"

namespace {

using namespace crowdgate;

struct CheckContext {
    std::vector<std::string> failures;
    std::size_t dropped = 0;

    void require(bool ok, std::string what) {
        if (ok) return;
        if (failures.size() < 8)
            failures.push_back(std::move(what));
        else
            ++dropped;
    }
};

// Every simulated experiment run by any check lands here so the abstention
// guarantee (check 6) can be asserted over all of them, not just its own.
std::vector<MetricsRecord> g_runs;

MetricsRecord runAndRecord(const Scenario& scenario) {
    auto metrics = runExperiment(scenario);
    g_runs.push_back(metrics);
    return metrics;
}

const StrategyMetrics& strategyRow(const MetricsRecord& metrics, const std::string& name) {
    for (const auto& row : metrics.per_strategy)
        if (row.name == name) return row;
    throw Error("metrics record lacks a row for " + name);
}

// ---------------------------------------------------------------------------
// 1. A five-vote example with one reliable dissenter: weighted fusion picks
//    the dissenting answer with the exact confidences, while both voting
//    baselines follow the unreliable majority.
// ---------------------------------------------------------------------------
void checkWorkedExample(CheckContext& ctx) {
    const auto domain = AnswerDomain::fixed({"neg", "neu", "pos"});
    const std::vector<std::tuple<std::string, double, std::string>> crowd = {
        {"w1", 0.54, "pos"}, {"w2", 0.31, "pos"}, {"w3", 0.49, "neu"},
        {"w4", 0.73, "neg"}, {"w5", 0.46, "pos"},
    };

    Observation obs;
    obs.question_id = "worked-example";
    obs.n_total = crowd.size();
    ProfileMap profiles;
    for (const auto& [id, accuracy, answer] : crowd) {
        Vote vote;
        vote.worker_id = id;
        vote.answer = answer;
        vote.arrival_index = obs.votes.size();
        obs.votes.push_back(vote);
        profiles.emplace(id, WorkerProfile(id, accuracy));
    }

    const auto table = verify(obs, profiles, domain);
    const std::map<std::string, double> expected = {
        {"pos", 0.329}, {"neu", 0.176}, {"neg", 0.495}};
    for (const auto& [label, value] : expected) {
        const double got = table.entries.at(label);
        ctx.require(std::abs(got - value) < 5e-4,
                    "confidence of " + label + " is " + formatDouble(got) +
                        ", expected " + formatDouble(value) + " to three decimals");
    }
    ctx.require(table.best == "neg", "fusion picked " + table.best + ", expected neg");

    const auto half = halfVoting(obs);
    const auto majority = majorityVoting(obs);
    ctx.require(half.has_value() && *half == "pos", "half voting did not pick pos");
    ctx.require(majority.has_value() && *majority == "pos", "majority voting did not pick pos");
}

// ---------------------------------------------------------------------------
// 2. Across a 50x4 grid of targets and worker accuracies, the refined count
//    meets the target, is minimal among odd counts, and the expected-accuracy
//    curve matches an independent long-double recomputation and the exact
//    heterogeneous evaluator. One spot pair is frozen outright.
// ---------------------------------------------------------------------------
void checkWorkerCountSearch(CheckContext& ctx) {
    for (int ci = 50; ci <= 99; ++ci) {
        const double c = static_cast<double>(ci) / 100.0;
        for (const double mu : {0.6, 0.7, 0.8, 0.9}) {
            const auto pred = refinedWorkerCount(c, mu);
            const double reached = expectedMajorityProb(pred.refined_n, mu);
            const auto tag = " at target " + formatDouble(c) + ", accuracy " + formatDouble(mu);

            ctx.require(pred.expected_accuracy == reached,
                        "reported expected accuracy diverges from recomputation" + tag);
            ctx.require(reached >= c, "refined count misses the target" + tag);
            if (pred.refined_n >= 3)
                ctx.require(expectedMajorityProb(pred.refined_n - 2, mu) < c,
                            "two fewer workers would still meet the target" + tag);

            const double independent = static_cast<double>(
                oracle::majorityTail(pred.refined_n, static_cast<long double>(mu)));
            ctx.require(std::abs(reached - independent) <= 1e-12,
                        "binomial tail drifts from long-double recomputation" + tag);

            const std::vector<double> uniform(static_cast<std::size_t>(pred.refined_n), mu);
            ctx.require(std::abs(exactMajorityProb(uniform) - reached) <= 1e-10,
                        "exact heterogeneous evaluator disagrees on uniform crowds" + tag);
        }
    }

    const auto spot = refinedWorkerCount(0.9, 0.7);
    ctx.require(spot.conservative_n == 29 && spot.refined_n == 9,
                "spot check expected counts 29/9, got " + std::to_string(spot.conservative_n) +
                    "/" + std::to_string(spot.refined_n));
}

// ---------------------------------------------------------------------------
// 3. Simulated end-to-end accuracy reaches the predicted level: with worker
//    accuracy 0.7 over three labels, the engine sizes nine workers per
//    question and lands at or above the predicted 0.901 (minus noise), and a
//    forced 29 workers lands at or above 0.985.
// ---------------------------------------------------------------------------
void checkSimulatedAccuracy(CheckContext& ctx) {
    Scenario scenario;
    scenario.seed = 2026;
    scenario.pool_size = 50;
    scenario.accuracy_dist = AccuracyDistribution::pointMass(0.7);
    scenario.num_questions = 10000;
    scenario.target_accuracy = 0.9;
    scenario.use_true_accuracies = true;
    scenario.trials = 1;

    const auto base = runAndRecord(scenario);
    ctx.require(base.refined_n == 9,
                "engine sized " + std::to_string(base.refined_n) + " workers, expected 9");
    const double acc9 = strategyRow(base, "verification").achieved_accuracy;
    ctx.require(acc9 >= 0.891,
                "nine-worker accuracy " + formatDouble(acc9) + " fell below 0.891");

    scenario.replication_override = 29;
    const auto wide = runAndRecord(scenario);
    const double acc29 = strategyRow(wide, "verification").achieved_accuracy;
    ctx.require(acc29 >= 0.985,
                "29-worker accuracy " + formatDouble(acc29) + " fell below 0.985");
}

// ---------------------------------------------------------------------------
// 4. Incremental fusion is order-independent: over 1000 randomized sessions
//    (up to nine votes, two to four labels), every arrival order of the same
//    votes ends in the same table as batch fusion, entry for entry.
// ---------------------------------------------------------------------------
void checkOrderIndependence(CheckContext& ctx) {
    std::mt19937_64 rng(20260822);
    std::uniform_real_distribution<double> accuracy(0.52, 0.95);
    const std::vector<std::string> alphabet = {"a", "b", "c", "d"};

    for (int session_idx = 0; session_idx < 1000; ++session_idx) {
        const auto n = static_cast<std::size_t>(1 + rng() % 9);
        const auto m = static_cast<std::size_t>(2 + rng() % 3);
        const auto domain = AnswerDomain::fixed(
            std::vector<std::string>(alphabet.begin(), alphabet.begin() + static_cast<long>(m)));

        std::vector<std::pair<Vote, WorkerProfile>> arrivals;
        Observation batch;
        batch.question_id = "s" + std::to_string(session_idx);
        batch.n_total = n;
        ProfileMap profiles;
        for (std::size_t i = 0; i < n; ++i) {
            Vote vote;
            vote.worker_id = "w" + std::to_string(i);
            vote.answer = domain.labels[rng() % m];
            vote.arrival_index = i;
            const WorkerProfile profile(vote.worker_id, accuracy(rng));
            batch.votes.push_back(vote);
            profiles.emplace(vote.worker_id, profile);
            arrivals.emplace_back(vote, profile);
        }
        const auto reference = verify(batch, profiles, domain);

        for (int perm = 0; perm < 6; ++perm) {
            auto order = arrivals;
            if (perm == 1)
                std::reverse(order.begin(), order.end());
            else if (perm >= 2)
                std::shuffle(order.begin(), order.end(), rng);

            OnlineSession session(domain, n, 0.7, TerminationStrategy::None);
            ConfidenceTable last;
            for (const auto& [vote, profile] : order) last = session.pushAnswer(vote, profile);

            bool same = last.best == reference.best &&
                        last.entries.size() == reference.entries.size() &&
                        std::abs(last.empty_confidence - reference.empty_confidence) <= 1e-9;
            if (same)
                for (const auto& [label, value] : reference.entries) {
                    const auto it = last.entries.find(label);
                    if (it == last.entries.end() || std::abs(it->second - value) > 1e-9) {
                        same = false;
                        break;
                    }
                }
            ctx.require(same, "session " + std::to_string(session_idx) + " order " +
                                  std::to_string(perm) + " diverged from batch fusion");
        }
    }
}

// ---------------------------------------------------------------------------
// 5a. Exhaustive enumeration of small sessions: the worst-case/best-case
//     bracket produced while votes are still outstanding is sound and tight
//     against every possible completion, and once the pessimistic rule says
//     stop, no completion can change the winning answer.
// ---------------------------------------------------------------------------
void enumerateBrackets(CheckContext& ctx, int m, double mu) {
    const std::vector<std::string> alphabet = {"a", "b", "c"};
    const auto domain = AnswerDomain::fixed(
        std::vector<std::string>(alphabet.begin(), alphabet.begin() + m));
    const double cbar = std::max(workerConfidence(mu, m), 0.0);
    const auto label_index = [&](const std::string& label) {
        return static_cast<int>(std::find(domain.labels.begin(), domain.labels.end(), label) -
                                domain.labels.begin());
    };

    for (const std::size_t n_total : {3u, 5u, 7u}) {
        for (std::size_t v = 1; v < n_total; ++v) {
            std::uint64_t partial_count = 1;
            for (std::size_t i = 0; i < v; ++i) partial_count *= static_cast<std::uint64_t>(m);

            for (std::uint64_t code = 0; code < partial_count; ++code) {
                OnlineSession session(domain, n_total, mu, TerminationStrategy::None);
                std::vector<std::pair<int, double>> observed;
                std::uint64_t rest = code;
                for (std::size_t i = 0; i < v; ++i) {
                    const int label = static_cast<int>(rest % static_cast<std::uint64_t>(m));
                    rest /= static_cast<std::uint64_t>(m);
                    Vote vote;
                    vote.worker_id = "w" + std::to_string(i);
                    vote.answer = domain.labels[static_cast<std::size_t>(label)];
                    session.pushAnswer(vote, WorkerProfile(vote.worker_id, mu));
                    observed.emplace_back(label, mu);
                }

                const auto eval = session.evaluateTermination();
                const int r1 = label_index(eval.r1);
                const std::size_t q = n_total - v;
                std::uint64_t completion_count = 1;
                for (std::size_t i = 0; i < q; ++i)
                    completion_count *= static_cast<std::uint64_t>(m);

                long double lowest_r1 = 2.0L;
                long double highest_rival = -1.0L;
                bool stable = true;
                for (std::uint64_t comp = 0; comp < completion_count; ++comp) {
                    std::vector<int> completion;
                    std::uint64_t c = comp;
                    for (std::size_t i = 0; i < q; ++i) {
                        completion.push_back(static_cast<int>(c % static_cast<std::uint64_t>(m)));
                        c /= static_cast<std::uint64_t>(m);
                    }
                    const auto rho = oracle::completedConfidences(observed, m, completion, cbar);
                    lowest_r1 = std::min(lowest_r1, rho[static_cast<std::size_t>(r1)]);
                    for (int j = 0; j < m; ++j) {
                        if (j == r1) continue;
                        highest_rival = std::max(highest_rival, rho[static_cast<std::size_t>(j)]);
                        if (eval.min_p1 > eval.max_p2 &&
                            !(rho[static_cast<std::size_t>(r1)] >
                              rho[static_cast<std::size_t>(j)] - 1e-12))
                            stable = false;
                    }
                }

                const auto tag = "m=" + std::to_string(m) + " mu=" + formatDouble(mu) +
                                 " n=" + std::to_string(n_total) + " code=" + std::to_string(code);
                ctx.require(static_cast<long double>(eval.min_p1) <= lowest_r1 + 1e-9L &&
                                static_cast<long double>(eval.min_p1) >= lowest_r1 - 1e-9L,
                            "worst-case leader bound is not tight at " + tag);
                ctx.require(static_cast<long double>(eval.max_p2) >= highest_rival - 1e-9L &&
                                static_cast<long double>(eval.max_p2) <= highest_rival + 1e-9L,
                            "best-case rival bound is not tight at " + tag);
                ctx.require(stable, "a completion overturned a stopped leader at " + tag);
            }
        }
    }
}

// 5b. Seeded two-label simulations: planned-vote savings are ordered
//     optimistic >= mixed >= pessimistic >= none, the pessimistic rule still
//     saves real votes, and (for identical workers) stopping early never
//     changes the verdicts.
void checkTerminationSavings(CheckContext& ctx) {
    for (int m : {2, 3}) {
        for (double mu : {0.6, 0.75}) enumerateBrackets(ctx, m, mu);
    }

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        for (const bool point_mass : {true, false}) {
            Scenario scenario;
            scenario.seed = seed;
            scenario.pool_size = 30;
            scenario.accuracy_dist = point_mass ? AccuracyDistribution::pointMass(0.8)
                                                : AccuracyDistribution::beta(7.0, 3.0);
            scenario.domain = AnswerDomain::fixed({"a", "b"});
            scenario.num_questions = 300;
            scenario.target_accuracy = 0.9;
            scenario.use_true_accuracies = true;
            scenario.replication_override = 9;
            scenario.trials = 1;

            std::map<std::string, MetricsRecord> by_strategy;
            for (const auto strategy :
                 {TerminationStrategy::None, TerminationStrategy::MinMax,
                  TerminationStrategy::MinExp, TerminationStrategy::ExpMax}) {
                scenario.strategy = strategy;
                by_strategy.emplace(strategyName(strategy), runAndRecord(scenario));
            }

            const double none = by_strategy.at("none").worker_savings;
            const double minmax = by_strategy.at("minmax").worker_savings;
            const double minexp = by_strategy.at("minexp").worker_savings;
            const double expmax = by_strategy.at("expmax").worker_savings;
            const auto tag = " (seed " + std::to_string(seed) +
                             (point_mass ? ", identical workers)" : ", beta workers)");

            ctx.require(none == 0.0, "collecting every vote reported nonzero savings" + tag);
            ctx.require(minmax > 0.0, "pessimistic stopping saved nothing" + tag);
            ctx.require(expmax >= minexp && minexp >= minmax && minmax >= 0.0,
                        "savings out of order: " + formatDouble(expmax) + " / " +
                            formatDouble(minexp) + " / " + formatDouble(minmax) + tag);
            if (point_mass) {
                const double acc_none =
                    strategyRow(by_strategy.at("none"), "verification").achieved_accuracy;
                const double acc_minmax =
                    strategyRow(by_strategy.at("minmax"), "verification").achieved_accuracy;
                ctx.require(acc_none == acc_minmax,
                            "pessimistic stopping changed a verdict" + tag);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// 6. Half voting abstains at least as often as majority voting on every
//    simulated run this binary produced, and with barely-competent workers
//    over three labels it genuinely does abstain.
// ---------------------------------------------------------------------------
void checkAbstentionOrdering(CheckContext& ctx) {
    for (const std::uint64_t seed : {1u, 7u, 99u}) {
        Scenario scenario;
        scenario.seed = seed;
        scenario.pool_size = 25;
        scenario.accuracy_dist = AccuracyDistribution::pointMass(0.55);
        scenario.num_questions = 400;
        scenario.target_accuracy = 0.9;
        scenario.use_true_accuracies = true;
        scenario.replication_override = 5;
        scenario.trials = 1;

        const auto metrics = runAndRecord(scenario);
        const double half = strategyRow(metrics, "half_voting").no_answer_rate;
        ctx.require(half > 0.0, "half voting never abstained at seed " + std::to_string(seed));
    }

    ctx.require(!g_runs.empty(), "no simulated runs were recorded");
    for (std::size_t i = 0; i < g_runs.size(); ++i) {
        const double half = strategyRow(g_runs[i], "half_voting").no_answer_rate;
        const double majority = strategyRow(g_runs[i], "majority_voting").no_answer_rate;
        ctx.require(half >= majority,
                    "run " + std::to_string(i) + " had half voting abstain less (" +
                        formatDouble(half) + ") than majority voting (" + formatDouble(majority) +
                        ")");
    }
}

// ---------------------------------------------------------------------------
// 7. Domain-size estimation from repeated answers: for two to four agreeing
//    workers, every candidate size that would make the agreement plausibly
//    coincidental (probability above 5%) lies strictly above each feasible
//    closed-form bound, and the returned estimate is a legal size.
// ---------------------------------------------------------------------------
void checkDomainSizeBounds(CheckContext& ctx) {
    const double eps = 0.05;
    for (int k = 2; k <= 4; ++k) {
        double harmonic = 0.0;
        for (int i = 1; i < k; ++i) harmonic += 1.0 / static_cast<double>(i);
        const double d1 =
            harmonic - static_cast<double>(k - 1) *
                           std::pow(static_cast<double>(k) * eps, 1.0 / static_cast<double>(k - 1));
        const double d2 = 1.0 - static_cast<double>(k) * std::pow(eps, 1.0 / static_cast<double>(k));

        for (int m = k; m <= 1000; ++m) {
            long double coincidence = 1.0L;
            for (int i = 0; i < k; ++i)
                coincidence *= static_cast<long double>(m - i) / static_cast<long double>(m);
            for (int i = 2; i <= k; ++i) coincidence /= static_cast<long double>(i);
            if (coincidence <= static_cast<long double>(eps)) continue;

            const auto tag = " for k=" + std::to_string(k) + ", m=" + std::to_string(m);
            if (d1 > 0.0)
                ctx.require(static_cast<double>(m) > static_cast<double>(k - 1) / d1,
                            "harmonic bound admits a coincidence-prone size" + tag);
            if (d2 > 0.0)
                ctx.require(static_cast<double>(m) > static_cast<double>(k - 1) / d2,
                            "root bound admits a coincidence-prone size" + tag);
        }

        const int estimate = estimateDomainSize(k, eps);
        ctx.require(estimate >= std::max(k, 2),
                    "estimate " + std::to_string(estimate) + " below the legal minimum for k=" +
                        std::to_string(k));
    }
}

// ---------------------------------------------------------------------------
// 8. Golden-question sampling: averaging 50 seeded crowds, the profile error
//    against full sampling shrinks as the sampling rate grows (within noise),
//    the full rate reproduces itself exactly, and a one-fifth rate decides
//    questions within three points of full sampling.
// ---------------------------------------------------------------------------
void checkSamplingRates(CheckContext& ctx) {
    Scenario scenario;
    scenario.seed = 2026;
    scenario.pool_size = 20;
    scenario.accuracy_dist = AccuracyDistribution::beta(7.0, 3.0);
    scenario.num_questions = 100;
    scenario.target_accuracy = 0.9;
    scenario.trials = 50;
    scenario.replication_override = 5;
    scenario.calibration_rounds = 2;
    scenario.sampling.hit_size = 100;

    const std::vector<double> rates = {0.05, 0.1, 0.2, 1.0};
    const auto table = suiteSamplingRate(scenario, rates);
    ctx.require(table.rows.size() == rates.size(), "one row per sampling rate expected");
    if (table.rows.size() != rates.size()) return;

    for (std::size_t i = 0; i + 1 < rates.size(); ++i) {
        const double coarse = table.cell(i, "err");
        const double fine = table.cell(i + 1, "err");
        ctx.require(fine <= coarse + 0.01,
                    "profile error rose from rate " + formatDouble(rates[i]) + " (" +
                        formatDouble(coarse) + ") to rate " + formatDouble(rates[i + 1]) + " (" +
                        formatDouble(fine) + ")");
    }
    ctx.require(table.cell(rates.size() - 1, "err") == 0.0,
                "full sampling should reproduce its own profiles exactly");

    const double acc_fifth = table.cell(2, "verification_accuracy");
    const double acc_full = table.cell(3, "verification_accuracy");
    ctx.require(std::abs(acc_fifth - acc_full) <= 0.03,
                "one-fifth sampling decided " + formatDouble(acc_fifth) +
                    " vs full sampling " + formatDouble(acc_full));
}

// ---------------------------------------------------------------------------
// 9. Rerunning every experiment suite with the same configuration produces
//    byte-identical CSV tables and plot stubs.
// ---------------------------------------------------------------------------
void checkSuiteReproducibility(CheckContext& ctx) {
    std::vector<SuiteSpec> specs(4);

    specs[0].name = "worker_counts";
    specs[0].mu = 0.7;
    specs[0].c_grid = {0.5, 0.7, 0.9, 0.99};

    specs[1].name = "accuracy_vs_workers";
    specs[1].scenario.seed = 5;
    specs[1].scenario.pool_size = 20;
    specs[1].scenario.accuracy_dist = AccuracyDistribution::pointMass(0.7);
    specs[1].scenario.num_questions = 100;
    specs[1].scenario.use_true_accuracies = true;
    specs[1].n_grid = {1, 3};

    specs[2].name = "termination";
    specs[2].scenario.seed = 6;
    specs[2].scenario.pool_size = 20;
    specs[2].scenario.accuracy_dist = AccuracyDistribution::pointMass(0.8);
    specs[2].scenario.domain = AnswerDomain::fixed({"a", "b"});
    specs[2].scenario.num_questions = 100;
    specs[2].scenario.use_true_accuracies = true;
    specs[2].scenario.replication_override = 5;
    specs[2].strategies = {TerminationStrategy::None, TerminationStrategy::MinMax,
                           TerminationStrategy::MinExp, TerminationStrategy::ExpMax};

    specs[3].name = "sampling_rate";
    specs[3].scenario.seed = 7;
    specs[3].scenario.pool_size = 10;
    specs[3].scenario.accuracy_dist = AccuracyDistribution::beta(7.0, 3.0);
    specs[3].scenario.num_questions = 40;
    specs[3].scenario.trials = 2;
    specs[3].scenario.replication_override = 3;
    specs[3].scenario.sampling.hit_size = 20;
    specs[3].rate_grid = {0.5, 1.0};

    for (const auto& spec : specs) {
        const auto render = [&spec] {
            const auto table = runSuite(spec);
            std::ostringstream csv;
            writeCsv(table, csv);
            return csv.str() + "\n---\n" + gnuplotStub(spec.name, spec.name + ".csv");
        };
        const auto first = render();
        const auto second = render();
        ctx.require(first == second, "suite " + spec.name + " did not reproduce byte-identically");
    }
}

struct Criterion {
    std::string label;
    std::optional<long long> budget_ms;
    std::function<void(CheckContext&)> fn;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"five-vote example: weighted fusion overrules both voting baselines", 1000,
         checkWorkedExample},
        {"worker-count search is minimal, meets its target, and matches recomputation", 1000,
         checkWorkerCountSearch},
        {"simulated accuracy reaches the predicted level at both worker counts", 30000,
         checkSimulatedAccuracy},
        {"incremental fusion is order-independent and equals batch fusion", 10000,
         checkOrderIndependence},
        {"early-stop brackets are tight and vote savings are ordered across rules", 60000,
         checkTerminationSavings},
        {"half voting abstains at least as often as majority voting", std::nullopt,
         checkAbstentionOrdering},
        {"domain-size bounds exclude every coincidence-prone size", 1000, checkDomainSizeBounds},
        {"small golden samples track full-sample profiling within tolerance", 60000,
         checkSamplingRates},
        {"experiment suites rerun byte-identically", std::nullopt, checkSuiteReproducibility},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        CheckContext ctx;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].fn(ctx);
        } catch (const std::exception& e) {
            ctx.require(false, std::string("unexpected exception: ") + e.what());
        }
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        if (criteria[i].budget_ms && ms > *criteria[i].budget_ms)
            ctx.require(false, "runtime " + std::to_string(ms) + " ms exceeded the " +
                                   std::to_string(*criteria[i].budget_ms) + " ms budget");

        const bool ok = ctx.failures.empty();
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << (i + 1) << ". " << criteria[i].label << " ("
                  << ms << " ms)\n";
        for (const auto& f : ctx.failures) std::cout << "       - " << f << "\n";
        if (ctx.dropped > 0)
            std::cout << "       - ... and " << ctx.dropped << " more failures\n";
        if (!ok) ++failed;
    }

    if (failed == 0)
        std::cout << "all " << criteria.size() << " acceptance checks passed\n";
    else
        std::cout << failed << " acceptance check(s) failed\n";
    return failed;
}
