#pragma once

// Answer fusion: turn an observation plus worker accuracy profiles into a
// posterior confidence per answer, pick the best answer, and provide the
// half/majority voting baselines and domain-size estimation.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "crowdgate/core.hpp"
#include "crowdgate/errors.hpp"

namespace crowdgate {

struct VerificationConfig {
    double epsilon = 0.05;          // rarity threshold for domain-size estimation
    std::optional<int> m_override;  // force the effective domain size
    double accuracy_clamp = 1e-6;   // keep accuracies inside (clamp, 1-clamp)

    void validate() const {
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("epsilon must lie in (0,1)");
        if (!(accuracy_clamp > 0.0 && accuracy_clamp < 0.5))
            throw Error("accuracy clamp must lie in (0, 0.5)");
        if (m_override && *m_override < 2)
            throw DomainTooSmall("domain size override must be at least 2");
    }
};

/// Weight of one vote: ln(m-1) + ln(a/(1-a)). Positive iff the worker beats
/// random guessing over m answers, zero at a = 1/m.
inline double workerConfidence(double a, std::int64_t m) {
    if (m < 2) throw DomainTooSmall("answer domain size must be at least 2");
    return std::log(static_cast<double>(m - 1)) + logOdds(a);
}

/// Lower-bound the domain size from k distinct observed answers: any true
/// size m for which seeing k distinct answers among k draws has probability
/// above epsilon must exceed both analytic bounds below. Returns the
/// smallest size strictly above the surviving bounds, at least max(k, 2).
inline int estimateDomainSize(int k, double epsilon) {
    if (k < 1) throw Error("distinct answer count must be at least 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("epsilon must lie in (0,1)");
    if (k == 1) return 2;

    double best = 0.0;
    double harmonic = 0.0;  // H_{k-1}
    for (int i = 1; i < k; ++i) harmonic += 1.0 / static_cast<double>(i);

    const double d1 =
        harmonic - static_cast<double>(k - 1) *
                       std::pow(static_cast<double>(k) * epsilon, 1.0 / static_cast<double>(k - 1));
    if (d1 > 0.0) best = std::max(best, static_cast<double>(k - 1) / d1);

    const double d2 =
        1.0 - static_cast<double>(k) * std::pow(epsilon, 1.0 / static_cast<double>(k));
    if (d2 > 0.0) best = std::max(best, static_cast<double>(k - 1) / d2);

    const auto above = static_cast<std::int64_t>(std::floor(best)) + 1;
    return static_cast<int>(std::max<std::int64_t>({above, k, 2}));
}

/// Posterior confidence per answer for one observation.
struct ConfidenceTable {
    std::map<std::string, double> entries;  // observed answer -> rho(r)
    std::string best;
    std::optional<std::string> runner_up;   // second-best observed answer
    int effective_m = 2;
    double empty_confidence = 0.0;          // rho of any zero-vote answer

    /// Confidence of a label: its entry if observed, the zero-vote share otherwise.
    double confidence(std::string_view label) const {
        auto it = entries.find(std::string(label));
        return it == entries.end() ? empty_confidence : it->second;
    }
};

namespace detail {

inline double clampTo(double a, double bound) noexcept {
    return std::min(std::max(a, bound), 1.0 - bound);
}

/// Per-answer vote tallies: count and summed log-odds of the voters.
/// S(r) at domain size m is count * ln(m-1) + log_odds_sum.
struct VoteTallies {
    struct Entry {
        int count = 0;
        double log_odds_sum = 0.0;
    };
    std::map<std::string, Entry> by_answer;

    int distinct() const noexcept { return static_cast<int>(by_answer.size()); }

    void add(const std::string& answer, const WorkerProfile& profile, double clamp) {
        auto& e = by_answer[answer];
        e.count += 1;
        e.log_odds_sum += logOdds(clampTo(profile.accuracy, clamp));
    }
};

inline VoteTallies tallyVotes(const Observation& obs, const ProfileMap& profiles,
                              double accuracy_clamp) {
    VoteTallies tallies;
    for (const auto& vote : obs.votes) {
        auto it = profiles.find(vote.worker_id);
        if (it == profiles.end())
            throw MissingProfile("no profile for worker " + vote.worker_id);
        tallies.add(vote.answer, it->second, accuracy_clamp);
    }
    return tallies;
}

inline int effectiveDomainSize(int distinct, const AnswerDomain& domain,
                               const VerificationConfig& cfg) {
    int m;
    if (cfg.m_override) {
        m = *cfg.m_override;
        if (m < 2) throw DomainTooSmall("domain size override must be at least 2");
    } else if (domain.mode == DomainMode::Fixed) {
        m = static_cast<int>(domain.size());
    } else {
        m = estimateDomainSize(distinct, cfg.epsilon);
    }
    if (m < distinct)
        throw DomainTooSmall("effective domain size " + std::to_string(m) +
                             " is below the " + std::to_string(distinct) +
                             " distinct answers observed");
    return m;
}

inline std::map<std::string, double> scoresAt(const VoteTallies& tallies, int effective_m) {
    const double log_m1 = std::log(static_cast<double>(effective_m - 1));
    std::map<std::string, double> scores;
    for (const auto& [answer, e] : tallies.by_answer)
        scores[answer] = static_cast<double>(e.count) * log_m1 + e.log_odds_sum;
    return scores;
}

/// Shifted softmax over the observed scores plus `empty_slots` implicit
/// zero-score answers. Returns the table fields except effective_m.
inline ConfidenceTable softmaxWithEmpty(const std::map<std::string, double>& scores,
                                        int empty_slots) {
    double max_s = -std::numeric_limits<double>::infinity();
    for (const auto& [answer, s] : scores) max_s = std::max(max_s, s);
    if (empty_slots > 0) max_s = std::max(max_s, 0.0);

    KahanSum denom;
    for (const auto& [answer, s] : scores) denom.add(std::exp(s - max_s));
    denom.add(static_cast<double>(empty_slots) * std::exp(-max_s));

    ConfidenceTable table;
    table.empty_confidence = std::exp(-max_s) / denom.sum;
    double best_rho = -1.0, second_rho = -1.0;
    for (const auto& [answer, s] : scores) {
        const double rho = std::exp(s - max_s) / denom.sum;
        table.entries[answer] = rho;
        if (rho > best_rho) {
            second_rho = best_rho;
            table.runner_up = table.best.empty() ? std::nullopt
                                                 : std::optional<std::string>(table.best);
            best_rho = rho;
            table.best = answer;
        } else if (rho > second_rho) {
            second_rho = rho;
            table.runner_up = answer;
        }
    }
    return table;
}

}  // namespace detail

/// Fuse the observation into per-answer posterior confidences.
/// effective_m comes from the override, the fixed domain size, or the
/// estimate from distinct answers; every unobserved answer contributes one
/// unit (exp of an empty confidence sum) to the denominator.
inline ConfidenceTable verify(const Observation& obs, const ProfileMap& profiles,
                              const AnswerDomain& domain, const VerificationConfig& cfg = {}) {
    cfg.validate();
    if (obs.votes.empty()) throw EmptyObservation("observation " + obs.question_id + " has no votes");
    obs.validate(domain);

    const auto tallies = detail::tallyVotes(obs, profiles, cfg.accuracy_clamp);
    const int m = detail::effectiveDomainSize(tallies.distinct(), domain, cfg);
    const auto scores = detail::scoresAt(tallies, m);

    ConfidenceTable table = detail::softmaxWithEmpty(scores, m - tallies.distinct());
    table.effective_m = m;
    return table;
}

namespace detail {

inline std::map<std::string, int> completeVoteCounts(const Observation& obs) {
    if (!obs.complete())
        throw IncompleteObservation("observation " + obs.question_id + " has " +
                                    std::to_string(obs.votes.size()) + " of " +
                                    std::to_string(obs.n_total) + " votes");
    std::map<std::string, int> counts;
    for (const auto& v : obs.votes) counts[v.answer] += 1;
    return counts;
}

}  // namespace detail

/// Accept an answer only if at least ceil(n/2) workers chose it.
/// With odd n at most one answer can qualify.
inline std::optional<std::string> halfVoting(const Observation& obs) {
    if (obs.n_total % 2 == 0)
        throw EvenWorkerCount("half voting needs an odd planned vote count");
    const auto counts = detail::completeVoteCounts(obs);
    const auto threshold = static_cast<int>((obs.n_total + 1) / 2);
    for (const auto& [answer, count] : counts)
        if (count >= threshold) return answer;
    return std::nullopt;
}

/// Accept the unique strict plurality winner; a tie for first is no answer.
inline std::optional<std::string> majorityVoting(const Observation& obs) {
    const auto counts = detail::completeVoteCounts(obs);
    int best = 0, second = 0;
    std::optional<std::string> winner;
    for (const auto& [answer, count] : counts) {
        if (count > best) {
            second = best;
            best = count;
            winner = answer;
        } else if (count > second) {
            second = count;
        }
    }
    if (best == second) return std::nullopt;
    return winner;
}

}  // namespace crowdgate
