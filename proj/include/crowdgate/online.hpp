#pragma once

// Online collection: maintain the confidence table vote by vote, decide
// whether the remaining workers could still change the outcome, and present
// accumulated decisions per answer label.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crowdgate/core.hpp"
#include "crowdgate/errors.hpp"
#include "crowdgate/verification.hpp"

namespace crowdgate {

enum class TerminationStrategy {
    None,    // always collect every planned vote
    MinMax,  // stop when r1's worst case beats r2's best case
    MinExp,  // stop when r1's worst case beats r2's current value
    ExpMax,  // stop when r1's current value beats r2's best case
};

enum class SessionState { Collecting, Terminated, Exhausted };

/// Outcome of one termination check. min_p1/max_p2 are r1's and r2's
/// confidences under the hostile completion where every remaining worker
/// votes r2; p1/p2 are the current values.
struct TerminationEvaluation {
    std::string r1;
    std::optional<std::string> r2;  // none = a fresh unobserved answer
    double min_p1 = 0.0;
    double max_p2 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    bool should_stop = false;
};

/// Single-question collection session. Push votes as they arrive; the
/// session recomputes the fused table after each and flips to Terminated
/// as soon as the strategy's condition holds, or Exhausted at n_total.
class OnlineSession {
  public:
    OnlineSession(AnswerDomain domain, std::size_t n_total, double mu_remaining,
                  TerminationStrategy strategy, VerificationConfig cfg = {},
                  std::string question_id = "q")
        : domain_(std::move(domain)), mu_remaining_(mu_remaining), strategy_(strategy),
          cfg_(std::move(cfg)) {
        domain_.validate();
        cfg_.validate();
        if (n_total == 0) throw Error("session needs at least one planned vote");
        obs_.question_id = std::move(question_id);
        obs_.n_total = n_total;
    }

    /// Append one vote and return the fused table over all votes so far.
    /// Exactly equivalent to batch verify on the partial observation.
    ConfidenceTable pushAnswer(const Vote& vote, const WorkerProfile& profile) {
        if (state_ != SessionState::Collecting)
            throw SessionClosed("session for " + obs_.question_id + " is no longer collecting");
        if (profiles_.count(vote.worker_id))
            throw DuplicateWorker("worker " + vote.worker_id + " already voted on " +
                                  obs_.question_id);
        if (!domain_.contains(vote.answer))
            throw Error("vote answer '" + vote.answer + "' not in domain of " + obs_.question_id);

        Vote stored = vote;
        stored.arrival_index = obs_.votes.size();
        obs_.votes.push_back(std::move(stored));
        profiles_.emplace(vote.worker_id, profile);

        table_ = verify(obs_, profiles_, domain_, cfg_);

        if (obs_.votes.size() == obs_.n_total) {
            state_ = SessionState::Exhausted;
            last_evaluation_.reset();
        } else {
            last_evaluation_ = evaluateTermination();
            if (last_evaluation_->should_stop) state_ = SessionState::Terminated;
        }
        return *table_;
    }

    /// Bracket the final outcome: could the remaining votes still promote
    /// the runner-up over the current best answer?
    TerminationEvaluation evaluateTermination() const {
        if (obs_.votes.empty()) throw NoVotesYet("no votes received yet");
        if (obs_.votes.size() >= obs_.n_total)
            throw SessionClosed("all planned votes already received");

        const auto tallies = detail::tallyVotes(obs_, profiles_, cfg_.accuracy_clamp);
        const int k = tallies.distinct();
        const int m = detail::effectiveDomainSize(k, domain_, cfg_);
        auto scores = detail::scoresAt(tallies, m);

        const auto current = detail::softmaxWithEmpty(scores, m - k);

        TerminationEvaluation eval;
        eval.r1 = current.best;
        eval.p1 = current.entries.at(current.best);

        // runner-up: second-best observed answer, or a fresh unobserved
        // answer when only one answer has been seen (effective_m >= 2
        // guarantees a fresh slot exists in that case)
        const bool fresh_r2 = k < 2;
        eval.r2 = fresh_r2 ? std::nullopt : current.runner_up;
        eval.p2 = fresh_r2 ? current.empty_confidence : current.entries.at(*eval.r2);

        // hostile completion: all remaining votes go to r2, each weighted by
        // the expected confidence of an unseen worker (floored at
        // uninformative so the completion never helps r1)
        const auto remaining = static_cast<double>(obs_.n_total - obs_.votes.size());
        const double cbar = std::max(workerConfidence(mu_remaining_, m), 0.0);
        int empty_after = m - k;
        if (fresh_r2) {
            scores["\x01fresh"] = remaining * cbar;  // key sorts before real labels; never exposed
            empty_after -= 1;
        } else {
            scores[*eval.r2] += remaining * cbar;
        }
        const auto completed = detail::softmaxWithEmpty(scores, empty_after);
        eval.min_p1 = completed.entries.at(eval.r1);
        eval.max_p2 = completed.entries.at(fresh_r2 ? "\x01fresh" : *eval.r2);

        switch (strategy_) {
            case TerminationStrategy::MinMax: eval.should_stop = eval.min_p1 > eval.max_p2; break;
            case TerminationStrategy::MinExp: eval.should_stop = eval.min_p1 > eval.p2; break;
            case TerminationStrategy::ExpMax: eval.should_stop = eval.p1 > eval.max_p2; break;
            case TerminationStrategy::None: eval.should_stop = false; break;
        }
        return eval;
    }

    const Observation& observation() const noexcept { return obs_; }
    SessionState state() const noexcept { return state_; }
    const std::optional<ConfidenceTable>& currentTable() const noexcept { return table_; }
    const std::optional<TerminationEvaluation>& lastEvaluation() const noexcept {
        return last_evaluation_;
    }
    std::size_t votesReceived() const noexcept { return obs_.votes.size(); }

    /// Confidence of a label right now; before any vote this is the uniform
    /// zero-information prior 1/effective_m.
    double confidenceOf(std::string_view label) const {
        if (table_) return table_->confidence(label);
        return 1.0 / static_cast<double>(priorDomainSize());
    }

  private:
    int priorDomainSize() const {
        if (cfg_.m_override) return *cfg_.m_override;
        if (domain_.mode == DomainMode::Fixed) return static_cast<int>(domain_.size());
        return 2;  // nothing observed yet; the minimum legal domain
    }

    AnswerDomain domain_;
    Observation obs_;
    double mu_remaining_ = 0.5;
    TerminationStrategy strategy_ = TerminationStrategy::None;
    VerificationConfig cfg_;
    SessionState state_ = SessionState::Collecting;
    ProfileMap profiles_;
    std::optional<ConfidenceTable> table_;
    std::optional<TerminationEvaluation> last_evaluation_;
};

struct OnlineSettings {
    std::size_t n_total = 1;
    double mu_remaining = 0.5;
    TerminationStrategy strategy = TerminationStrategy::None;
    VerificationConfig cfg{};
};

struct OnlineRunResult {
    std::optional<ConfidenceTable> table;  // empty only for an empty stream
    std::size_t votes_consumed = 0;
    SessionState final_state = SessionState::Collecting;
};

/// Feed a recorded vote stream through a session, stopping at termination
/// or exhaustion; returns the table at stop time and the votes consumed.
inline OnlineRunResult runOnline(const Question& question, std::span<const Vote> stream,
                                 const ProfileMap& profiles, const OnlineSettings& settings) {
    OnlineSession session(question.domain, settings.n_total, settings.mu_remaining,
                          settings.strategy, settings.cfg, question.question_id);
    OnlineRunResult result;
    for (const auto& vote : stream) {
        auto it = profiles.find(vote.worker_id);
        if (it == profiles.end()) throw MissingProfile("no profile for worker " + vote.worker_id);
        result.table = session.pushAnswer(vote, it->second);
        result.votes_consumed += 1;
        if (session.state() != SessionState::Collecting) break;
    }
    result.final_state = session.state();
    return result;
}

/// One finished question: what was accepted (if anything) and the final table.
struct QuestionDecision {
    std::optional<std::string> accepted;
    ConfidenceTable table;
};

/// Per-label share of N questions: an accepted label scores 1 on its
/// question and 0 elsewhere; undecided questions contribute their
/// confidence. Shares lie in [0,1] and sum to at most 1.
inline std::map<std::string, double> presentResults(std::span<const QuestionDecision> decisions,
                                                    const AnswerDomain& domain) {
    if (decisions.empty()) throw EmptyStream("no question decisions to present");
    std::map<std::string, double> shares;
    for (const auto& label : domain.labels) {
        detail::KahanSum acc;
        for (const auto& d : decisions) {
            if (d.accepted)
                acc.add(*d.accepted == label ? 1.0 : 0.0);
            else
                acc.add(d.table.confidence(label));
        }
        shares[label] = acc.sum / static_cast<double>(decisions.size());
    }
    return shares;
}

/// Keywords ranked by frequency, ties broken by first appearance.
inline std::vector<std::string> topKeywords(std::span<const std::string> keywords,
                                            std::size_t limit) {
    std::unordered_map<std::string_view, std::pair<std::size_t, std::size_t>> stats;  // count, first
    std::vector<std::string_view> order;
    for (std::size_t i = 0; i < keywords.size(); ++i) {
        auto [it, inserted] = stats.try_emplace(keywords[i], 0, i);
        if (inserted) order.push_back(keywords[i]);
        it->second.first += 1;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::string_view a, std::string_view b) {
        const auto& sa = stats[a];
        const auto& sb = stats[b];
        if (sa.first != sb.first) return sa.first > sb.first;
        return sa.second < sb.second;
    });
    if (order.size() > limit) order.resize(limit);
    std::vector<std::string> out;
    out.reserve(order.size());
    for (auto v : order) out.emplace_back(v);
    return out;
}

/// The most frequent rationale keywords among votes for one answer.
inline std::vector<std::string> topReasons(std::span<const Vote> votes, std::string_view answer,
                                           std::size_t limit) {
    std::vector<std::string> pool;
    for (const auto& v : votes)
        if (v.answer == answer) pool.insert(pool.end(), v.keywords.begin(), v.keywords.end());
    return topKeywords(pool, limit);
}

}  // namespace crowdgate
