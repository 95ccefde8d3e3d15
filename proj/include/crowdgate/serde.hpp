#pragma once

// JSON (de)serialization for the file formats the CLI speaks: profile
// stores, transcript NDJSON lines, scenario / suite configs, and the
// metrics record (JSON + CSV). Field names are snake_case; object key
// order is deterministic (ordered_json) so reruns are byte-identical.

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "crowdgate/core.hpp"
#include "crowdgate/errors.hpp"
#include "crowdgate/experiments.hpp"
#include "crowdgate/online.hpp"
#include "crowdgate/simulator.hpp"
#include "crowdgate/verification.hpp"

namespace crowdgate {

using Json = nlohmann::ordered_json;

namespace detail {

/// Re-throw library parse/type errors as this library's ParseError,
/// prefixed with what was being read.
template <class F>
auto parsing(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

}  // namespace detail

// ---- worker profiles --------------------------------------------------

inline Json toJson(const WorkerProfile& profile) {
    return Json{{"accuracy", profile.accuracy},
                {"golden_correct", profile.golden_correct},
                {"golden_total", profile.golden_total}};
}

inline WorkerProfile profileFromJson(const std::string& worker_id, const Json& j) {
    return detail::parsing("worker profile", [&] {
        return WorkerProfile(worker_id, j.at("accuracy").get<double>(),
                             j.value("golden_correct", std::uint64_t{0}),
                             j.value("golden_total", std::uint64_t{0}));
    });
}

inline Json toJson(const ProfileMap& profiles) {
    Json j = Json::object();
    for (const auto& [id, p] : profiles) j[id] = toJson(p);
    return j;
}

inline ProfileMap profilesFromJson(const Json& j) {
    return detail::parsing("profile store", [&] {
        ProfileMap out;
        for (const auto& [id, body] : j.items()) out.emplace(id, profileFromJson(id, body));
        return out;
    });
}

// ---- answer domains and votes -----------------------------------------

inline Json toJson(const AnswerDomain& domain) {
    return Json{{"mode", domain.mode == DomainMode::Fixed ? "fixed" : "estimated"},
                {"labels", domain.labels}};
}

inline AnswerDomain domainFromJson(const Json& j) {
    return detail::parsing("answer domain", [&] {
        const auto mode = j.value("mode", std::string("fixed"));
        auto labels = j.at("labels").get<std::vector<std::string>>();
        if (mode == "fixed") return AnswerDomain::fixed(std::move(labels));
        if (mode == "estimated") return AnswerDomain::estimated(std::move(labels));
        throw ParseError("unknown domain mode: " + mode);
    });
}

inline Json toJson(const Vote& vote) {
    Json j{{"worker_id", vote.worker_id},
           {"answer", vote.answer},
           {"arrival_index", vote.arrival_index}};
    if (!vote.keywords.empty()) j["keywords"] = vote.keywords;
    return j;
}

inline Vote voteFromJson(const Json& j) {
    return detail::parsing("vote", [&] {
        Vote v;
        v.worker_id = j.at("worker_id").get<std::string>();
        v.answer = j.at("answer").get<std::string>();
        v.arrival_index = j.value("arrival_index", std::size_t{0});
        v.keywords = j.value("keywords", std::vector<std::string>{});
        return v;
    });
}

// ---- transcripts (NDJSON, one question per line) ----------------------

inline Json toJson(const TranscriptQuestion& q) {
    Json j{{"question_id", q.question_id},
           {"hit_id", q.hit_id},
           {"domain", toJson(q.domain)},
           {"is_golden", q.is_golden},
           {"ground_truth", q.ground_truth ? Json(*q.ground_truth) : Json(nullptr)},
           {"n_planned", q.n_planned},
           {"cost", q.cost}};
    j["workers_drawn"] = q.workers_drawn;
    Json votes = Json::array();
    for (const auto& v : q.votes) votes.push_back(toJson(v));
    j["votes"] = votes;
    j["profiles"] = toJson(q.profiles);
    return j;
}

inline TranscriptQuestion transcriptQuestionFromJson(const Json& j) {
    return detail::parsing("transcript question", [&] {
        TranscriptQuestion q;
        q.question_id = j.at("question_id").get<std::string>();
        q.hit_id = j.value("hit_id", std::string{});
        q.domain = domainFromJson(j.at("domain"));
        q.is_golden = j.value("is_golden", false);
        if (j.contains("ground_truth") && !j.at("ground_truth").is_null())
            q.ground_truth = j.at("ground_truth").get<std::string>();
        q.n_planned = j.at("n_planned").get<std::size_t>();
        q.cost = j.value("cost", 0.0);
        q.workers_drawn = j.value("workers_drawn", std::vector<std::string>{});
        for (const auto& v : j.value("votes", Json::array())) q.votes.push_back(voteFromJson(v));
        if (j.contains("profiles")) q.profiles = profilesFromJson(j.at("profiles"));
        return q;
    });
}

inline void writeTranscript(const Transcript& transcript, std::ostream& out) {
    for (const auto& q : transcript.questions) out << toJson(q).dump() << "\n";
}

inline Transcript readTranscript(std::istream& in) {
    Transcript t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            t.questions.push_back(transcriptQuestionFromJson(Json::parse(line)));
        } catch (const std::exception& e) {
            throw ParseError("transcript line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return t;
}

// ---- accuracy distributions and scenarios -----------------------------

inline Json toJson(const AccuracyDistribution& d) {
    using Family = AccuracyDistribution::Family;
    switch (d.family) {
        case Family::Beta:
            return Json{{"family", "beta"}, {"alpha", d.beta_alpha}, {"beta", d.beta_beta}};
        case Family::TruncatedNormal:
            return Json{{"family", "truncated_normal"},
                        {"mean", d.normal_mean},
                        {"sd", d.normal_sd},
                        {"lo", d.lo},
                        {"hi", d.hi}};
        case Family::PointMass: break;
    }
    return Json{{"family", "point_mass"}, {"mu", d.mu}};
}

inline AccuracyDistribution distributionFromJson(const Json& j) {
    return detail::parsing("accuracy distribution", [&] {
        const auto family = j.at("family").get<std::string>();
        if (family == "beta")
            return AccuracyDistribution::beta(j.at("alpha").get<double>(),
                                              j.at("beta").get<double>());
        if (family == "truncated_normal")
            return AccuracyDistribution::truncatedNormal(
                j.at("mean").get<double>(), j.at("sd").get<double>(), j.value("lo", 0.0),
                j.value("hi", 1.0));
        if (family == "point_mass") return AccuracyDistribution::pointMass(j.at("mu").get<double>());
        throw ParseError("unknown accuracy distribution family: " + family);
    });
}

inline Json toJson(const Scenario& s) {
    Json j{{"seed", s.seed},
           {"pool_size", s.pool_size},
           {"accuracy_dist", toJson(s.accuracy_dist)},
           {"domain", toJson(s.domain)},
           {"num_questions", s.num_questions},
           {"target_accuracy", s.target_accuracy},
           {"strategy", strategyName(s.strategy)},
           {"sampling",
            Json{{"alpha", s.sampling.alpha},
                 {"hit_size", s.sampling.hit_size},
                 {"smoothing", s.sampling.smoothing}}},
           {"cost", Json{{"worker_fee", s.cost.worker_fee}, {"platform_fee", s.cost.platform_fee}}},
           {"trials", s.trials},
           {"calibration_rounds", s.calibration_rounds},
           {"use_true_accuracies", s.use_true_accuracies},
           {"replication_override",
            s.replication_override ? Json(*s.replication_override) : Json(nullptr)},
           {"wrong_answer_skew", s.wrong_answer_skew}};
    return j;
}

inline Scenario scenarioFromJson(const Json& j) {
    return detail::parsing("scenario", [&] {
        Scenario s;
        s.seed = j.value("seed", s.seed);
        s.pool_size = j.value("pool_size", s.pool_size);
        if (j.contains("accuracy_dist")) s.accuracy_dist = distributionFromJson(j.at("accuracy_dist"));
        if (j.contains("domain")) s.domain = domainFromJson(j.at("domain"));
        s.num_questions = j.value("num_questions", s.num_questions);
        s.target_accuracy = j.value("target_accuracy", s.target_accuracy);
        if (j.contains("strategy"))
            s.strategy = strategyFromName(j.at("strategy").get<std::string>());
        if (j.contains("sampling")) {
            const auto& sj = j.at("sampling");
            s.sampling.alpha = sj.value("alpha", s.sampling.alpha);
            s.sampling.hit_size = sj.value("hit_size", s.sampling.hit_size);
            s.sampling.smoothing = sj.value("smoothing", s.sampling.smoothing);
        }
        if (j.contains("cost")) {
            const auto& cj = j.at("cost");
            s.cost.worker_fee = cj.value("worker_fee", 0.0);
            s.cost.platform_fee = cj.value("platform_fee", 0.0);
        }
        s.trials = j.value("trials", s.trials);
        s.calibration_rounds = j.value("calibration_rounds", s.calibration_rounds);
        s.use_true_accuracies = j.value("use_true_accuracies", s.use_true_accuracies);
        if (j.contains("replication_override") && !j.at("replication_override").is_null())
            s.replication_override = j.at("replication_override").get<std::int64_t>();
        s.wrong_answer_skew = j.value("wrong_answer_skew", s.wrong_answer_skew);
        s.validate();
        return s;
    });
}

// ---- suite specs ------------------------------------------------------

inline Json toJson(const SuiteSpec& spec) {
    Json j{{"name", spec.name}, {"scenario", toJson(spec.scenario)}};
    if (spec.name == "worker_counts") {
        j["mu"] = spec.mu;
        j["c_grid"] = spec.c_grid;
    } else if (spec.name == "accuracy_vs_workers") {
        j["n_grid"] = spec.n_grid;
    } else if (spec.name == "termination") {
        std::vector<std::string> names;
        for (auto s : spec.strategies) names.push_back(strategyName(s));
        j["strategies"] = names;
    } else if (spec.name == "sampling_rate") {
        j["rate_grid"] = spec.rate_grid;
    }
    return j;
}

inline SuiteSpec suiteSpecFromJson(const Json& j) {
    return detail::parsing("suite spec", [&] {
        SuiteSpec spec;
        spec.name = j.at("name").get<std::string>();
        if (j.contains("scenario")) spec.scenario = scenarioFromJson(j.at("scenario"));
        spec.mu = j.value("mu", spec.mu);
        spec.c_grid = j.value("c_grid", spec.c_grid);
        spec.n_grid = j.value("n_grid", spec.n_grid);
        if (j.contains("strategies"))
            for (const auto& name : j.at("strategies"))
                spec.strategies.push_back(strategyFromName(name.get<std::string>()));
        spec.rate_grid = j.value("rate_grid", spec.rate_grid);
        spec.validate();
        return spec;
    });
}

// ---- engine outputs ---------------------------------------------------

inline Json toJson(const ConfidenceTable& table) {
    Json entries = Json::object();
    for (const auto& [answer, rho] : table.entries) entries[answer] = rho;
    return Json{{"best", table.best},
                {"runner_up", table.runner_up ? Json(*table.runner_up) : Json(nullptr)},
                {"effective_m", table.effective_m},
                {"empty_confidence", table.empty_confidence},
                {"entries", entries}};
}

inline Json toJson(const TerminationEvaluation& eval) {
    return Json{{"r1", eval.r1},
                {"r2", eval.r2 ? Json(*eval.r2) : Json(nullptr)},
                {"min_p1", eval.min_p1},
                {"max_p2", eval.max_p2},
                {"p1", eval.p1},
                {"p2", eval.p2},
                {"should_stop", eval.should_stop}};
}

inline Json toJson(const MetricsRecord& m) {
    Json strategies = Json::array();
    for (const auto& s : m.per_strategy)
        strategies.push_back(Json{{"name", s.name},
                                  {"achieved_accuracy", s.achieved_accuracy},
                                  {"no_answer_rate", s.no_answer_rate},
                                  {"mean_votes", s.mean_votes}});
    return Json{{"seed", m.seed},
                {"trials", m.trials},
                {"num_questions", m.num_questions},
                {"mu_true", m.mu_true},
                {"mu_estimated", m.mu_estimated},
                {"conservative_n", m.conservative_n},
                {"refined_n", m.refined_n},
                {"mean_replication", m.mean_replication},
                {"strategies", strategies},
                {"worker_savings", m.worker_savings},
                {"calibration_cost", m.calibration_cost},
                {"collection_cost", m.collection_cost},
                {"total_cost", m.total_cost}};
}

/// One CSV row per strategy, scalar context repeated on every row.
inline std::string metricsCsv(const MetricsRecord& m) {
    std::ostringstream out;
    out << "seed,strategy,achieved_accuracy,no_answer_rate,mean_votes,mean_replication,"
           "worker_savings,mu_true,mu_estimated,conservative_n,refined_n,"
           "calibration_cost,collection_cost,total_cost\n";
    for (const auto& s : m.per_strategy) {
        out << m.seed << ',' << s.name << ',' << formatDouble(s.achieved_accuracy) << ','
            << formatDouble(s.no_answer_rate) << ',' << formatDouble(s.mean_votes) << ','
            << formatDouble(m.mean_replication) << ',' << formatDouble(m.worker_savings) << ','
            << formatDouble(m.mu_true) << ',' << formatDouble(m.mu_estimated) << ','
            << m.conservative_n << ',' << m.refined_n << ','
            << formatDouble(m.calibration_cost) << ',' << formatDouble(m.collection_cost) << ','
            << formatDouble(m.total_cost) << "\n";
    }
    return out.str();
}

}  // namespace crowdgate
