// crowdgate — command-line front end for the aggregation engine.
//
// Subcommands:
//   predict    size a HIT for a target accuracy
//   verify     fuse a recorded observation into a confidence table
//   online     replay a vote stream with early-termination tracing
//   profiles   rebuild the worker profile store from transcripts
//   simulate   run a scenario end to end, emitting metrics and transcripts
//   suite      run a named experiment sweep and write its CSV + plot stub
//
// All output is deterministic: no timestamps, no machine state, so any
// invocation can be diffed against a rerun.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crowdgate/crowdgate.hpp"

namespace fs = std::filesystem;
using crowdgate::Json;

namespace {

Json readJsonFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw crowdgate::Error("cannot open " + path);
    return crowdgate::detail::parsing(path.c_str(), [&] {
        Json j;
        in >> j;
        return j;
    });
}

crowdgate::TranscriptQuestion readQuestionDocument(const std::string& path) {
    return crowdgate::transcriptQuestionFromJson(readJsonFile(path));
}

void writeTextFile(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw crowdgate::Error("cannot write " + path.string());
    out << content;
}

// ---- predict ----------------------------------------------------------

struct PredictArgs {
    double target_accuracy = 0.9;
    double mean_accuracy = 0.7;
    double worker_fee = 0.0;
    double platform_fee = 0.0;
    bool as_json = false;
};

int runPredict(const PredictArgs& args) {
    const auto pred = crowdgate::refinedWorkerCount(args.target_accuracy, args.mean_accuracy);
    const bool has_cost = args.worker_fee > 0.0 || args.platform_fee > 0.0;
    const crowdgate::CostModel cost{args.worker_fee, args.platform_fee};

    if (args.as_json) {
        Json j{{"target_accuracy", args.target_accuracy},
               {"mean_accuracy", args.mean_accuracy},
               {"conservative_n", pred.conservative_n},
               {"refined_n", pred.refined_n},
               {"expected_accuracy", pred.expected_accuracy}};
        if (has_cost) {
            j["hit_cost_conservative"] = crowdgate::hitCost(cost, pred.conservative_n);
            j["hit_cost_refined"] = crowdgate::hitCost(cost, pred.refined_n);
        }
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "conservative workers: " << pred.conservative_n << "\n"
              << "refined workers:      " << pred.refined_n << "\n"
              << "expected accuracy:    " << crowdgate::formatDouble(pred.expected_accuracy)
              << "\n";
    if (has_cost) {
        std::cout << "hit cost (conservative): "
                  << crowdgate::formatDouble(crowdgate::hitCost(cost, pred.conservative_n))
                  << "\n"
                  << "hit cost (refined):      "
                  << crowdgate::formatDouble(crowdgate::hitCost(cost, pred.refined_n)) << "\n";
    }
    return 0;
}

// ---- verify -----------------------------------------------------------

struct VerifyArgs {
    std::string transcript;
    int m_override = 0;
    double epsilon = 0.0;
};

int runVerify(const VerifyArgs& args) {
    const auto q = readQuestionDocument(args.transcript);
    crowdgate::VerificationConfig cfg;
    if (args.m_override > 0) cfg.m_override = args.m_override;
    if (args.epsilon > 0.0) cfg.epsilon = args.epsilon;

    const auto obs = q.observation();
    const auto table = crowdgate::verify(obs, q.profiles, q.domain, cfg);

    // voting baselines are defined only on complete, odd observations;
    // where undefined they decide nothing
    Json decisions{{"verification", table.best}};
    auto decide = [&](auto rule, const char* name) {
        try {
            const auto winner = rule(obs);
            decisions[name] = winner ? Json(*winner) : Json(nullptr);
        } catch (const crowdgate::Error&) {
            decisions[name] = nullptr;
        }
    };
    decide([](const auto& o) { return crowdgate::halfVoting(o); }, "half_voting");
    decide([](const auto& o) { return crowdgate::majorityVoting(o); }, "majority_voting");

    Json out{{"question_id", q.question_id},
             {"complete", obs.complete()},
             {"table", crowdgate::toJson(table)},
             {"decisions", decisions}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

// ---- online -----------------------------------------------------------

struct OnlineArgs {
    std::string transcript;
    std::string strategy = "none";
    double mu = 0.7;
};

int runOnline(const OnlineArgs& args) {
    const auto q = readQuestionDocument(args.transcript);
    crowdgate::OnlineSession session(q.domain, q.n_planned, args.mu,
                                     crowdgate::strategyFromName(args.strategy),
                                     crowdgate::VerificationConfig{}, q.question_id);
    for (std::size_t i = 0; i < q.votes.size(); ++i) {
        const auto& vote = q.votes[i];
        auto it = q.profiles.find(vote.worker_id);
        if (it == q.profiles.end())
            throw crowdgate::MissingProfile("no profile recorded for worker " + vote.worker_id);
        const auto table = session.pushAnswer(vote, it->second);

        Json line{{"vote_index", i},
                  {"worker_id", vote.worker_id},
                  {"answer", vote.answer},
                  {"table", crowdgate::toJson(table)}};
        const auto& eval = session.lastEvaluation();
        line["evaluation"] = eval ? crowdgate::toJson(*eval) : Json(nullptr);
        switch (session.state()) {
            case crowdgate::SessionState::Collecting: line["state"] = "collecting"; break;
            case crowdgate::SessionState::Terminated: line["state"] = "terminated"; break;
            case crowdgate::SessionState::Exhausted: line["state"] = "exhausted"; break;
        }
        std::cout << line.dump() << "\n";
        if (session.state() != crowdgate::SessionState::Collecting) break;
    }
    return 0;
}

// ---- profiles ---------------------------------------------------------

struct ProfilesArgs {
    std::string from_dir;
    double smoothing = 1.0;
    std::string out_file;
};

int runProfiles(const ProfilesArgs& args) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(args.from_dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw crowdgate::Error("no transcript files in " + args.from_dir);

    // tally golden answers across every recorded question
    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> tallies;  // correct, total
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) throw crowdgate::Error("cannot open " + file.string());
        crowdgate::Transcript t;
        try {
            t = crowdgate::readTranscript(in);
        } catch (const crowdgate::Error& e) {
            throw crowdgate::ParseError(file.string() + ": " + e.what());
        }
        for (const auto& q : t.questions) {
            if (!q.is_golden || !q.ground_truth) continue;
            for (const auto& vote : q.votes) {
                auto& [correct, total] = tallies[vote.worker_id];
                total += 1;
                if (vote.answer == *q.ground_truth) correct += 1;
            }
        }
    }

    crowdgate::ProfileMap profiles;
    for (const auto& [worker_id, tally] : tallies)
        profiles.emplace(worker_id,
                         crowdgate::updateProfile(crowdgate::WorkerProfile(worker_id, 0.5),
                                                  tally.first, tally.second, args.smoothing));

    const auto text = crowdgate::toJson(profiles).dump(2) + "\n";
    if (args.out_file.empty())
        std::cout << text;
    else
        writeTextFile(args.out_file, text);
    return 0;
}

// ---- simulate ---------------------------------------------------------

struct SimulateArgs {
    std::string scenario_file;
    std::string metrics_file;
    std::string csv_file;
    std::string transcript_file;
    std::int64_t seed = -1;
};

int runSimulate(const SimulateArgs& args) {
    auto scenario = crowdgate::scenarioFromJson(readJsonFile(args.scenario_file));
    if (args.seed >= 0) scenario.seed = static_cast<std::uint64_t>(args.seed);

    crowdgate::Transcript transcript;
    const bool want_transcript = !args.transcript_file.empty();
    const auto metrics =
        crowdgate::runExperiment(scenario, want_transcript ? &transcript : nullptr);

    const auto metrics_text = crowdgate::toJson(metrics).dump(2) + "\n";
    if (args.metrics_file.empty())
        std::cout << metrics_text;
    else
        writeTextFile(args.metrics_file, metrics_text);
    if (!args.csv_file.empty()) writeTextFile(args.csv_file, crowdgate::metricsCsv(metrics));
    if (want_transcript) {
        std::ofstream out(args.transcript_file, std::ios::binary);
        if (!out) throw crowdgate::Error("cannot write " + args.transcript_file);
        crowdgate::writeTranscript(transcript, out);
    }
    return 0;
}

// ---- suite ------------------------------------------------------------

struct SuiteArgs {
    std::string name;
    std::string config_file;
    std::string out_dir;
    std::int64_t seed = -1;
    bool check = false;
};

int runSuiteCommand(const SuiteArgs& args) {
    auto spec = crowdgate::suiteSpecFromJson(readJsonFile(args.config_file));
    if (spec.name != args.name)
        throw crowdgate::Error("config describes suite '" + spec.name + "', not '" + args.name +
                               "'");
    if (args.seed >= 0) spec.scenario.seed = static_cast<std::uint64_t>(args.seed);

    const auto table = crowdgate::runSuite(spec);

    fs::create_directories(args.out_dir);
    const auto csv_name = args.name + ".csv";
    std::ostringstream csv;
    crowdgate::writeCsv(table, csv);
    writeTextFile(fs::path(args.out_dir) / csv_name, csv.str());
    writeTextFile(fs::path(args.out_dir) / (args.name + ".gp"),
                  crowdgate::gnuplotStub(args.name, csv_name));

    if (args.check && !crowdgate::checkSuite(spec, table, std::cerr)) return 3;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quality-aware crowd answer aggregation"};
    app.require_subcommand(1);

    PredictArgs predict_args;
    auto* predict = app.add_subcommand("predict", "size a HIT for a target accuracy");
    predict->add_option("--target-accuracy", predict_args.target_accuracy,
                        "required probability of a correct majority, in (0,1)")
        ->required();
    predict->add_option("--mean-accuracy", predict_args.mean_accuracy,
                        "mean worker accuracy, must exceed 0.5")
        ->required();
    predict->add_option("--worker-fee", predict_args.worker_fee, "fee paid per worker per HIT");
    predict->add_option("--platform-fee", predict_args.platform_fee,
                        "platform surcharge per worker per HIT");
    predict->add_flag("--json", predict_args.as_json, "emit JSON instead of text");

    VerifyArgs verify_args;
    auto* verify = app.add_subcommand("verify", "fuse a recorded observation");
    verify->add_option("--transcript", verify_args.transcript,
                       "question document: domain, votes, profiles")
        ->required();
    auto* m_opt = verify->add_option("--m", verify_args.m_override,
                                     "fixed answer-domain size (at least 2)");
    verify->add_option("--epsilon", verify_args.epsilon,
                       "rarity threshold for domain-size estimation")
        ->excludes(m_opt);

    OnlineArgs online_args;
    auto* online = app.add_subcommand("online", "replay votes with termination tracing");
    online->add_option("--transcript", online_args.transcript,
                       "question document: domain, votes, profiles")
        ->required();
    online->add_option("--strategy", online_args.strategy,
                       "none | minmax | minexp | expmax")
        ->required();
    online->add_option("--mu", online_args.mu, "mean accuracy assumed for unseen votes")
        ->required();

    ProfilesArgs profiles_args;
    auto* profiles = app.add_subcommand("profiles", "rebuild worker profiles from transcripts");
    profiles->add_option("--from-transcripts", profiles_args.from_dir,
                         "directory of transcript NDJSON files")
        ->required()
        ->check(CLI::ExistingDirectory);
    profiles->add_option("--smoothing", profiles_args.smoothing,
                         "pseudo-count added to each side of the golden tally");
    profiles->add_option("--out", profiles_args.out_file, "write the store here instead of stdout");

    SimulateArgs simulate_args;
    auto* simulate = app.add_subcommand("simulate", "run a scenario end to end");
    simulate->add_option("--scenario", simulate_args.scenario_file, "scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    simulate->add_option("--metrics", simulate_args.metrics_file,
                         "write metrics JSON here instead of stdout");
    simulate->add_option("--csv", simulate_args.csv_file, "also write metrics as CSV");
    simulate->add_option("--transcript", simulate_args.transcript_file,
                         "record every question as NDJSON");
    simulate->add_option("--seed", simulate_args.seed, "override the scenario seed");

    SuiteArgs suite_args;
    auto* suite = app.add_subcommand("suite", "run a named experiment sweep");
    suite->add_option("name", suite_args.name,
                      "worker_counts | accuracy_vs_workers | termination | sampling_rate")
        ->required();
    suite->add_option("--config", suite_args.config_file, "suite spec JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    suite->add_option("--out", suite_args.out_dir, "directory for the CSV and plot stub")
        ->required();
    suite->add_option("--seed", suite_args.seed, "override the scenario seed");
    suite->add_flag("--check", suite_args.check,
                    "validate the suite's documented properties; exit 3 on violation");

    CLI11_PARSE(app, argc, argv);

    try {
        if (predict->parsed()) return runPredict(predict_args);
        if (verify->parsed()) return runVerify(verify_args);
        if (online->parsed()) return runOnline(online_args);
        if (profiles->parsed()) return runProfiles(profiles_args);
        if (simulate->parsed()) return runSimulate(simulate_args);
        if (suite->parsed()) return runSuiteCommand(suite_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
