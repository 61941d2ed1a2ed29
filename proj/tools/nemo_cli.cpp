#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nemo/connector.hpp"
#include "nemo/corpus.hpp"
#include "nemo/corpus_gen.hpp"
#include "nemo/evaluation.hpp"
#include "nemo/orchestrator.hpp"

namespace {

using nemo::kAlgoContent;
using nemo::kAlgoNetwork;
using nemo::kAlgoProfile;
using nemo::kAlgoSelfMention;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitBadInput = 2;

nemo::RateLimitPolicy parse_rate_limit(const std::string& spec) {
    const auto slash = spec.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 >= spec.size()) {
        throw std::invalid_argument("--rate-limit expects REQUESTS/WINDOW_SECONDS, e.g. 350/3600");
    }
    nemo::RateLimitPolicy policy;
    policy.max_requests = std::stol(spec.substr(0, slash));
    policy.window_us = static_cast<std::int64_t>(std::stod(spec.substr(slash + 1)) * 1e6);
    if (policy.max_requests < 1 || policy.window_us < 1) {
        throw std::invalid_argument("--rate-limit values must be positive");
    }
    return policy;
}

std::vector<std::string> parse_order(const std::string& spec) {
    std::vector<std::string> order;
    std::string token;
    std::istringstream in(spec);
    while (std::getline(in, token, ',')) {
        if (token == "P" || token == "profile") order.push_back(kAlgoProfile);
        else if (token == "SM" || token == "self-mention" || token == "self_mention")
            order.push_back(kAlgoSelfMention);
        else if (token == "C" || token == "content") order.push_back(kAlgoContent);
        else if (token == "N" || token == "network") order.push_back(kAlgoNetwork);
        else throw std::invalid_argument("unknown algorithm in --order: " + token);
    }
    return order;
}

nlohmann::json result_to_json(const nemo::SearchResult& result) {
    nlohmann::json j;
    j["query"] = {{"network", result.query.network.name}, {"user_id", result.query.user_id}};
    if (result.confirmed) {
        j["confirmed"] = {{"network", result.confirmed->network.name},
                          {"user_id", result.confirmed->user_id}};
        j["confirmed_rule"] = result.confirmed_rule;
    }
    j["total_requests"] = result.total_requests;
    j["total_elapsed_seconds"] = result.total_elapsed;
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& [name, out] : result.outcomes) {
        nlohmann::json s;
        s["algorithm"] = name;
        s["candidates"] = out.candidates.size();
        s["requests"] = out.requests_used;
        s["elapsed_seconds"] = out.elapsed_seconds;
        if (out.confirmed) s["confirmed"] = out.confirmed->user_id;
        stages.push_back(s);
    }
    j["stages"] = stages;
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& c : result.merged_candidates) {
        nlohmann::json cj;
        cj["rank"] = c.rank;
        cj["user_id"] = c.identity.user_id;
        cj["network"] = c.identity.network.name;
        cj["provenance"] = c.provenance;
        if (!c.submethods.empty()) cj["submethods"] = c.submethods;
        if (c.mention_count > 0) cj["mentions"] = c.mention_count;
        cj["scores"] = c.scores;
        cands.push_back(cj);
    }
    j["candidates"] = cands;
    if (!result.errors.empty()) j["degraded"] = result.errors;
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"finding-nemo: cross-network identity search over fixture corpora"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate a synthetic two-network corpus");
    std::string gen_preset = "paper";
    std::string gen_out;
    std::string gen_config_file;
    std::uint64_t gen_seed = 0;
    int gen_n_users = 0;
    gen->add_option("--preset", gen_preset, "paper|dense|sparse|identical-image");
    gen->add_option("--out", gen_out, "output corpus directory")->required();
    gen->add_option("--config", gen_config_file, "JSON config file (overrides --preset)");
    gen->add_option("--seed", gen_seed, "override the preset seed");
    gen->add_option("--n-users", gen_n_users, "override the pair count (non-quota presets only)");

    // search
    auto* search = app.add_subcommand("search", "search one user's target-network identity");
    std::string s_corpus, s_user, s_order, s_rate = "350/3600", s_format = "table";
    bool s_no_early_exit = false, s_concurrent = false;
    search->add_option("--corpus", s_corpus, "corpus directory")->required();
    search->add_option("--user", s_user, "source-network user id")->required();
    search->add_option("--order", s_order, "stage order, e.g. P,SM,C,N");
    search->add_flag("--no-early-exit", s_no_early_exit, "always run all four stages");
    search->add_option("--rate-limit", s_rate, "REQUESTS/WINDOW_SECONDS (default 350/3600)");
    search->add_option("--format", s_format, "table|json");
    search->add_flag("--concurrent", s_concurrent, "run the four algorithms concurrently");

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate algorithms over the corpus ground truth");
    std::string e_corpus, e_order, e_rate = "350/3600", e_format = "table", e_out;
    std::vector<std::string> e_algorithms;
    bool e_no_early_exit = false;
    int e_jobs = 1;
    eval->add_option("--corpus", e_corpus, "corpus directory")->required();
    eval->add_option("--algorithm", e_algorithms,
                     "profile|content|self-mention|network|integrated|all (repeatable)");
    eval->add_option("--jobs", e_jobs, "evaluate queries in parallel");
    eval->add_option("--out", e_out, "write the JSON report to this file");
    eval->add_option("--order", e_order, "stage order for the integrated run");
    eval->add_flag("--no-early-exit", e_no_early_exit, "integrated run executes all stages");
    eval->add_option("--rate-limit", e_rate, "REQUESTS/WINDOW_SECONDS (default 350/3600)");
    eval->add_option("--format", e_format, "table|json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitBadInput;
    }

    if (gen->parsed()) {
        nemo::CorpusConfig cfg;
        if (!gen_config_file.empty()) {
            std::ifstream in(gen_config_file);
            if (!in) throw nemo::CorpusError("cannot read config file " + gen_config_file);
            cfg = nemo::config_from_json(nlohmann::json::parse(in));
        } else {
            cfg = nemo::preset_config(gen_preset);
        }
        if (gen_seed != 0) cfg.seed = gen_seed;
        if (gen_n_users != 0) {
            if (cfg.quotas) {
                throw std::invalid_argument("--n-users cannot override a quota preset");
            }
            cfg.n_users = gen_n_users;
        }
        const nemo::Corpus corpus = nemo::generate(cfg);
        nemo::save_corpus(corpus, gen_out);
        std::cerr << "generated " << corpus.ground_truth.size() << " pairs, "
                  << corpus.identities.size() << " identities, " << corpus.posts.size()
                  << " posts\n";
        std::cout << gen_out << "\n";
        return kExitOk;
    }

    if (search->parsed()) {
        const nemo::Corpus corpus = nemo::load_corpus(s_corpus);
        nemo::OrchestrationPolicy policy;
        if (!s_order.empty()) policy.order = parse_order(s_order);
        policy.early_exit = !s_no_early_exit;
        nemo::FixtureConnector conn(corpus, parse_rate_limit(s_rate));
        const nemo::SearchResult result =
            s_concurrent ? nemo::find_nemo_concurrent(conn, s_user, policy)
                         : nemo::find_nemo(conn, s_user, policy);
        if (s_format == "json") {
            std::cout << result_to_json(result).dump(2) << "\n";
        } else {
            std::cout << nemo::explain(result, &corpus);
        }
        return kExitOk;
    }

    if (eval->parsed()) {
        const nemo::Corpus corpus = nemo::load_corpus(e_corpus);
        nemo::EvalOptions options;
        options.rate_limit = parse_rate_limit(e_rate);
        options.jobs = e_jobs;
        if (!e_order.empty()) options.policy.order = parse_order(e_order);
        options.policy.early_exit = !e_no_early_exit;
        if (!e_algorithms.empty() &&
            std::find(e_algorithms.begin(), e_algorithms.end(), "all") == e_algorithms.end()) {
            options.which.clear();
            for (const auto& a : e_algorithms) {
                if (a == "integrated") options.which.insert(nemo::kEvalIntegrated);
                else {
                    const auto parsed = parse_order(a);
                    options.which.insert(parsed.begin(), parsed.end());
                }
            }
        }
        const nemo::EvalReport report = nemo::evaluate(corpus, options);
        if (!e_out.empty()) {
            std::ofstream out(e_out, std::ios::binary);
            if (!out) throw nemo::CorpusError("cannot write " + e_out);
            out << report.to_json().dump(2) << "\n";
        }
        if (e_format == "json") {
            std::cout << report.to_json().dump(2) << "\n";
        } else {
            std::cout << report.to_table();
        }
        return kExitOk;
    }

    return kExitBadInput;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const nemo::NotFoundError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const nemo::CorpusError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
