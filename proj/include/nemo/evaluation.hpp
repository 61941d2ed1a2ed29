#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "nemo/corpus.hpp"
#include "nemo/orchestrator.hpp"
#include "nemo/sim_clock.hpp"

namespace nemo {

inline constexpr const char* kEvalIntegrated = "integrated";

/// Aggregated metrics for one algorithm (or the integrated system) over a
/// corpus run. Counts are exact integers; accuracy is identified/queried.
struct AlgorithmEval {
    long identified = 0;
    double accuracy = 0.0;
    long confirmed_count = 0;
    std::map<long, long> candidate_set_size_hist;
    std::map<long, long> rank_of_correct_hist;      // identified queries only
    std::map<long, long> nonranked_rank_hist;       // profile only
    std::map<std::string, long> elapsed_hist;       // simulated-time buckets
    double mean_elapsed = 0.0;
    double mean_candidates = 0.0;
    double mean_rank_of_correct = 0.0;   // 0 when nothing identified
    double mean_nonranked_rank = 0.0;    // profile only
    long requests_total = 0;
    std::map<std::string, long> confirmed_by_rule;  // integrated only
};

struct EvalReport {
    std::string corpus_id;
    long n_queries = 0;
    std::vector<std::string> order;
    bool early_exit = true;
    std::map<std::string, AlgorithmEval> algorithms;  // keyed by algorithm / "integrated"
    std::map<std::string, long> submethod_counts;     // URL / SU / NL rows + unions
    /// (domain, users, percent of queried users), sorted by percent desc.
    std::vector<std::tuple<std::string, long, double>> domain_frequency;

    nlohmann::json to_json() const;
    std::string to_table() const;
};

struct EvalOptions {
    /// Algorithms to evaluate; may also contain "integrated".
    std::set<std::string> which{kAlgoProfile, kAlgoContent, kAlgoSelfMention, kAlgoNetwork,
                                kEvalIntegrated};
    OrchestrationPolicy policy;
    RateLimitPolicy rate_limit;
    int jobs = 1;  // >1 evaluates queries in parallel (OpenMP)
};

/// Runs every selected algorithm for every ground-truth pair, each query
/// against a fresh connector session (own simulated clock and rate limiter).
/// A query counts as identified iff the true counterpart appears in the
/// candidate set. Deterministic; the parallel path produces a report equal
/// to the serial reference.
EvalReport evaluate(const Corpus& corpus, const EvalOptions& options = {});

/// Serial reference implementation kept alongside the parallel path.
EvalReport evaluate_serial(const Corpus& corpus, const EvalOptions& options = {});

/// 1-based position of the true identity in a ranked candidate list.
std::optional<int> rank_of_correct(const std::vector<Candidate>& candidates,
                                   const IdentityRef& truth);

/// Share of queried users posting at least one URL whose resolved domain is
/// the given host, sorted descending.
std::vector<std::tuple<std::string, long, double>> domain_frequency_report(const Corpus& corpus);

/// Per-metric deltas between two runs of the same corpus; throws on a
/// corpus-id mismatch.
nlohmann::json compare_runs(const EvalReport& a, const EvalReport& b);

}  // namespace nemo
