#include "nemo/orchestrator.hpp"

#include <algorithm>
#include <future>
#include <set>
#include <sstream>

namespace nemo {

namespace {

const char* rule_for_stage_confirmation(const std::string& algo) {
    if (algo == kAlgoProfile) return kRuleSelfIdentification;
    if (algo == kAlgoSelfMention) return kRuleSelfMention;
    if (algo == kAlgoNetwork) return kRuleNetworkConfirmation;
    return "confirmed";
}

/// Rule (b): a candidate seen by two or more algorithms. Largest provenance
/// set wins, ties by ascending user_id.
const Candidate* multi_algorithm_hit(const std::vector<Candidate>& merged) {
    const Candidate* best = nullptr;
    for (const auto& c : merged) {
        if (c.provenance.size() < 2) continue;
        if (!best || c.provenance.size() > best->provenance.size() ||
            (c.provenance.size() == best->provenance.size() &&
             c.identity.user_id < best->identity.user_id)) {
            best = &c;
        }
    }
    return best;
}

void finalize_merged(SearchResult& result) {
    if (result.confirmed) {
        auto it = std::find_if(result.merged_candidates.begin(), result.merged_candidates.end(),
                               [&](const Candidate& c) { return c.identity == *result.confirmed; });
        if (it != result.merged_candidates.end() && it != result.merged_candidates.begin()) {
            std::rotate(result.merged_candidates.begin(), it, it + 1);
        }
    }
    int rank = 1;
    for (auto& c : result.merged_candidates) c.rank = rank++;
}

void apply_exit_rules(SearchResult& result, const std::string& stage_algo,
                      const AlgorithmOutcome& outcome) {
    if (result.confirmed) return;
    if (outcome.confirmed) {
        result.confirmed = outcome.confirmed;
        result.confirmed_rule = rule_for_stage_confirmation(stage_algo);
        return;
    }
    if (const Candidate* hit = multi_algorithm_hit(result.merged_candidates)) {
        result.confirmed = hit->identity;
        result.confirmed_rule = kRuleMultiAlgorithm;
    }
}

}  // namespace

void OrchestrationPolicy::validate() const {
    const std::set<std::string> expected{kAlgoProfile, kAlgoContent, kAlgoSelfMention,
                                         kAlgoNetwork};
    if (std::set<std::string>(order.begin(), order.end()) != expected ||
        order.size() != expected.size()) {
        throw std::invalid_argument("policy order must be a permutation of the four algorithms");
    }
}

SearchResult find_nemo(Connector& conn, const std::string& user_id,
                       const OrchestrationPolicy& policy) {
    policy.validate();
    SearchResult result;
    result.query = IdentityRef{conn.source_network(), user_id};

    const long req0 = conn.requests_used();
    const double t0 = conn.elapsed_seconds();

    for (const std::string& algo : policy.order) {
        AlgorithmOutcome outcome;
        try {
            outcome = run_algorithm(algo, conn, user_id);
        } catch (const NotFoundError&) {
            throw;  // the queried user does not exist
        } catch (const std::exception& e) {
            outcome.algorithm = algo;
            result.errors.push_back(algo + ": " + e.what());
        }

        std::vector<Candidate> pool = result.merged_candidates;
        pool.insert(pool.end(), outcome.candidates.begin(), outcome.candidates.end());
        result.merged_candidates = dedupe_candidates(pool);

        apply_exit_rules(result, algo, outcome);
        result.outcomes.emplace_back(algo, std::move(outcome));
        if (result.confirmed && policy.early_exit) break;
    }

    finalize_merged(result);
    result.total_requests = conn.requests_used() - req0;
    result.total_elapsed = conn.elapsed_seconds() - t0;
    return result;
}

SearchResult find_nemo_concurrent(Connector& conn, const std::string& user_id,
                                  const OrchestrationPolicy& policy) {
    policy.validate();
    SearchResult result;
    result.query = IdentityRef{conn.source_network(), user_id};

    const long req0 = conn.requests_used();
    const double t0 = conn.elapsed_seconds();

    std::vector<std::future<AlgorithmOutcome>> futures;
    futures.reserve(policy.order.size());
    for (const std::string& algo : policy.order) {
        futures.push_back(std::async(std::launch::async, [&conn, &user_id, algo]() {
            return run_algorithm(algo, conn, user_id);
        }));
    }

    std::vector<AlgorithmOutcome> outcomes;
    std::exception_ptr not_found;
    for (std::size_t i = 0; i < futures.size(); ++i) {
        AlgorithmOutcome outcome;
        try {
            outcome = futures[i].get();
        } catch (const NotFoundError&) {
            not_found = std::current_exception();
        } catch (const std::exception& e) {
            outcome.algorithm = policy.order[i];
            result.errors.push_back(policy.order[i] + ": " + e.what());
        }
        outcomes.push_back(std::move(outcome));
    }
    if (not_found) std::rethrow_exception(not_found);

    // Exit rules applied in policy order over the completed outcomes.
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        std::vector<Candidate> pool = result.merged_candidates;
        pool.insert(pool.end(), outcomes[i].candidates.begin(), outcomes[i].candidates.end());
        result.merged_candidates = dedupe_candidates(pool);
        apply_exit_rules(result, policy.order[i], outcomes[i]);
        result.outcomes.emplace_back(policy.order[i], std::move(outcomes[i]));
    }

    finalize_merged(result);
    result.total_requests = conn.requests_used() - req0;
    result.total_elapsed = conn.elapsed_seconds() - t0;
    return result;
}

namespace {

std::string describe_identity(const IdentityRef& ref, const Corpus* corpus) {
    std::string s = ref.user_id + " (" + ref.network.name + ")";
    if (corpus) {
        if (const Identity* id = corpus->find(ref)) {
            s += " @" + id->username + " \"" + id->display_name + "\"";
        }
    }
    return s;
}

}  // namespace

std::string explain(const SearchResult& result, const Corpus* corpus) {
    std::ostringstream os;
    os << "query: " << describe_identity(result.query, corpus) << "\n";
    if (result.confirmed) {
        os << "confirmed: " << describe_identity(*result.confirmed, corpus) << " via "
           << result.confirmed_rule << "\n";
    } else {
        os << "confirmed: none\n";
    }
    os << "total: " << result.total_requests << " requests, " << result.total_elapsed
       << "s simulated\n";

    os << "stages:\n";
    char line[160];
    std::snprintf(line, sizeof(line), "  %-14s %10s %10s %12s  %s\n", "algorithm", "candidates",
                  "requests", "elapsed(s)", "confirmed");
    os << line;
    for (const auto& [algo, outcome] : result.outcomes) {
        std::snprintf(line, sizeof(line), "  %-14s %10zu %10ld %12.1f  %s\n", algo.c_str(),
                      outcome.candidates.size(), outcome.requests_used, outcome.elapsed_seconds,
                      outcome.confirmed ? outcome.confirmed->user_id.c_str() : "-");
        os << line;
    }

    if (result.merged_candidates.empty()) {
        os << "no candidates\n";
    } else {
        os << "candidates:\n";
        for (const auto& c : result.merged_candidates) {
            os << "  #" << c.rank << " " << describe_identity(c.identity, corpus);
            os << " provenance=";
            bool first = true;
            for (const auto& p : c.provenance) {
                os << (first ? "" : "+") << p;
                first = false;
            }
            if (!c.submethods.empty()) {
                os << " submethods=";
                first = true;
                for (const auto& s : c.submethods) {
                    os << (first ? "" : "+") << s;
                    first = false;
                }
            }
            if (c.mention_count > 0) os << " mentions=" << c.mention_count;
            for (const auto& [algo, score] : c.scores) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), " %s=%.3f", algo.c_str(), score);
                os << buf;
            }
            os << "\n";
        }
    }
    for (const auto& err : result.errors) os << "degraded: " << err << "\n";
    return os.str();
}

}  // namespace nemo
