#pragma once

#include <string>
#include <vector>

#include "nemo/connector.hpp"
#include "nemo/core.hpp"
#include "nemo/search.hpp"

namespace nemo {

// Exit-rule names recorded in SearchResult::confirmed_rule.
inline constexpr const char* kRuleSelfIdentification = "self-identification";
inline constexpr const char* kRuleSelfMention = "self-mention";
inline constexpr const char* kRuleNetworkConfirmation = "network-confirmation";
inline constexpr const char* kRuleMultiAlgorithm = "multi-algorithm";

struct OrchestrationPolicy {
    /// Serial stage order; must be a permutation of the four algorithms.
    std::vector<std::string> order{kAlgoProfile, kAlgoSelfMention, kAlgoContent, kAlgoNetwork};
    /// Stop running further stages once an exit rule fires.
    bool early_exit = true;

    void validate() const;
};

/// Runs the four algorithms serially in policy order. After each stage the
/// exit rules are checked in priority: (a) the stage itself confirmed an
/// identity (self-identification, self-mention, network tally), then (b) some
/// candidate has been produced by two or more algorithms so far. The first
/// rule to fire decides `confirmed` in both early-exit and full runs, so
/// disabling early exit never changes the confirmed identity, only the work
/// done. Candidate sets of the stages that ran are OR-merged and
/// deduplicated, with a confirmed identity hoisted to rank 1. Algorithm
/// failures degrade to empty outcomes; an unknown query user still throws.
SearchResult find_nemo(Connector& conn, const std::string& user_id,
                       const OrchestrationPolicy& policy = {});

/// Runs all four algorithms on concurrent threads against the same connector
/// and applies the same exit-rule scan afterwards. Guaranteed to agree with
/// the serial mode's confirmed identity whenever serial mode confirms by
/// rule (a) at its first stage; per-stage request/elapsed attribution is not
/// meaningful in this mode.
SearchResult find_nemo_concurrent(Connector& conn, const std::string& user_id,
                                  const OrchestrationPolicy& policy = {});

/// Human-readable provenance report: confirmed identity and rule, per-stage
/// accounting, per-candidate scores/provenance/sub-methods/mention counts.
std::string explain(const SearchResult& result, const Corpus* corpus = nullptr);

}  // namespace nemo
