#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nemo {

/// Label of one social network. Identities are never comparable across
/// networks by id equality; only ground truth or a search links them.
struct NetworkKind {
    std::string name;
    auto operator<=>(const NetworkKind&) const = default;
};

enum class EntityClass { person, page, community };

std::string to_string(EntityClass c);
EntityClass entity_class_from_string(std::string_view s);

/// (network, user_id) handle for one account.
struct IdentityRef {
    NetworkKind network;
    std::string user_id;
    auto operator<=>(const IdentityRef&) const = default;
};

/// One user account on one network: public profile attributes plus the
/// visibility flags that gate what a connector may return about it.
struct Identity {
    NetworkKind network;
    std::string user_id;
    std::string username;
    std::string display_name;
    std::optional<std::string> location;
    std::optional<std::string> image_key;
    std::optional<std::string> url_field;
    bool searchable = true;
    bool posts_public = true;
    bool friendlist_public = false;
    EntityClass entity_class = EntityClass::person;

    IdentityRef ref() const { return IdentityRef{network, user_id}; }
};

/// One content item. `urls` always equals the URL tokens extractable from
/// `text` (enforced on load, re-derived by the corpus audit).
struct Post {
    IdentityRef author;
    std::string text;
    std::int64_t timestamp = 0;
    std::vector<std::string> urls;
    std::optional<std::string> source_app;
};

// Score / provenance keys shared by the algorithms and the evaluator.
inline constexpr const char* kAlgoProfile = "profile";
inline constexpr const char* kAlgoContent = "content";
inline constexpr const char* kAlgoSelfMention = "self_mention";
inline constexpr const char* kAlgoNetwork = "network";

// Profile sub-method tags.
inline constexpr const char* kSubUrl = "URL";
inline constexpr const char* kSubUsername = "SU";
inline constexpr const char* kSubNameLocation = "NL";

/// A target-network identity proposed for the queried user.
struct Candidate {
    IdentityRef identity;
    std::map<std::string, double> scores;  // algorithm name -> score in [0,1]
    std::set<std::string> provenance;      // algorithm names that produced it
    std::set<std::string> submethods;      // profile sub-method tags (URL/SU/NL)
    int rank = 0;                          // 1-based, assigned after ranking
    int mention_count = 0;                 // distinct posts referencing it
    int discovery_order = 0;               // position before ranking ("non-ranked")
};

/// Outcome of one algorithm for one query, timings on the simulated clock.
struct AlgorithmOutcome {
    std::string algorithm;
    std::vector<Candidate> candidates;  // sorted by descending score, ties by user_id
    std::optional<IdentityRef> confirmed;
    long requests_used = 0;
    double elapsed_seconds = 0.0;
};

/// Full outcome of one query across algorithms.
struct SearchResult {
    IdentityRef query;
    std::vector<std::pair<std::string, AlgorithmOutcome>> outcomes;  // stage order
    std::vector<Candidate> merged_candidates;  // deduplicated by (network, user_id)
    std::optional<IdentityRef> confirmed;
    std::string confirmed_rule;  // which exit rule justified `confirmed`
    double total_elapsed = 0.0;
    long total_requests = 0;
    std::vector<std::string> errors;  // degraded algorithm failures

    const AlgorithmOutcome* outcome(std::string_view algorithm) const;
};

struct NotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Lowercases, strips surrounding whitespace and leading '@' sigils.
/// Idempotent; empty in -> empty out.
std::string normalize_username(std::string_view raw);

/// One candidate per (network, user_id): provenance and sub-method sets are
/// unioned, score maps merged (higher score wins on key collision),
/// mention counts summed, first-seen order and discovery_order kept.
std::vector<Candidate> dedupe_candidates(const std::vector<Candidate>& cands);

/// URL tokens of a post text: whitespace-delimited tokens that carry an
/// http(s) scheme or look like bare host/path ("target.net/alice"),
/// trailing punctuation stripped.
std::vector<std::string> extract_urls(const std::string& text);

std::string ascii_lower(std::string_view s);

/// Canonical form used to compare URLs: scheme and "www." stripped,
/// host lowercased, trailing '/' removed.
std::string canonical_url(std::string_view url);

/// Host part of a canonicalized URL ("https://A.net/x" -> "a.net").
std::string url_host(std::string_view url);

}  // namespace nemo
