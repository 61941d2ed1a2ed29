#pragma once

#include <string>

#include "nemo/connector.hpp"
#include "nemo/core.hpp"

namespace nemo {

/// early_exit: a URL self-identification returns immediately with that single
/// candidate. exhaustive: all three sub-methods always run so per-sub-method
/// attribution (URL/SU/NL) is complete; used by the evaluator.
enum class ProfileMode { early_exit, exhaustive };

inline constexpr int kNameLocationCap = 60;
inline constexpr int kRecentPostCap = 100;
inline constexpr int kContentQueryLimit = 75;   // characters kept per post query
inline constexpr int kContentMinQueryLength = 5;
inline constexpr int kContentSearchCap = 100;

/// Truncates to the query limit and strips non-ASCII bytes.
std::string process_post_text(const std::string& text);

/// Profile-dimension search: URL self-identification (direct or via page
/// scan), same-username lookup, name+location search, then ranking by
/// profile-image histogram similarity. Candidates without a comparable image
/// keep their pre-ranking order below all scored candidates.
AlgorithmOutcome profile_search(Connector& conn, const std::string& user_id,
                                ProfileMode mode = ProfileMode::early_exit);

/// Content-dimension search: each recent post, truncated and ASCII-stripped,
/// queries the target network; candidates ranked by cosine similarity of the
/// original post texts. Never confirms on its own.
AlgorithmOutcome content_search(Connector& conn, const std::string& user_id);

/// Self-mention search: resolves URLs embedded in recent posts, keeps person
/// identities on the target network, ranks by username Jaro similarity and
/// confirms when the top-ranked candidate is also the most frequently
/// referenced one.
AlgorithmOutcome self_mention_search(Connector& conn, const std::string& user_id);

/// Network-dimension search over follower, followee and friend networks:
/// members self-identified via their URL field are mapped to the target
/// network, their public friend lists scanned for name matches, and an
/// identity listed by two distinct members is confirmed. Stops as soon as a
/// tally reaches two.
AlgorithmOutcome network_search(Connector& conn, const std::string& user_id);

/// Runs the algorithm selected by name ("profile", "content", "self_mention",
/// "network").
AlgorithmOutcome run_algorithm(const std::string& name, Connector& conn,
                               const std::string& user_id,
                               ProfileMode profile_mode = ProfileMode::early_exit);

}  // namespace nemo
