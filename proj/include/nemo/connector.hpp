#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nemo/core.hpp"
#include "nemo/corpus.hpp"
#include "nemo/sim_clock.hpp"
#include "nemo/similarity.hpp"

namespace nemo {

/// Result of following one URL through the fixture web.
struct ResolvedTarget {
    std::string final_url;
    std::optional<IdentityRef> target_identity;
    bool via_page_scan = false;  // true when found by scanning the landing page
    bool failed = false;         // redirect loop, hop limit, or unknown page
};

enum class NetworkRelation { follower, followee, friend_ };

NetworkRelation relation_from_string(std::string_view s);

// Simulated latencies, chosen so the qualitative timing ordering of the
// algorithms (URL-heavy searches slowest) shows up on the simulated clock.
inline constexpr std::int64_t kSearchLatencyUs = 200000;    // 0.2 s per API call
inline constexpr std::int64_t kUrlHopLatencyUs = 1000000;   // 1.0 s per URL fetch
inline constexpr std::int64_t kPageScanLatencyUs = 2000000; // 2.0 s per page scan

/// Read-only adapter over a pair of social networks. Every operation charges
/// its documented request cost against the shared rate limiter and advances
/// the simulated clock.
class Connector {
  public:
    virtual ~Connector() = default;

    /// 1 request. Unknown id -> NotFoundError.
    virtual Identity lookup_identity(const NetworkKind& network, const std::string& user_id) = 0;

    /// Searchable target identities whose display name matches and whose
    /// location is compatible, sorted by user_id and capped. 1 request.
    virtual std::vector<Identity> search_by_name_location(
        const std::string& name, const std::optional<std::string>& location, int cap) = 0;

    /// The unique searchable target identity holding this username. 1 request.
    virtual std::optional<Identity> search_by_username(const std::string& username) = 0;

    /// Public target posts whose processed text contains the query
    /// (case-insensitive substring). 1 request.
    virtual std::vector<std::pair<Identity, Post>> search_posts_by_text(const std::string& text,
                                                                        int cap) = 0;

    /// Newest-first public posts of one identity, at most n. 1 request.
    virtual std::vector<Post> fetch_recent_posts(const IdentityRef& id, int n) = 0;

    /// Member list of a source-network identity; friend = follower ∩ followee.
    /// 1 request per page of 100 members.
    virtual std::vector<Identity> fetch_network(const IdentityRef& id, NetworkRelation kind) = 0;

    /// Friend list of a target identity when public, absent otherwise. 1 request.
    virtual std::optional<std::vector<Identity>> fetch_friend_list(const IdentityRef& id) = 0;

    /// Follows the fixture redirect chain (at most 5 fetches, 1 request +
    /// 1 s each) and falls back to scanning the landing page's links
    /// (1 request + 2 s). Results are cached per connector instance.
    virtual ResolvedTarget resolve_url(const std::string& url) = 0;

    /// Raster delivered with the profile payload; no request charge.
    virtual std::optional<Image> profile_image(const IdentityRef& id) = 0;

    /// Attributes already on the page that produced `id` (username, entity
    /// class, image key); no request charge.
    virtual std::optional<Identity> peek_identity(const IdentityRef& id) const = 0;

    virtual const NetworkKind& source_network() const = 0;
    virtual const NetworkKind& target_network() const = 0;

    virtual long requests_used() const = 0;
    virtual double elapsed_seconds() const = 0;
    virtual long rate_windows_crossed() const = 0;
};

/// Corpus-backed connector. Deterministic: identical corpus and call
/// sequence yield identical results, request counts and clock readings.
/// Shareable across threads; the limiter+clock charge is the single
/// synchronized section.
class FixtureConnector : public Connector {
  public:
    explicit FixtureConnector(const Corpus& corpus, RateLimitPolicy policy = {});

    Identity lookup_identity(const NetworkKind& network, const std::string& user_id) override;
    std::vector<Identity> search_by_name_location(const std::string& name,
                                                  const std::optional<std::string>& location,
                                                  int cap) override;
    std::optional<Identity> search_by_username(const std::string& username) override;
    std::vector<std::pair<Identity, Post>> search_posts_by_text(const std::string& text,
                                                                int cap) override;
    std::vector<Post> fetch_recent_posts(const IdentityRef& id, int n) override;
    std::vector<Identity> fetch_network(const IdentityRef& id, NetworkRelation kind) override;
    std::optional<std::vector<Identity>> fetch_friend_list(const IdentityRef& id) override;
    ResolvedTarget resolve_url(const std::string& url) override;
    std::optional<Image> profile_image(const IdentityRef& id) override;
    std::optional<Identity> peek_identity(const IdentityRef& id) const override;

    const NetworkKind& source_network() const override { return corpus_->source_network; }
    const NetworkKind& target_network() const override { return corpus_->target_network; }

    long requests_used() const override { return limiter_.total_acquired(); }
    double elapsed_seconds() const override { return clock_.now_seconds(); }
    long rate_windows_crossed() const override { return limiter_.windows_crossed(); }

    SimClock& clock() { return clock_; }

  private:
    void charge(long units, std::int64_t latency_us_each);

    const Corpus* corpus_;
    SimClock clock_;
    RateLimiter limiter_;
    std::mutex mu_;
    std::map<std::string, ResolvedTarget> resolve_cache_;
};

/// Target-network profile URL for an identity, in the scheme the fixture
/// web uses ("https://<network>.net/<username>").
std::string profile_url(const Identity& id);

}  // namespace nemo
