#include "nemo/connector.hpp"

#include <algorithm>
#include <set>

namespace nemo {

namespace {

constexpr int kPageSize = 100;

}  // namespace

NetworkRelation relation_from_string(std::string_view s) {
    if (s == "follower") return NetworkRelation::follower;
    if (s == "followee") return NetworkRelation::followee;
    if (s == "friend") return NetworkRelation::friend_;
    throw std::invalid_argument("unknown network relation: " + std::string(s));
}

std::string profile_url(const Identity& id) {
    return "https://" + id.network.name + ".net/" + id.username;
}

FixtureConnector::FixtureConnector(const Corpus& corpus, RateLimitPolicy policy)
    : corpus_(&corpus), limiter_(policy, clock_) {}

void FixtureConnector::charge(long units, std::int64_t latency_us_each) {
    std::lock_guard<std::mutex> lock(mu_);
    for (long i = 0; i < units; ++i) {
        limiter_.acquire();
        clock_.advance_us(latency_us_each);
    }
}

Identity FixtureConnector::lookup_identity(const NetworkKind& network,
                                           const std::string& user_id) {
    charge(1, kSearchLatencyUs);
    const Identity* id = corpus_->find(network, user_id);
    if (!id) throw NotFoundError("no identity " + user_id + " on " + network.name);
    return *id;
}

std::vector<Identity> FixtureConnector::search_by_name_location(
    const std::string& name, const std::optional<std::string>& location, int cap) {
    if (cap < 1) throw std::invalid_argument("cap must be >= 1");
    charge(1, kSearchLatencyUs);
    std::vector<const Identity*> hits;
    for (const auto& id : corpus_->identities) {
        if (id.network != corpus_->target_network || !id.searchable) continue;
        if (!name_match(name, id.display_name)) continue;
        if (!location_compatible(location, id.location)) continue;
        hits.push_back(&id);
    }
    std::sort(hits.begin(), hits.end(),
              [](const Identity* a, const Identity* b) { return a->user_id < b->user_id; });
    if (hits.size() > static_cast<std::size_t>(cap)) hits.resize(cap);
    std::vector<Identity> out;
    out.reserve(hits.size());
    for (const Identity* h : hits) out.push_back(*h);
    return out;
}

std::optional<Identity> FixtureConnector::search_by_username(const std::string& username) {
    charge(1, kSearchLatencyUs);
    const std::string normalized = normalize_username(username);
    if (normalized.empty()) return std::nullopt;
    const Identity* id = corpus_->find_by_username(corpus_->target_network, normalized);
    if (!id || !id->searchable) return std::nullopt;
    return *id;
}

std::vector<std::pair<Identity, Post>> FixtureConnector::search_posts_by_text(
    const std::string& text, int cap) {
    charge(1, kSearchLatencyUs);
    std::vector<std::pair<Identity, Post>> out;
    if (text.empty()) return out;
    const std::string query = ascii_lower(text);

    struct Hit {
        const Identity* author;
        const Post* post;
    };
    std::vector<Hit> hits;
    for (const auto& post : corpus_->posts) {
        if (post.author.network != corpus_->target_network) continue;
        const Identity* author = corpus_->find(post.author);
        if (!author || !author->posts_public) continue;
        // Matching runs over the same preprocessing the search algorithms use.
        std::string processed = post.text.substr(0, 75);
        processed.erase(std::remove_if(processed.begin(), processed.end(),
                                       [](unsigned char c) { return c > 127; }),
                        processed.end());
        if (ascii_lower(processed).find(query) == std::string::npos) continue;
        hits.push_back(Hit{author, &post});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.author->user_id != b.author->user_id) return a.author->user_id < b.author->user_id;
        return a.post->timestamp > b.post->timestamp;
    });
    if (cap > 0 && hits.size() > static_cast<std::size_t>(cap)) hits.resize(cap);
    out.reserve(hits.size());
    for (const Hit& h : hits) out.emplace_back(*h.author, *h.post);
    return out;
}

std::vector<Post> FixtureConnector::fetch_recent_posts(const IdentityRef& id, int n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    charge(1, kSearchLatencyUs);
    const Identity* owner = corpus_->find(id);
    if (!owner) throw NotFoundError("no identity " + id.user_id + " on " + id.network.name);
    std::vector<Post> out;
    if (!owner->posts_public) return out;
    auto it = corpus_->posts_by_author.find(id);
    if (it == corpus_->posts_by_author.end()) return out;
    for (std::size_t idx : it->second) {
        if (out.size() >= static_cast<std::size_t>(n)) break;
        out.push_back(corpus_->posts[idx]);
    }
    return out;
}

std::vector<Identity> FixtureConnector::fetch_network(const IdentityRef& id,
                                                      NetworkRelation kind) {
    const Identity* owner = corpus_->find(id);
    if (!owner) throw NotFoundError("no identity " + id.user_id + " on " + id.network.name);

    std::vector<std::string> member_ids;
    auto get = [&](const std::map<IdentityRef, std::vector<std::string>>& adj) {
        auto it = adj.find(id);
        return it == adj.end() ? std::vector<std::string>{} : it->second;
    };
    switch (kind) {
        case NetworkRelation::follower: member_ids = get(corpus_->follows_in); break;
        case NetworkRelation::followee: member_ids = get(corpus_->follows_out); break;
        case NetworkRelation::friend_: {
            const auto in = get(corpus_->follows_in);
            const auto out = get(corpus_->follows_out);
            std::set_intersection(in.begin(), in.end(), out.begin(), out.end(),
                                  std::back_inserter(member_ids));
            break;
        }
    }
    const long pages =
        std::max<long>(1, (static_cast<long>(member_ids.size()) + kPageSize - 1) / kPageSize);
    charge(pages, kSearchLatencyUs);

    std::vector<Identity> out;
    out.reserve(member_ids.size());
    for (const auto& mid : member_ids) {
        const Identity* m = corpus_->find(IdentityRef{id.network, mid});
        if (m) out.push_back(*m);
    }
    return out;
}

std::optional<std::vector<Identity>> FixtureConnector::fetch_friend_list(const IdentityRef& id) {
    charge(1, kSearchLatencyUs);
    const Identity* owner = corpus_->find(id);
    if (!owner) throw NotFoundError("no identity " + id.user_id + " on " + id.network.name);
    if (!owner->friendlist_public) return std::nullopt;
    std::vector<Identity> out;
    auto it = corpus_->friends.find(id);
    if (it != corpus_->friends.end()) {
        for (const auto& fid : it->second) {
            const Identity* f = corpus_->find(IdentityRef{id.network, fid});
            if (f) out.push_back(*f);
        }
    }
    return out;
}

ResolvedTarget FixtureConnector::resolve_url(const std::string& url) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = resolve_cache_.find(url);
        if (it != resolve_cache_.end()) return it->second;
    }

    const UrlTrace trace = trace_url(*corpus_, url);
    charge(trace.fetches, kUrlHopLatencyUs);
    if (trace.page_scanned) charge(1, kPageScanLatencyUs);

    ResolvedTarget result;
    result.final_url = trace.final_url;
    result.failed = trace.failed;
    result.via_page_scan = trace.via_page_scan;
    if (trace.identity) result.target_identity = trace.identity->ref();

    std::lock_guard<std::mutex> lock(mu_);
    resolve_cache_.emplace(url, result);
    return result;
}

std::optional<Image> FixtureConnector::profile_image(const IdentityRef& id) {
    const Identity* owner = corpus_->find(id);
    if (!owner) return std::nullopt;
    return corpus_->image_of(*owner);
}

std::optional<Identity> FixtureConnector::peek_identity(const IdentityRef& id) const {
    const Identity* owner = corpus_->find(id);
    if (!owner) return std::nullopt;
    return *owner;
}

}  // namespace nemo
