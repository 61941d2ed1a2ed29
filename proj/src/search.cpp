#include "nemo/search.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "nemo/similarity.hpp"

namespace nemo {

namespace {

/// Captures request/clock baselines and stamps the outcome on completion.
class Meter {
  public:
    Meter(Connector& conn, AlgorithmOutcome& out)
        : conn_(conn), out_(out), req0_(conn.requests_used()), t0_(conn.elapsed_seconds()) {}
    ~Meter() {
        out_.requests_used = conn_.requests_used() - req0_;
        out_.elapsed_seconds = conn_.elapsed_seconds() - t0_;
    }

  private:
    Connector& conn_;
    AlgorithmOutcome& out_;
    long req0_;
    double t0_;
};

/// Scored candidates first (descending score, ties by ascending user_id),
/// unscored ones after in discovery order. Ranks assigned 1..n.
void rank_candidates(std::vector<Candidate>& cands, const std::string& algo) {
    std::stable_sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
        const auto sa = a.scores.find(algo);
        const auto sb = b.scores.find(algo);
        const bool ha = sa != a.scores.end();
        const bool hb = sb != b.scores.end();
        if (ha != hb) return ha;
        if (!ha) return a.discovery_order < b.discovery_order;
        if (sa->second != sb->second) return sa->second > sb->second;
        return a.identity.user_id < b.identity.user_id;
    });
    int rank = 1;
    for (auto& c : cands) c.rank = rank++;
}

void renumber_discovery(std::vector<Candidate>& cands) {
    int order = 0;
    for (auto& c : cands) c.discovery_order = order++;
}

Candidate make_candidate(const IdentityRef& ref, const std::string& algo) {
    Candidate c;
    c.identity = ref;
    c.provenance.insert(algo);
    return c;
}

}  // namespace

std::string process_post_text(const std::string& text) {
    std::string processed = text.substr(0, kContentQueryLimit);
    processed.erase(std::remove_if(processed.begin(), processed.end(),
                                   [](unsigned char c) { return c > 127; }),
                    processed.end());
    return processed;
}

AlgorithmOutcome profile_search(Connector& conn, const std::string& user_id, ProfileMode mode) {
    AlgorithmOutcome out;
    out.algorithm = kAlgoProfile;
    Meter meter(conn, out);

    const Identity nemo = conn.lookup_identity(conn.source_network(), user_id);

    std::vector<Candidate> collected;
    if (nemo.url_field && !nemo.url_field->empty()) {
        const ResolvedTarget rt = conn.resolve_url(*nemo.url_field);
        if (!rt.failed && rt.target_identity) {
            Candidate c = make_candidate(*rt.target_identity, kAlgoProfile);
            c.scores[kAlgoProfile] = 1.0;  // self-identified
            c.submethods.insert(kSubUrl);
            collected.push_back(std::move(c));
            out.confirmed = rt.target_identity;
            if (mode == ProfileMode::early_exit) {
                out.candidates = std::move(collected);
                renumber_discovery(out.candidates);
                out.candidates.front().rank = 1;
                return out;
            }
        }
        // A failed or off-network resolution just means the URL leak is absent.
    }

    if (auto hit = conn.search_by_username(nemo.username)) {
        Candidate c = make_candidate(hit->ref(), kAlgoProfile);
        c.submethods.insert(kSubUsername);
        collected.push_back(std::move(c));
    }

    for (const Identity& id :
         conn.search_by_name_location(nemo.display_name, nemo.location, kNameLocationCap)) {
        Candidate c = make_candidate(id.ref(), kAlgoProfile);
        c.submethods.insert(kSubNameLocation);
        collected.push_back(std::move(c));
    }

    // The deduplicated union is the non-ranked set; discovery order records it.
    std::vector<Candidate> merged = dedupe_candidates(collected);
    renumber_discovery(merged);

    const std::optional<Image> nemo_image = conn.profile_image(nemo.ref());
    for (auto& c : merged) {
        if (c.submethods.count(kSubUrl)) continue;  // keeps the self-identification score
        const auto sim = histogram_similarity(nemo_image, conn.profile_image(c.identity));
        if (sim) c.scores[kAlgoProfile] = *sim;
        // No comparable image pair: leave unscored, below all scored candidates.
    }
    rank_candidates(merged, kAlgoProfile);
    out.candidates = std::move(merged);
    return out;
}

AlgorithmOutcome content_search(Connector& conn, const std::string& user_id) {
    AlgorithmOutcome out;
    out.algorithm = kAlgoContent;
    Meter meter(conn, out);

    const IdentityRef nemo_ref{conn.source_network(), user_id};
    const std::vector<Post> posts = conn.fetch_recent_posts(nemo_ref, kRecentPostCap);

    std::vector<Candidate> collected;
    for (const Post& post : posts) {
        const std::string query = process_post_text(post.text);
        if (static_cast<int>(query.size()) < kContentMinQueryLength) continue;
        for (const auto& [author, match] : conn.search_posts_by_text(query, kContentSearchCap)) {
            Candidate c = make_candidate(author.ref(), kAlgoContent);
            c.scores[kAlgoContent] = cosine_text(post.text, match.text);
            collected.push_back(std::move(c));
        }
    }

    std::vector<Candidate> merged = dedupe_candidates(collected);
    renumber_discovery(merged);
    rank_candidates(merged, kAlgoContent);
    out.candidates = std::move(merged);
    // Content matches alone never confirm: popular texts are shared too widely.
    return out;
}

AlgorithmOutcome self_mention_search(Connector& conn, const std::string& user_id) {
    AlgorithmOutcome out;
    out.algorithm = kAlgoSelfMention;
    Meter meter(conn, out);

    const Identity nemo = conn.lookup_identity(conn.source_network(), user_id);
    const std::vector<Post> posts = conn.fetch_recent_posts(nemo.ref(), kRecentPostCap);

    std::map<IdentityRef, int> mentions;  // distinct posts referencing the identity
    std::map<IdentityRef, std::string> usernames;
    for (const Post& post : posts) {
        if (post.urls.empty()) continue;
        std::set<IdentityRef> referenced;
        for (const std::string& url : post.urls) {
            const ResolvedTarget rt = conn.resolve_url(url);
            if (rt.failed || !rt.target_identity) continue;
            const auto id = conn.peek_identity(*rt.target_identity);
            if (!id || id->entity_class != EntityClass::person) continue;
            referenced.insert(*rt.target_identity);
            usernames.emplace(*rt.target_identity, id->username);
        }
        for (const auto& ref : referenced) mentions[ref] += 1;
    }

    const std::string nemo_username = normalize_username(nemo.username);
    std::vector<Candidate> cands;
    for (const auto& [ref, count] : mentions) {
        Candidate c = make_candidate(ref, kAlgoSelfMention);
        c.mention_count = count;
        c.scores[kAlgoSelfMention] = jaro(nemo_username, normalize_username(usernames[ref]));
        cands.push_back(std::move(c));
    }
    renumber_discovery(cands);
    rank_candidates(cands, kAlgoSelfMention);

    if (!cands.empty()) {
        int max_mentions = 0;
        for (const auto& c : cands) max_mentions = std::max(max_mentions, c.mention_count);
        // Confirm only when the similarity ranking and the mention frequency
        // point to the same identity.
        if (cands.front().mention_count == max_mentions) {
            out.confirmed = cands.front().identity;
        }
    }
    out.candidates = std::move(cands);
    return out;
}

AlgorithmOutcome network_search(Connector& conn, const std::string& user_id) {
    AlgorithmOutcome out;
    out.algorithm = kAlgoNetwork;
    Meter meter(conn, out);

    const Identity nemo = conn.lookup_identity(conn.source_network(), user_id);

    std::map<IdentityRef, std::set<std::string>> supporters;  // identity -> member ids
    std::set<std::string> processed;
    std::optional<IdentityRef> confirmed;

    // supporters iterates in ascending user_id order, so the first maximum
    // implements the tally-then-user_id tie-break.
    auto best_tally = [&]() -> std::pair<IdentityRef, int> {
        IdentityRef best;
        int best_count = 0;
        for (const auto& [ref, members] : supporters) {
            const int count = static_cast<int>(members.size());
            if (count > best_count) {
                best = ref;
                best_count = count;
            }
        }
        return {best, best_count};
    };

    const NetworkRelation kinds[] = {NetworkRelation::follower, NetworkRelation::followee,
                                     NetworkRelation::friend_};
    for (const NetworkRelation kind : kinds) {
        if (confirmed) break;
        for (const Identity& member : conn.fetch_network(nemo.ref(), kind)) {
            if (member.user_id == nemo.user_id) continue;
            if (!processed.insert(member.user_id).second) continue;
            if (!member.url_field || member.url_field->empty()) continue;

            const ResolvedTarget rt = conn.resolve_url(*member.url_field);
            if (rt.failed || !rt.target_identity) continue;

            const auto friend_list = conn.fetch_friend_list(*rt.target_identity);
            if (!friend_list) continue;
            for (const Identity& fr : *friend_list) {
                if (name_match(nemo.display_name, fr.display_name)) {
                    supporters[fr.ref()].insert(member.user_id);
                }
            }

            const auto [best, count] = best_tally();
            if (count >= 2) {  // two distinct members agree
                confirmed = best;
                break;
            }
        }
    }

    int max_tally = 0;
    for (const auto& [_, members] : supporters) {
        max_tally = std::max(max_tally, static_cast<int>(members.size()));
    }
    std::vector<Candidate> cands;
    for (const auto& [ref, members] : supporters) {
        Candidate c = make_candidate(ref, kAlgoNetwork);
        c.scores[kAlgoNetwork] =
            max_tally > 0 ? static_cast<double>(members.size()) / max_tally : 0.0;
        cands.push_back(std::move(c));
    }
    renumber_discovery(cands);
    rank_candidates(cands, kAlgoNetwork);
    out.candidates = std::move(cands);
    out.confirmed = confirmed;
    return out;
}

AlgorithmOutcome run_algorithm(const std::string& name, Connector& conn,
                               const std::string& user_id, ProfileMode profile_mode) {
    if (name == kAlgoProfile) return profile_search(conn, user_id, profile_mode);
    if (name == kAlgoContent) return content_search(conn, user_id);
    if (name == kAlgoSelfMention) return self_mention_search(conn, user_id);
    if (name == kAlgoNetwork) return network_search(conn, user_id);
    throw std::invalid_argument("unknown algorithm: " + name);
}

}  // namespace nemo
