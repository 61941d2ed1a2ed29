#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nemo/corpus.hpp"

namespace nemo {

/// Exact per-region planting for the profile sub-methods (URL / SU / NL and
/// their overlaps). Used by presets that must reproduce fixed identified
/// counts; the probabilistic path is used otherwise.
struct ProfileRegionQuotas {
    int url_only = 0;
    int su_only = 0;
    int nl_only = 0;
    int url_su = 0;
    int url_nl = 0;
    int su_nl = 0;
    int url_su_nl = 0;

    int url_total() const { return url_only + url_su + url_nl + url_su_nl; }
    int su_total() const { return su_only + url_su + su_nl + url_su_nl; }
    int nl_total() const { return nl_only + url_nl + su_nl + url_su_nl; }
    int union_total() const {
        return url_only + su_only + nl_only + url_su + url_nl + su_nl + url_su_nl;
    }
};

struct CorpusQuotas {
    ProfileRegionQuotas profile_regions;
    int self_mention_overlapping_profile = 0;  // drawn from profile-identified pairs
    int self_mention_fresh = 0;                // drawn from the remaining pairs
    int content_overlapping_profile = 0;
    int content_fresh = 0;
    int network_fresh = 0;
    std::vector<std::pair<std::string, int>> domain_users;  // host -> exact user count
};

struct CorpusConfig {
    std::string preset = "custom";
    int n_users = 100;
    double p_self_id_direct = 0.0;
    double p_self_id_indirect = 0.0;
    double p_same_username = 0.0;
    double p_similar_username = 0.0;
    double p_name_location_findable = 0.0;
    double p_image_reuse = 0.0;
    double p_cross_post = 0.0;
    double p_self_mention = 0.0;
    double p_network_leak = 0.0;
    double p_friendlist_public = 0.5;
    double p_posts_public = 0.8;
    double p_searchable = 0.9;
    int n_quote_sharers = 0;
    std::uint64_t seed = 1;
    /// Probabilistic domain planting (host -> share of users); ignored when
    /// quotas carry exact per-domain counts.
    std::vector<std::pair<std::string, double>> domain_shares;
    std::optional<CorpusQuotas> quotas;

    void validate() const;
    nlohmann::json to_json() const;
};

/// Built-in configurations: "paper", "dense", "sparse", "identical-image".
CorpusConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

/// Inverse of CorpusConfig::to_json; unknown keys are rejected.
CorpusConfig config_from_json(const nlohmann::json& j);

/// Pure function of (config, seed): emits the two networks, the decoy
/// population (3x n_users), posts, edges, pages, images and ground truth.
/// Every planted self-identification or self-mention link points to the true
/// counterpart.
Corpus generate(const CorpusConfig& config);

/// Re-derives each pair's leak labels from the raw corpus data; a mismatch
/// against groundtruth.jsonl indicates a generator bug.
struct AuditReport {
    int pairs_checked = 0;
    std::vector<std::string> mismatches;
    bool clean() const { return mismatches.empty(); }
};

AuditReport audit(const Corpus& corpus);

/// The audit's derivation for a single pair, exposed for tests.
std::set<std::string> derive_leak_labels(const Corpus& corpus, const GroundTruthPair& pair);

}  // namespace nemo
