#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "nemo/core.hpp"
#include "nemo/similarity.hpp"

namespace nemo {

/// Fixture record for one web page: an optional redirect plus outbound links.
struct PageRecord {
    std::string url;
    std::optional<std::string> redirects_to;
    std::vector<std::string> links;
};

struct GroundTruthPair {
    std::string source_id;
    std::string target_id;
    std::set<std::string> leak_labels;
};

// Leak-channel labels used in groundtruth.jsonl.
inline constexpr const char* kLeakSelfIdDirect = "self_id_direct";
inline constexpr const char* kLeakSelfIdIndirect = "self_id_indirect";
inline constexpr const char* kLeakSameUsername = "same_username";
inline constexpr const char* kLeakSimilarUsername = "similar_username";
inline constexpr const char* kLeakNameLocation = "name_location";
inline constexpr const char* kLeakImageShared = "image_shared";
inline constexpr const char* kLeakCrossPost = "cross_post";
inline constexpr const char* kLeakSelfMention = "self_mention";
inline constexpr const char* kLeakNetwork = "network";

struct CorpusEdge {
    NetworkKind network;
    std::string from;
    std::string to;
    std::string kind;  // "follows" (source side) or "friend" (target side)
};

/// A pair of synthetic networks plus ground truth. Owns all fixture data and
/// the lookup indexes; immutable once finalize() has run.
struct Corpus {
    NetworkKind source_network{"source"};
    NetworkKind target_network{"target"};

    std::vector<Identity> identities;
    std::vector<Post> posts;
    std::vector<CorpusEdge> edges;
    std::map<std::string, PageRecord> pages;
    std::vector<GroundTruthPair> ground_truth;
    std::map<std::string, Image> images;
    nlohmann::json manifest;  // config echo + planted counts

    // --- indexes, built by finalize() ---
    std::map<IdentityRef, std::size_t> index_by_ref;
    std::map<std::pair<std::string, std::string>, std::size_t> index_by_username;
    std::map<IdentityRef, std::vector<std::size_t>> posts_by_author;  // newest first
    std::map<IdentityRef, std::vector<std::string>> follows_out;      // from -> to
    std::map<IdentityRef, std::vector<std::string>> follows_in;       // to -> from
    std::map<IdentityRef, std::vector<std::string>> friends;
    std::map<std::string, const PageRecord*> pages_canonical;         // canonical url -> record

    /// Builds indexes and validates the structural invariants (unique ids,
    /// page entities without public friend lists, timestamps, URL fields).
    void finalize();

    const Identity* find(const IdentityRef& ref) const;
    const Identity* find(const NetworkKind& network, const std::string& user_id) const;
    const Identity* find_by_username(const NetworkKind& network,
                                     const std::string& normalized_username) const;
    std::optional<Image> image_of(const Identity& id) const;
    const GroundTruthPair* truth_for_source(const std::string& source_id) const;
};

/// Outcome of walking one URL through the fixture web without charging
/// anything: redirects followed (at most 5 fetches), then the landing page's
/// links scanned for a target-network profile.
struct UrlTrace {
    std::string final_url;
    const Identity* identity = nullptr;
    bool via_page_scan = false;
    bool failed = false;
    int fetches = 0;          // redirect-chain fetches a connector must charge
    bool page_scanned = false;
};

UrlTrace trace_url(const Corpus& corpus, const std::string& url);

/// Identity denoted by a canonical profile URL "<target>.net/<username>[/..]".
const Identity* profile_url_identity(const Corpus& corpus, const std::string& canonical);

/// "same or similar location": case-insensitive substring either way; an
/// absent query location matches everything, an absent candidate one nothing.
bool location_compatible(const std::optional<std::string>& query,
                         const std::optional<std::string>& candidate);

Corpus load_corpus(const std::filesystem::path& dir);
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);

/// Stable identifier derived from the manifest; used to refuse comparing
/// evaluation reports from different corpora.
std::string corpus_id(const Corpus& corpus);

// Tiny binary PPM (P6) raster files back the corpus image store.
void write_ppm(const std::filesystem::path& path, const Image& img);
Image read_ppm(const std::filesystem::path& path);

/// Content hash used as the image-store key; identities sharing a picture
/// share the key.
std::string image_key(const Image& img);

std::uint64_t fnv1a64(std::string_view data);

}  // namespace nemo
