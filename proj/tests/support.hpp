#pragma once

// Shared helpers for the test suites: a small fixture-corpus builder, an
// independent Jaro oracle, and deterministic random generators.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nemo/corpus.hpp"
#include "nemo/similarity.hpp"

namespace testsupport {

struct TestCorpus {
    nemo::Corpus c;

    TestCorpus() {
        c.source_network = nemo::NetworkKind{"source"};
        c.target_network = nemo::NetworkKind{"target"};
        c.manifest = {{"schema", 1},
                      {"networks", {{"source", "source"}, {"target", "target"}}},
                      {"config", {{"seed", 0}}}};
    }

    nemo::Identity& source_user(const std::string& id, const std::string& username,
                                const std::string& display) {
        nemo::Identity u;
        u.network = c.source_network;
        u.user_id = id;
        u.username = username;
        u.display_name = display;
        c.identities.push_back(std::move(u));
        return c.identities.back();
    }

    nemo::Identity& target_user(const std::string& id, const std::string& username,
                                const std::string& display) {
        nemo::Identity u;
        u.network = c.target_network;
        u.user_id = id;
        u.username = username;
        u.display_name = display;
        c.identities.push_back(std::move(u));
        return c.identities.back();
    }

    void post(const nemo::NetworkKind& net, const std::string& uid, const std::string& text,
              std::int64_t ts) {
        nemo::Post p;
        p.author = nemo::IdentityRef{net, uid};
        p.text = text;
        p.timestamp = ts;
        c.posts.push_back(std::move(p));
    }

    void follows(const std::string& from, const std::string& to) {
        c.edges.push_back(nemo::CorpusEdge{c.source_network, from, to, "follows"});
    }

    void friend_edge(const std::string& a, const std::string& b) {
        c.edges.push_back(nemo::CorpusEdge{c.target_network, a, b, "friend"});
    }

    void page(const std::string& url, std::optional<std::string> redirects_to,
              std::vector<std::string> links = {}) {
        nemo::PageRecord record;
        record.url = url;
        record.redirects_to = std::move(redirects_to);
        record.links = std::move(links);
        c.pages.emplace(url, std::move(record));
    }

    /// Two-color 4x4 raster registered in the image store; returns the key.
    std::string image(int bin_a, int bin_b) {
        nemo::Image img;
        img.width = 4;
        img.height = 4;
        img.rgb.resize(48);
        for (int p = 0; p < 16; ++p) {
            const int bin = p < 8 ? bin_a : bin_b;
            img.rgb[p * 3] = static_cast<std::uint8_t>(((bin >> 6) & 7) * 32 + 16);
            img.rgb[p * 3 + 1] = static_cast<std::uint8_t>(((bin >> 3) & 7) * 32 + 16);
            img.rgb[p * 3 + 2] = static_cast<std::uint8_t>((bin & 7) * 32 + 16);
        }
        const std::string key = nemo::image_key(img);
        c.images.emplace(key, img);
        return key;
    }

    void truth(const std::string& source_id, const std::string& target_id,
               std::set<std::string> labels = {}) {
        c.ground_truth.push_back(nemo::GroundTruthPair{source_id, target_id, std::move(labels)});
    }

    nemo::Corpus done() {
        c.finalize();
        return std::move(c);
    }
};

/// Independent brute-force Jaro: builds the matched character sequences
/// explicitly and counts out-of-sequence positions, straight from the
/// definition.
inline double jaro_oracle(const std::string& a, const std::string& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    const int la = static_cast<int>(a.size());
    const int lb = static_cast<int>(b.size());
    const int window = std::max(0, std::max(la, lb) / 2 - 1);

    std::vector<bool> used(b.size(), false);
    std::string seq_a;
    for (int i = 0; i < la; ++i) {
        for (int j = std::max(0, i - window); j <= std::min(lb - 1, i + window); ++j) {
            if (!used[j] && a[i] == b[j]) {
                used[j] = true;
                seq_a.push_back(a[i]);
                break;
            }
        }
    }
    if (seq_a.empty()) return 0.0;
    std::string seq_b;
    for (int j = 0; j < lb; ++j) {
        if (used[j]) seq_b.push_back(b[j]);
    }
    int half_transpositions = 0;
    for (std::size_t k = 0; k < seq_a.size(); ++k) {
        if (seq_a[k] != seq_b[k]) ++half_transpositions;
    }
    const double m = static_cast<double>(seq_a.size());
    return (m / la + m / lb + (m - half_transpositions / 2.0) / m) / 3.0;
}

inline std::string random_string(std::mt19937_64& rng, int max_len, const char* alphabet) {
    const int len = static_cast<int>(rng() % static_cast<unsigned>(max_len + 1));
    const std::size_t n = std::char_traits<char>::length(alphabet);
    std::string s;
    for (int i = 0; i < len; ++i) s.push_back(alphabet[rng() % n]);
    return s;
}

inline nemo::Image random_image(std::mt19937_64& rng, int max_side = 6) {
    nemo::Image img;
    img.width = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_side));
    img.height = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_side));
    img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    for (auto& byte : img.rgb) byte = static_cast<std::uint8_t>(rng() % 256);
    return img;
}

}  // namespace testsupport
