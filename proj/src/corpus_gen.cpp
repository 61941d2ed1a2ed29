#include "nemo/corpus_gen.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <numeric>
#include <random>

#include "nemo/connector.hpp"
#include "nemo/search.hpp"
#include "nemo/similarity.hpp"

namespace nemo {

namespace {

// ---------------------------------------------------------------------------
// Deterministic randomness and token pools
// ---------------------------------------------------------------------------

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    std::uint64_t next() { return eng_(); }
    int below(int n) { return n <= 1 ? 0 : static_cast<int>(next() % static_cast<unsigned>(n)); }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    bool bern(double p) { return unit() < p; }
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[next() % i]);
        }
    }

  private:
    std::mt19937_64 eng_;
};

constexpr std::array<const char*, 64> kFirstNames = {
    "amara",   "boris",   "carmen",  "dario",   "elena",   "farid",   "greta",   "hamid",
    "irene",   "jonas",   "katya",   "liam",    "maeve",   "nils",    "odette",  "pavel",
    "quinn",   "rosa",    "stefan",  "tamsin",  "ulrik",   "vera",    "wilbur",  "ximena",
    "yusuf",   "zelda",   "anders",  "bianca",  "casper",  "delia",   "emil",    "freya",
    "gideon",  "hanna",   "ivo",     "jolene",  "kamil",   "leona",   "marek",   "nadia",
    "osvald",  "petra",   "quentin", "renata",  "sorin",   "thea",    "umberto", "violet",
    "wanda",   "xavier",  "yara",    "zoltan",  "alvar",   "beate",   "cyrus",   "dunja",
    "eamon",   "fleur",   "gustav",  "hilda",   "ingmar",  "jasna",   "kostas",  "lidia"};

constexpr std::array<const char*, 64> kLastNames = {
    "ashdown",  "barlow",   "crane",    "duval",    "ekberg",   "farrow",   "gatlin",
    "holm",     "irwin",    "jarvis",   "kessler",  "lindt",    "marsh",    "norell",
    "ostrow",   "pelham",   "quimby",   "rutter",   "severin",  "thorne",   "ulman",
    "vance",    "whitlock", "xiong",    "yates",    "zeller",   "abbott",   "bergson",
    "calder",   "draper",   "elwood",   "fenwick",  "gorman",   "hartley",  "innes",
    "jephson",  "kirby",    "lomax",    "merton",   "ncasher",  "oakden",   "pruitt",
    "quade",    "renner",   "sallow",   "tennant",  "underhill","vickers",  "walcott",
    "xanders",  "yeoman",   "zimmer",   "ainsley",  "bram",     "corwin",   "dallin",
    "eccles",   "fairburn", "goddard",  "hobbes",   "imbert",   "jessop",   "keating",
    "lachlan"};

constexpr std::array<const char*, 20> kCities = {
    "galeport",  "ironvale",  "mosswood",  "brightfen", "cinderby",
    "duskmere",  "elmsworth", "frostholm", "gleamdon",  "hazelfort",
    "juniperra", "kelpford",  "larchwick", "nimbuston", "ombrelle",
    "pinecrest", "quarrytown","rushfield", "silverbay", "thornmill"};

constexpr std::array<const char*, 32> kWords = {
    "harvest", "lantern", "meadow",  "orchard", "pebble",  "quarry",  "ripple",  "saffron",
    "timber",  "umbrella","velvet",  "willow",  "yonder",  "amber",   "breeze",  "cobble",
    "drift",   "ember",   "fathom",  "glimmer", "hollow",  "ivory",   "jumble",  "kindle",
    "ledger",  "marble",  "nectar",  "opal",    "prairie", "quill",   "russet",  "sable"};

constexpr std::array<const char*, 32> kUserWords = {
    "falcon",  "harbor",  "comet",   "lagoon",  "summit",  "tundra",  "violetta","wharf",
    "yardang", "zephyr",  "basalt",  "cascade", "dynamo",  "estuary", "fjord",   "geyser",
    "horizon", "isthmus", "juncture","kelp",    "lichen",  "monsoon", "nimbus",  "oasis",
    "plateau", "quasar",  "ravine",  "sequoia", "tempest", "updraft", "vortex",  "willet"};

std::string cap(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

std::string display_name_of(int first_idx, int last_idx) {
    return cap(kFirstNames[first_idx]) + " " + cap(kLastNames[last_idx]);
}

std::string four(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d", i);
    return buf;
}

// ---------------------------------------------------------------------------
// Images: pair rasters live in bins 0..255, decoy rasters in bins 256..511,
// so an unrelated candidate never ties with a reused profile picture.
// ---------------------------------------------------------------------------

std::uint8_t channel_value(int band) { return static_cast<std::uint8_t>(band * 32 + 16); }

Image raster_of_bins(int bin_a, int bin_b) {
    Image img;
    img.width = 4;
    img.height = 4;
    img.rgb.resize(4 * 4 * 3);
    for (int p = 0; p < 16; ++p) {
        const int bin = p < 8 ? bin_a : bin_b;
        img.rgb[p * 3] = channel_value((bin >> 6) & 7);
        img.rgb[p * 3 + 1] = channel_value((bin >> 3) & 7);
        img.rgb[p * 3 + 2] = channel_value(bin & 7);
    }
    return img;
}

Image pair_raster(int pair_index) {
    const int a = (2 * pair_index) % 256;
    const int b = (2 * pair_index + 1) % 256;
    return raster_of_bins(a, b);
}

Image decoy_raster(int seq) {
    const int a = 256 + (seq % 256);
    if (seq % 3 == 0) return raster_of_bins(a, a);  // solid
    int b = 256 + ((seq * 7 + 1) % 256);
    if (b == a) b = 256 + ((b + 1 - 256) % 256);
    return raster_of_bins(a, b);
}

// ---------------------------------------------------------------------------
// Channel plan
// ---------------------------------------------------------------------------

struct Channels {
    bool url_direct = false;
    bool url_indirect = false;
    bool su = false;
    bool similar = false;
    bool nl = false;
    bool image = false;
    bool cross = false;
    bool quote = false;  // cross-post text also shared by decoy quote sharers
    bool sm = false;
    bool net = false;

    bool url() const { return url_direct || url_indirect; }
    bool profile_identified() const { return url() || su || nl; }
};

std::vector<Channels> plan_channels(const CorpusConfig& cfg, Rng& rng) {
    const int n = cfg.n_users;
    std::vector<Channels> ch(n);

    if (cfg.quotas) {
        const CorpusQuotas& q = *cfg.quotas;
        const ProfileRegionQuotas& r = q.profile_regions;
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);

        std::size_t cursor = 0;
        std::vector<int> url_pairs;
        std::vector<int> profile_pairs;
        auto take = [&](int count, bool url, bool su, bool nl) {
            for (int k = 0; k < count; ++k) {
                const int i = order[cursor++];
                ch[i].su = su;
                ch[i].nl = nl;
                if (url) {
                    url_pairs.push_back(i);
                    ch[i].url_direct = true;  // split into indirect below
                }
                profile_pairs.push_back(i);
            }
        };
        take(r.url_only, true, false, false);
        take(r.su_only, false, true, false);
        take(r.nl_only, false, false, true);
        take(r.url_su, true, true, false);
        take(r.url_nl, true, false, true);
        take(r.su_nl, false, true, true);
        take(r.url_su_nl, true, true, true);

        // Roughly 7:3 direct vs. indirect self-identification.
        const int direct_count = (static_cast<int>(url_pairs.size()) * 7 + 5) / 10;
        for (std::size_t k = 0; k < url_pairs.size(); ++k) {
            if (static_cast<int>(k) >= direct_count) {
                ch[url_pairs[k]].url_direct = false;
                ch[url_pairs[k]].url_indirect = true;
            }
        }

        std::vector<int> fresh(order.begin() + cursor, order.end());
        std::set<int> used;
        auto draw = [&](std::vector<int>& pool, int count, auto mark) {
            int taken = 0;
            for (int i : pool) {
                if (taken >= count) break;
                if (used.count(i)) continue;
                mark(ch[i]);
                used.insert(i);
                ++taken;
            }
            if (taken < count) throw CorpusError("quota exceeds available pairs");
        };
        draw(profile_pairs, q.self_mention_overlapping_profile,
             [](Channels& c) { c.sm = true; });
        draw(fresh, q.self_mention_fresh, [](Channels& c) { c.sm = true; });
        draw(profile_pairs, q.content_overlapping_profile, [](Channels& c) { c.cross = true; });
        draw(fresh, q.content_fresh, [](Channels& c) { c.cross = true; });
        draw(fresh, q.network_fresh, [](Channels& c) { c.net = true; });
    } else {
        for (int i = 0; i < n; ++i) {
            ch[i].url_direct = rng.bern(cfg.p_self_id_direct);
            ch[i].url_indirect = !ch[i].url_direct && rng.bern(cfg.p_self_id_indirect);
            ch[i].su = rng.bern(cfg.p_same_username);
            ch[i].nl = rng.bern(cfg.p_name_location_findable);
            ch[i].cross = rng.bern(cfg.p_cross_post);
            ch[i].sm = rng.bern(cfg.p_self_mention);
            ch[i].net = rng.bern(cfg.p_network_leak);
        }
    }

    for (int i = 0; i < n; ++i) {
        ch[i].image = rng.bern(cfg.p_image_reuse);
        ch[i].similar = !ch[i].su && (ch[i].sm || rng.bern(cfg.p_similar_username));
        // Quota presets plant few cross-posters, so all of them get the
        // popular-quote treatment; probabilistic ones spread it out to keep
        // the decoy budget in bounds.
        ch[i].quote = ch[i].cross && cfg.n_quote_sharers > 0 &&
                      (cfg.quotas.has_value() || i % 4 == 0);
    }
    return ch;
}

/// Planted domain posts: per domain, the exact user set (quota path) or a
/// Bernoulli sample (share path).
std::vector<std::pair<std::string, std::vector<int>>> plan_domains(const CorpusConfig& cfg,
                                                                   Rng& rng) {
    std::vector<std::pair<std::string, std::vector<int>>> planted;
    const int n = cfg.n_users;
    if (cfg.quotas && !cfg.quotas->domain_users.empty()) {
        for (const auto& [host, count] : cfg.quotas->domain_users) {
            std::vector<int> order(n);
            std::iota(order.begin(), order.end(), 0);
            rng.shuffle(order);
            if (count > n) throw CorpusError("domain quota exceeds user count");
            order.resize(count);
            std::sort(order.begin(), order.end());
            planted.emplace_back(host, std::move(order));
        }
    } else {
        for (const auto& [host, share] : cfg.domain_shares) {
            std::vector<int> users;
            for (int i = 0; i < n; ++i) {
                if (rng.bern(share)) users.push_back(i);
            }
            planted.emplace_back(host, std::move(users));
        }
    }
    return planted;
}

std::string source_username(int i, int fi, int li) {
    return std::string(kFirstNames[fi]) + "_" + kLastNames[li] + std::to_string(i);
}

/// 1-2 edit operations away, tuned until Jaro lands in [0.75, 0.95].
std::string similar_username(const std::string& src, int i) {
    std::vector<std::string> variants;
    std::string dotted = src;
    std::replace(dotted.begin(), dotted.end(), '_', '.');
    variants.push_back(dotted);
    variants.push_back(src + "_" + std::to_string(i % 10));
    variants.push_back(dotted + std::to_string(i % 10));
    variants.push_back(src.substr(0, src.size() - 1) + "_x" + std::to_string(i % 10));
    for (const auto& v : variants) {
        const double j = jaro(normalize_username(src), normalize_username(v));
        if (v != src && j >= 0.75 && j <= 0.95) return v;
    }
    return variants[1];
}

/// Pool-based username kept dissimilar from the source one so the
/// similar-username label never fires by accident.
std::string fresh_target_username(const std::string& src_username, int i) {
    std::string u = std::string("m") + kUserWords[i % kUserWords.size()] + std::to_string(i);
    while (jaro(normalize_username(src_username), normalize_username(u)) >= 0.75) {
        u += "9q";
    }
    return u;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

void CorpusConfig::validate() const {
    if (n_users < 1) throw CorpusError("n_users must be >= 1");
    const double probs[] = {p_self_id_direct,  p_self_id_indirect, p_same_username,
                            p_similar_username, p_name_location_findable, p_image_reuse,
                            p_cross_post,       p_self_mention,     p_network_leak,
                            p_friendlist_public, p_posts_public,    p_searchable};
    for (double p : probs) {
        if (p < 0.0 || p > 1.0) throw CorpusError("probabilities must lie in [0,1]");
    }
    if (n_quote_sharers < 0) throw CorpusError("n_quote_sharers must be >= 0");
    if (quotas) {
        const auto& q = *quotas;
        if (q.profile_regions.union_total() + q.self_mention_fresh + q.content_fresh +
                q.network_fresh >
            n_users) {
            throw CorpusError("quotas exceed n_users");
        }
        for (const auto& [host, count] : q.domain_users) {
            if (count < 0 || count > n_users) throw CorpusError("bad domain quota for " + host);
        }
    }
}

nlohmann::json CorpusConfig::to_json() const {
    nlohmann::json j;
    j["preset"] = preset;
    j["n_users"] = n_users;
    j["p_self_id_direct"] = p_self_id_direct;
    j["p_self_id_indirect"] = p_self_id_indirect;
    j["p_same_username"] = p_same_username;
    j["p_similar_username"] = p_similar_username;
    j["p_name_location_findable"] = p_name_location_findable;
    j["p_image_reuse"] = p_image_reuse;
    j["p_cross_post"] = p_cross_post;
    j["p_self_mention"] = p_self_mention;
    j["p_network_leak"] = p_network_leak;
    j["p_friendlist_public"] = p_friendlist_public;
    j["p_posts_public"] = p_posts_public;
    j["p_searchable"] = p_searchable;
    j["n_quote_sharers"] = n_quote_sharers;
    j["seed"] = seed;
    if (!domain_shares.empty()) {
        nlohmann::json d;
        for (const auto& [host, share] : domain_shares) d[host] = share;
        j["domain_shares"] = d;
    }
    if (quotas) {
        const auto& q = *quotas;
        nlohmann::json r;
        r["url_only"] = q.profile_regions.url_only;
        r["su_only"] = q.profile_regions.su_only;
        r["nl_only"] = q.profile_regions.nl_only;
        r["url_su"] = q.profile_regions.url_su;
        r["url_nl"] = q.profile_regions.url_nl;
        r["su_nl"] = q.profile_regions.su_nl;
        r["url_su_nl"] = q.profile_regions.url_su_nl;
        nlohmann::json qq;
        qq["profile_regions"] = r;
        qq["self_mention_overlapping_profile"] = q.self_mention_overlapping_profile;
        qq["self_mention_fresh"] = q.self_mention_fresh;
        qq["content_overlapping_profile"] = q.content_overlapping_profile;
        qq["content_fresh"] = q.content_fresh;
        qq["network_fresh"] = q.network_fresh;
        nlohmann::json d;
        for (const auto& [host, count] : q.domain_users) d[host] = count;
        qq["domain_users"] = d;
        j["quotas"] = qq;
    }
    return j;
}

std::vector<std::string> preset_names() {
    return {"paper", "dense", "sparse", "identical-image"};
}

CorpusConfig config_from_json(const nlohmann::json& j) {
    static const std::set<std::string> known = {
        "preset",          "n_users",          "p_self_id_direct",
        "p_self_id_indirect", "p_same_username", "p_similar_username",
        "p_name_location_findable", "p_image_reuse", "p_cross_post",
        "p_self_mention",  "p_network_leak",   "p_friendlist_public",
        "p_posts_public",  "p_searchable",     "n_quote_sharers",
        "seed",            "domain_shares",    "quotas"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw CorpusError("unknown config key: " + key);
    }
    CorpusConfig cfg;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("preset", cfg.preset);
    get("n_users", cfg.n_users);
    get("p_self_id_direct", cfg.p_self_id_direct);
    get("p_self_id_indirect", cfg.p_self_id_indirect);
    get("p_same_username", cfg.p_same_username);
    get("p_similar_username", cfg.p_similar_username);
    get("p_name_location_findable", cfg.p_name_location_findable);
    get("p_image_reuse", cfg.p_image_reuse);
    get("p_cross_post", cfg.p_cross_post);
    get("p_self_mention", cfg.p_self_mention);
    get("p_network_leak", cfg.p_network_leak);
    get("p_friendlist_public", cfg.p_friendlist_public);
    get("p_posts_public", cfg.p_posts_public);
    get("p_searchable", cfg.p_searchable);
    get("n_quote_sharers", cfg.n_quote_sharers);
    get("seed", cfg.seed);
    if (j.contains("domain_shares")) {
        for (const auto& [host, share] : j["domain_shares"].items()) {
            cfg.domain_shares.emplace_back(host, share.get<double>());
        }
    }
    if (j.contains("quotas")) {
        const auto& qq = j["quotas"];
        CorpusQuotas q;
        const auto& r = qq.at("profile_regions");
        q.profile_regions.url_only = r.at("url_only").get<int>();
        q.profile_regions.su_only = r.at("su_only").get<int>();
        q.profile_regions.nl_only = r.at("nl_only").get<int>();
        q.profile_regions.url_su = r.at("url_su").get<int>();
        q.profile_regions.url_nl = r.at("url_nl").get<int>();
        q.profile_regions.su_nl = r.at("su_nl").get<int>();
        q.profile_regions.url_su_nl = r.at("url_su_nl").get<int>();
        q.self_mention_overlapping_profile = qq.at("self_mention_overlapping_profile").get<int>();
        q.self_mention_fresh = qq.at("self_mention_fresh").get<int>();
        q.content_overlapping_profile = qq.at("content_overlapping_profile").get<int>();
        q.content_fresh = qq.at("content_fresh").get<int>();
        q.network_fresh = qq.at("network_fresh").get<int>();
        if (qq.contains("domain_users")) {
            for (const auto& [host, count] : qq["domain_users"].items()) {
                q.domain_users.emplace_back(host, count.get<int>());
            }
        }
        cfg.quotas = q;
    }
    cfg.validate();
    return cfg;
}

CorpusConfig preset_config(const std::string& name) {
    CorpusConfig cfg;
    cfg.preset = name;
    if (name == "paper") {
        // 543 pairs with exact sub-method planting. The identified-count
        // targets URL=137, SU=82, NL=144 with unions 175/200/149/205 pin the
        // seven overlap regions below by inclusion-exclusion.
        cfg.n_users = 543;
        cfg.seed = 20120543;
        CorpusQuotas q;
        q.profile_regions = ProfileRegionQuotas{56, 5, 30, 0, 37, 33, 44};
        q.self_mention_overlapping_profile = 18;
        q.self_mention_fresh = 13;
        q.content_overlapping_profile = 2;
        q.content_fresh = 1;
        q.network_fresh = 1;
        q.domain_users = {{"pixagram.net", 199},
                          {"vidtube.net", 161},
                          {"checkinly.net", 33},
                          {"tumblelog.net", 33},
                          {"imgfrog.net", 22}};
        cfg.quotas = q;
        cfg.p_self_id_direct = 96.0 / 543.0;
        cfg.p_self_id_indirect = 41.0 / 543.0;
        cfg.p_same_username = 82.0 / 543.0;
        cfg.p_similar_username = 0.15;
        cfg.p_name_location_findable = 144.0 / 543.0;
        cfg.p_image_reuse = 1.0;
        cfg.p_cross_post = 3.0 / 543.0;
        cfg.p_self_mention = 31.0 / 543.0;
        cfg.p_network_leak = 1.0 / 543.0;
        cfg.p_friendlist_public = 0.5;
        cfg.p_posts_public = 0.85;
        cfg.p_searchable = 0.9;
        cfg.n_quote_sharers = 18;
    } else if (name == "dense") {
        cfg.n_users = 120;
        cfg.seed = 2031;
        cfg.p_self_id_direct = 0.30;
        cfg.p_self_id_indirect = 0.15;
        cfg.p_same_username = 0.40;
        cfg.p_similar_username = 0.30;
        cfg.p_name_location_findable = 0.50;
        cfg.p_image_reuse = 0.70;
        cfg.p_cross_post = 0.45;
        cfg.p_self_mention = 0.35;
        cfg.p_network_leak = 0.15;
        cfg.p_friendlist_public = 0.70;
        cfg.p_posts_public = 0.90;
        cfg.p_searchable = 0.90;
        cfg.n_quote_sharers = 10;
        cfg.domain_shares = {{"pixagram.net", 0.30}, {"vidtube.net", 0.20}};
    } else if (name == "sparse") {
        cfg.n_users = 120;
        cfg.seed = 4099;
        cfg.p_self_id_direct = 0.04;
        cfg.p_self_id_indirect = 0.02;
        cfg.p_same_username = 0.05;
        cfg.p_similar_username = 0.05;
        cfg.p_name_location_findable = 0.06;
        cfg.p_image_reuse = 0.10;
        cfg.p_cross_post = 0.04;
        cfg.p_self_mention = 0.03;
        cfg.p_network_leak = 0.02;
        cfg.p_friendlist_public = 0.40;
        cfg.p_posts_public = 0.60;
        cfg.p_searchable = 0.70;
        cfg.n_quote_sharers = 0;
        cfg.domain_shares = {{"pixagram.net", 0.08}};
    } else if (name == "identical-image") {
        cfg.n_users = 220;
        cfg.seed = 7117;
        cfg.p_self_id_direct = 0.12;
        cfg.p_self_id_indirect = 0.06;
        cfg.p_same_username = 0.18;
        cfg.p_similar_username = 0.20;
        cfg.p_name_location_findable = 0.55;
        cfg.p_image_reuse = 1.0;
        cfg.p_cross_post = 0.25;
        cfg.p_self_mention = 0.20;
        cfg.p_network_leak = 0.05;
        cfg.p_friendlist_public = 0.60;
        cfg.p_posts_public = 0.90;
        cfg.p_searchable = 0.95;
        cfg.n_quote_sharers = 12;
        cfg.domain_shares = {{"pixagram.net", 0.25}, {"vidtube.net", 0.15}};
    } else {
        throw CorpusError("unknown preset: " + name);
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

Corpus generate(const CorpusConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const int n = cfg.n_users;

    Corpus corpus;
    corpus.source_network = NetworkKind{"source"};
    corpus.target_network = NetworkKind{"target"};

    const std::vector<Channels> ch = plan_channels(cfg, rng);
    const auto domains = plan_domains(cfg, rng);

    // Network-leak supporters are drawn from URL-planted pairs: those users
    // already expose their own counterpart via their URL field.
    std::vector<int> url_planted;
    for (int i = 0; i < n; ++i) {
        if (ch[i].url()) url_planted.push_back(i);
    }
    std::vector<std::array<int, 2>> supporters(n, {-1, -1});
    std::vector<Channels> effective = ch;
    {
        std::size_t cursor = 0;
        for (int i = 0; i < n; ++i) {
            if (!ch[i].net) continue;
            std::array<int, 2> chosen{-1, -1};
            int found = 0;
            std::size_t scanned = 0;
            while (found < 2 && scanned < url_planted.size()) {
                const int cand = url_planted[(cursor + scanned) % url_planted.size()];
                ++scanned;
                if (cand == i || cand == chosen[0]) continue;
                chosen[found++] = cand;
            }
            if (found < 2) {
                effective[i].net = false;  // not enough self-identified members
                continue;
            }
            cursor = (cursor + scanned) % std::max<std::size_t>(url_planted.size(), 1);
            supporters[i] = chosen;
        }
    }

    // Name combinations, unique per pair.
    std::vector<int> combos(kFirstNames.size() * kLastNames.size());
    std::iota(combos.begin(), combos.end(), 0);
    rng.shuffle(combos);
    if (n > static_cast<int>(combos.size())) throw CorpusError("n_users exceeds name pool");

    std::vector<int> first_idx(n), last_idx(n), city_idx(n);
    std::vector<std::string> src_uname(n), tgt_uname(n);
    for (int i = 0; i < n; ++i) {
        first_idx[i] = combos[i] / static_cast<int>(kLastNames.size());
        last_idx[i] = combos[i] % static_cast<int>(kLastNames.size());
        city_idx[i] = rng.below(static_cast<int>(kCities.size()));
        src_uname[i] = source_username(i, first_idx[i], last_idx[i]);
        if (effective[i].su) {
            tgt_uname[i] = src_uname[i];
        } else if (effective[i].similar) {
            tgt_uname[i] = similar_username(src_uname[i], i);
        } else {
            tgt_uname[i] = fresh_target_username(src_uname[i], i);
        }
    }

    std::vector<std::string> src_id(n), tgt_id(n);
    std::vector<Identity> identities;
    identities.reserve(static_cast<std::size_t>(n) * 5);

    auto add_image = [&](const Image& img) {
        const std::string key = image_key(img);
        corpus.images.emplace(key, img);
        return key;
    };

    for (int i = 0; i < n; ++i) {
        const Channels& c = effective[i];
        src_id[i] = "s" + four(i);
        tgt_id[i] = "t" + four(i);

        const bool posts_forced = c.cross || c.sm;
        bool domain_forced = false;
        for (const auto& [_, users] : domains) {
            if (std::binary_search(users.begin(), users.end(), i)) domain_forced = true;
        }

        Identity src;
        src.network = corpus.source_network;
        src.user_id = src_id[i];
        src.username = src_uname[i];
        src.display_name = display_name_of(first_idx[i], last_idx[i]);
        src.location = std::string(kCities[city_idx[i]]);
        src.searchable = true;
        src.posts_public = posts_forced || domain_forced || rng.bern(cfg.p_posts_public);

        Identity tgt;
        tgt.network = corpus.target_network;
        tgt.user_id = tgt_id[i];
        tgt.username = tgt_uname[i];
        if (c.nl || c.net) {
            tgt.display_name = src.display_name;
        } else {
            int f2 = (first_idx[i] + 1 + rng.below(static_cast<int>(kFirstNames.size()) - 2)) %
                     static_cast<int>(kFirstNames.size());
            int l2 = (last_idx[i] + 1 + rng.below(static_cast<int>(kLastNames.size()) - 2)) %
                     static_cast<int>(kLastNames.size());
            tgt.display_name = display_name_of(f2, l2);
        }
        if (c.nl) {
            tgt.location = src.location;
        } else {
            const int other = (city_idx[i] + 1 + rng.below(static_cast<int>(kCities.size()) - 2)) %
                              static_cast<int>(kCities.size());
            tgt.location = std::string(kCities[other]);
        }
        tgt.searchable = (c.su || c.nl) || rng.bern(cfg.p_searchable);
        tgt.posts_public = c.cross || rng.bern(cfg.p_posts_public);
        tgt.friendlist_public = rng.bern(cfg.p_friendlist_public);

        if (c.image) {
            const std::string key = add_image(pair_raster(i));
            src.image_key = key;
            tgt.image_key = key;
        } else {
            src.image_key = add_image(pair_raster(i));
            tgt.image_key = add_image(decoy_raster(1000 + i));
        }

        if (c.url_direct) {
            src.url_field = "https://" + corpus.target_network.name + ".net/" + tgt.username;
        } else if (c.url_indirect) {
            src.url_field = "https://blogs.example/u" + four(i);
        } else if (i % 5 == 3) {
            // Off-target URL field: resolution finds nothing on the target
            // network and profile search falls through to the other steps.
            src.url_field = "https://pixagram.net/" + src.username;
        }

        identities.push_back(std::move(src));
        identities.push_back(std::move(tgt));
    }

    // Force supporter targets to expose their friend lists.
    for (int i = 0; i < n; ++i) {
        if (supporters[i][0] < 0) continue;
        for (int s : supporters[i]) {
            identities[static_cast<std::size_t>(s) * 2 + 1].friendlist_public = true;
        }
    }

    // ------------------------------------------------------------------
    // Decoys: exactly 3x n_users on the target network.
    // ------------------------------------------------------------------
    const int decoy_budget = 3 * n;
    int d_seq = 0;  // ids sorting before the paired targets
    int x_seq = 0;  // ids sorting after
    int decoy_images = 0;
    int made = 0;

    std::vector<Identity> decoys;
    std::vector<std::pair<std::string, std::string>> quote_posts;  // decoy id, text
    std::vector<std::string> quote_texts(n);

    auto decoy_username = [&](char prefix, int seq) {
        return std::string(1, prefix) + kUserWords[seq % kUserWords.size()] + std::to_string(seq);
    };
    auto filler_display = [&](int seq) {
        return "Zq" + cap(kWords[seq % kWords.size()]) + " Qz" + cap(kUserWords[(seq * 3 + 1) % kUserWords.size()]);
    };

    auto make_decoy = [&](char prefix, const std::string& display,
                          const std::optional<std::string>& location, bool searchable,
                          EntityClass entity) -> Identity* {
        if (made >= decoy_budget) throw CorpusError("decoy budget exceeded by planted roles");
        ++made;
        const int seq = prefix == 'd' ? d_seq++ : x_seq++;
        Identity d;
        d.network = corpus.target_network;
        d.user_id = std::string(1, prefix) + four(seq);
        d.username = decoy_username(prefix, seq);
        d.display_name = display;
        d.location = location;
        d.searchable = searchable;
        d.posts_public = false;
        d.friendlist_public = false;
        d.entity_class = entity;
        const int img_seq = decoy_images++;
        if (img_seq % 7 != 6) d.image_key = add_image(decoy_raster(img_seq));
        decoys.push_back(std::move(d));
        return &decoys.back();
    };

    for (int i = 0; i < n; ++i) {
        const Channels& c = effective[i];
        const std::string src_display = display_name_of(first_idx[i], last_idx[i]);
        const std::string src_city = kCities[city_idx[i]];

        if (c.nl) {
            // Name clones ahead of and behind the true counterpart in the
            // name+location results.
            const int pre = 1 + (i % 2);
            const int post = i % 2;
            for (int k = 0; k < pre; ++k) {
                const bool searchable = (d_seq % 4) != 3;
                EntityClass entity = (d_seq % 20) == 19 ? EntityClass::page : EntityClass::person;
                make_decoy('d', src_display, std::string(src_city), searchable, entity);
            }
            for (int k = 0; k < post; ++k) {
                make_decoy('x', src_display, std::string(src_city), true, EntityClass::person);
            }
        } else if (i % 6 == 2) {
            // Matching-name noise for a query whose true counterpart is not
            // findable by name+location.
            make_decoy('x', src_display, std::string(src_city), true, EntityClass::person);
        }

        if (!c.su && i % 9 == 4) {
            // Username thief: takes the source handle on the target network.
            Identity* thief = make_decoy('x', filler_display(x_seq + 7),
                                         std::string(kCities[(city_idx[i] + 5) % kCities.size()]),
                                         true, EntityClass::person);
            thief->username = src_uname[i];
        }

        if (c.cross) {
            std::string qt;
            if (c.quote) {
                qt = "q" + four(i) + " the " + kWords[i % 32] + " path teaches " +
                     kWords[(i * 5 + 2) % 32] + " patience";
            } else {
                qt = "q" + four(i) + " crossing notes " + kWords[i % 32] + " " +
                     kWords[(i * 7 + 3) % 32];
            }
            if (i % 5 == 0) {
                qt += " with extended reflections carried well past the usual length of a short "
                      "status update";
            }
            quote_texts[i] = qt;
            if (c.quote) {
                for (int k = 0; k < cfg.n_quote_sharers; ++k) {
                    Identity* sharer =
                        make_decoy('x', filler_display(x_seq), std::nullopt, true,
                                   EntityClass::person);
                    sharer->posts_public = true;
                    quote_posts.emplace_back(sharer->user_id, qt);
                }
            }
        }
    }

    // Pad with plain fillers up to the exact decoy budget.
    std::vector<std::string> filler_ids;
    while (made < decoy_budget) {
        EntityClass entity = (x_seq % 10) == 9 ? EntityClass::page : EntityClass::person;
        Identity* filler = make_decoy(
            'x', filler_display(x_seq),
            (x_seq % 8) == 5 ? std::optional<std::string>{}
                             : std::optional<std::string>{kCities[x_seq % kCities.size()]},
            true, entity);
        if (entity == EntityClass::person) {
            filler->friendlist_public = rng.bern(cfg.p_friendlist_public);
            filler_ids.push_back(filler->user_id);
        }
    }
    if (filler_ids.empty()) {
        // Friend-list padding below needs at least one plain filler.
        throw CorpusError("decoy budget too small for filler identities");
    }

    corpus.identities = std::move(identities);
    corpus.identities.insert(corpus.identities.end(), decoys.begin(), decoys.end());

    // ------------------------------------------------------------------
    // Posts
    // ------------------------------------------------------------------
    constexpr std::int64_t kBaseTs = 1700000000;
    auto add_post = [&](const NetworkKind& net, const std::string& uid, std::string text,
                        int seq_per_author, std::optional<std::string> source_app = {}) {
        Post p;
        p.author = IdentityRef{net, uid};
        p.text = std::move(text);
        p.timestamp = kBaseTs - 60LL * seq_per_author;
        p.source_app = std::move(source_app);
        corpus.posts.push_back(std::move(p));
    };

    for (int i = 0; i < n; ++i) {
        const Channels& c = effective[i];
        int seq = 0;

        const int fillers = 1 + (i % 3);
        for (int j = 0; j < fillers; ++j) {
            add_post(corpus.source_network, src_id[i],
                     "note " + src_id[i] + " p" + std::to_string(j) + " " +
                         kWords[(i * 3 + j) % 32] + " " + kWords[(i * 5 + j * 7 + 1) % 32],
                     seq++);
        }
        if (c.cross) {
            add_post(corpus.source_network, src_id[i], quote_texts[i], seq++,
                     std::string("crossposter"));
        }
        if (c.sm) {
            const int k = 1 + (i % 3);
            for (int j = 0; j < k; ++j) {
                const int variant = (i + j) % 3;
                if (variant == 0) {
                    add_post(corpus.source_network, src_id[i],
                             "profile https://" + corpus.target_network.name + ".net/" +
                                 tgt_uname[i],
                             seq++);
                } else if (variant == 1) {
                    add_post(corpus.source_network, src_id[i],
                             "album " + corpus.target_network.name + ".net/" + tgt_uname[i] +
                                 "/p/" + std::to_string(j),
                             seq++);
                } else {
                    const std::string code = "s" + std::to_string(i) + "x" + std::to_string(j);
                    add_post(corpus.source_network, src_id[i], "pics https://sho.rt/" + code,
                             seq++);
                    PageRecord shortener;
                    shortener.url = "https://sho.rt/" + code;
                    shortener.redirects_to = "https://" + corpus.target_network.name + ".net/" +
                                             tgt_uname[i] + "/p/9" + std::to_string(j);
                    corpus.pages.emplace(shortener.url, std::move(shortener));
                }
            }
        }
        for (const auto& [host, users] : domains) {
            if (std::binary_search(users.begin(), users.end(), i)) {
                add_post(corpus.source_network, src_id[i],
                         "pic https://" + host + "/" + src_uname[i] + "/i" + std::to_string(seq),
                         seq);
                ++seq;
            }
        }

        // Target side.
        int tseq = 0;
        const int tgt_fillers = 1 + (i % 2);
        for (int j = 0; j < tgt_fillers; ++j) {
            add_post(corpus.target_network, tgt_id[i],
                     "status " + tgt_id[i] + " p" + std::to_string(j) + " " +
                         kWords[(i * 11 + j) % 32],
                     tseq++);
        }
        if (c.cross) {
            add_post(corpus.target_network, tgt_id[i], quote_texts[i], tseq++,
                     std::string("crossposter"));
        }
    }
    for (std::size_t k = 0; k < quote_posts.size(); ++k) {
        add_post(corpus.target_network, quote_posts[k].first, quote_posts[k].second,
                 static_cast<int>(k % 3));
    }
    {
        int k = 0;
        for (const auto& fid : filler_ids) {
            if (k++ % 5 == 0) {
                add_post(corpus.target_network, fid, "murmur " + fid + " " + kWords[k % 32], 0);
            }
        }
    }

    // ------------------------------------------------------------------
    // Pages for indirect self-identification
    // ------------------------------------------------------------------
    for (int i = 0; i < n; ++i) {
        if (!effective[i].url_indirect) continue;
        PageRecord blog;
        blog.url = "https://blogs.example/u" + four(i);
        blog.links = {"https://elsewhere.example/essays",
                      "https://" + corpus.target_network.name + ".net/" + tgt_uname[i]};
        corpus.pages.emplace(blog.url, std::move(blog));
    }

    // ------------------------------------------------------------------
    // Edges
    // ------------------------------------------------------------------
    auto add_edge = [&](const NetworkKind& net, const std::string& from, const std::string& to,
                        const char* kind) {
        corpus.edges.push_back(CorpusEdge{net, from, to, kind});
    };

    for (int i = 0; i < n; ++i) {
        const int k = 2 + (i % 4);
        std::set<int> chosen;
        for (int t = 0; t < k; ++t) {
            const int j = (i * 7 + 3 + t * 13) % n;
            if (j == i || !chosen.insert(j).second) continue;
            add_edge(corpus.source_network, src_id[i], src_id[j], "follows");
            if (t % 4 == 0) add_edge(corpus.source_network, src_id[j], src_id[i], "follows");
        }
    }
    for (int i = 0; i < n; ++i) {
        if (supporters[i][0] < 0) continue;
        for (int s : supporters[i]) {
            add_edge(corpus.source_network, src_id[s], src_id[i], "follows");
            add_edge(corpus.target_network, tgt_id[s], tgt_id[i], "friend");
        }
    }
    {
        // Friend-list padding: public targets befriend plain fillers.
        int fcursor = 0;
        for (int i = 0; i < n; ++i) {
            const Identity& tgt = corpus.identities[static_cast<std::size_t>(i) * 2 + 1];
            if (!tgt.friendlist_public) continue;
            const int friends = 1 + (i % 3);
            for (int j = 0; j < friends; ++j) {
                add_edge(corpus.target_network, tgt.user_id,
                         filler_ids[fcursor++ % filler_ids.size()], "friend");
            }
        }
    }

    // ------------------------------------------------------------------
    // Ground truth and manifest
    // ------------------------------------------------------------------
    long direct_count = 0, indirect_count = 0, su_count = 0, similar_count = 0, nl_count = 0,
         image_count = 0, cross_count = 0, sm_count = 0, net_count = 0, profile_union = 0,
         all_union = 0;
    for (int i = 0; i < n; ++i) {
        const Channels& c = effective[i];
        GroundTruthPair gt;
        gt.source_id = src_id[i];
        gt.target_id = tgt_id[i];
        if (c.url_direct) gt.leak_labels.insert(kLeakSelfIdDirect);
        if (c.url_indirect) gt.leak_labels.insert(kLeakSelfIdIndirect);
        if (c.su) gt.leak_labels.insert(kLeakSameUsername);
        if (c.similar) gt.leak_labels.insert(kLeakSimilarUsername);
        if (c.nl) gt.leak_labels.insert(kLeakNameLocation);
        if (c.image) gt.leak_labels.insert(kLeakImageShared);
        if (c.cross) gt.leak_labels.insert(kLeakCrossPost);
        if (c.sm) gt.leak_labels.insert(kLeakSelfMention);
        if (c.net) gt.leak_labels.insert(kLeakNetwork);
        corpus.ground_truth.push_back(std::move(gt));

        direct_count += c.url_direct;
        indirect_count += c.url_indirect;
        su_count += c.su;
        similar_count += c.similar;
        nl_count += c.nl;
        image_count += c.image;
        cross_count += c.cross;
        sm_count += c.sm;
        net_count += c.net;
        profile_union += c.profile_identified();
        all_union += c.profile_identified() || c.cross || c.sm || c.net;
    }

    nlohmann::json planted;
    planted["self_id_direct"] = direct_count;
    planted["self_id_indirect"] = indirect_count;
    planted["url"] = direct_count + indirect_count;
    planted["same_username"] = su_count;
    planted["similar_username"] = similar_count;
    planted["name_location"] = nl_count;
    planted["image_shared"] = image_count;
    planted["cross_post"] = cross_count;
    planted["self_mention"] = sm_count;
    planted["network"] = net_count;
    planted["profile_union"] = profile_union;
    planted["all_union"] = all_union;
    {
        nlohmann::json sub;
        long url_su = 0, url_nl = 0, su_nl = 0;
        for (int i = 0; i < n; ++i) {
            url_su += effective[i].url() || effective[i].su;
            url_nl += effective[i].url() || effective[i].nl;
            su_nl += effective[i].su || effective[i].nl;
        }
        sub["URL"] = direct_count + indirect_count;
        sub["SU"] = su_count;
        sub["NL"] = nl_count;
        sub["URL+SU"] = url_su;
        sub["URL+NL"] = url_nl;
        sub["SU+NL"] = su_nl;
        sub["URL+SU+NL"] = profile_union;
        planted["submethods"] = sub;
    }
    {
        nlohmann::json d;
        for (const auto& [host, users] : domains) d[host] = users.size();
        planted["domains"] = d;
    }

    corpus.manifest = nlohmann::json{
        {"schema", 1},
        {"networks", {{"source", corpus.source_network.name}, {"target", corpus.target_network.name}}},
        {"config", cfg.to_json()},
        {"planted", planted},
        {"decoys", decoy_budget},
    };

    corpus.finalize();
    return corpus;
}

// ---------------------------------------------------------------------------
// Audit
// ---------------------------------------------------------------------------

namespace {

bool ci_contains(const std::string& haystack, const std::string& needle) {
    return ascii_lower(haystack).find(ascii_lower(needle)) != std::string::npos;
}

std::vector<const Post*> newest_posts(const Corpus& corpus, const IdentityRef& ref, int cap) {
    std::vector<const Post*> out;
    auto it = corpus.posts_by_author.find(ref);
    if (it == corpus.posts_by_author.end()) return out;
    for (std::size_t idx : it->second) {
        if (static_cast<int>(out.size()) >= cap) break;
        out.push_back(&corpus.posts[idx]);
    }
    return out;
}

}  // namespace

std::set<std::string> derive_leak_labels(const Corpus& corpus, const GroundTruthPair& pair) {
    std::set<std::string> labels;
    const Identity* src = corpus.find(corpus.source_network, pair.source_id);
    const Identity* tgt = corpus.find(corpus.target_network, pair.target_id);
    if (!src || !tgt) return labels;

    if (src->url_field && !src->url_field->empty()) {
        const UrlTrace trace = trace_url(corpus, *src->url_field);
        if (!trace.failed && trace.identity && trace.identity->user_id == tgt->user_id) {
            labels.insert(trace.via_page_scan ? kLeakSelfIdIndirect : kLeakSelfIdDirect);
        }
    }

    const std::string su_src = normalize_username(src->username);
    const std::string su_tgt = normalize_username(tgt->username);
    if (su_src == su_tgt && tgt->searchable) {
        labels.insert(kLeakSameUsername);
    } else if (su_src != su_tgt && jaro(su_src, su_tgt) >= 0.75) {
        labels.insert(kLeakSimilarUsername);
    }

    if (tgt->searchable && name_match(src->display_name, tgt->display_name) &&
        location_compatible(src->location, tgt->location)) {
        labels.insert(kLeakNameLocation);
    }

    if (src->image_key && tgt->image_key && *src->image_key == *tgt->image_key) {
        labels.insert(kLeakImageShared);
    }

    const auto src_posts = newest_posts(corpus, src->ref(), kRecentPostCap);
    if (src->posts_public && tgt->posts_public) {
        bool cross = false;
        const auto tgt_posts = newest_posts(corpus, tgt->ref(), 1 << 20);
        for (const Post* p : src_posts) {
            if (cross) break;
            const std::string query = process_post_text(p->text);
            if (static_cast<int>(query.size()) < kContentMinQueryLength) continue;
            for (const Post* q : tgt_posts) {
                if (ci_contains(process_post_text(q->text), query)) {
                    cross = true;
                    break;
                }
            }
        }
        if (cross) labels.insert(kLeakCrossPost);
    }

    if (src->posts_public && tgt->entity_class == EntityClass::person) {
        for (const Post* p : src_posts) {
            bool hit = false;
            for (const auto& url : p->urls) {
                const UrlTrace trace = trace_url(corpus, url);
                if (!trace.failed && trace.identity && trace.identity->user_id == tgt->user_id) {
                    hit = true;
                    break;
                }
            }
            if (hit) {
                labels.insert(kLeakSelfMention);
                break;
            }
        }
    }

    {
        std::set<std::string> members;
        auto collect = [&](const std::map<IdentityRef, std::vector<std::string>>& adj) {
            auto it = adj.find(src->ref());
            if (it == adj.end()) return;
            for (const auto& m : it->second) members.insert(m);
        };
        collect(corpus.follows_in);
        collect(corpus.follows_out);

        int qualifying = 0;
        for (const auto& mid : members) {
            if (mid == src->user_id) continue;
            const Identity* member = corpus.find(corpus.source_network, mid);
            if (!member || !member->url_field || member->url_field->empty()) continue;
            const UrlTrace trace = trace_url(corpus, *member->url_field);
            if (trace.failed || !trace.identity) continue;
            if (!trace.identity->friendlist_public) continue;
            auto fit = corpus.friends.find(trace.identity->ref());
            if (fit == corpus.friends.end()) continue;
            if (std::find(fit->second.begin(), fit->second.end(), tgt->user_id) ==
                fit->second.end()) {
                continue;
            }
            if (!name_match(src->display_name, tgt->display_name)) continue;
            ++qualifying;
        }
        if (qualifying >= 2) labels.insert(kLeakNetwork);
    }

    return labels;
}

AuditReport audit(const Corpus& corpus) {
    AuditReport report;
    for (const auto& pair : corpus.ground_truth) {
        ++report.pairs_checked;
        const auto derived = derive_leak_labels(corpus, pair);
        if (derived != pair.leak_labels) {
            std::string msg = pair.source_id + ": derived {";
            for (const auto& l : derived) msg += l + ",";
            msg += "} != recorded {";
            for (const auto& l : pair.leak_labels) msg += l + ",";
            msg += "}";
            report.mismatches.push_back(std::move(msg));
        }
    }
    return report;
}

}  // namespace nemo
