#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "nemo/connector.hpp"
#include "nemo/corpus_gen.hpp"
#include "nemo/search.hpp"
#include "nemo/similarity.hpp"

using namespace nemo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool dirs_equal(const fs::path& a, const fs::path& b) {
    std::vector<std::string> rel_a, rel_b;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (e.is_regular_file()) rel_a.push_back(fs::relative(e.path(), a).string());
    }
    for (const auto& e : fs::recursive_directory_iterator(b)) {
        if (e.is_regular_file()) rel_b.push_back(fs::relative(e.path(), b).string());
    }
    std::sort(rel_a.begin(), rel_a.end());
    std::sort(rel_b.begin(), rel_b.end());
    if (rel_a != rel_b) return false;
    for (const auto& rel : rel_a) {
        if (slurp(a / rel) != slurp(b / rel)) return false;
    }
    return true;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("identical config and seed produce byte-identical corpus files") {
    CorpusConfig cfg = preset_config("sparse");
    cfg.n_users = 30;
    TempDir a("nemo_gen_a"), b("nemo_gen_b");
    save_corpus(generate(cfg), a.path);
    save_corpus(generate(cfg), b.path);
    CHECK(dirs_equal(a.path, b.path));

    cfg.seed += 1;
    TempDir c("nemo_gen_c");
    save_corpus(generate(cfg), c.path);
    CHECK_FALSE(dirs_equal(a.path, c.path));
}

TEST_CASE("corpora survive a save/load round trip") {
    CorpusConfig cfg = preset_config("dense");
    cfg.n_users = 24;
    const Corpus original = generate(cfg);
    TempDir dir("nemo_gen_roundtrip");
    save_corpus(original, dir.path);
    const Corpus loaded = load_corpus(dir.path);
    CHECK(loaded.identities.size() == original.identities.size());
    CHECK(loaded.posts.size() == original.posts.size());
    CHECK(loaded.edges.size() == original.edges.size());
    CHECK(loaded.ground_truth.size() == original.ground_truth.size());
    CHECK(loaded.images.size() == original.images.size());
    CHECK(corpus_id(loaded) == corpus_id(original));
    for (std::size_t i = 0; i < loaded.ground_truth.size(); ++i) {
        CHECK(loaded.ground_truth[i].leak_labels == original.ground_truth[i].leak_labels);
    }
}

TEST_CASE("audit is clean on every preset") {
    for (const auto& name : preset_names()) {
        CorpusConfig cfg = preset_config(name);
        if (!cfg.quotas) cfg.n_users = 60;  // keep the suite fast
        const Corpus corpus = generate(cfg);
        const AuditReport report = audit(corpus);
        CHECK(report.pairs_checked == cfg.n_users);
        if (!report.clean()) {
            for (const auto& m : report.mismatches) MESSAGE(m);
        }
        CHECK(report.clean());
    }
}

TEST_CASE("a hand-corrupted URL field is flagged as exactly one mismatch") {
    CorpusConfig cfg = preset_config("dense");
    cfg.n_users = 40;
    Corpus corpus = generate(cfg);
    // Corrupting a network-leak supporter would legitimately flip two pairs'
    // labels, so pick a self-identified user who supports nobody.
    std::set<std::string> supporters;
    for (const auto& gt : corpus.ground_truth) {
        if (!gt.leak_labels.count(kLeakNetwork)) continue;
        const IdentityRef ref{corpus.source_network, gt.source_id};
        for (const auto* adj : {&corpus.follows_in, &corpus.follows_out}) {
            auto it = adj->find(ref);
            if (it == adj->end()) continue;
            supporters.insert(it->second.begin(), it->second.end());
        }
    }
    std::string victim;
    for (const auto& gt : corpus.ground_truth) {
        if (gt.leak_labels.count(kLeakSelfIdDirect) && !supporters.count(gt.source_id)) {
            victim = gt.source_id;
            break;
        }
    }
    REQUIRE_FALSE(victim.empty());
    for (auto& id : corpus.identities) {
        if (id.network == corpus.source_network && id.user_id == victim) {
            id.url_field = "https://elsewhere.example/broken";
        }
    }
    corpus.finalize();
    const AuditReport report = audit(corpus);
    CHECK(report.mismatches.size() == 1);
    CHECK(report.mismatches[0].find(victim) == 0);
}

TEST_CASE("an all-zero config plants no leaks and labels nothing") {
    CorpusConfig cfg;
    cfg.n_users = 25;
    cfg.seed = 5;
    cfg.p_posts_public = 1.0;
    const Corpus corpus = generate(cfg);
    for (const auto& gt : corpus.ground_truth) {
        CHECK(gt.leak_labels.empty());
    }
    CHECK(audit(corpus).clean());
}

TEST_CASE("p_self_id_direct=1 with 50 users confirms every query via profile") {
    CorpusConfig cfg;
    cfg.n_users = 50;
    cfg.seed = 9;
    cfg.p_self_id_direct = 1.0;
    const Corpus corpus = generate(cfg);
    for (const auto& gt : corpus.ground_truth) {
        FixtureConnector conn(corpus);
        const AlgorithmOutcome out = profile_search(conn, gt.source_id);
        REQUIRE(out.confirmed.has_value());
        CHECK(out.confirmed->user_id == gt.target_id);
    }
}

TEST_CASE("paper preset manifest carries the planted sub-method table") {
    const CorpusConfig cfg = preset_config("paper");
    REQUIRE(cfg.quotas.has_value());
    const ProfileRegionQuotas& r = cfg.quotas->profile_regions;
    // Region sizes follow from the identified counts by inclusion-exclusion:
    // |URL∩SU| = 137+82-175 = 44, |URL∩NL| = 137+144-200 = 81,
    // |SU∩NL| = 82+144-149 = 77, |URL∩SU∩NL| = 205-363+202 = 44.
    CHECK(r.url_total() == 137);
    CHECK(r.su_total() == 82);
    CHECK(r.nl_total() == 144);
    CHECK(r.union_total() == 205);

    const Corpus corpus = generate(cfg);
    const auto& sub = corpus.manifest["planted"]["submethods"];
    CHECK(sub["URL"] == 137);
    CHECK(sub["SU"] == 82);
    CHECK(sub["NL"] == 144);
    CHECK(sub["URL+SU"] == 175);
    CHECK(sub["URL+NL"] == 200);
    CHECK(sub["SU+NL"] == 149);
    CHECK(sub["URL+SU+NL"] == 205);
    CHECK(corpus.manifest["planted"]["self_mention"] == 31);
    CHECK(corpus.manifest["planted"]["cross_post"] == 3);
    CHECK(corpus.manifest["planted"]["network"] == 1);
    CHECK(corpus.manifest["planted"]["all_union"] == 220);
    CHECK(corpus.ground_truth.size() == 543);
}

TEST_CASE("generated corpora keep the decoy population at three per pair") {
    for (const char* name : {"sparse", "dense"}) {
        CorpusConfig cfg = preset_config(name);
        cfg.n_users = 30;
        const Corpus corpus = generate(cfg);
        long decoys = 0;
        for (const auto& id : corpus.identities) {
            if (id.network == corpus.target_network && id.user_id[0] != 't') ++decoys;
        }
        CHECK(decoys == 3 * cfg.n_users);
        CHECK(corpus.manifest["decoys"] == 3 * cfg.n_users);
    }
}

TEST_CASE("planted similar usernames land in the intended Jaro band") {
    CorpusConfig cfg;
    cfg.n_users = 80;
    cfg.seed = 31;
    cfg.p_similar_username = 1.0;
    const Corpus corpus = generate(cfg);
    int checked = 0;
    for (const auto& gt : corpus.ground_truth) {
        if (!gt.leak_labels.count(kLeakSimilarUsername)) continue;
        const Identity* src = corpus.find(corpus.source_network, gt.source_id);
        const Identity* tgt = corpus.find(corpus.target_network, gt.target_id);
        REQUIRE(src);
        REQUIRE(tgt);
        const double j = jaro(normalize_username(src->username),
                              normalize_username(tgt->username));
        CHECK(j >= 0.75);
        CHECK(j <= 0.95);
        ++checked;
    }
    CHECK(checked == 80);
}

TEST_CASE("planted self-identification and self-mention links are truthful") {
    const Corpus corpus = generate(preset_config("dense"));
    for (const auto& gt : corpus.ground_truth) {
        const Identity* src = corpus.find(corpus.source_network, gt.source_id);
        REQUIRE(src);
        if (gt.leak_labels.count(kLeakSelfIdDirect) || gt.leak_labels.count(kLeakSelfIdIndirect)) {
            const UrlTrace trace = trace_url(corpus, *src->url_field);
            REQUIRE(trace.identity != nullptr);
            CHECK(trace.identity->user_id == gt.target_id);
        }
        // Any target-network link in any post must point to the true counterpart.
        auto it = corpus.posts_by_author.find(src->ref());
        if (it == corpus.posts_by_author.end()) continue;
        for (std::size_t idx : it->second) {
            for (const auto& url : corpus.posts[idx].urls) {
                const UrlTrace trace = trace_url(corpus, url);
                if (!trace.failed && trace.identity) {
                    CHECK(trace.identity->user_id == gt.target_id);
                }
            }
        }
    }
}

TEST_CASE("generator name pools are safe: disjoint and substring-free cities") {
    // The guarantees behind the exact-count planting: a non-planted pair can
    // never produce an accidental name or location match.
    const Corpus corpus = generate(preset_config("sparse"));
    for (const auto& gt : corpus.ground_truth) {
        const Identity* src = corpus.find(corpus.source_network, gt.source_id);
        const Identity* tgt = corpus.find(corpus.target_network, gt.target_id);
        const bool planted_nl = gt.leak_labels.count(kLeakNameLocation) > 0;
        const bool findable = tgt->searchable &&
                              name_match(src->display_name, tgt->display_name) &&
                              location_compatible(src->location, tgt->location);
        CHECK(planted_nl == findable);
    }
}

TEST_CASE("config json round trip") {
    const CorpusConfig cfg = preset_config("paper");
    const CorpusConfig back = config_from_json(cfg.to_json());
    CHECK(back.n_users == cfg.n_users);
    CHECK(back.seed == cfg.seed);
    REQUIRE(back.quotas.has_value());
    CHECK(back.quotas->profile_regions.url_su_nl == 44);
    CHECK(back.quotas->domain_users.size() == 5);
    const nlohmann::json bad = {{"nonsense_key", 1}};
    CHECK_THROWS_AS(config_from_json(bad), CorpusError);
}

TEST_CASE("invalid configs are rejected") {
    CorpusConfig cfg;
    cfg.n_users = 0;
    CHECK_THROWS_AS(generate(cfg), CorpusError);
    cfg.n_users = 10;
    cfg.p_cross_post = 1.5;
    CHECK_THROWS_AS(generate(cfg), CorpusError);
}

TEST_CASE("corpus structural invariants are enforced at finalize") {
    auto base = [] {
        Corpus c;
        c.manifest = {{"config", {{"seed", 0}}}};
        Identity id;
        id.network = NetworkKind{"target"};
        id.user_id = "t1";
        id.username = "u1";
        id.display_name = "U One";
        c.identities.push_back(id);
        return c;
    };

    SUBCASE("duplicate user_id") {
        Corpus c = base();
        Identity dup = c.identities[0];
        dup.username = "u2";
        c.identities.push_back(dup);
        CHECK_THROWS_AS(c.finalize(), CorpusError);
    }
    SUBCASE("duplicate normalized username") {
        Corpus c = base();
        Identity dup = c.identities[0];
        dup.user_id = "t2";
        dup.username = "U1";  // same after normalization
        c.identities.push_back(dup);
        CHECK_THROWS_AS(c.finalize(), CorpusError);
    }
    SUBCASE("person without username") {
        Corpus c = base();
        c.identities[0].username = "";
        CHECK_THROWS_AS(c.finalize(), CorpusError);
    }
    SUBCASE("page with a public friend list") {
        Corpus c = base();
        c.identities[0].entity_class = EntityClass::page;
        c.identities[0].friendlist_public = true;
        CHECK_THROWS_AS(c.finalize(), CorpusError);
    }
    SUBCASE("negative timestamp") {
        Corpus c = base();
        Post p;
        p.author = c.identities[0].ref();
        p.text = "x";
        p.timestamp = -1;
        c.posts.push_back(p);
        CHECK_THROWS_AS(c.finalize(), CorpusError);
    }
    SUBCASE("edge to an unknown identity") {
        Corpus c = base();
        c.edges.push_back(CorpusEdge{NetworkKind{"target"}, "t1", "ghost", "friend"});
        CHECK_THROWS_AS(c.finalize(), CorpusError);
    }
    SUBCASE("post urls are re-derived from the text on finalize") {
        Corpus c = base();
        Post p;
        p.author = c.identities[0].ref();
        p.text = "see https://target.net/u1 now";
        p.timestamp = 5;
        p.urls = {"https://stale.example/wrong"};
        c.posts.push_back(p);
        c.finalize();
        REQUIRE(c.posts[0].urls.size() == 1);
        CHECK(c.posts[0].urls[0] == "https://target.net/u1");
    }
}
