#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nemo/connector.hpp"
#include "nemo/sim_clock.hpp"
#include "support.hpp"

using namespace nemo;
using testsupport::TestCorpus;

TEST_CASE("rate limiter: full window passes without sleeping, next call rolls") {
    SimClock clock;
    RateLimiter limiter(RateLimitPolicy{}, clock);
    for (int i = 0; i < 350; ++i) {
        limiter.acquire();
        clock.advance_us(200000);
    }
    CHECK(clock.now_seconds() == doctest::Approx(70.0));
    CHECK(limiter.windows_crossed() == 0);

    limiter.acquire();  // 351st inside the same simulated hour
    CHECK(clock.now_us() == 3600LL * 1000000LL);
    CHECK(limiter.windows_crossed() == 1);
}

TEST_CASE("rate limiter: an elapsed window refills the budget without a jump") {
    SimClock clock;
    RateLimiter limiter(RateLimitPolicy{2, 1000000}, clock);
    limiter.acquire();
    limiter.acquire();
    clock.advance_us(1500000);  // next window reached naturally
    limiter.acquire();
    CHECK(clock.now_us() == 1500000);
    CHECK(limiter.windows_crossed() == 0);
    limiter.acquire();
    limiter.acquire();  // exhausts window 1, jumps to 2s
    CHECK(clock.now_us() == 2000000);
}

namespace {

Corpus small_corpus() {
    TestCorpus t;
    auto& nemo_src = t.source_user("s1", "alice_w", "Alice Wonder");
    nemo_src.location = "galeport";
    t.source_user("s2", "bob_k", "Bob Kite");

    auto& alice = t.target_user("t1", "alice_w", "Alice Wonder");
    alice.location = "galeport";
    alice.searchable = true;
    auto& hidden = t.target_user("t2", "alice_hidden", "Alice Wonder");
    hidden.location = "galeport";
    hidden.searchable = false;
    hidden.posts_public = false;
    auto& page = t.target_user("t3", "wonderpage", "Alice Wonder Fan Page");
    page.entity_class = EntityClass::page;
    page.location = "galeport";

    t.post(t.c.target_network, "t1", "good morning galeport", 100);
    t.post(t.c.target_network, "t1", "second post", 200);
    t.post(t.c.target_network, "t2", "good morning galeport", 150);

    t.page("https://sho.rt/a", "https://target.net/alice_w");
    t.page("https://sho.rt/loop1", "https://sho.rt/loop2");
    t.page("https://sho.rt/loop2", "https://sho.rt/loop1");
    t.page("https://blog.example/alice", std::nullopt,
           {"https://elsewhere.example/x", "https://target.net/alice_w"});

    t.truth("s1", "t1");
    return t.done();
}

}  // namespace

TEST_CASE("lookup_identity returns records and counts one request") {
    const Corpus corpus = small_corpus();
    FixtureConnector conn(corpus);
    const Identity id = conn.lookup_identity(corpus.source_network, "s1");
    CHECK(id.username == "alice_w");
    CHECK(conn.requests_used() == 1);
    CHECK(conn.elapsed_seconds() == doctest::Approx(0.2));
    CHECK_THROWS_AS(conn.lookup_identity(corpus.source_network, "ghost"), NotFoundError);
}

TEST_CASE("search_by_name_location matches, filters and caps") {
    const Corpus corpus = small_corpus();
    FixtureConnector conn(corpus);

    auto hits = conn.search_by_name_location("Alice Wonder", std::nullopt, 60);
    // t2 is not searchable; t1 and the fan page match by token "alice"/"wonder".
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].user_id == "t1");
    CHECK(hits[1].user_id == "t3");

    auto with_loc = conn.search_by_name_location("Alice Wonder", std::string("GALEPORT"), 60);
    CHECK(with_loc.size() == 2);

    auto wrong_loc = conn.search_by_name_location("Alice Wonder", std::string("ironvale"), 60);
    CHECK(wrong_loc.empty());

    auto capped = conn.search_by_name_location("Alice Wonder", std::nullopt, 1);
    REQUIRE(capped.size() == 1);
    CHECK(capped[0].user_id == "t1");

    CHECK(conn.search_by_name_location("Unknown Person", std::nullopt, 60).empty());
}

TEST_CASE("search cap of 60 truncates a 75-strong result set") {
    TestCorpus t;
    t.source_user("s1", "alice", "Alice Wonder");
    for (int i = 0; i < 75; ++i) {
        char id[8];
        std::snprintf(id, sizeof(id), "t%03d", i);
        t.target_user(id, std::string("u") + id, "Alice Wonder");
    }
    t.truth("s1", "t000");
    const Corpus corpus = t.done();
    FixtureConnector conn(corpus);
    CHECK(conn.search_by_name_location("Alice Wonder", std::nullopt, 60).size() == 60);
}

TEST_CASE("search_by_username honors normalization and searchability") {
    const Corpus corpus = small_corpus();
    FixtureConnector conn(corpus);
    auto hit = conn.search_by_username("@Alice_W");
    REQUIRE(hit.has_value());
    CHECK(hit->user_id == "t1");
    CHECK_FALSE(conn.search_by_username("nobody").has_value());
    CHECK_FALSE(conn.search_by_username("alice_hidden").has_value());  // not searchable
}

TEST_CASE("search_posts_by_text respects posts_public and matches substrings") {
    const Corpus corpus = small_corpus();
    FixtureConnector conn(corpus);
    auto hits = conn.search_posts_by_text("good morning", 100);
    REQUIRE(hits.size() == 1);  // t2 posted the same text but keeps posts private
    CHECK(hits[0].first.user_id == "t1");
}

TEST_CASE("fetch_recent_posts caps at n and orders newest first") {
    TestCorpus t;
    t.source_user("s1", "poster", "Post Er");
    for (int i = 0; i < 250; ++i) {
        t.post(t.c.source_network, "s1", "note s1 entry " + std::to_string(i), 1000 + i);
    }
    t.source_user("s2", "quiet", "Qui Et");
    t.post(t.c.source_network, "s2", "only note one", 1);
    t.post(t.c.source_network, "s2", "only note two", 2);
    t.post(t.c.source_network, "s2", "only note three", 3);
    t.target_user("t1", "u1", "U One");
    t.truth("s1", "t1");
    const Corpus corpus = t.done();
    FixtureConnector conn(corpus);

    const auto many = conn.fetch_recent_posts({corpus.source_network, "s1"}, 100);
    REQUIRE(many.size() == 100);
    CHECK(many.front().timestamp == 1249);
    for (std::size_t i = 1; i < many.size(); ++i) {
        CHECK(many[i - 1].timestamp > many[i].timestamp);
    }

    CHECK(conn.fetch_recent_posts({corpus.source_network, "s2"}, 100).size() == 3);
    CHECK_THROWS_AS(conn.fetch_recent_posts({corpus.source_network, "nope"}, 100), NotFoundError);
}

TEST_CASE("private posts are invisible to fetch and search") {
    TestCorpus t;
    auto& s = t.source_user("s1", "priv", "Pri Vate");
    s.posts_public = false;
    t.post(t.c.source_network, "s1", "hidden words here", 10);
    auto& tp = t.target_user("t1", "tpriv", "Tar Get");
    tp.posts_public = false;
    t.post(t.c.target_network, "t1", "hidden target words", 10);
    t.truth("s1", "t1");
    const Corpus corpus = t.done();
    FixtureConnector conn(corpus);
    CHECK(conn.fetch_recent_posts({corpus.source_network, "s1"}, 100).empty());
    CHECK(conn.search_posts_by_text("hidden target", 100).empty());
}

namespace {

Corpus network_corpus() {
    TestCorpus t;
    t.source_user("s1", "hub", "Hub User");
    t.source_user("s2", "fa", "Fol A");
    t.source_user("s3", "fb", "Fol B");
    t.source_user("s4", "fc", "Fol C");
    t.target_user("t1", "tone", "T One");
    // s2, s3 follow s1; s1 follows s3, s4 -> friend = {s3}.
    t.follows("s2", "s1");
    t.follows("s3", "s1");
    t.follows("s1", "s3");
    t.follows("s1", "s4");
    t.truth("s1", "t1");
    return t.done();
}

}  // namespace

TEST_CASE("fetch_network kinds and the friend intersection") {
    const Corpus corpus = network_corpus();
    FixtureConnector conn(corpus);
    const IdentityRef hub{corpus.source_network, "s1"};

    auto followers = conn.fetch_network(hub, NetworkRelation::follower);
    auto followees = conn.fetch_network(hub, NetworkRelation::followee);
    auto friends = conn.fetch_network(hub, NetworkRelation::friend_);

    auto ids = [](const std::vector<Identity>& v) {
        std::set<std::string> s;
        for (const auto& i : v) s.insert(i.user_id);
        return s;
    };
    CHECK(ids(followers) == std::set<std::string>{"s2", "s3"});
    CHECK(ids(followees) == std::set<std::string>{"s3", "s4"});
    CHECK(ids(friends) == std::set<std::string>{"s3"});

    // friend ⊆ follower and friend ⊆ followee
    for (const auto& f : friends) {
        CHECK(ids(followers).count(f.user_id) == 1);
        CHECK(ids(followees).count(f.user_id) == 1);
    }

    CHECK(conn.fetch_network({corpus.source_network, "s4"}, NetworkRelation::follower).size() ==
          1);
    CHECK_THROWS_AS(conn.fetch_network({corpus.source_network, "zz"}, NetworkRelation::follower),
                    NotFoundError);
}

TEST_CASE("fetch_network charges one request per page of 100 members") {
    TestCorpus t;
    t.source_user("s0", "hub", "Hub User");
    for (int i = 1; i <= 767; ++i) {
        const std::string id = "f" + std::to_string(i);
        t.source_user(id, "u" + id, "Fol " + std::to_string(i));
        t.follows(id, "s0");
    }
    t.target_user("t1", "tone", "T One");
    t.truth("s0", "t1");
    const Corpus corpus = t.done();

    FixtureConnector conn(corpus, RateLimitPolicy{100000, 3600LL * 1000000LL});
    const long before = conn.requests_used();
    const auto members = conn.fetch_network({corpus.source_network, "s0"}, NetworkRelation::follower);
    CHECK(members.size() == 767);
    CHECK(conn.requests_used() - before == 8);  // ceil(767/100)
}

TEST_CASE("fetch_friend_list: public, private, pages") {
    TestCorpus t;
    t.source_user("s1", "a", "A A");
    auto& pub = t.target_user("t1", "tp", "T Pub");
    pub.friendlist_public = true;
    t.target_user("t2", "tq", "T Priv");
    auto& pg = t.target_user("t3", "tr", "T Page");
    pg.entity_class = EntityClass::page;
    t.target_user("t4", "ts", "T Friend");
    t.friend_edge("t1", "t4");
    t.truth("s1", "t1");
    const Corpus corpus = t.done();
    FixtureConnector conn(corpus);

    auto list = conn.fetch_friend_list({corpus.target_network, "t1"});
    REQUIRE(list.has_value());
    REQUIRE(list->size() == 1);
    CHECK((*list)[0].user_id == "t4");
    CHECK_FALSE(conn.fetch_friend_list({corpus.target_network, "t2"}).has_value());
    CHECK_FALSE(conn.fetch_friend_list({corpus.target_network, "t3"}).has_value());
}

TEST_CASE("resolve_url: direct, shortened, page-scan, dead, loop") {
    const Corpus corpus = small_corpus();
    FixtureConnector conn(corpus);

    SUBCASE("direct profile URL") {
        const auto r = conn.resolve_url("target.net/alice_w");
        CHECK_FALSE(r.failed);
        REQUIRE(r.target_identity.has_value());
        CHECK(r.target_identity->user_id == "t1");
        CHECK_FALSE(r.via_page_scan);
        CHECK(conn.requests_used() == 1);
        CHECK(conn.elapsed_seconds() == doctest::Approx(1.0));
    }
    SUBCASE("profile post URL resolves to the owner") {
        const auto r = conn.resolve_url("https://target.net/alice_w/p/3");
        REQUIRE(r.target_identity.has_value());
        CHECK(r.target_identity->user_id == "t1");
    }
    SUBCASE("shortener chain") {
        const auto r = conn.resolve_url("https://sho.rt/a");
        REQUIRE(r.target_identity.has_value());
        CHECK(r.target_identity->user_id == "t1");
        CHECK(conn.requests_used() == 2);
        CHECK(conn.elapsed_seconds() == doctest::Approx(2.0));
    }
    SUBCASE("indirect via page scan") {
        const auto r = conn.resolve_url("https://blog.example/alice");
        CHECK_FALSE(r.failed);
        REQUIRE(r.target_identity.has_value());
        CHECK(r.target_identity->user_id == "t1");
        CHECK(r.via_page_scan);
        CHECK(conn.requests_used() == 2);
        CHECK(conn.elapsed_seconds() == doctest::Approx(3.0));
    }
    SUBCASE("redirect loop fails") {
        const auto r = conn.resolve_url("https://sho.rt/loop1");
        CHECK(r.failed);
        CHECK_FALSE(r.target_identity.has_value());
    }
    SUBCASE("unknown page fails but keeps the final URL") {
        const auto r = conn.resolve_url("https://pixagram.net/alice/i1");
        CHECK(r.failed);
        CHECK(r.final_url == "https://pixagram.net/alice/i1");
    }
    SUBCASE("dead profile link fails") {
        const auto r = conn.resolve_url("https://target.net/ghost_user");
        CHECK(r.failed);
    }
    SUBCASE("resolution results are cached per connector") {
        conn.resolve_url("target.net/alice_w");
        const long after_first = conn.requests_used();
        conn.resolve_url("target.net/alice_w");
        CHECK(conn.requests_used() == after_first);
    }
}

TEST_CASE("fixture connector is deterministic over identical call sequences") {
    const Corpus corpus = small_corpus();
    auto run = [&corpus]() {
        FixtureConnector conn(corpus);
        conn.lookup_identity(corpus.source_network, "s1");
        conn.search_by_username("alice_w");
        conn.search_by_name_location("Alice Wonder", std::nullopt, 60);
        conn.resolve_url("https://blog.example/alice");
        return std::make_pair(conn.requests_used(), conn.elapsed_seconds());
    };
    CHECK(run() == run());
}

TEST_CASE("exhausting the budget mid-search jumps the simulated clock") {
    const Corpus corpus = small_corpus();
    FixtureConnector conn(corpus, RateLimitPolicy{2, 3600LL * 1000000LL});
    conn.lookup_identity(corpus.source_network, "s1");
    conn.lookup_identity(corpus.source_network, "s2");
    CHECK(conn.elapsed_seconds() < 1.0);
    conn.search_by_username("alice_w");  // third request in a 2-budget window
    CHECK(conn.elapsed_seconds() >= 3600.0);
    CHECK(conn.rate_windows_crossed() == 1);
}
