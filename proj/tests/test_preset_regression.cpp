// Regression pins for the seeded preset corpora: identified counts, ranking
// quality, candidate-set shapes and the qualitative timing ordering.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nemo/connector.hpp"
#include "nemo/corpus_gen.hpp"
#include "nemo/evaluation.hpp"
#include "nemo/search.hpp"

using namespace nemo;

namespace {

const Corpus& paper_corpus() {
    static const Corpus corpus = generate(preset_config("paper"));
    return corpus;
}

const EvalReport& paper_report() {
    static const EvalReport report = [] {
        EvalOptions options;
        options.jobs = 8;
        return evaluate(paper_corpus(), options);
    }();
    return report;
}

}  // namespace

TEST_CASE("preset: per-algorithm identified counts recover everything planted") {
    const EvalReport& report = paper_report();
    CHECK(report.n_queries == 543);
    CHECK(report.algorithms.at(kAlgoProfile).identified == 205);
    CHECK(report.algorithms.at(kAlgoContent).identified == 3);
    CHECK(report.algorithms.at(kAlgoSelfMention).identified == 31);
    CHECK(report.algorithms.at(kAlgoNetwork).identified == 1);
    CHECK(report.algorithms.at(kEvalIntegrated).identified == 220);
    CHECK(report.algorithms.at(kAlgoProfile).accuracy ==
          doctest::Approx(205.0 / 543.0).epsilon(1e-12));
    CHECK(report.algorithms.at(kEvalIntegrated).accuracy ==
          doctest::Approx(220.0 / 543.0).epsilon(1e-12));
}

TEST_CASE("preset: profile ranking puts nearly all identified users in the top ten") {
    const AlgorithmEval& profile = paper_report().algorithms.at(kAlgoProfile);
    long within_10 = 0;
    for (const auto& [rank, count] : profile.rank_of_correct_hist) {
        if (rank <= 10) within_10 += count;
    }
    CHECK(static_cast<double>(within_10) >= 0.99 * static_cast<double>(profile.identified));
    CHECK(profile.mean_nonranked_rank > profile.mean_rank_of_correct);
}

TEST_CASE("preset: self-mention identified users sit within the top three") {
    const AlgorithmEval& sm = paper_report().algorithms.at(kAlgoSelfMention);
    REQUIRE(sm.identified == 31);
    for (const auto& [rank, count] : sm.rank_of_correct_hist) {
        CHECK(rank <= 3);
    }
}

TEST_CASE("preset: content candidate sets for identified users range from 8 to 30") {
    const Corpus& corpus = paper_corpus();
    int identified = 0;
    for (const auto& gt : corpus.ground_truth) {
        if (!gt.leak_labels.count(kLeakCrossPost)) continue;
        FixtureConnector conn(corpus);
        const AlgorithmOutcome out = content_search(conn, gt.source_id);
        const auto rank =
            rank_of_correct(out.candidates, IdentityRef{corpus.target_network, gt.target_id});
        REQUIRE(rank.has_value());
        CHECK(out.candidates.size() >= 8);
        CHECK(out.candidates.size() <= 30);
        ++identified;
    }
    CHECK(identified == 3);
}

TEST_CASE("preset: simulated time ordering content < profile < self-mention < network") {
    const EvalReport& report = paper_report();
    const double content = report.algorithms.at(kAlgoContent).mean_elapsed;
    const double profile = report.algorithms.at(kAlgoProfile).mean_elapsed;
    const double self_mention = report.algorithms.at(kAlgoSelfMention).mean_elapsed;
    const double network = report.algorithms.at(kAlgoNetwork).mean_elapsed;
    CHECK(content < profile);
    CHECK(profile < self_mention);
    CHECK(self_mention < network);
}

TEST_CASE("preset: integrated confirmations come from the expected rules") {
    const AlgorithmEval& integrated = paper_report().algorithms.at(kEvalIntegrated);
    long rule_total = 0;
    for (const auto& [rule, count] : integrated.confirmed_by_rule) rule_total += count;
    CHECK(rule_total == integrated.confirmed_count);
    // Self-identification is the dominant exit: 137 users planted it.
    CHECK(integrated.confirmed_by_rule.at(kRuleSelfIdentification) == 137);
}

TEST_CASE("zero-leak corpus evaluates to zero accuracy everywhere") {
    CorpusConfig cfg;
    cfg.n_users = 20;
    cfg.seed = 77;
    const Corpus corpus = generate(cfg);
    const EvalReport report = evaluate(corpus);
    for (const auto& [name, a] : report.algorithms) {
        CHECK(a.identified == 0);
        CHECK(a.accuracy == 0.0);
        CHECK(a.confirmed_count == 0);
    }
}
