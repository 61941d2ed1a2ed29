#include "nemo/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "nemo/connector.hpp"
#include "nemo/search.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nemo {

namespace {

const char* elapsed_bucket(double seconds) {
    if (seconds < 1.0) return "0-1s";
    if (seconds < 5.0) return "1-5s";
    if (seconds < 20.0) return "5-20s";
    if (seconds < 60.0) return "20-60s";
    if (seconds < 300.0) return "60-300s";
    if (seconds < 3600.0) return "300-3600s";
    return "3600s+";
}

struct PerAlgo {
    bool ran = false;
    bool identified = false;
    bool confirmed = false;
    std::optional<int> rank;
    std::optional<int> nonranked_rank;
    long candidates = 0;
    double elapsed = 0.0;
    long requests = 0;
    std::set<std::string> truth_submethods;
    std::string confirmed_rule;
};

struct QueryRow {
    std::map<std::string, PerAlgo> per;
};

std::optional<int> nonranked_position(const std::vector<Candidate>& candidates,
                                      const IdentityRef& truth) {
    std::vector<const Candidate*> by_discovery;
    by_discovery.reserve(candidates.size());
    for (const auto& c : candidates) by_discovery.push_back(&c);
    std::sort(by_discovery.begin(), by_discovery.end(),
              [](const Candidate* a, const Candidate* b) {
                  return a->discovery_order < b->discovery_order;
              });
    for (std::size_t i = 0; i < by_discovery.size(); ++i) {
        if (by_discovery[i]->identity == truth) return static_cast<int>(i + 1);
    }
    return std::nullopt;
}

QueryRow eval_query(const Corpus& corpus, const GroundTruthPair& gt, const EvalOptions& options) {
    QueryRow row;
    const IdentityRef truth{corpus.target_network, gt.target_id};

    for (const char* algo :
         {kAlgoProfile, kAlgoContent, kAlgoSelfMention, kAlgoNetwork}) {
        if (!options.which.count(algo)) continue;
        FixtureConnector conn(corpus, options.rate_limit);
        // Exhaustive profile mode keeps per-sub-method attribution complete.
        const AlgorithmOutcome out =
            run_algorithm(algo, conn, gt.source_id, ProfileMode::exhaustive);
        PerAlgo a;
        a.ran = true;
        a.candidates = static_cast<long>(out.candidates.size());
        a.elapsed = out.elapsed_seconds;
        a.requests = out.requests_used;
        a.rank = rank_of_correct(out.candidates, truth);
        a.identified = a.rank.has_value();
        a.confirmed = out.confirmed.has_value();
        if (std::string(algo) == kAlgoProfile) {
            a.nonranked_rank = nonranked_position(out.candidates, truth);
            for (const auto& c : out.candidates) {
                if (c.identity == truth) {
                    a.truth_submethods = c.submethods;
                    break;
                }
            }
        }
        row.per[algo] = std::move(a);
    }

    if (options.which.count(kEvalIntegrated)) {
        FixtureConnector conn(corpus, options.rate_limit);
        const SearchResult result = find_nemo(conn, gt.source_id, options.policy);
        PerAlgo a;
        a.ran = true;
        a.candidates = static_cast<long>(result.merged_candidates.size());
        a.elapsed = result.total_elapsed;
        a.requests = result.total_requests;
        a.rank = rank_of_correct(result.merged_candidates, truth);
        a.identified = a.rank.has_value();
        a.confirmed = result.confirmed.has_value();
        a.confirmed_rule = result.confirmed_rule;
        row.per[kEvalIntegrated] = std::move(a);
    }
    return row;
}

EvalReport aggregate(const Corpus& corpus, const EvalOptions& options,
                     const std::vector<QueryRow>& rows) {
    EvalReport report;
    report.corpus_id = corpus_id(corpus);
    report.n_queries = static_cast<long>(rows.size());
    report.order = options.policy.order;
    report.early_exit = options.policy.early_exit;

    for (const auto& row : rows) {
        for (const auto& [name, a] : row.per) {
            AlgorithmEval& agg = report.algorithms[name];
            agg.identified += a.identified;
            agg.confirmed_count += a.confirmed;
            agg.candidate_set_size_hist[a.candidates] += 1;
            if (a.rank) agg.rank_of_correct_hist[*a.rank] += 1;
            if (a.nonranked_rank) agg.nonranked_rank_hist[*a.nonranked_rank] += 1;
            agg.elapsed_hist[elapsed_bucket(a.elapsed)] += 1;
            agg.mean_elapsed += a.elapsed;
            agg.mean_candidates += static_cast<double>(a.candidates);
            if (a.rank) agg.mean_rank_of_correct += *a.rank;
            if (a.nonranked_rank) agg.mean_nonranked_rank += *a.nonranked_rank;
            agg.requests_total += a.requests;
            if (!a.confirmed_rule.empty()) agg.confirmed_by_rule[a.confirmed_rule] += 1;
        }
    }
    const double n = static_cast<double>(std::max<long>(report.n_queries, 1));
    for (auto& [name, agg] : report.algorithms) {
        agg.accuracy = static_cast<double>(agg.identified) / n;
        const double identified = static_cast<double>(std::max<long>(agg.identified, 1));
        agg.mean_rank_of_correct /= identified;
        long nonranked_n = 0;
        for (const auto& [_, count] : agg.nonranked_rank_hist) nonranked_n += count;
        agg.mean_nonranked_rank /= static_cast<double>(std::max<long>(nonranked_n, 1));
        agg.mean_elapsed /= n;
        agg.mean_candidates /= n;
    }

    if (options.which.count(kAlgoProfile)) {
        const std::vector<std::pair<std::string, std::set<std::string>>> combos = {
            {"URL", {kSubUrl}},
            {"SU", {kSubUsername}},
            {"NL", {kSubNameLocation}},
            {"URL+SU", {kSubUrl, kSubUsername}},
            {"URL+NL", {kSubUrl, kSubNameLocation}},
            {"SU+NL", {kSubUsername, kSubNameLocation}},
            {"URL+SU+NL", {kSubUrl, kSubUsername, kSubNameLocation}},
        };
        for (const auto& [label, tags] : combos) {
            long count = 0;
            for (const auto& row : rows) {
                auto it = row.per.find(kAlgoProfile);
                if (it == row.per.end()) continue;
                const auto& hits = it->second.truth_submethods;
                bool any = false;
                for (const auto& t : tags) any = any || hits.count(t) > 0;
                count += any;
            }
            report.submethod_counts[label] = count;
        }
    }

    report.domain_frequency = domain_frequency_report(corpus);
    return report;
}

std::vector<QueryRow> run_rows_serial(const Corpus& corpus, const EvalOptions& options) {
    std::vector<QueryRow> rows(corpus.ground_truth.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i] = eval_query(corpus, corpus.ground_truth[i], options);
    }
    return rows;
}

}  // namespace

std::optional<int> rank_of_correct(const std::vector<Candidate>& candidates,
                                   const IdentityRef& truth) {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].identity == truth) return static_cast<int>(i + 1);
    }
    return std::nullopt;
}

EvalReport evaluate_serial(const Corpus& corpus, const EvalOptions& options) {
    if (corpus.ground_truth.empty()) {
        throw CorpusError("corpus has no ground truth to evaluate");
    }
    return aggregate(corpus, options, run_rows_serial(corpus, options));
}

EvalReport evaluate(const Corpus& corpus, const EvalOptions& options) {
    if (corpus.ground_truth.empty()) {
        throw CorpusError("corpus has no ground truth to evaluate");
    }
    if (options.jobs <= 1) return evaluate_serial(corpus, options);
#ifdef _OPENMP
    std::vector<QueryRow> rows(corpus.ground_truth.size());
    std::vector<std::exception_ptr> errors(rows.size());
    const int n = static_cast<int>(rows.size());
#pragma omp parallel for schedule(dynamic) num_threads(options.jobs)
    for (int i = 0; i < n; ++i) {
        try {
            rows[i] = eval_query(corpus, corpus.ground_truth[i], options);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    // Aggregation runs serially in query order, so the parallel report is
    // bit-identical to the serial reference.
    return aggregate(corpus, options, rows);
#else
    return evaluate_serial(corpus, options);
#endif
}

std::vector<std::tuple<std::string, long, double>> domain_frequency_report(const Corpus& corpus) {
    std::map<std::string, long> users_per_domain;
    for (const auto& gt : corpus.ground_truth) {
        const Identity* src = corpus.find(corpus.source_network, gt.source_id);
        if (!src || !src->posts_public) continue;
        std::set<std::string> domains;
        auto it = corpus.posts_by_author.find(src->ref());
        if (it == corpus.posts_by_author.end()) continue;
        int taken = 0;
        for (std::size_t idx : it->second) {
            if (taken++ >= kRecentPostCap) break;
            for (const auto& url : corpus.posts[idx].urls) {
                const UrlTrace trace = trace_url(corpus, url);
                const std::string host = url_host(trace.final_url);
                if (!host.empty()) domains.insert(host);
            }
        }
        for (const auto& d : domains) users_per_domain[d] += 1;
    }

    std::vector<std::tuple<std::string, long, double>> table;
    const double n = static_cast<double>(std::max<std::size_t>(corpus.ground_truth.size(), 1));
    for (const auto& [host, count] : users_per_domain) {
        table.emplace_back(host, count, 100.0 * static_cast<double>(count) / n);
    }
    std::sort(table.begin(), table.end(), [](const auto& a, const auto& b) {
        if (std::get<2>(a) != std::get<2>(b)) return std::get<2>(a) > std::get<2>(b);
        return std::get<0>(a) < std::get<0>(b);
    });
    return table;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json j;
    j["corpus_id"] = corpus_id;
    j["n_queries"] = n_queries;
    j["order"] = order;
    j["early_exit"] = early_exit;

    nlohmann::json algos;
    for (const auto& [name, a] : algorithms) {
        nlohmann::json aj;
        aj["identified"] = a.identified;
        aj["accuracy"] = a.accuracy;
        aj["confirmed"] = a.confirmed_count;
        auto hist_to_json = [](const std::map<long, long>& hist) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& [k, v] : hist) arr.push_back({k, v});
            return arr;
        };
        aj["candidate_set_size_hist"] = hist_to_json(a.candidate_set_size_hist);
        aj["rank_of_correct_hist"] = hist_to_json(a.rank_of_correct_hist);
        if (!a.nonranked_rank_hist.empty()) {
            aj["nonranked_rank_hist"] = hist_to_json(a.nonranked_rank_hist);
            aj["mean_nonranked_rank"] = a.mean_nonranked_rank;
        }
        nlohmann::json eh;
        for (const auto& [bucket, count] : a.elapsed_hist) eh[bucket] = count;
        aj["elapsed_hist"] = eh;
        aj["mean_elapsed_seconds"] = a.mean_elapsed;
        aj["mean_candidate_set_size"] = a.mean_candidates;
        aj["mean_rank_of_correct"] = a.mean_rank_of_correct;
        aj["requests_total"] = a.requests_total;
        if (!a.confirmed_by_rule.empty()) {
            nlohmann::json rules;
            for (const auto& [rule, count] : a.confirmed_by_rule) rules[rule] = count;
            aj["confirmed_by_rule"] = rules;
        }
        algos[name] = aj;
    }
    j["algorithms"] = algos;

    if (!submethod_counts.empty()) {
        nlohmann::json sub;
        for (const auto& [label, count] : submethod_counts) sub[label] = count;
        j["submethods"] = sub;
    }
    nlohmann::json dom = nlohmann::json::array();
    for (const auto& [host, users, percent] : domain_frequency) {
        dom.push_back({host, users, percent});
    }
    j["domain_frequency"] = dom;
    return j;
}

std::string EvalReport::to_table() const {
    std::ostringstream os;
    os << "corpus " << corpus_id << ", " << n_queries << " queries\n\n";
    char line[192];
    std::snprintf(line, sizeof(line), "%-14s %10s %10s %10s %12s %14s %12s\n", "algorithm",
                  "identified", "accuracy", "confirmed", "mean cands", "mean elapsed", "requests");
    os << line;
    for (const auto& [name, a] : algorithms) {
        std::snprintf(line, sizeof(line), "%-14s %10ld %9.1f%% %10ld %12.1f %13.1fs %12ld\n",
                      name.c_str(), a.identified, 100.0 * a.accuracy, a.confirmed_count,
                      a.mean_candidates, a.mean_elapsed, a.requests_total);
        os << line;
    }
    if (!submethod_counts.empty()) {
        os << "\nprofile sub-methods (identified users)\n";
        for (const char* label : {"URL", "SU", "NL", "URL+SU", "URL+NL", "SU+NL", "URL+SU+NL"}) {
            auto it = submethod_counts.find(label);
            if (it == submethod_counts.end()) continue;
            std::snprintf(line, sizeof(line), "  %-10s %6ld  (%.1f%%)\n", label, it->second,
                          100.0 * static_cast<double>(it->second) /
                              static_cast<double>(std::max<long>(n_queries, 1)));
            os << line;
        }
    }
    if (!domain_frequency.empty()) {
        os << "\ndomains embedded in posted URLs (% of queried users)\n";
        for (const auto& [host, users, percent] : domain_frequency) {
            std::snprintf(line, sizeof(line), "  %-18s %6ld  %.1f%%\n", host.c_str(), users,
                          percent);
            os << line;
        }
    }
    return os.str();
}

nlohmann::json compare_runs(const EvalReport& a, const EvalReport& b) {
    if (a.corpus_id != b.corpus_id) {
        throw std::invalid_argument("compare_runs: reports come from different corpora");
    }
    nlohmann::json diff;
    diff["corpus_id"] = a.corpus_id;
    diff["n_queries"] = a.n_queries;
    nlohmann::json algos;
    for (const auto& [name, ea] : a.algorithms) {
        auto it = b.algorithms.find(name);
        if (it == b.algorithms.end()) continue;
        const AlgorithmEval& eb = it->second;
        nlohmann::json d;
        d["identified_delta"] = eb.identified - ea.identified;
        d["accuracy_delta"] = eb.accuracy - ea.accuracy;
        d["mean_elapsed_delta"] = eb.mean_elapsed - ea.mean_elapsed;
        d["requests_total_delta"] = eb.requests_total - ea.requests_total;
        algos[name] = d;
    }
    diff["algorithms"] = algos;
    return diff;
}

}  // namespace nemo
