#include "nemo/core.hpp"

#include <algorithm>
#include <cctype>

namespace nemo {

std::string to_string(EntityClass c) {
    switch (c) {
        case EntityClass::person: return "person";
        case EntityClass::page: return "page";
        case EntityClass::community: return "community";
    }
    return "person";
}

EntityClass entity_class_from_string(std::string_view s) {
    if (s == "person") return EntityClass::person;
    if (s == "page") return EntityClass::page;
    if (s == "community") return EntityClass::community;
    throw CorpusError("unknown entity_class: " + std::string(s));
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

std::string normalize_username(std::string_view raw) {
    std::size_t begin = 0;
    std::size_t end = raw.size();
    // Leading whitespace and '@' sigils may interleave; strip to a fixpoint.
    while (begin < end &&
           (std::isspace(static_cast<unsigned char>(raw[begin])) || raw[begin] == '@')) {
        ++begin;
    }
    while (end > begin && std::isspace(static_cast<unsigned char>(raw[end - 1]))) --end;
    return ascii_lower(raw.substr(begin, end - begin));
}

const AlgorithmOutcome* SearchResult::outcome(std::string_view algorithm) const {
    for (const auto& [name, out] : outcomes) {
        if (name == algorithm) return &out;
    }
    return nullptr;
}

std::vector<Candidate> dedupe_candidates(const std::vector<Candidate>& cands) {
    std::vector<Candidate> out;
    std::map<IdentityRef, std::size_t> seen;
    for (const auto& c : cands) {
        auto it = seen.find(c.identity);
        if (it == seen.end()) {
            seen.emplace(c.identity, out.size());
            out.push_back(c);
            continue;
        }
        Candidate& dst = out[it->second];
        for (const auto& [algo, score] : c.scores) {
            auto [sit, inserted] = dst.scores.emplace(algo, score);
            if (!inserted) sit->second = std::max(sit->second, score);
        }
        dst.provenance.insert(c.provenance.begin(), c.provenance.end());
        dst.submethods.insert(c.submethods.begin(), c.submethods.end());
        dst.mention_count += c.mention_count;
        dst.discovery_order = std::min(dst.discovery_order, c.discovery_order);
    }
    return out;
}

namespace {

bool looks_like_bare_url(std::string_view token) {
    auto slash = token.find('/');
    if (slash == std::string_view::npos || slash == 0) return false;
    std::string_view host = token.substr(0, slash);
    auto dot = host.rfind('.');
    if (dot == std::string_view::npos || dot == 0 || dot + 1 >= host.size()) return false;
    // host chars: alnum, dot, dash; TLD-ish tail: >= 2 alphabetic chars
    for (char ch : host) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-') return false;
    }
    std::string_view tail = host.substr(dot + 1);
    if (tail.size() < 2) return false;
    return std::all_of(tail.begin(), tail.end(), [](unsigned char c) { return std::isalpha(c); });
}

bool has_scheme(std::string_view token) {
    std::string low = ascii_lower(token.substr(0, 8));
    return low.rfind("http://", 0) == 0 || low.rfind("https://", 0) == 0;
}

}  // namespace

std::string canonical_url(std::string_view url) {
    std::string_view rest = url;
    if (has_scheme(rest)) rest = rest.substr(rest.find("//") + 2);
    if (ascii_lower(rest.substr(0, 4)) == "www.") rest = rest.substr(4);
    auto slash = rest.find('/');
    std::string host = ascii_lower(slash == std::string_view::npos ? rest : rest.substr(0, slash));
    std::string path = slash == std::string_view::npos ? "" : std::string(rest.substr(slash));
    while (!path.empty() && path.back() == '/') path.pop_back();
    return host + path;
}

std::string url_host(std::string_view url) {
    std::string canon = canonical_url(url);
    auto slash = canon.find('/');
    return slash == std::string::npos ? canon : canon.substr(0, slash);
}

std::vector<std::string> extract_urls(const std::string& text) {
    std::vector<std::string> urls;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i == start) continue;
        std::string_view token(text.data() + start, i - start);
        auto is_wrapper = [](char c) {
            return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' ||
                   c == ')' || c == '(' || c == '"' || c == '\'';
        };
        while (!token.empty() && is_wrapper(token.back())) token.remove_suffix(1);
        while (!token.empty() && is_wrapper(token.front())) token.remove_prefix(1);
        if (token.empty()) continue;
        if (has_scheme(token)) {
            std::string_view rest = token.substr(token.find("//") + 2);
            if (!rest.empty()) urls.emplace_back(token);
        } else if (looks_like_bare_url(token)) {
            urls.emplace_back(token);
        }
    }
    return urls;
}

}  // namespace nemo
