#include "nemo/similarity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "nemo/core.hpp"

namespace nemo {

Histogram Histogram::of(const Image& img) {
    Histogram h;
    if (!img.valid()) return h;
    const std::size_t pixels = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t p = 0; p < pixels; ++p) {
        const int r = img.rgb[p * 3] >> 5;  // 256 / 8 = 32 values per bin
        const int g = img.rgb[p * 3 + 1] >> 5;
        const int b = img.rgb[p * 3 + 2] >> 5;
        h.bins[(r * kBinsPerChannel + g) * kBinsPerChannel + b] += 1.0;
    }
    h.total = static_cast<double>(pixels);
    return h;
}

void Histogram::normalize() {
    if (total <= 0.0) return;
    for (double& b : bins) b /= total;
    total = 1.0;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

std::vector<std::string> whitespace_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) {
                tokens.push_back(std::move(cur));
                cur.clear();
            }
        } else {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

TermVector TermVector::of(std::string_view text) {
    TermVector tv;
    for (auto& tok : tokenize(text)) tv.weights[tok] += 1.0;
    return tv;
}

double TermVector::norm() const {
    double s = 0.0;
    for (const auto& [_, w] : weights) s += w * w;
    return std::sqrt(s);
}

double jaro(std::string_view a, std::string_view b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    const std::ptrdiff_t la = static_cast<std::ptrdiff_t>(a.size());
    const std::ptrdiff_t lb = static_cast<std::ptrdiff_t>(b.size());
    const std::ptrdiff_t window = std::max<std::ptrdiff_t>(std::max(la, lb) / 2 - 1, 0);

    std::vector<bool> matched_a(a.size(), false);
    std::vector<bool> matched_b(b.size(), false);
    std::ptrdiff_t matches = 0;
    for (std::ptrdiff_t i = 0; i < la; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - window);
        const std::ptrdiff_t hi = std::min(lb - 1, i + window);
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
            if (!matched_b[j] && a[i] == b[j]) {
                matched_a[i] = true;
                matched_b[j] = true;
                ++matches;
                break;
            }
        }
    }
    if (matches == 0) return 0.0;

    // Half-transpositions: matched characters out of sequence.
    std::ptrdiff_t half_transpositions = 0;
    std::ptrdiff_t j = 0;
    for (std::ptrdiff_t i = 0; i < la; ++i) {
        if (!matched_a[i]) continue;
        while (!matched_b[j]) ++j;
        if (a[i] != b[j]) ++half_transpositions;
        ++j;
    }

    const double m = static_cast<double>(matches);
    const double t = static_cast<double>(half_transpositions);
    return (m / la + m / lb + (m - t / 2.0) / m) / 3.0;
}

double cosine_text(std::string_view a, std::string_view b) {
    const TermVector va = TermVector::of(a);
    const TermVector vb = TermVector::of(b);
    if (va.weights.empty() || vb.weights.empty()) return 0.0;
    double dot = 0.0;
    for (const auto& [tok, w] : va.weights) {
        auto it = vb.weights.find(tok);
        if (it != vb.weights.end()) dot += w * it->second;
    }
    if (dot == 0.0) return 0.0;
    return dot / (va.norm() * vb.norm());
}

double histogram_similarity(const Image& a, const Image& b) {
    Histogram ha = Histogram::of(a);
    Histogram hb = Histogram::of(b);
    if (ha.total <= 0.0 || hb.total <= 0.0) return 0.0;
    ha.normalize();
    hb.normalize();
    double intersection = 0.0;
    for (int i = 0; i < Histogram::kBinCount; ++i) {
        intersection += std::min(ha.bins[i], hb.bins[i]);
    }
    return intersection;
}

std::optional<double> histogram_similarity(const std::optional<Image>& a,
                                           const std::optional<Image>& b) {
    if (!a || !b || !a->valid() || !b->valid()) return std::nullopt;
    return histogram_similarity(*a, *b);
}

bool name_match(std::string_view queried_name, std::string_view candidate_name) {
    const auto queried = whitespace_tokens(queried_name);
    const auto candidate = whitespace_tokens(candidate_name);
    if (queried.empty() || candidate.empty()) return false;
    if (queried == candidate) return true;
    for (const auto& tok : queried) {
        if (tok.size() < 3) continue;
        if (std::find(candidate.begin(), candidate.end(), tok) != candidate.end()) return true;
    }
    return false;
}

}  // namespace nemo
