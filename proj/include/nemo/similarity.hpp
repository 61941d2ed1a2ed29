#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nemo {

/// Decoded RGB raster, 3 bytes per pixel, row-major.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    bool valid() const {
        return width > 0 && height > 0 &&
               rgb.size() == static_cast<std::size_t>(width) * height * 3;
    }
};

/// Joint 8x8x8 RGB histogram (512 bins).
struct Histogram {
    static constexpr int kBinsPerChannel = 8;
    static constexpr int kBinCount = kBinsPerChannel * kBinsPerChannel * kBinsPerChannel;

    std::array<double, kBinCount> bins{};
    double total = 0.0;

    static Histogram of(const Image& img);
    /// Scales bins so they sum to 1. No-op on an empty histogram.
    void normalize();
};

/// Sparse term-frequency vector; tokens lowercase, no zero weights stored.
struct TermVector {
    std::map<std::string, double> weights;

    static TermVector of(std::string_view text);
    double norm() const;
};

/// Lowercases and splits on any non-alphanumeric byte, dropping empties.
std::vector<std::string> tokenize(std::string_view text);

/// Lowercases and splits on whitespace only (used for display names).
std::vector<std::string> whitespace_tokens(std::string_view text);

/// Jaro string similarity in [0,1]. Matches are counted within a window of
/// floor(max(|a|,|b|)/2)-1; two empty strings compare as identical (1.0).
double jaro(std::string_view a, std::string_view b);

/// Cosine similarity of the term-frequency vectors of the two texts;
/// 0 if either tokenizes to nothing.
double cosine_text(std::string_view a, std::string_view b);

/// Histogram intersection of the L1-normalized joint RGB histograms.
double histogram_similarity(const Image& a, const Image& b);

/// Same, but carries the "no-image" condition: either raster missing or
/// undecodable yields nullopt so callers can keep such candidates unranked.
std::optional<double> histogram_similarity(const std::optional<Image>& a,
                                           const std::optional<Image>& b);

/// True iff, after lowercasing and whitespace-tokenizing, candidate equals
/// the queried name or shares one queried token of length >= 3. Directional:
/// tokens are drawn from the queried name only.
bool name_match(std::string_view queried_name, std::string_view candidate_name);

}  // namespace nemo
