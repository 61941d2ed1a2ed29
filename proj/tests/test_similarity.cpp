#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "nemo/similarity.hpp"
#include "support.hpp"

using namespace nemo;
using testsupport::jaro_oracle;

TEST_CASE("jaro on the worked examples") {
    CHECK(jaro("martha", "martha") == doctest::Approx(1.0).epsilon(1e-12));
    // No matches within window floor(6/2)-1 = 2.
    CHECK(jaro("martha", "xyzqw") == doctest::Approx(0.0));
    // One transposed pair: (6/6 + 6/6 + (6-1)/6) / 3 = 17/18.
    CHECK(jaro("martha", "marhta") == doctest::Approx(17.0 / 18.0).epsilon(1e-12));
}

TEST_CASE("jaro empty-string conventions") {
    CHECK(jaro("", "") == doctest::Approx(1.0));
    CHECK(jaro("a", "") == doctest::Approx(0.0));
    CHECK(jaro("", "abc") == doctest::Approx(0.0));
}

TEST_CASE("jaro equals the brute-force oracle on random pairs") {
    std::mt19937_64 rng(20120543);
    for (int i = 0; i < 10000; ++i) {
        const std::string a = testsupport::random_string(rng, 12, "abcd0123");
        const std::string b = testsupport::random_string(rng, 12, "abcd0123");
        const double expected = jaro_oracle(a, b);
        const double got = jaro(a, b);
        REQUIRE_MESSAGE(std::abs(got - expected) <= 1e-12, "a=", a, " b=", b);
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
        CHECK(jaro(b, a) == doctest::Approx(got).epsilon(1e-12));
    }
}

TEST_CASE("cosine_text on the worked examples") {
    CHECK(cosine_text("good morning world", "good morning world") ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine_text("alpha beta", "gamma delta") == doctest::Approx(0.0));
    // tf vectors {a:2,b:1} . {a:1,c:1} = 2; norms sqrt(5), sqrt(2).
    CHECK(cosine_text("a b a", "a c") ==
          doctest::Approx(0.6324555320336759).epsilon(1e-12));
    CHECK(cosine_text("", "anything") == doctest::Approx(0.0));
    CHECK(cosine_text("...", "anything") == doctest::Approx(0.0));
}

TEST_CASE("cosine_text tokenizes case-insensitively on non-alphanumerics") {
    CHECK(cosine_text("Hello, WORLD!", "hello world") == doctest::Approx(1.0).epsilon(1e-12));
}

namespace {

Image solid(std::uint8_t r, std::uint8_t g, std::uint8_t b, int w = 1, int h = 1) {
    Image img;
    img.width = w;
    img.height = h;
    img.rgb.resize(static_cast<std::size_t>(w) * h * 3);
    for (int p = 0; p < w * h; ++p) {
        img.rgb[p * 3] = r;
        img.rgb[p * 3 + 1] = g;
        img.rgb[p * 3 + 2] = b;
    }
    return img;
}

}  // namespace

TEST_CASE("histogram intersection on constructed rasters") {
    const Image red = solid(255, 0, 0);
    const Image blue = solid(0, 0, 255);
    CHECK(histogram_similarity(red, red) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(histogram_similarity(red, blue) == doctest::Approx(0.0));

    // Half red / half blue against pure red: intersection 0.5.
    Image half = solid(255, 0, 0, 1, 2);
    half.rgb[3] = 0;
    half.rgb[5] = 255;
    CHECK(histogram_similarity(half, red) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("histogram intersection is invariant to proportional scaling") {
    Image small = solid(255, 0, 0, 1, 2);
    small.rgb[3] = 0;
    small.rgb[5] = 255;  // one red, one blue pixel
    Image large = solid(0, 0, 0, 100, 200);
    for (int p = 0; p < 100 * 200; ++p) {
        const bool red = p < 100 * 100;
        large.rgb[p * 3] = red ? 255 : 0;
        large.rgb[p * 3 + 2] = red ? 0 : 255;
    }
    CHECK(histogram_similarity(small, large) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("histogram similarity flags missing images") {
    const std::optional<Image> none;
    const std::optional<Image> some = solid(10, 20, 30);
    CHECK_FALSE(histogram_similarity(none, some).has_value());
    CHECK_FALSE(histogram_similarity(some, none).has_value());
    CHECK(histogram_similarity(some, some).has_value());
    std::optional<Image> broken = solid(1, 2, 3);
    broken->rgb.pop_back();
    CHECK_FALSE(histogram_similarity(some, broken).has_value());
}

TEST_CASE("similarity outputs stay in [0,1] on random input") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 500; ++i) {
        const std::string a = testsupport::random_string(rng, 20, "abcdef ghij");
        const std::string b = testsupport::random_string(rng, 20, "abcdef ghij");
        const double c = cosine_text(a, b);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0 + 1e-12);
        CHECK(cosine_text(b, a) == doctest::Approx(c).epsilon(1e-12));

        const Image x = testsupport::random_image(rng);
        const Image y = testsupport::random_image(rng);
        const double h = histogram_similarity(x, y);
        CHECK(h >= 0.0);
        CHECK(h <= 1.0 + 1e-9);
        CHECK(histogram_similarity(y, x) == doctest::Approx(h).epsilon(1e-12));
        CHECK(histogram_similarity(x, x) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("histogram bins sum to the pixel count and normalize to one") {
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 100; ++i) {
        const Image img = testsupport::random_image(rng);
        Histogram h = Histogram::of(img);
        double sum = 0.0;
        for (double b : h.bins) sum += b;
        CHECK(sum == doctest::Approx(h.total));
        CHECK(h.total == doctest::Approx(static_cast<double>(img.width) * img.height));
        h.normalize();
        sum = 0.0;
        for (double b : h.bins) sum += b;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("term vectors store lowercase tokens and no zero weights") {
    const TermVector tv = TermVector::of("Apple apple BANANA cherry!");
    REQUIRE(tv.weights.size() == 3);
    CHECK(tv.weights.at("apple") == doctest::Approx(2.0));
    CHECK(tv.weights.at("banana") == doctest::Approx(1.0));
    for (const auto& [token, weight] : tv.weights) {
        CHECK(weight > 0.0);
        for (char c : token) CHECK_FALSE(std::isupper(static_cast<unsigned char>(c)));
    }
}

TEST_CASE("name_match on the worked examples") {
    CHECK(name_match("John Smith", "john smith"));
    CHECK_FALSE(name_match("John Smith", "Smithsonian Institute"));
    CHECK(name_match("John Smith", "Smith Consulting"));
}

TEST_CASE("name_match ignores short queried tokens and empty names") {
    CHECK_FALSE(name_match("Jo Li", "Jo Deer"));     // tokens below length 3
    CHECK(name_match("Jo Li", "jo li"));             // exact equality still matches
    CHECK_FALSE(name_match("", "anyone"));
    CHECK_FALSE(name_match("someone", ""));
    CHECK(name_match("  John   Smith ", "smith cooper"));
}
