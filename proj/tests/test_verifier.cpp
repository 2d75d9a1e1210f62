#include "dart/verifier.hpp"

#include <numeric>
#include <random>

#include "doctest.h"
#include "verifier_cases.hpp"

using namespace dart::verifier;
using Kind = CanonicalAnswer::Kind;

TEST_CASE("extraction: last balanced boxed group wins") {
    CHECK(extract_final_answer("... so \\boxed{42}.") == "42");
    CHECK(extract_final_answer("answers \\boxed{1} then \\boxed{3/4}") == "3/4");
    CHECK(extract_final_answer("nested \\boxed{\\frac{1}{2}}") == "\\frac{1}{2}");
}

TEST_CASE("extraction: trailing number on the last line") {
    CHECK(extract_final_answer("The answer is 17") == "17");
    CHECK(extract_final_answer("first line 3\nsecond line says 8 then 9") == "9");
    CHECK(extract_final_answer("costs 2,048 dollars") == "2,048");
}

TEST_CASE("extraction: fallbacks") {
    CHECK(extract_final_answer("") == "");
    CHECK(extract_final_answer("   ") == "");
    CHECK(extract_final_answer("no numerals here") == "no numerals here");
}

TEST_CASE("normalize: fractions") {
    auto half = normalize("\\frac{1}{2}");
    CHECK(half.kind == Kind::RATIONAL);
    CHECK(half.numerator == 1);
    CHECK(half.denominator == 2);

    auto reduced = normalize("-6/8");
    CHECK(reduced.numerator == -3);
    CHECK(reduced.denominator == 4);

    // Negative denominators normalize to a positive one.
    auto flipped = normalize("3/-6");
    CHECK(flipped.numerator == -1);
    CHECK(flipped.denominator == 2);
}

TEST_CASE("normalize: decimals drop trailing zeros") {
    auto d = normalize("0.50");
    CHECK(d.kind == Kind::DECIMAL);
    CHECK(d.value_text == "0.5");
    CHECK(d.numerator == 1);
    CHECK(d.denominator == 2);

    // Integral decimals collapse to rationals.
    CHECK(normalize("42.0").kind == Kind::RATIONAL);
    CHECK(normalize("42.0").numerator == 42);
}

TEST_CASE("normalize: thousands separators and latex noise") {
    CHECK(normalize("2,048").kind == Kind::RATIONAL);
    CHECK(normalize("2,048").numerator == 2048);
    CHECK(normalize("$1,234,567$").numerator == 1234567);
    CHECK(normalize("\\text{east}").value_text == "east");
    CHECK(normalize("12,34").kind == Kind::STRING);
    CHECK(normalize("1\\,000").numerator == 1000);
}

TEST_CASE("normalize: division by zero falls back to string") {
    CHECK(normalize("1/0").kind == Kind::STRING);
}

TEST_CASE("normalize: oversized integers fall back to string") {
    CHECK(normalize("123456789012345678901234567890").kind == Kind::STRING);
}

TEST_CASE("equality: rational vs decimal is exact") {
    CHECK(is_equal(normalize("1/2"), normalize("0.5")));
    CHECK(!is_equal(normalize("1/3"), normalize("0.333")));
    CHECK(is_equal(normalize("1/8"), normalize("0.125")));
    CHECK(!is_equal(normalize("42"), normalize("41")));
    CHECK(is_equal(normalize("\\text{east}"), normalize("East")));
    CHECK(!is_equal(normalize("7"), normalize("seven")));
}

TEST_CASE("the 50-case grading fixture") {
    for (const auto& c : testutil::kVerifierCases) {
        CAPTURE(c.predicted);
        CAPTURE(c.gold);
        CHECK(grade(std::string(c.predicted), std::string(c.gold)) == c.expected);
    }
}

TEST_CASE("property: scaled fractions always compare equal") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<long long> num(-100000, 100000);
    std::uniform_int_distribution<long long> den(1, 100000);
    std::uniform_int_distribution<long long> scale(1, 1000);
    for (int trial = 0; trial < 500; ++trial) {
        long long a = num(rng), b = den(rng), k = scale(rng);
        auto lhs = normalize(std::to_string(a) + "/" + std::to_string(b));
        auto rhs = normalize(std::to_string(a * k) + "/" + std::to_string(b * k));
        REQUIRE(lhs.kind == Kind::RATIONAL);
        CHECK(is_equal(lhs, rhs));
        CHECK(is_equal(rhs, lhs));
        CHECK(is_equal(lhs, lhs));
    }
}

TEST_CASE("property: equivalence relation on rationals") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<long long> num(-50, 50);
    std::uniform_int_distribution<long long> den(1, 50);
    std::vector<CanonicalAnswer> values;
    for (int i = 0; i < 60; ++i) {
        values.push_back(normalize(std::to_string(num(rng)) + "/" + std::to_string(den(rng))));
    }
    for (const auto& x : values) CHECK(is_equal(x, x));
    for (const auto& x : values) {
        for (const auto& y : values) {
            CHECK(is_equal(x, y) == is_equal(y, x));
            if (!is_equal(x, y)) continue;
            for (const auto& z : values) {
                if (is_equal(y, z)) CHECK(is_equal(x, z));
            }
        }
    }
}

TEST_CASE("property: normalize is idempotent through render") {
    std::vector<std::string> inputs = {"1/2",      "0.50",    "2,048", "\\frac{9}{12}",
                                       "-0.125",   "42.",     "east",  "\\text{Yes}.",
                                       "$3.1400$", "10,000",  "-7",    "{x+1}",
                                       "0.0",      "-0.0",    "",      "3/-9"};
    std::mt19937 rng(99);
    std::uniform_int_distribution<long long> num(-10000, 10000);
    std::uniform_int_distribution<long long> den(1, 999);
    for (int i = 0; i < 200; ++i) {
        inputs.push_back(std::to_string(num(rng)) + "/" + std::to_string(den(rng)));
    }
    for (const auto& s : inputs) {
        CAPTURE(s);
        auto once = normalize(s);
        auto twice = normalize(render(once));
        CHECK(once.kind == twice.kind);
        CHECK(once.numerator == twice.numerator);
        CHECK(once.denominator == twice.denominator);
        CHECK(once.value_text == twice.value_text);
    }
}
