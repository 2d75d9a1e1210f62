#pragma once

#include <array>
#include <string_view>

namespace testutil {

struct VerifierCase {
    std::string_view predicted;
    std::string_view gold;
    bool expected;
};

// 50 hand-checked grading cases: boxed extraction, fractions vs decimals,
// thousands separators, and text answers.
inline constexpr std::array<VerifierCase, 50> kVerifierCases = {{
    // boxed extraction
    {"so \\boxed{42}.", "42", true},
    {"\\boxed{1} then \\boxed{3/4}", "3/4", true},
    {"\\boxed{1} then \\boxed{3/4}", "0.75", true},
    {"\\boxed{\\frac{1}{2}}", "0.5", true},
    {"\\boxed{ 7 }", "7", true},
    {"\\boxed{42}", "41", false},
    {"nested \\boxed{\\text{east}}", "East", true},
    {"\\boxed{10,000}", "10000", true},
    {"x \\boxed{3} y \\boxed{5}", "3", false},
    {"x \\boxed{3} y \\boxed{5}", "5", true},
    {"\\boxed{-3/6}", "-1/2", true},
    {"truncated \\boxed{9", "9", true},  // unbalanced box falls back to the trailing number
    // fractions vs decimals
    {"The answer is 1/2", "0.5", true},
    {"0.50", "1/2", true},
    {"\\frac{17}{4}", "4.25", true},
    {"\\frac{1}{3}", "0.333", false},
    {"2/4", "1/2", true},
    {"-0.25", "-1/4", true},
    {"0.1", "1/10", true},
    {"3/9", "0.3", false},
    {"5/1", "5", true},
    {"0.125", "1/8", true},
    // thousands separators
    {"2,048", "2048", true},
    {"The total is 1,234,567", "1234567", true},
    {"1,000.50", "1000.5", true},
    {"12,34", "1234", false},  // not a thousands pattern, stays a string
    {"10,000", "10,000", true},
    {"$2,048$", "2048", true},
    // text answers
    {"\\text{east}", "East", true},
    {"EAST", "east", true},
    {"\\boxed{\\text{yes}}", "Yes.", true},
    {"east", "East", true},
    {"east", "west", false},
    {"\\text{No}", "no", true},
    {"{Monday}", "monday", true},
    {"  spaced  ", "spaced", true},
    // integers and misc
    {"The answer is 17", "17", true},
    {"answer: -5.", "-5", true},
    {"42", "42.0", true},
    {"+7", "7", true},
    {"0", "-0", true},
    {"100", "100.00", true},
    {"3.14159", "3.14159", true},
    {"2.5", "5/2", true},
    {"17", "18", false},
    {"", "42", false},
    // more latex forms
    {"Thus \\boxed{\\dfrac{3}{4}}", "0.75", true},
    {"\\boxed{0.500}", "1/2", true},
    {"area = \\boxed{12} cm", "12", true},
    {"total 256 apples", "256", true},
}};

}  // namespace testutil
