#pragma once

#include <cstdint>
#include <string>

namespace dart::verifier {

// Canonical forms: integers, a/b and \frac{a}{b} parse to RATIONAL (lowest
// terms, positive denominator), finite decimals to DECIMAL (exact value kept
// as a rational so comparisons never touch floating point), everything else
// to STRING. Unparseable numerics fall back to STRING rather than failing.
struct CanonicalAnswer {
    enum class Kind { RATIONAL, DECIMAL, STRING };
    Kind kind = Kind::STRING;
    long long numerator = 0;
    long long denominator = 1;
    std::string value_text;
};

// Content of the last balanced \boxed{...} group; failing that, the trailing
// number on the last non-empty line; failing that, the stripped full text.
std::string extract_final_answer(const std::string& answer_text);

CanonicalAnswer normalize(const std::string& raw);

// RATIONAL/DECIMAL compare by exact cross-multiplication; STRING compares
// case-insensitively. Numeric vs STRING is never equal.
bool is_equal(const CanonicalAnswer& pred, const CanonicalAnswer& gold);

// Canonical text form, such that normalize(render(normalize(x))) == normalize(x).
std::string render(const CanonicalAnswer& a);

// extract + normalize + compare in one step.
bool grade(const std::string& predicted_text, const std::string& gold_answer);

}  // namespace dart::verifier
