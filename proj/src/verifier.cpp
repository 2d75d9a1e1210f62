#include "dart/verifier.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>
#include <optional>
#include <regex>
#include <string_view>

#include "dart/common.hpp"

namespace dart::verifier {

namespace {

// Conservative bound so reduced fractions always cross-multiply safely in
// 128-bit arithmetic.
constexpr long long kMaxMagnitude = 1000000000000000000LL;  // 1e18

std::optional<long long> parse_int(std::string_view s) {
    if (s.empty()) return std::nullopt;
    bool neg = false;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        s.remove_prefix(1);
    }
    if (s.empty() || s.size() > 18) return std::nullopt;
    long long v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        v = v * 10 + (c - '0');
    }
    if (v > kMaxMagnitude) return std::nullopt;
    return neg ? -v : v;
}

void reduce(long long& num, long long& den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    if (num == 0) den = 1;
}

CanonicalAnswer make_rational(long long num, long long den) {
    reduce(num, den);
    CanonicalAnswer a;
    a.kind = CanonicalAnswer::Kind::RATIONAL;
    a.numerator = num;
    a.denominator = den;
    a.value_text = den == 1 ? std::to_string(num)
                            : std::to_string(num) + "/" + std::to_string(den);
    return a;
}

CanonicalAnswer make_string(std::string text) {
    CanonicalAnswer a;
    a.kind = CanonicalAnswer::Kind::STRING;
    a.value_text = std::move(text);
    return a;
}

bool is_trailing_punct(char c) {
    return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?';
}

// Replaces \text{...} wrappers with their content (first level only; applied
// repeatedly until the string stabilizes).
std::string unwrap_text_command(const std::string& s) {
    size_t pos = s.find("\\text{");
    if (pos == std::string::npos) return s;
    size_t body = pos + 6;
    int depth = 1;
    size_t i = body;
    for (; i < s.size(); ++i) {
        if (s[i] == '{') ++depth;
        else if (s[i] == '}' && --depth == 0) break;
    }
    if (depth != 0) return s;  // unbalanced, leave alone
    return s.substr(0, pos) + s.substr(body, i - body) + s.substr(i + 1);
}

std::string strip_layers(std::string s) {
    for (int round = 0; round < 8; ++round) {
        std::string before = s;
        s = trim(s);
        // Drop LaTeX math dollars and thin spaces anywhere.
        std::string cleaned;
        cleaned.reserve(s.size());
        for (size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '$') continue;
            if (s[i] == '\\' && i + 1 < s.size() && s[i + 1] == ',') {
                ++i;
                continue;
            }
            cleaned.push_back(s[i]);
        }
        s = cleaned;
        s = unwrap_text_command(s);
        while (!s.empty() && is_trailing_punct(s.back())) s.pop_back();
        s = trim(s);
        // Unwrap a brace pair that spans the whole string.
        if (s.size() >= 2 && s.front() == '{' && s.back() == '}') {
            int depth = 0;
            bool whole = true;
            for (size_t i = 0; i < s.size(); ++i) {
                if (s[i] == '{') ++depth;
                else if (s[i] == '}') {
                    --depth;
                    if (depth == 0 && i + 1 != s.size()) {
                        whole = false;
                        break;
                    }
                }
            }
            if (whole && depth == 0) s = trim(s.substr(1, s.size() - 2));
        }
        if (s == before) break;
    }
    return s;
}

const std::regex& thousands_re() {
    static const std::regex re(R"(^[+-]?\d{1,3}(,\d{3})+(\.\d+)?$)");
    return re;
}

const std::regex& fraction_re() {
    static const std::regex re(R"(^([+-]?\d+)\s*/\s*([+-]?\d+)$)");
    return re;
}

const std::regex& latex_frac_re() {
    static const std::regex re(R"(^([+-]?)\\d?frac\{([+-]?\d+)\}\{([+-]?\d+)\}$)");
    return re;
}

const std::regex& decimal_re() {
    static const std::regex re(R"(^([+-]?)(\d*)\.(\d+)$)");
    return re;
}

const std::regex& integer_re() {
    static const std::regex re(R"(^[+-]?\d+\.?$)");
    return re;
}

std::optional<CanonicalAnswer> try_parse_numeric(const std::string& s) {
    if (s.empty()) return std::nullopt;
    std::string t = s;
    if (std::regex_match(t, thousands_re())) {
        t.erase(std::remove(t.begin(), t.end(), ','), t.end());
    }

    std::smatch m;
    if (std::regex_match(t, integer_re())) {
        std::string digits = t;
        if (!digits.empty() && digits.back() == '.') digits.pop_back();
        if (auto v = parse_int(digits)) return make_rational(*v, 1);
        return std::nullopt;
    }
    if (std::regex_match(t, m, fraction_re())) {
        auto num = parse_int(m[1].str());
        auto den = parse_int(m[2].str());
        if (num && den && *den != 0) return make_rational(*num, *den);
        return std::nullopt;
    }
    if (std::regex_match(t, m, latex_frac_re())) {
        auto num = parse_int(m[2].str());
        auto den = parse_int(m[3].str());
        if (num && den && *den != 0) {
            if (m[1].str() == "-") *num = -*num;
            return make_rational(*num, *den);
        }
        return std::nullopt;
    }
    if (std::regex_match(t, m, decimal_re())) {
        bool neg = m[1].str() == "-";
        std::string int_part = m[2].str();
        std::string frac_part = m[3].str();
        // Trailing zeros carry no value.
        while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();
        if (frac_part.empty()) {
            if (auto v = parse_int(int_part.empty() ? "0" : int_part)) {
                return make_rational(neg ? -*v : *v, 1);
            }
            return std::nullopt;
        }
        if (int_part.size() + frac_part.size() > 18) return std::nullopt;
        auto ip = parse_int(int_part.empty() ? "0" : int_part);
        auto fp = parse_int(frac_part);
        if (!ip || !fp) return std::nullopt;
        long long den = 1;
        for (size_t i = 0; i < frac_part.size(); ++i) den *= 10;
        long long num = *ip * den + *fp;
        if (neg) num = -num;
        long long rnum = num, rden = den;
        reduce(rnum, rden);
        CanonicalAnswer a;
        a.kind = CanonicalAnswer::Kind::DECIMAL;
        a.numerator = rnum;
        a.denominator = rden;
        a.value_text = (neg ? "-" : "") + (int_part.empty() ? std::string("0") : int_part) +
                       "." + frac_part;
        return a;
    }
    return std::nullopt;
}

}  // namespace

std::string extract_final_answer(const std::string& answer_text) {
    if (trim(answer_text).empty()) return "";

    // Last balanced \boxed{...} wins; models often restate intermediate boxes.
    static const std::string marker = "\\boxed{";
    std::string last_boxed;
    bool found = false;
    size_t search = 0;
    while (true) {
        size_t pos = answer_text.find(marker, search);
        if (pos == std::string::npos) break;
        size_t body = pos + marker.size();
        int depth = 1;
        size_t i = body;
        for (; i < answer_text.size(); ++i) {
            if (answer_text[i] == '{') ++depth;
            else if (answer_text[i] == '}' && --depth == 0) break;
        }
        if (depth == 0) {
            last_boxed = answer_text.substr(body, i - body);
            found = true;
            search = i + 1;
        } else {
            search = body;  // truncated group, keep scanning
        }
    }
    if (found) return trim(last_boxed);

    // Fallback: the last number on the last non-empty line.
    std::vector<std::string> lines = split(answer_text, '\n');
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
        std::string line = trim(*it);
        if (line.empty()) continue;
        static const std::regex number_re(
            R"([-+]?\d[\d,]*(\.\d+)?(\s*/\s*\d+)?|\\d?frac\{[+-]?\d+\}\{[+-]?\d+\})");
        std::string last_match;
        for (std::sregex_iterator mit(line.begin(), line.end(), number_re), end; mit != end;
             ++mit) {
            last_match = mit->str();
        }
        if (!last_match.empty()) return trim(last_match);
        break;
    }
    return trim(answer_text);
}

CanonicalAnswer normalize(const std::string& raw) {
    std::string s = strip_layers(raw);
    if (auto numeric = try_parse_numeric(s)) return *numeric;
    return make_string(s);
}

bool is_equal(const CanonicalAnswer& pred, const CanonicalAnswer& gold) {
    bool pred_numeric = pred.kind != CanonicalAnswer::Kind::STRING;
    bool gold_numeric = gold.kind != CanonicalAnswer::Kind::STRING;
    if (pred_numeric != gold_numeric) return false;
    if (pred_numeric) {
        // Exact integer arithmetic only; 128-bit products cannot overflow for
        // the magnitudes admitted by the parser.
        return static_cast<__int128>(pred.numerator) * gold.denominator ==
               static_cast<__int128>(gold.numerator) * pred.denominator;
    }
    return to_lower(pred.value_text) == to_lower(gold.value_text);
}

std::string render(const CanonicalAnswer& a) { return a.value_text; }

bool grade(const std::string& predicted_text, const std::string& gold_answer) {
    return is_equal(normalize(extract_final_answer(predicted_text)), normalize(gold_answer));
}

}  // namespace dart::verifier
