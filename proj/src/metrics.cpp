#include "dart/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "dart/common.hpp"

namespace dart::metrics {

double pass_at_1(const std::vector<bool>& verdicts) {
    if (verdicts.empty()) throw Error("pass_at_1 on empty verdict list");
    size_t correct = 0;
    for (bool v : verdicts) correct += v ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(verdicts.size());
}

TokenMean avg_tokens(const std::vector<GenerationRecord>& records, Segment segment) {
    if (records.empty()) throw Error("avg_tokens on empty record list");
    TokenMean out;
    long double sum = 0;
    for (const auto& r : records) {
        if (r.finish_reason == FinishReason::ERROR) {
            ++out.excluded;
            continue;
        }
        sum += segment == Segment::REASONING ? r.reasoning_tokens : r.total_tokens;
        ++out.covered;
    }
    if (out.covered == 0) throw Error("avg_tokens: every record is an ERROR record");
    out.mean = static_cast<double>(sum / out.covered);
    return out;
}

Delta compare(const MethodStats& base, const MethodStats& method) {
    if (base.dataset != method.dataset) {
        throw Error("compare across datasets: '" + base.dataset + "' vs '" + method.dataset + "'");
    }
    Delta d;
    d.pass_delta_points = (method.pass_at_1 - base.pass_at_1) * 100.0;
    if (base.act && method.act) {
        if (*base.act == 0.0 || *method.act == 0.0) {
            throw Error("compare: zero ACT would divide by zero");
        }
        d.act_reduction = (*base.act - *method.act) / *base.act;
        d.act_speedup = *base.act / *method.act;
    }
    if (base.aat && method.aat) {
        if (*base.aat == 0.0) throw Error("compare: zero AAT would divide by zero");
        d.aat_reduction = (*base.aat - *method.aat) / *base.aat;
    }
    return d;
}

double round_half_away(double v, int decimals) {
    double scale = std::pow(10.0, decimals);
    return std::round(v * scale) / scale;
}

std::string format_signed_pct(double reduction) {
    // A positive reduction prints as a negative change, matching the usual
    // "(-68.0%)" presentation; increases print as "(+242.7%)".
    double change = round_half_away(-reduction * 100.0, 1);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "(%+.1f%%)", change);
    return buf;
}

std::string format_pass_delta(double points) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "(%+.1f)", round_half_away(points, 1));
    return buf;
}

std::string format_speedup(double speedup) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2fx", round_half_away(speedup, 2));
    return buf;
}

namespace {

std::string format_cell(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", *v);
    return buf;
}

std::string format_pass(double fraction) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
    return buf;
}

struct Row {
    std::vector<std::string> cells;
};

void append_table(std::string& out, const std::vector<Row>& rows) {
    std::vector<size_t> widths;
    for (const auto& row : rows) {
        if (widths.size() < row.cells.size()) widths.resize(row.cells.size(), 0);
        for (size_t i = 0; i < row.cells.size(); ++i) {
            widths[i] = std::max(widths[i], row.cells[i].size());
        }
    }
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.cells.size(); ++i) {
            const std::string& c = row.cells[i];
            if (i == 0) {
                out += c;
                out.append(widths[i] - c.size(), ' ');
            } else {
                out += "  ";
                out.append(widths[i] - c.size(), ' ');
                out += c;
            }
        }
        out += "\n";
    }
}

}  // namespace

void render_report(const std::vector<MethodStats>& stats, const std::string& baseline_method,
                   const std::filesystem::path& json_path,
                   const std::filesystem::path& text_path) {
    if (stats.empty()) throw Error("render_report: no stats to report");

    // Preserve first-seen order of datasets and methods.
    std::vector<std::string> datasets, methods;
    for (const auto& s : stats) {
        if (std::find(datasets.begin(), datasets.end(), s.dataset) == datasets.end()) {
            datasets.push_back(s.dataset);
        }
        if (std::find(methods.begin(), methods.end(), s.method) == methods.end()) {
            methods.push_back(s.method);
        }
    }
    auto lookup = [&](const std::string& method, const std::string& dataset) -> const MethodStats* {
        for (const auto& s : stats) {
            if (s.method == method && s.dataset == dataset) return &s;
        }
        return nullptr;
    };

    nlohmann::json jreport;
    jreport["baseline"] = baseline_method;
    jreport["datasets"] = nlohmann::json::array();

    std::string text;
    for (const auto& dataset : datasets) {
        const MethodStats* base = lookup(baseline_method, dataset);

        nlohmann::json jdataset;
        jdataset["dataset"] = dataset;
        jdataset["methods"] = nlohmann::json::array();

        text += "== " + dataset + " ==\n";
        std::vector<Row> rows;
        rows.push_back({{"method", "pass@1", "act", "aat"}});
        for (const auto& method : methods) {
            const MethodStats* s = lookup(method, dataset);
            if (!s) continue;
            rows.push_back({{s->method, format_pass(s->pass_at_1), format_cell(s->act),
                             format_cell(s->aat)}});

            nlohmann::json jm;
            jm["method"] = s->method;
            jm["pass_at_1"] = s->pass_at_1;
            jm["act"] = s->act ? nlohmann::json(*s->act) : nlohmann::json();
            jm["aat"] = s->aat ? nlohmann::json(*s->aat) : nlohmann::json();
            jm["n"] = s->n;

            if (base && s != base) {
                Delta d = compare(*base, *s);
                rows.push_back({{"", format_pass_delta(d.pass_delta_points),
                                 d.act_reduction ? format_signed_pct(*d.act_reduction) : "-",
                                 d.aat_reduction ? format_signed_pct(*d.aat_reduction) : "-"}});
                nlohmann::json jd;
                jd["pass_delta_points"] = round_half_away(d.pass_delta_points, 1);
                jd["act_reduction"] =
                    d.act_reduction ? nlohmann::json(*d.act_reduction) : nlohmann::json();
                jd["aat_reduction"] =
                    d.aat_reduction ? nlohmann::json(*d.aat_reduction) : nlohmann::json();
                jd["act_speedup"] =
                    d.act_speedup ? nlohmann::json(round_half_away(*d.act_speedup, 2))
                                  : nlohmann::json();
                jm["delta_vs_baseline"] = jd;
            }
            jdataset["methods"].push_back(jm);
        }
        append_table(text, rows);
        text += "\n";
        jreport["datasets"].push_back(jdataset);
    }

    atomic_write_file(json_path, jreport.dump(2) + "\n");
    atomic_write_file(text_path, text);
}

}  // namespace dart::metrics
