#include "abl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace abl {

std::size_t count_crossing(const std::vector<Span> &u, const std::vector<Span> &v) {
    std::size_t n = 0;
    for (const auto &a : u)
        if (std::any_of(v.begin(), v.end(), [&](const Span &b) { return crosses(a, b); })) ++n;
    return n;
}

namespace {

void check_dimensions(const SpanCorpus &learned, const SpanCorpus &gold) {
    if (learned.size() != gold.size())
        throw SentenceMismatch(std::min(learned.size(), gold.size()),
                               "learned corpus has " + std::to_string(learned.size()) +
                                   " sentences, gold has " + std::to_string(gold.size()));
}

double non_crossing_rate(const SpanCorpus &u, const SpanCorpus &v, const char *what) {
    check_dimensions(u, v);
    std::size_t total = 0, crossing = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        total += u[i].size();
        crossing += count_crossing(u[i], v[i]);
    }
    if (total == 0) throw MetricError(std::string(what) + " undefined: no constituents");
    return 100.0 * static_cast<double>(total - crossing) / static_cast<double>(total);
}

} // namespace

double ncbp(const SpanCorpus &learned, const SpanCorpus &gold) {
    return non_crossing_rate(learned, gold, "NCBP");
}

double ncbr(const SpanCorpus &learned, const SpanCorpus &gold) {
    return non_crossing_rate(gold, learned, "NCBR");
}

double zcs(const SpanCorpus &learned, const SpanCorpus &gold) {
    check_dimensions(learned, gold);
    if (learned.empty()) throw MetricError("ZCS undefined: empty corpus");
    std::size_t clean = 0;
    for (std::size_t i = 0; i < learned.size(); ++i)
        if (count_crossing(learned[i], gold[i]) == 0) ++clean;
    return 100.0 * static_cast<double>(clean) / static_cast<double>(learned.size());
}

MetricValues evaluate(const SpanCorpus &learned, const SpanCorpus &gold) {
    MetricValues m;
    m.ncbp = ncbp(learned, gold);
    m.ncbr = ncbr(learned, gold);
    m.zcs = zcs(learned, gold);
    m.sentences = learned.size();
    for (const auto &s : learned) m.learned_constituents += s.size();
    for (const auto &s : gold) m.gold_constituents += s.size();
    return m;
}

namespace {

MetricSummary summarize(const std::vector<MetricValues> &trials, double MetricValues::*field) {
    MetricSummary s;
    s.min = s.max = trials.front().*field;
    double sum = 0.0;
    for (const auto &t : trials) {
        sum += t.*field;
        s.min = std::min(s.min, t.*field);
        s.max = std::max(s.max, t.*field);
    }
    const double n = static_cast<double>(trials.size());
    s.mean = std::clamp(sum / n, s.min, s.max);
    double sq = 0.0;
    for (const auto &t : trials) sq += (t.*field - s.mean) * (t.*field - s.mean);
    s.stddev = std::sqrt(sq / n);
    return s;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

MetricsReport aggregate(const std::vector<MetricValues> &trials) {
    if (trials.empty()) throw std::invalid_argument("aggregate needs at least one trial");
    for (const auto &t : trials)
        if (t.sentences != trials.front().sentences ||
            t.gold_constituents != trials.front().gold_constituents)
            throw std::invalid_argument("trials evaluated on different corpora");
    MetricsReport r;
    r.trials = trials;
    r.ncbp = summarize(trials, &MetricValues::ncbp);
    r.ncbr = summarize(trials, &MetricValues::ncbr);
    r.zcs = summarize(trials, &MetricValues::zcs);
    r.sentences = trials.front().sentences;
    r.gold_constituents = trials.front().gold_constituents;
    double learned = 0.0;
    for (const auto &t : trials) learned += static_cast<double>(t.learned_constituents);
    r.learned_constituents = learned / static_cast<double>(trials.size());
    return r;
}

void write_metrics_table(std::ostream &out, const MetricsReport &r) {
    char line[96];
    std::snprintf(line, sizeof line, "%-8s %8s %8s\n", "metric", "mean", "stddev");
    out << line;
    auto row = [&](const char *name, const MetricSummary &s) {
        std::snprintf(line, sizeof line, "%-8s %8.2f %8.2f\n", name, s.mean, s.stddev);
        out << line;
    };
    row("NCBP", r.ncbp);
    row("NCBR", r.ncbr);
    row("ZCS", r.zcs);
}

void write_metrics_kv(std::ostream &out, const MetricsReport &r) {
    out << "trials=" << r.trials.size() << '\n'
        << "sentences=" << r.sentences << '\n'
        << "gold_constituents=" << r.gold_constituents << '\n'
        << "learned_constituents=" << fixed2(r.learned_constituents) << '\n';
    auto metric = [&](const char *name, const MetricSummary &s, double MetricValues::*field) {
        out << name << ".mean=" << fixed2(s.mean) << '\n' << name << ".stddev=" << fixed2(s.stddev) << '\n';
        out << name << ".trials=";
        for (std::size_t i = 0; i < r.trials.size(); ++i)
            out << (i ? "," : "") << fixed2(r.trials[i].*field);
        out << '\n';
    };
    metric("ncbp", r.ncbp, &MetricValues::ncbp);
    metric("ncbr", r.ncbr, &MetricValues::ncbr);
    metric("zcs", r.zcs, &MetricValues::zcs);
}

std::string format_results_row(const std::string &system, const MetricsReport &r) {
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %6.2f (%.2f)  %6.2f (%.2f)  %6.2f (%.2f)", system.c_str(),
                  r.ncbp.mean, r.ncbp.stddev, r.ncbr.mean, r.ncbr.stddev, r.zcs.mean, r.zcs.stddev);
    return line;
}

std::vector<Span> right_branching(std::size_t length) {
    std::vector<Span> out{{0, length}};
    for (std::size_t i = 1; i + 2 <= length; ++i) out.push_back({i, length});
    return out;
}

std::vector<Span> left_branching(std::size_t length) {
    std::vector<Span> out{{0, length}};
    for (std::size_t i = length; i-- > 2;) out.push_back({0, i});
    return out;
}

std::vector<Span> span_set(const std::vector<Span> &spans, std::size_t length, bool exclude_trivial) {
    std::vector<Span> out;
    for (const auto &s : spans) {
        if (exclude_trivial && (s.width() == 1 || (s.begin == 0 && s.end == length))) continue;
        out.push_back(s);
    }
    std::sort(out.begin(), out.end(), OuterFirst{});
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

SpanCorpus span_sets(const TreeBank &tb, bool exclude_trivial) {
    SpanCorpus out;
    out.reserve(tb.entries.size());
    for (const auto &e : tb.entries) {
        std::vector<Span> spans;
        for (const auto &b : e.brackets) spans.push_back(b.span);
        out.push_back(span_set(spans, e.sentence.length(), exclude_trivial));
    }
    return out;
}

SpanCorpus span_sets(const SelectionOutcome &outcome, const Corpus &corpus, bool exclude_trivial) {
    SpanCorpus out;
    out.reserve(outcome.sentences.size());
    for (const auto &s : outcome.sentences) {
        std::vector<Span> spans;
        for (const auto &h : s.chosen) spans.push_back(h.span);
        out.push_back(span_set(spans, corpus.sentences.at(s.sid).length(), exclude_trivial));
    }
    return out;
}

void check_same_sentences(const TreeBank &learned, const TreeBank &gold) {
    const std::size_t n = std::min(learned.size(), gold.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto l = detokenize(learned.vocab, learned.entries[i].sentence);
        const auto g = detokenize(gold.vocab, gold.entries[i].sentence);
        if (l != g)
            throw SentenceMismatch(i, "sentence " + std::to_string(i) + " differs: '" + l +
                                          "' vs gold '" + g + "'");
    }
    if (learned.size() != gold.size())
        throw SentenceMismatch(n, "learned corpus has " + std::to_string(learned.size()) +
                                      " sentences, gold has " + std::to_string(gold.size()));
}

namespace {

void report_pairs(SentenceId sid, const std::vector<LabelledSpan> &brackets,
                  std::vector<RecursionInstance> &out) {
    for (const auto &outer : brackets)
        for (const auto &inner : brackets)
            if (outer.span != inner.span && contains(outer.span, inner.span) &&
                outer.label == inner.label)
                out.push_back({sid, outer.span, inner.span, outer.label});
}

} // namespace

std::vector<RecursionInstance> recursion_report(const SelectionOutcome &outcome) {
    std::vector<RecursionInstance> out;
    for (const auto &s : outcome.sentences) {
        std::vector<LabelledSpan> brackets;
        for (const auto &h : s.chosen) brackets.push_back({h.span, std::to_string(h.type)});
        report_pairs(s.sid, brackets, out);
    }
    return out;
}

std::vector<RecursionInstance> recursion_report(const TreeBank &tb) {
    std::vector<RecursionInstance> out;
    for (const auto &e : tb.entries) report_pairs(e.sentence.sid, e.brackets, out);
    return out;
}

} // namespace abl
