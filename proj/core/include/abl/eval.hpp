#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "abl/corpus.hpp"
#include "abl/selection.hpp"
#include "abl/span.hpp"

namespace abl {

// Raised when a metric is undefined on its input (empty denominators).
class MetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Raised when a learned corpus and a gold corpus do not hold the same
// sentences. `index()` is the first mismatching 0-based sentence index.
class SentenceMismatch : public std::runtime_error {
public:
    SentenceMismatch(std::size_t index, const std::string &what)
        : std::runtime_error(what), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

// Per-sentence span sets, one entry per sentence.
using SpanCorpus = std::vector<std::vector<Span>>;

// Number of spans in `u` that cross at least one span in `v`.
std::size_t count_crossing(const std::vector<Span> &u, const std::vector<Span> &v);

// Micro-averaged percentages over the corpus.
double ncbp(const SpanCorpus &learned, const SpanCorpus &gold);
double ncbr(const SpanCorpus &learned, const SpanCorpus &gold);
double zcs(const SpanCorpus &learned, const SpanCorpus &gold);

struct MetricValues {
    double ncbp = 0.0;
    double ncbr = 0.0;
    double zcs = 0.0;
    std::size_t sentences = 0;
    std::size_t learned_constituents = 0;
    std::size_t gold_constituents = 0;
};

MetricValues evaluate(const SpanCorpus &learned, const SpanCorpus &gold);

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0; // population
    double min = 0.0;
    double max = 0.0;
};

struct MetricsReport {
    std::vector<MetricValues> trials;
    MetricSummary ncbp, ncbr, zcs;
    std::size_t sentences = 0;
    double learned_constituents = 0.0; // mean over trials
    std::size_t gold_constituents = 0;
};

// Throws std::invalid_argument on no trials or mismatched sentence counts.
MetricsReport aggregate(const std::vector<MetricValues> &trials);

// Aligned plain-text table: metric, mean, stddev (two decimals).
void write_metrics_table(std::ostream &out, const MetricsReport &report);
// "key=value" lines, stable key order.
void write_metrics_kv(std::ostream &out, const MetricsReport &report);
// One results-table row: "name  NCBP (sd)  NCBR (sd)  ZCS (sd)".
std::string format_results_row(const std::string &system, const MetricsReport &report);

// Right-branching: {(i, n) : 0 <= i <= n-2} plus (0, n).
std::vector<Span> right_branching(std::size_t length);
// Left-branching: {(0, i) : 2 <= i <= n} plus (0, n).
std::vector<Span> left_branching(std::size_t length);

// Distinct spans, optionally without width-1 and whole-sentence spans.
std::vector<Span> span_set(const std::vector<Span> &spans, std::size_t length, bool exclude_trivial);
SpanCorpus span_sets(const TreeBank &tb, bool exclude_trivial);
SpanCorpus span_sets(const SelectionOutcome &outcome, const Corpus &corpus, bool exclude_trivial);

// Throws SentenceMismatch unless both hold the same token sequences.
void check_same_sentences(const TreeBank &learned, const TreeBank &gold);

struct RecursionInstance {
    SentenceId sid = 0;
    Span outer;
    Span inner;
    std::string type;

    friend bool operator==(const RecursionInstance &, const RecursionInstance &) = default;
};

// Every pair of brackets in one sentence where one strictly contains the
// other and both carry the same label.
std::vector<RecursionInstance> recursion_report(const SelectionOutcome &outcome);
std::vector<RecursionInstance> recursion_report(const TreeBank &tb);

} // namespace abl
