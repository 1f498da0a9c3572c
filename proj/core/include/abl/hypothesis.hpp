#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "abl/alignment.hpp"
#include "abl/corpus.hpp"
#include "abl/type_store.hpp"

namespace abl {

// A hypothesis as stored: the type is the raw id issued at the time and is
// read through TypeStore::canonical.
struct StoredHypothesis {
    Span span;
    NonTerminal type = 0;
};

// A hypothesis with its sentence and canonical type.
struct Hypothesis {
    SentenceId sid = 0;
    Span span;
    NonTerminal type = 0;

    friend auto operator<=>(const Hypothesis &, const Hypothesis &) = default;
};

// Decides whether a candidate span may be stored next to the hypotheses a
// sentence already holds. Returning false rejects it.
using HypothesisFilter =
    std::function<bool(std::span<const StoredHypothesis> existing, Span candidate)>;

// Per-sentence constituent hypotheses, possibly crossing, plus the
// non-terminal equivalence structure. Each sentence holds at most one
// hypothesis per span; a second type arriving for the same span is merged
// into the first.
class HypothesisSpace {
public:
    explicit HypothesisSpace(Corpus corpus, TypeStore types = {});

    const Corpus &corpus() const { return corpus_; }
    const Sentence &sentence(SentenceId sid) const { return corpus_.sentences.at(sid); }
    std::size_t sentence_count() const { return corpus_.size(); }

    TypeStore &types() { return types_; }
    const TypeStore &types() const { return types_; }

    // Stored hypotheses of one sentence in insertion order.
    std::span<const StoredHypothesis> stored(SentenceId sid) const { return per_sentence_.at(sid); }
    std::optional<NonTerminal> type_at(SentenceId sid, Span span) const;

    // Stores (span, type) if the sentence holds nothing at that span;
    // returns false and leaves the space unchanged otherwise. Throws
    // std::invalid_argument for empty or out-of-range spans.
    bool add(SentenceId sid, Span span, NonTerminal type);

    // Adds the sentence-level hypothesis with the reserved type.
    void admit(SentenceId sid);

    // Hypotheses of one sentence with canonical types, in insertion order.
    std::vector<Hypothesis> hypotheses(SentenceId sid) const;
    std::size_t total_count() const { return total_; }

    // Number of distinct canonical types among stored hypotheses.
    std::size_t live_type_count() const;

private:
    Corpus corpus_;
    TypeStore types_;
    std::vector<std::vector<StoredHypothesis>> per_sentence_;
    std::vector<std::map<Span, std::size_t>> index_;
    std::size_t total_ = 0;
};

// Turns the dissimilar pairs of one aligned sentence pair (a, b) into
// hypotheses: a fresh shared type when neither side is known, reuse of the
// known type when one side is, and a merge when both are. Returns the
// hypotheses that were newly stored.
std::vector<Hypothesis> assign_types(HypothesisSpace &space, SentenceId a, SentenceId b,
                                     std::span<const DissimilarPair> pairs,
                                     const HypothesisFilter &filter = {});

// Canonical id of the merged class.
NonTerminal merge_types(NonTerminal a, NonTerminal b, TypeStore &store);

struct LearnOptions {
    AlignmentMethod method = AlignmentMethod::Default;
    HypothesisFilter filter;
    // Sentences shorter than this are kept with their sentence-level
    // hypothesis but never aligned.
    std::size_t min_align_length = 2;
    std::size_t all_alignments_cap = kMaxAlignmentsPerPair;
};

struct LearnStats {
    std::size_t pairs_aligned = 0;
    std::size_t alignments_used = 0;
    std::vector<std::pair<SentenceId, SentenceId>> capped_pairs;
};

struct LearnResult {
    HypothesisSpace space;
    LearnStats stats;
};

// Single incremental pass: each sentence is admitted in corpus order and
// aligned against every earlier (eligible) sentence. Throws
// std::invalid_argument on an empty corpus.
LearnResult learn(Corpus corpus, const LearnOptions &options);

// Tabular format: per sentence, the plain tokens, a tab, then
// "begin:end:type" triples separated by single spaces, canonical types.
void write_space(std::ostream &out, const HypothesisSpace &space);
HypothesisSpace read_space(std::istream &in);

} // namespace abl
