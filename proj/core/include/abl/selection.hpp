#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "abl/hypothesis.hpp"
#include "abl/random.hpp"

namespace abl {

enum class SelectionMethod { Incr, Leaf, Branch };
enum class MeanVariant { Geo, GeoPlus };

// Two geometric means closer than this are the same score.
inline constexpr double kScoreTieEpsilon = 1e-12;

// Online filter of the incremental method: a candidate is rejected iff it
// crosses a hypothesis the sentence already holds.
bool incr_filter(std::span<const StoredHypothesis> existing, Span candidate);
HypothesisFilter incr_hook();

// Fraction of all stored hypotheses whose yield equals the yield of `c`.
double p_leaf(const Hypothesis &c, const HypothesisSpace &space);
// Fraction of hypotheses with c's canonical type whose yield equals c's.
double p_branch(const Hypothesis &c, const HypothesisSpace &space);

// Precomputed yield counts for scoring a whole space. Must be rebuilt if
// the space changes.
class ProbabilityTable {
public:
    ProbabilityTable(const HypothesisSpace &space, SelectionMethod method);
    double operator()(const Hypothesis &c) const;

private:
    using Yield = std::vector<TokenId>;
    Yield yield_of(const Hypothesis &c) const;

    const HypothesisSpace *space_;
    SelectionMethod method_;
    std::size_t total_ = 0;
    std::map<Yield, std::size_t> by_yield_;
    std::map<std::pair<NonTerminal, Yield>, std::size_t> by_type_yield_;
    std::map<NonTerminal, std::size_t> by_type_;
};

// Geometric mean of a constituent set, with the set size kept for the
// extended comparison.
struct Score {
    double mean = 1.0;
    std::size_t count = 0;
};

// The empty combination scores mean 1, count 0. Throws
// std::invalid_argument for probabilities outside (0, 1].
Score combine(std::span<const double> probs);

// Strict "a beats b": higher mean; under GeoPlus equal means (within
// kScoreTieEpsilon) are decided by the larger count.
bool beats(const Score &a, const Score &b, MeanVariant variant);
bool ties(const Score &a, const Score &b, MeanVariant variant);

struct SentenceSelection {
    SentenceId sid = 0;
    std::vector<Hypothesis> chosen; // outer-first order
    double score = 1.0;             // geometric mean over the chosen hypotheses
};

struct SelectionOutcome {
    std::vector<SentenceSelection> sentences;
    std::uint64_t seed = 0;
};

// Selects a non-crossing subset of one sentence's hypotheses.
// Hypotheses crossing nothing are always kept. Within each group of
// mutually crossing hypotheses (a connected component of the crossing
// relation) the non-empty non-crossing subset with the best geometric mean
// of `probs` is chosen; GeoPlus breaks equal means toward more
// constituents and any remaining tie is drawn uniformly from `rng`.
// Spans must be distinct.
SentenceSelection select(std::span<const Hypothesis> hyps, std::span<const double> probs,
                         MeanVariant variant, Rng &rng);

// Per-sentence selection with generator streams derived from `seed` and the
// sentence id. Under Incr the stored order decides: a hypothesis crossing
// an earlier kept one is dropped.
SelectionOutcome select_corpus(const HypothesisSpace &space, SelectionMethod method,
                               MeanVariant variant, std::uint64_t seed);

std::string_view to_string(SelectionMethod m);
std::string_view to_string(MeanVariant v);

} // namespace abl
