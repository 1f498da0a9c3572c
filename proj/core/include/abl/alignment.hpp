#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "abl/corpus.hpp"

namespace abl {

enum class EditOp { Match, Substitute, Delete, Insert };

enum class AlignmentMethod { Default, Biased, All };

// A pair of linked positions holding the same token.
struct Link {
    std::size_t i1 = 0;
    std::size_t i2 = 0;

    friend constexpr auto operator<=>(const Link &, const Link &) = default;
};

// Order-preserving one-to-one links between two sentences.
struct Alignment {
    std::vector<Link> links;

    friend bool operator==(const Alignment &, const Alignment &) = default;
    friend auto operator<=>(const Alignment &a, const Alignment &b) { return a.links <=> b.links; }
};

// A dissimilar region: the gap between two consecutive links (or a
// sentence edge) in each of the two sentences. One side may be empty.
struct DissimilarPair {
    Span span1;
    Span span2;

    friend bool operator==(const DissimilarPair &, const DissimilarPair &) = default;
};

// Edit costs of the plain edit distance: insert and delete cost 1,
// a match costs 0 and a substitution of different words costs 2.
// Match/Substitute need both tokens; Insert needs w2, Delete needs w1.
double default_gamma(EditOp op, std::optional<TokenId> w1, std::optional<TokenId> w2);

// Position context for the offset-biased cost of a match.
struct MatchContext {
    std::size_t i1 = 0; // 0-based offset in sentence 1
    std::size_t i2 = 0; // 0-based offset in sentence 2
    std::size_t s1 = 0; // length of sentence 1
    std::size_t s2 = 0; // length of sentence 2
};

// Like default_gamma, except a match costs |i1/s1 - i2/s2| * (s1+s2)/2.
// Throws std::invalid_argument if either length is zero.
double biased_gamma(EditOp op, std::optional<TokenId> w1, std::optional<TokenId> w2,
                    const MatchContext &ctx);

// Cost of every operation expressed over the common denominator
// 2*s1*s2 (biased) or 1 (default), so that a whole edit script sums to an
// exact integer and ties are compared exactly.
class ScaledCost {
public:
    ScaledCost(AlignmentMethod gamma, std::size_t s1, std::size_t s2);

    std::int64_t indel() const { return indel_; }
    std::int64_t substitute() const { return 2 * indel_; }
    std::int64_t match(std::size_t i1, std::size_t i2) const;
    double denominator() const { return static_cast<double>(indel_); }

private:
    bool biased_;
    std::int64_t s1_, s2_, indel_;
};

struct EditResult {
    Alignment alignment;
    double cost = 0.0;
};

// Minimum-cost edit script between two token sequences under the default
// or biased cost. Among equal-cost scripts the backtrace prefers, at each
// cell, match > substitute > delete > insert.
EditResult edit_distance_align(std::span<const TokenId> a, std::span<const TokenId> b,
                               AlignmentMethod gamma);
EditResult edit_distance_align(const Sentence &a, const Sentence &b, AlignmentMethod gamma);

inline constexpr std::size_t kMaxAlignmentsPerPair = 256;

struct AllAlignmentsResult {
    std::vector<Alignment> alignments; // lexicographic order
    bool capped = false;               // true if the cap forced the default-cost fallback
};

// Every maximal order-preserving matching of equal tokens. If more than
// `cap` exist, returns the single default-cost alignment with capped=true.
AllAlignmentsResult all_alignments(std::span<const TokenId> a, std::span<const TokenId> b,
                                   std::size_t cap = kMaxAlignmentsPerPair);
AllAlignmentsResult all_alignments(const Sentence &a, const Sentence &b,
                                   std::size_t cap = kMaxAlignmentsPerPair);

// Gaps between consecutive links paired positionally; pairs where both
// sides are empty are dropped.
std::vector<DissimilarPair> extract_dissimilar(std::size_t len1, std::size_t len2,
                                               const Alignment &al);
std::vector<DissimilarPair> extract_dissimilar(const Sentence &a, const Sentence &b,
                                               const Alignment &al);

// True iff links are strictly increasing on both sides, in range, and join
// equal tokens.
bool is_valid_alignment(std::span<const TokenId> a, std::span<const TokenId> b,
                        const Alignment &al);

} // namespace abl
