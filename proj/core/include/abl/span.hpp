#pragma once

#include <compare>
#include <cstddef>

namespace abl {

// Half-open token interval [begin, end) within one sentence.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    constexpr std::size_t width() const { return end - begin; }
    constexpr bool empty() const { return begin == end; }

    friend constexpr auto operator<=>(const Span &, const Span &) = default;
};

// True iff the two spans partially overlap: neither nests inside the
// other and they share at least one token. Equality, nesting, adjacency
// and disjointness are not crossings.
constexpr bool crosses(const Span &a, const Span &b) {
    return (a.begin < b.begin && b.begin < a.end && a.end < b.end) ||
           (b.begin < a.begin && a.begin < b.end && b.end < a.end);
}

// True iff `outer` covers `inner` (non-strict).
constexpr bool contains(const Span &outer, const Span &inner) {
    return outer.begin <= inner.begin && inner.end <= outer.end;
}

// Orders spans so that enclosing spans come before the spans they contain:
// begin ascending, then end descending.
struct OuterFirst {
    constexpr bool operator()(const Span &a, const Span &b) const {
        if (a.begin != b.begin) return a.begin < b.begin;
        return a.end > b.end;
    }
};

} // namespace abl
