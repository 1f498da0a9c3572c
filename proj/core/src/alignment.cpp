#include "abl/alignment.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace abl {

namespace {

double check_default(EditOp op, std::optional<TokenId> w1, std::optional<TokenId> w2) {
    switch (op) {
    case EditOp::Insert:
        if (!w2) throw std::invalid_argument("insert needs the inserted token");
        return 1.0;
    case EditOp::Delete:
        if (!w1) throw std::invalid_argument("delete needs the deleted token");
        return 1.0;
    case EditOp::Match:
    case EditOp::Substitute:
        if (!w1 || !w2) throw std::invalid_argument("match/substitute need both tokens");
        return *w1 == *w2 ? 0.0 : 2.0;
    }
    return 0.0;
}

} // namespace

double default_gamma(EditOp op, std::optional<TokenId> w1, std::optional<TokenId> w2) {
    return check_default(op, w1, w2);
}

double biased_gamma(EditOp op, std::optional<TokenId> w1, std::optional<TokenId> w2,
                    const MatchContext &ctx) {
    if (ctx.s1 == 0 || ctx.s2 == 0) throw std::invalid_argument("biased gamma on empty sentence");
    const double base = check_default(op, w1, w2);
    if (base != 0.0) return base;
    const double s1 = static_cast<double>(ctx.s1);
    const double s2 = static_cast<double>(ctx.s2);
    const double rel = static_cast<double>(ctx.i1) / s1 - static_cast<double>(ctx.i2) / s2;
    return (rel < 0 ? -rel : rel) * (s1 + s2) / 2.0;
}

ScaledCost::ScaledCost(AlignmentMethod gamma, std::size_t s1, std::size_t s2)
    : biased_(gamma == AlignmentMethod::Biased), s1_(static_cast<std::int64_t>(s1)),
      s2_(static_cast<std::int64_t>(s2)), indel_(biased_ ? 2 * s1_ * s2_ : 1) {
    if (biased_ && (s1 == 0 || s2 == 0))
        throw std::invalid_argument("biased gamma on empty sentence");
}

std::int64_t ScaledCost::match(std::size_t i1, std::size_t i2) const {
    if (!biased_) return 0;
    // |i1/s1 - i2/s2| * (s1+s2)/2  ==  |i1*s2 - i2*s1| * (s1+s2) / (2*s1*s2)
    const std::int64_t d = static_cast<std::int64_t>(i1) * s2_ - static_cast<std::int64_t>(i2) * s1_;
    return (d < 0 ? -d : d) * (s1_ + s2_);
}

EditResult edit_distance_align(std::span<const TokenId> a, std::span<const TokenId> b,
                               AlignmentMethod gamma) {
    const std::size_t n = a.size(), m = b.size();
    if (gamma == AlignmentMethod::All)
        throw std::invalid_argument("edit distance needs the default or biased cost");
    EditResult result;
    if (n == 0 || m == 0) {
        result.cost = static_cast<double>(n + m);
        return result;
    }
    const ScaledCost cost(gamma, n, m);
    const std::size_t w = m + 1;
    std::vector<std::int64_t> dp((n + 1) * w);
    auto at = [&](std::size_t i, std::size_t j) -> std::int64_t & { return dp[i * w + j]; };
    for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<std::int64_t>(i) * cost.indel();
    for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::int64_t>(j) * cost.indel();
    auto diag = [&](std::size_t i, std::size_t j) {
        return a[i - 1] == b[j - 1] ? cost.match(i - 1, j - 1) : cost.substitute();
    };
    for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= m; ++j)
            at(i, j) = std::min({at(i - 1, j - 1) + diag(i, j), at(i - 1, j) + cost.indel(),
                                 at(i, j - 1) + cost.indel()});

    std::size_t i = n, j = m;
    while (i > 0 && j > 0) {
        const std::int64_t here = at(i, j);
        if (at(i - 1, j - 1) + diag(i, j) == here) {
            if (a[i - 1] == b[j - 1]) result.alignment.links.push_back({i - 1, j - 1});
            --i;
            --j;
        } else if (at(i - 1, j) + cost.indel() == here) {
            --i;
        } else {
            --j;
        }
    }
    std::reverse(result.alignment.links.begin(), result.alignment.links.end());
    result.cost = static_cast<double>(at(n, m)) / cost.denominator();
    return result;
}

EditResult edit_distance_align(const Sentence &a, const Sentence &b, AlignmentMethod gamma) {
    return edit_distance_align(a.tokens, b.tokens, gamma);
}

AllAlignmentsResult all_alignments(std::span<const TokenId> a, std::span<const TokenId> b,
                                   std::size_t cap) {
    std::vector<Link> cand;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            if (a[i] == b[j]) cand.push_back({i, j});

    AllAlignmentsResult result;
    if (cand.empty()) {
        result.alignments.emplace_back();
        return result;
    }

    // Maximal matchings are exactly the maximal chains of the product order
    // on candidate links, i.e. the paths through the cover relation from a
    // minimal to a maximal candidate.
    const std::size_t k = cand.size();
    auto less = [&](std::size_t x, std::size_t y) {
        return cand[x].i1 < cand[y].i1 && cand[x].i2 < cand[y].i2;
    };
    std::vector<std::vector<std::size_t>> covers(k);
    std::vector<bool> has_pred(k, false);
    for (std::size_t x = 0; x < k; ++x)
        for (std::size_t y = 0; y < k; ++y) {
            if (!less(x, y)) continue;
            has_pred[y] = true;
            bool direct = true;
            for (std::size_t z = 0; z < k && direct; ++z)
                if (less(x, z) && less(z, y)) direct = false;
            if (direct) covers[x].push_back(y); // cand is lexicographic, so covers are too
        }

    // Path counts saturate just above the cap.
    const std::size_t limit = cap + 1;
    std::vector<std::size_t> paths(k, 0);
    for (std::size_t x = k; x-- > 0;) {
        if (covers[x].empty()) {
            paths[x] = 1;
            continue;
        }
        std::size_t total = 0;
        for (auto y : covers[x]) total = std::min(limit, total + paths[y]);
        paths[x] = total;
    }
    std::size_t total = 0;
    for (std::size_t x = 0; x < k; ++x)
        if (!has_pred[x]) total = std::min(limit, total + paths[x]);

    if (total > cap) {
        result.capped = true;
        result.alignments.push_back(edit_distance_align(a, b, AlignmentMethod::Default).alignment);
        return result;
    }

    std::vector<Link> chain;
    auto walk = [&](auto &&self, std::size_t x) -> void {
        chain.push_back(cand[x]);
        if (covers[x].empty())
            result.alignments.push_back(Alignment{chain});
        else
            for (auto y : covers[x]) self(self, y);
        chain.pop_back();
    };
    for (std::size_t x = 0; x < k; ++x)
        if (!has_pred[x]) walk(walk, x);
    return result;
}

AllAlignmentsResult all_alignments(const Sentence &a, const Sentence &b, std::size_t cap) {
    return all_alignments(a.tokens, b.tokens, cap);
}

std::vector<DissimilarPair> extract_dissimilar(std::size_t len1, std::size_t len2,
                                               const Alignment &al) {
    std::vector<DissimilarPair> out;
    std::size_t from1 = 0, from2 = 0;
    auto gap = [&](std::size_t to1, std::size_t to2) {
        if (to1 > from1 || to2 > from2) out.push_back({{from1, to1}, {from2, to2}});
    };
    for (const auto &l : al.links) {
        gap(l.i1, l.i2);
        from1 = l.i1 + 1;
        from2 = l.i2 + 1;
    }
    gap(len1, len2);
    return out;
}

std::vector<DissimilarPair> extract_dissimilar(const Sentence &a, const Sentence &b,
                                               const Alignment &al) {
    return extract_dissimilar(a.length(), b.length(), al);
}

bool is_valid_alignment(std::span<const TokenId> a, std::span<const TokenId> b,
                        const Alignment &al) {
    for (std::size_t k = 0; k < al.links.size(); ++k) {
        const auto &l = al.links[k];
        if (l.i1 >= a.size() || l.i2 >= b.size() || a[l.i1] != b[l.i2]) return false;
        if (k > 0 && (l.i1 <= al.links[k - 1].i1 || l.i2 <= al.links[k - 1].i2)) return false;
    }
    return true;
}

} // namespace abl
