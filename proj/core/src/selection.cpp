#include "abl/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace abl {

bool incr_filter(std::span<const StoredHypothesis> existing, Span candidate) {
    return std::none_of(existing.begin(), existing.end(),
                        [&](const StoredHypothesis &h) { return crosses(h.span, candidate); });
}

HypothesisFilter incr_hook() { return &incr_filter; }

namespace {

std::vector<TokenId> yield(const HypothesisSpace &space, SentenceId sid, Span span) {
    const auto &tokens = space.sentence(sid).tokens;
    return {tokens.begin() + static_cast<std::ptrdiff_t>(span.begin),
            tokens.begin() + static_cast<std::ptrdiff_t>(span.end)};
}

} // namespace

double p_leaf(const Hypothesis &c, const HypothesisSpace &space) {
    const auto target = yield(space, c.sid, c.span);
    std::size_t hits = 0;
    for (SentenceId sid = 0; sid < space.sentence_count(); ++sid)
        for (const auto &h : space.stored(sid))
            if (h.span.width() == c.span.width() && yield(space, sid, h.span) == target) ++hits;
    return static_cast<double>(hits) / static_cast<double>(space.total_count());
}

double p_branch(const Hypothesis &c, const HypothesisSpace &space) {
    const auto target = yield(space, c.sid, c.span);
    const NonTerminal root = space.types().canonical(c.type);
    std::size_t hits = 0, rooted = 0;
    for (SentenceId sid = 0; sid < space.sentence_count(); ++sid)
        for (const auto &h : space.stored(sid)) {
            if (space.types().canonical(h.type) != root) continue;
            ++rooted;
            if (h.span.width() == c.span.width() && yield(space, sid, h.span) == target) ++hits;
        }
    return static_cast<double>(hits) / static_cast<double>(rooted);
}

ProbabilityTable::ProbabilityTable(const HypothesisSpace &space, SelectionMethod method)
    : space_(&space), method_(method) {
    for (SentenceId sid = 0; sid < space.sentence_count(); ++sid)
        for (const auto &h : space.hypotheses(sid)) {
            auto y = yield_of(h);
            ++total_;
            ++by_type_[h.type];
            ++by_type_yield_[{h.type, y}];
            ++by_yield_[std::move(y)];
        }
}

ProbabilityTable::Yield ProbabilityTable::yield_of(const Hypothesis &c) const {
    return yield(*space_, c.sid, c.span);
}

double ProbabilityTable::operator()(const Hypothesis &c) const {
    const auto y = yield_of(c);
    if (method_ == SelectionMethod::Branch) {
        const NonTerminal root = space_->types().canonical(c.type);
        const auto num = by_type_yield_.find({root, y});
        const auto den = by_type_.find(root);
        if (num == by_type_yield_.end() || den == by_type_.end())
            throw std::invalid_argument("hypothesis not in the scored space");
        return static_cast<double>(num->second) / static_cast<double>(den->second);
    }
    const auto num = by_yield_.find(y);
    if (num == by_yield_.end()) throw std::invalid_argument("hypothesis not in the scored space");
    return static_cast<double>(num->second) / static_cast<double>(total_);
}

Score combine(std::span<const double> probs) {
    double sum = 0.0;
    for (double p : probs) {
        if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside (0, 1]");
        sum += std::log(p);
    }
    if (probs.empty()) return {1.0, 0};
    return {std::exp(sum / static_cast<double>(probs.size())), probs.size()};
}

bool beats(const Score &a, const Score &b, MeanVariant variant) {
    if (a.mean > b.mean + kScoreTieEpsilon) return true;
    if (a.mean < b.mean - kScoreTieEpsilon) return false;
    return variant == MeanVariant::GeoPlus && a.count > b.count;
}

bool ties(const Score &a, const Score &b, MeanVariant variant) {
    return !beats(a, b, variant) && !beats(b, a, variant);
}

namespace {

// Tolerance on sums of log-probabilities inside the chart.
constexpr double kLogEpsilon = 1e-10;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Best sum of log-probabilities and the number of subsets reaching it.
struct Cell {
    double best = kNegInf;
    double ways = 0.0;

    bool reachable() const { return ways > 0.0; }
};

// Indexed by the number of chosen constituents.
using Frontier = std::vector<Cell>;

void offer(Cell &cell, double value, double ways) {
    if (ways <= 0.0) return;
    if (!cell.reachable() || value > cell.best + kLogEpsilon) {
        cell = {value, ways};
    } else if (value >= cell.best - kLogEpsilon) {
        cell.ways += ways;
        cell.best = std::max(cell.best, value);
    }
}

bool near(double value, double best) { return std::abs(value - best) <= kLogEpsilon; }

// Interval chart over the distinct endpoints of one crossing group. Cell
// (x, y) holds, per count k, the best laminar subset of the group's spans
// lying inside [x, y). The "strict" table excludes the span (x, y) itself
// and is used for the inside of a chosen span. The mean is only applied at
// the top, because it does not decompose over sub-intervals.
class LaminarChart {
public:
    struct Item {
        std::size_t begin, end; // coordinate indices
        double logp;
        std::size_t source;
    };

    LaminarChart(std::vector<Item> items, std::size_t coords)
        : items_(std::move(items)), coords_(coords), starting_(coords),
          memo_(2 * coords * coords) {
        for (std::size_t i = 0; i < items_.size(); ++i) starting_[items_[i].begin].push_back(i);
        for (auto &v : starting_)
            std::sort(v.begin(), v.end(),
                      [&](std::size_t a, std::size_t b) { return items_[a].end < items_[b].end; });
    }

    const Frontier &root() { return get(0, coords_ - 1, false); }

    void sample(std::size_t x, std::size_t y, bool strict, std::size_t k, Rng &rng,
                std::vector<std::size_t> &out) {
        if (k == 0) return;
        const double target = get(x, y, strict)[k].best;
        struct Choice {
            std::optional<std::size_t> item;
            std::size_t k_inner = 0, k_right = 0;
            double ways;
        };
        std::vector<Choice> choices;
        double total = 0.0;
        const Frontier &skip = get(x + 1, y, false);
        if (skip[k].reachable() && near(skip[k].best, target)) {
            choices.push_back({std::nullopt, 0, k, skip[k].ways});
            total += skip[k].ways;
        }
        for (auto i : starting_[x]) {
            const Item &it = items_[i];
            if (it.end > y || (strict && it.end == y)) continue;
            const Frontier &inner = get(x, it.end, true);
            const Frontier &right = get(it.end, y, false);
            for (std::size_t k1 = 0; k1 < k; ++k1) {
                const std::size_t k2 = k - 1 - k1;
                if (k1 >= inner.size() || k2 >= right.size()) continue;
                if (!inner[k1].reachable() || !right[k2].reachable()) continue;
                if (!near(it.logp + inner[k1].best + right[k2].best, target)) continue;
                const double w = inner[k1].ways * right[k2].ways;
                choices.push_back({i, k1, k2, w});
                total += w;
            }
        }
        std::size_t pick = 0;
        if (choices.size() > 1) {
            double r = rng.uniform() * total;
            while (pick + 1 < choices.size() && r >= choices[pick].ways) r -= choices[pick++].ways;
        }
        const Choice &c = choices.at(pick);
        if (!c.item) {
            sample(x + 1, y, false, k, rng, out);
            return;
        }
        const Item &it = items_[*c.item];
        out.push_back(it.source);
        sample(x, it.end, true, c.k_inner, rng, out);
        sample(it.end, y, false, c.k_right, rng, out);
    }

private:
    const Frontier &get(std::size_t x, std::size_t y, bool strict) {
        auto &slot = memo_[(strict ? coords_ * coords_ : 0) + x * coords_ + y];
        if (!slot) slot = compute(x, y, strict);
        return *slot;
    }

    Frontier compute(std::size_t x, std::size_t y, bool strict) {
        Frontier f(items_.size() + 1);
        if (x == y) {
            f[0] = {0.0, 1.0};
            return f;
        }
        f = get(x + 1, y, false);
        for (auto i : starting_[x]) {
            const Item &it = items_[i];
            if (it.end > y || (strict && it.end == y)) continue;
            const Frontier &inner = get(x, it.end, true);
            const Frontier &right = get(it.end, y, false);
            for (std::size_t k1 = 0; k1 < inner.size(); ++k1) {
                if (!inner[k1].reachable()) continue;
                for (std::size_t k2 = 0; k1 + k2 + 1 < f.size(); ++k2) {
                    if (!right[k2].reachable()) continue;
                    offer(f[k1 + k2 + 1], it.logp + inner[k1].best + right[k2].best,
                          inner[k1].ways * right[k2].ways);
                }
            }
        }
        return f;
    }

    std::vector<Item> items_;
    std::size_t coords_;
    std::vector<std::vector<std::size_t>> starting_;
    std::vector<std::optional<Frontier>> memo_;
};

// Chooses within one crossing group; returns indices into `hyps`.
std::vector<std::size_t> select_group(std::span<const Hypothesis> hyps,
                                      std::span<const double> logps,
                                      const std::vector<std::size_t> &group, MeanVariant variant,
                                      Rng &rng) {
    std::vector<std::size_t> coords;
    for (auto i : group) {
        coords.push_back(hyps[i].span.begin);
        coords.push_back(hyps[i].span.end);
    }
    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    auto index_of = [&](std::size_t pos) {
        return static_cast<std::size_t>(std::lower_bound(coords.begin(), coords.end(), pos) -
                                        coords.begin());
    };
    std::vector<LaminarChart::Item> items;
    for (auto i : group)
        items.push_back({index_of(hyps[i].span.begin), index_of(hyps[i].span.end), logps[i], i});

    LaminarChart chart(std::move(items), coords.size());
    const Frontier &top = chart.root();

    std::optional<Score> best;
    for (std::size_t k = 1; k < top.size(); ++k) {
        if (!top[k].reachable()) continue;
        const Score s{std::exp(top[k].best / static_cast<double>(k)), k};
        if (!best || beats(s, *best, variant)) best = s;
    }
    // Counts whose best subsets tie with the winner.
    std::vector<std::size_t> tied;
    double total = 0.0;
    for (std::size_t k = 1; k < top.size(); ++k) {
        if (!top[k].reachable()) continue;
        const Score s{std::exp(top[k].best / static_cast<double>(k)), k};
        if (ties(s, *best, variant)) {
            tied.push_back(k);
            total += top[k].ways;
        }
    }
    std::size_t k = tied.front();
    if (tied.size() > 1) {
        double r = rng.uniform() * total;
        std::size_t pick = 0;
        while (pick + 1 < tied.size() && r >= top[tied[pick]].ways) r -= top[tied[pick++]].ways;
        k = tied[pick];
    }
    std::vector<std::size_t> chosen;
    chart.sample(0, coords.size() - 1, false, k, rng, chosen);
    return chosen;
}

void sort_outer_first(std::vector<Hypothesis> &hyps) {
    std::sort(hyps.begin(), hyps.end(), [](const Hypothesis &a, const Hypothesis &b) {
        if (a.span != b.span) return OuterFirst{}(a.span, b.span);
        return a.type < b.type;
    });
}

} // namespace

SentenceSelection select(std::span<const Hypothesis> hyps, std::span<const double> probs,
                         MeanVariant variant, Rng &rng) {
    if (hyps.size() != probs.size()) throw std::invalid_argument("one probability per hypothesis");
    const std::size_t n = hyps.size();
    std::vector<double> logps(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(probs[i] > 0.0 && probs[i] <= 1.0))
            throw std::invalid_argument("probability outside (0, 1]");
        logps[i] = std::log(probs[i]);
    }

    // Crossing groups via union-find over the crossing relation.
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<bool> conflicted(n, false);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (hyps[i].span == hyps[j].span)
                throw std::invalid_argument("duplicate span among hypotheses of one sentence");
            if (crosses(hyps[i].span, hyps[j].span)) {
                conflicted[i] = conflicted[j] = true;
                parent[find(i)] = find(j);
            }
        }

    std::vector<std::size_t> keep;
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::size_t> group_of(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!conflicted[i]) {
            keep.push_back(i);
            continue;
        }
        const std::size_t r = find(i);
        if (group_of[r] == n) {
            group_of[r] = groups.size();
            groups.emplace_back();
        }
        groups[group_of[r]].push_back(i);
    }
    for (const auto &g : groups) {
        auto chosen = select_group(hyps, logps, g, variant, rng);
        keep.insert(keep.end(), chosen.begin(), chosen.end());
    }

    SentenceSelection out;
    out.sid = n ? hyps.front().sid : 0;
    std::vector<double> kept_probs;
    for (auto i : keep) {
        out.chosen.push_back(hyps[i]);
        kept_probs.push_back(probs[i]);
    }
    sort_outer_first(out.chosen);
    out.score = combine(kept_probs).mean;
    return out;
}

SelectionOutcome select_corpus(const HypothesisSpace &space, SelectionMethod method,
                               MeanVariant variant, std::uint64_t seed) {
    SelectionOutcome outcome;
    outcome.seed = seed;
    outcome.sentences.reserve(space.sentence_count());
    if (method == SelectionMethod::Incr) {
        for (SentenceId sid = 0; sid < space.sentence_count(); ++sid) {
            SentenceSelection sel;
            sel.sid = sid;
            std::vector<StoredHypothesis> kept;
            for (const auto &h : space.hypotheses(sid)) {
                if (!incr_filter(kept, h.span)) continue;
                kept.push_back({h.span, h.type});
                sel.chosen.push_back(h);
            }
            sort_outer_first(sel.chosen);
            outcome.sentences.push_back(std::move(sel));
        }
        return outcome;
    }
    const ProbabilityTable table(space, method);
    for (SentenceId sid = 0; sid < space.sentence_count(); ++sid) {
        const auto hyps = space.hypotheses(sid);
        std::vector<double> probs;
        probs.reserve(hyps.size());
        for (const auto &h : hyps) probs.push_back(table(h));
        Rng rng(seed ^ static_cast<std::uint64_t>(sid));
        outcome.sentences.push_back(select(hyps, probs, variant, rng));
    }
    return outcome;
}

std::string_view to_string(SelectionMethod m) {
    switch (m) {
    case SelectionMethod::Incr: return "incr";
    case SelectionMethod::Leaf: return "leaf";
    case SelectionMethod::Branch: return "branch";
    }
    return "?";
}

std::string_view to_string(MeanVariant v) { return v == MeanVariant::Geo ? "geo" : "geo+"; }

} // namespace abl
