#include "abl/hypothesis.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

namespace abl {

HypothesisSpace::HypothesisSpace(Corpus corpus, TypeStore types)
    : corpus_(std::move(corpus)), types_(std::move(types)), per_sentence_(corpus_.size()),
      index_(corpus_.size()) {}

std::optional<NonTerminal> HypothesisSpace::type_at(SentenceId sid, Span span) const {
    const auto &idx = index_.at(sid);
    if (auto it = idx.find(span); it != idx.end())
        return types_.canonical(per_sentence_[sid][it->second].type);
    return std::nullopt;
}

bool HypothesisSpace::add(SentenceId sid, Span span, NonTerminal type) {
    const auto &s = sentence(sid);
    if (span.empty() || span.end > s.length())
        throw std::invalid_argument("hypothesis span out of range in sentence " +
                                    std::to_string(sid));
    if (!types_.issued(type)) throw std::invalid_argument("hypothesis with unissued type");
    auto [it, inserted] = index_[sid].try_emplace(span, per_sentence_[sid].size());
    if (!inserted) return false;
    per_sentence_[sid].push_back({span, type});
    ++total_;
    return true;
}

void HypothesisSpace::admit(SentenceId sid) {
    const Span full = sentence(sid).full_span();
    if (auto t = type_at(sid, full))
        types_.merge(*t, kSentenceType);
    else
        add(sid, full, kSentenceType);
}

std::vector<Hypothesis> HypothesisSpace::hypotheses(SentenceId sid) const {
    std::vector<Hypothesis> out;
    out.reserve(per_sentence_.at(sid).size());
    for (const auto &h : per_sentence_[sid]) out.push_back({sid, h.span, types_.canonical(h.type)});
    return out;
}

std::size_t HypothesisSpace::live_type_count() const {
    std::set<NonTerminal> live;
    for (const auto &hs : per_sentence_)
        for (const auto &h : hs) live.insert(types_.canonical(h.type));
    return live.size();
}

NonTerminal merge_types(NonTerminal a, NonTerminal b, TypeStore &store) { return store.merge(a, b); }

std::vector<Hypothesis> assign_types(HypothesisSpace &space, SentenceId a, SentenceId b,
                                     std::span<const DissimilarPair> pairs,
                                     const HypothesisFilter &filter) {
    std::vector<Hypothesis> added;
    auto offer = [&](SentenceId sid, Span span, NonTerminal type) {
        if (filter && !filter(space.stored(sid), span)) return false;
        if (!space.add(sid, span, type)) return false;
        added.push_back({sid, span, space.types().canonical(type)});
        return true;
    };

    auto known_type = [&space](SentenceId sid, Span span) -> std::optional<NonTerminal> {
        if (span.empty()) return std::nullopt;
        return space.type_at(sid, span);
    };
    for (const auto &p : pairs) {
        const auto known1 = known_type(a, p.span1);
        const auto known2 = known_type(b, p.span2);
        const bool new1 = !p.span1.empty() && !known1;
        const bool new2 = !p.span2.empty() && !known2;

        if (known1 && known2) {
            merge_types(*known1, *known2, space.types());
        } else if (known1 || known2) {
            const NonTerminal t = known1 ? *known1 : *known2;
            if (new1) offer(a, p.span1, t);
            if (new2) offer(b, p.span2, t);
        } else {
            // Neither side known: one fresh type for both, issued only once
            // some side is actually stored.
            std::optional<NonTerminal> fresh;
            auto type_for = [&]() {
                if (!fresh) fresh = space.types().fresh();
                return *fresh;
            };
            auto try_side = [&](SentenceId sid, Span span) {
                if (filter && !filter(space.stored(sid), span)) return;
                const NonTerminal t = type_for();
                space.add(sid, span, t);
                added.push_back({sid, span, space.types().canonical(t)});
            };
            if (new1) try_side(a, p.span1);
            if (new2) try_side(b, p.span2);
        }
    }
    return added;
}

LearnResult learn(Corpus corpus, const LearnOptions &options) {
    if (corpus.empty()) throw std::invalid_argument("cannot learn from an empty corpus");
    LearnResult result{HypothesisSpace(std::move(corpus)), {}};
    HypothesisSpace &space = result.space;
    const auto &sentences = space.corpus().sentences;

    std::vector<SentenceId> memory;
    for (SentenceId n = 0; n < sentences.size(); ++n) {
        space.admit(n);
        if (sentences[n].length() < options.min_align_length) continue;
        for (SentenceId m : memory) {
            const Sentence &old = sentences[m];
            const Sentence &cur = sentences[n];
            ++result.stats.pairs_aligned;
            if (options.method == AlignmentMethod::All) {
                auto all = all_alignments(old, cur, options.all_alignments_cap);
                if (all.capped) result.stats.capped_pairs.emplace_back(m, n);
                for (const auto &al : all.alignments) {
                    ++result.stats.alignments_used;
                    const auto pairs = extract_dissimilar(old, cur, al);
                    assign_types(space, m, n, pairs, options.filter);
                }
            } else {
                ++result.stats.alignments_used;
                const auto al = edit_distance_align(old, cur, options.method).alignment;
                const auto pairs = extract_dissimilar(old, cur, al);
                assign_types(space, m, n, pairs, options.filter);
            }
        }
        memory.push_back(n);
    }
    return result;
}

void write_space(std::ostream &out, const HypothesisSpace &space) {
    const auto &corpus = space.corpus();
    for (const auto &s : corpus.sentences) {
        out << detokenize(corpus.vocab, s) << '\t';
        bool first = true;
        for (const auto &h : space.hypotheses(s.sid)) {
            if (!first) out << ' ';
            first = false;
            out << h.span.begin << ':' << h.span.end << ':' << h.type;
        }
        out << '\n';
    }
}

namespace {

std::size_t parse_number(std::string_view text, std::size_t lineno) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ParseError(lineno, "expected a natural number, got '" + std::string(text) + "'");
    return value;
}

} // namespace

HypothesisSpace read_space(std::istream &in) {
    struct Row {
        std::size_t lineno;
        std::vector<Hypothesis> hyps;
    };
    Corpus corpus;
    std::vector<Row> rows;
    std::size_t max_type = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (split_whitespace(line).empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError(lineno, "missing tab separator");
        const std::string_view view(line);
        const auto words = split_whitespace(view.substr(0, tab));
        if (words.empty()) throw ParseError(lineno, "empty sentence");
        const Sentence &s = corpus.add(words);
        Row row{lineno, {}};
        for (auto triple : split_whitespace(view.substr(tab + 1))) {
            const auto c1 = triple.find(':');
            const auto c2 = c1 == std::string_view::npos ? c1 : triple.find(':', c1 + 1);
            if (c2 == std::string_view::npos)
                throw ParseError(lineno, "expected begin:end:type, got '" + std::string(triple) + "'");
            const Span span{parse_number(triple.substr(0, c1), lineno),
                            parse_number(triple.substr(c1 + 1, c2 - c1 - 1), lineno)};
            const std::size_t type = parse_number(triple.substr(c2 + 1), lineno);
            if (span.begin >= span.end || span.end > s.length())
                throw ParseError(lineno, "span " + std::string(triple) + " out of range");
            if (type > 0xffffffffULL) throw ParseError(lineno, "type id too large");
            max_type = std::max(max_type, type);
            row.hyps.push_back({s.sid, span, static_cast<NonTerminal>(type)});
        }
        rows.push_back(std::move(row));
    }
    HypothesisSpace space(std::move(corpus), TypeStore::with_issued(max_type + 1));
    for (const auto &row : rows)
        for (const auto &h : row.hyps)
            if (!space.add(h.sid, h.span, h.type))
                throw ParseError(row.lineno, "duplicate span " + std::to_string(h.span.begin) +
                                                 ":" + std::to_string(h.span.end));
    return space;
}

} // namespace abl
