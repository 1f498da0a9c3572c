#include "abl/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace abl {

ParseError::ParseError(std::size_t line, const std::string &what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

TokenId Vocabulary::intern(std::string_view surface) {
    if (auto it = ids_.find(surface); it != ids_.end()) return it->second;
    const auto id = static_cast<TokenId>(surfaces_.size());
    surfaces_.emplace_back(surface);
    ids_.emplace(surfaces_.back(), id);
    return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view surface) const {
    if (auto it = ids_.find(surface); it != ids_.end()) return it->second;
    return std::nullopt;
}

Sentence &Corpus::add(const std::vector<std::string_view> &surfaces) {
    Sentence s;
    s.sid = sentences.size();
    s.tokens.reserve(surfaces.size());
    for (auto w : surfaces) s.tokens.push_back(vocab.intern(w));
    sentences.push_back(std::move(s));
    return sentences.back();
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    auto is_space = [](char c) {
        return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
    };
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        std::size_t j = i;
        while (j < line.size() && !is_space(line[j])) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

Corpus parse_plain(std::istream &in) {
    Corpus corpus;
    std::string line;
    while (std::getline(in, line)) {
        auto words = split_whitespace(line);
        if (!words.empty()) corpus.add(words);
    }
    return corpus;
}

Corpus parse_plain(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_plain(in);
}

namespace {

TreeBankEntry parse_bracket_line(std::string_view line, std::size_t lineno, Vocabulary &vocab,
                                 SentenceId sid) {
    TreeBankEntry entry;
    entry.sentence.sid = sid;
    struct Open {
        std::size_t begin;
        std::string label;
    };
    std::vector<Open> stack;
    // Brackets are recorded in opening order so that unary chains keep
    // their outer-to-inner order.
    std::vector<std::size_t> slot_of_open;
    for (auto item : split_whitespace(line)) {
        if (item.front() == '(') {
            slot_of_open.push_back(entry.brackets.size());
            entry.brackets.push_back({});
            stack.push_back({entry.sentence.tokens.size(), std::string(item.substr(1))});
        } else if (item == ")") {
            if (stack.empty()) throw ParseError(lineno, "unbalanced brackets: unexpected ')'");
            Open open = std::move(stack.back());
            stack.pop_back();
            const std::size_t end = entry.sentence.tokens.size();
            if (end == open.begin)
                throw ParseError(lineno, "empty bracket '(" + open.label + " )'");
            const std::size_t slot = slot_of_open.back();
            slot_of_open.pop_back();
            entry.brackets[slot] = {{open.begin, end}, std::move(open.label)};
        } else {
            entry.sentence.tokens.push_back(vocab.intern(item));
        }
    }
    if (!stack.empty())
        throw ParseError(lineno, "unbalanced brackets: " + std::to_string(stack.size()) +
                                     " unclosed '(" + stack.back().label + "'");
    return entry;
}

} // namespace

TreeBank parse_treebank(std::istream &in) {
    TreeBank tb;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (split_whitespace(line).empty()) continue;
        auto entry = parse_bracket_line(line, lineno, tb.vocab, tb.entries.size());
        if (entry.sentence.tokens.empty()) throw ParseError(lineno, "line has no terminals");
        tb.entries.push_back(std::move(entry));
    }
    return tb;
}

TreeBank parse_treebank(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_treebank(in);
}

Corpus strip(const TreeBank &tb) {
    Corpus corpus;
    corpus.vocab = tb.vocab;
    corpus.sentences.reserve(tb.entries.size());
    for (const auto &e : tb.entries) corpus.sentences.push_back(e.sentence);
    return corpus;
}

std::string write_brackets(const Vocabulary &vocab, const Sentence &sentence,
                           const std::vector<LabelledSpan> &brackets) {
    const std::size_t n = sentence.length();
    std::vector<std::size_t> order(brackets.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Span &s = brackets[i].span;
        if (s.empty() || s.end > n)
            throw std::invalid_argument("bracket span out of range or empty in sentence " +
                                        std::to_string(sentence.sid));
        order[i] = i;
    }
    for (std::size_t i = 0; i < brackets.size(); ++i)
        for (std::size_t j = i + 1; j < brackets.size(); ++j)
            if (crosses(brackets[i].span, brackets[j].span))
                throw CrossingBracketsError(
                    "crossing spans in sentence " + std::to_string(sentence.sid) +
                    "; crossing hypothesis sets must be written in the tabular format");
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return OuterFirst{}(brackets[a].span, brackets[b].span);
    });

    std::string out;
    auto emit = [&out](std::string_view s) {
        if (!out.empty()) out.push_back(' ');
        out.append(s);
    };
    std::vector<std::size_t> open; // indices into brackets, innermost last
    std::size_t next = 0;
    for (std::size_t pos = 0; pos <= n; ++pos) {
        while (!open.empty() && brackets[open.back()].span.end == pos) {
            emit(")");
            open.pop_back();
        }
        if (pos == n) break;
        while (next < order.size() && brackets[order[next]].span.begin == pos) {
            emit("(" + brackets[order[next]].label);
            open.push_back(order[next]);
            ++next;
        }
        emit(vocab.surface(sentence.tokens[pos]));
    }
    return out;
}

void write_treebank(std::ostream &out, const TreeBank &tb) {
    for (const auto &e : tb.entries) out << write_brackets(tb.vocab, e.sentence, e.brackets) << '\n';
}

std::string detokenize(const Vocabulary &vocab, const Sentence &sentence) {
    std::string out;
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += vocab.surface(sentence.tokens[i]);
    }
    return out;
}

void write_plain(std::ostream &out, const Corpus &corpus) {
    for (const auto &s : corpus.sentences) out << detokenize(corpus.vocab, s) << '\n';
}

std::uint64_t corpus_checksum(const Vocabulary &vocab, const std::vector<Sentence> &sentences) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](std::string_view bytes) {
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto &s : sentences) {
        feed(detokenize(vocab, s));
        feed("\n");
    }
    return h;
}

std::uint64_t corpus_checksum(const Corpus &corpus) {
    return corpus_checksum(corpus.vocab, corpus.sentences);
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

} // namespace abl
