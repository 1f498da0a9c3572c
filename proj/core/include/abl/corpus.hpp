#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "abl/span.hpp"

namespace abl {

using TokenId = std::uint32_t;
using SentenceId = std::size_t;

// Raised on malformed corpus or treebank input. `line()` is 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string &what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Raised when a crossing span set is handed to the bracket writer.
class CrossingBracketsError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Interns token surfaces. Ids are issued in first-occurrence order, so a
// vocabulary built by feeding lines sequentially is fully determined by
// the text.
class Vocabulary {
public:
    TokenId intern(std::string_view surface);
    std::optional<TokenId> find(std::string_view surface) const;
    const std::string &surface(TokenId id) const { return surfaces_.at(id); }
    std::size_t size() const { return surfaces_.size(); }

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const {
            return std::hash<std::string_view>{}(s);
        }
    };
    std::unordered_map<std::string, TokenId, Hash, std::equal_to<>> ids_;
    std::vector<std::string> surfaces_;
};

struct Sentence {
    SentenceId sid = 0;
    std::vector<TokenId> tokens;

    std::size_t length() const { return tokens.size(); }
    Span full_span() const { return {0, tokens.size()}; }
};

struct Corpus {
    Vocabulary vocab;
    std::vector<Sentence> sentences;

    std::size_t size() const { return sentences.size(); }
    bool empty() const { return sentences.empty(); }

    // Appends a sentence from already-split surfaces and returns it.
    Sentence &add(const std::vector<std::string_view> &surfaces);
};

struct LabelledSpan {
    Span span;
    std::string label;

    friend bool operator==(const LabelledSpan &, const LabelledSpan &) = default;
};

struct TreeBankEntry {
    Sentence sentence;
    std::vector<LabelledSpan> brackets;
};

struct TreeBank {
    Vocabulary vocab;
    std::vector<TreeBankEntry> entries;

    std::size_t size() const { return entries.size(); }
};

std::vector<std::string_view> split_whitespace(std::string_view line);

// One sentence per non-blank line, tokens split on whitespace.
Corpus parse_plain(std::istream &in);
Corpus parse_plain(std::string_view text);

// Labelled bracket notation: "(LABEL" opens, ")" closes, everything else
// is a terminal. A line may hold several top-level brackets.
TreeBank parse_treebank(std::istream &in);
TreeBank parse_treebank(std::string_view text);

// Drops all brackets, keeping sentence order, tokens and vocabulary.
Corpus strip(const TreeBank &tb);

// Renders a sentence and a non-crossing span set as one bracket line.
// Throws CrossingBracketsError on crossing spans and std::invalid_argument
// on empty or out-of-range spans.
std::string write_brackets(const Vocabulary &vocab, const Sentence &sentence,
                           const std::vector<LabelledSpan> &brackets);

void write_treebank(std::ostream &out, const TreeBank &tb);

std::string detokenize(const Vocabulary &vocab, const Sentence &sentence);

void write_plain(std::ostream &out, const Corpus &corpus);

// FNV-1a over the normalized plain rendering (single spaces, "\n" line ends).
std::uint64_t corpus_checksum(const Vocabulary &vocab, const std::vector<Sentence> &sentences);
std::uint64_t corpus_checksum(const Corpus &corpus);

std::string hex64(std::uint64_t value);

} // namespace abl
