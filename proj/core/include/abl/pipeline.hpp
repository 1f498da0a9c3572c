#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "abl/alignment.hpp"
#include "abl/eval.hpp"
#include "abl/selection.hpp"

namespace abl {

inline constexpr const char *kToolVersion = "0.1.0";

// Bad flags or flag combinations (exit code 1).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable or inconsistent data (exit code 2).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Direction { Right, Left };

struct RunConfig {
    AlignmentMethod alignment = AlignmentMethod::Default;
    SelectionMethod selection = SelectionMethod::Branch;
    std::optional<MeanVariant> mean; // leaf/branch only; Geo when unset
    std::size_t trials = 10;
    std::uint64_t seed = 0;
    bool shuffle = true; // per-trial corpus reordering, incr only
    bool exclude_trivial = false;
    std::size_t min_length = 2;
    Direction direction = Direction::Right;

    std::string input;  // plain corpus
    std::string gold;   // bracketed treebank
    std::string space;  // tabular hypothesis space
    std::string learned; // bracketed learned corpus
    std::filesystem::path output;

    MeanVariant effective_mean() const { return mean.value_or(MeanVariant::Geo); }
};

// Throws UsageError on invalid combinations.
void validate(const RunConfig &config);

// "alignment:selection", with "+" for the extended geometric mean.
std::string system_name(const RunConfig &config);

std::string_view to_string(AlignmentMethod m);
std::string_view to_string(Direction d);
AlignmentMethod parse_alignment(std::string_view s);
SelectionMethod parse_selection(std::string_view s);
MeanVariant parse_mean(std::string_view s);
Direction parse_direction(std::string_view s);

// Ordered key=value pairs.
using Manifest = std::vector<std::pair<std::string, std::string>>;

void write_manifest(std::ostream &out, const Manifest &manifest);
Manifest read_manifest(std::istream &in);
std::optional<std::string> manifest_value(const Manifest &manifest, std::string_view key);
// Rebuilds a run configuration from a run manifest; output is left empty.
RunConfig config_from_manifest(const Manifest &manifest);

// Writes via a temporary file and rename.
void write_file_atomic(const std::filesystem::path &path, const std::string &contents);

// Shuffled order of 0..n-1 (Fisher-Yates driven by Rng).
std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed);

// Learning plus selection on a corpus as configured; the outcome follows
// the corpus order given.
SelectionOutcome learn_and_select(const Corpus &corpus, const RunConfig &config,
                                  std::uint64_t selection_seed, LearnStats *stats = nullptr);

// Bracket rendering of a selection, types as decimal labels.
std::string render_selection(const Corpus &corpus, const SelectionOutcome &outcome);

// Subcommands. Each reports to `out` and writes its files under
// config.output. They throw UsageError or DataError.
void cmd_learn(const RunConfig &config, std::ostream &out);
void cmd_select(const RunConfig &config, std::ostream &out);
MetricsReport cmd_eval(const RunConfig &config, std::ostream &out);
void cmd_baseline(const RunConfig &config, std::ostream &out);
MetricsReport cmd_run(const RunConfig &config, std::ostream &out);

} // namespace abl
