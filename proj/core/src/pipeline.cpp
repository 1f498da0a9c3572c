#include "abl/pipeline.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace abl {

namespace fs = std::filesystem;

std::string_view to_string(AlignmentMethod m) {
    switch (m) {
    case AlignmentMethod::Default: return "default";
    case AlignmentMethod::Biased: return "biased";
    case AlignmentMethod::All: return "all";
    }
    return "?";
}

std::string_view to_string(Direction d) { return d == Direction::Right ? "right" : "left"; }

AlignmentMethod parse_alignment(std::string_view s) {
    if (s == "default") return AlignmentMethod::Default;
    if (s == "biased") return AlignmentMethod::Biased;
    if (s == "all") return AlignmentMethod::All;
    throw UsageError("unknown alignment method '" + std::string(s) + "'");
}

SelectionMethod parse_selection(std::string_view s) {
    if (s == "incr") return SelectionMethod::Incr;
    if (s == "leaf") return SelectionMethod::Leaf;
    if (s == "branch") return SelectionMethod::Branch;
    throw UsageError("unknown selection method '" + std::string(s) + "'");
}

MeanVariant parse_mean(std::string_view s) {
    if (s == "geo") return MeanVariant::Geo;
    if (s == "geo+") return MeanVariant::GeoPlus;
    throw UsageError("unknown mean '" + std::string(s) + "'");
}

Direction parse_direction(std::string_view s) {
    if (s == "right") return Direction::Right;
    if (s == "left") return Direction::Left;
    throw UsageError("unknown direction '" + std::string(s) + "'");
}

void validate(const RunConfig &config) {
    if (config.selection == SelectionMethod::Incr && config.mean)
        throw UsageError("--mean applies to leaf and branch selection only");
    if (config.trials < 1) throw UsageError("--trials must be at least 1");
    if (config.min_length < 1) throw UsageError("--min-length must be at least 1");
}

std::string system_name(const RunConfig &config) {
    std::string name = std::string(to_string(config.alignment)) + ":" +
                       std::string(to_string(config.selection));
    if (config.selection != SelectionMethod::Incr && config.effective_mean() == MeanVariant::GeoPlus)
        name += "+";
    return name;
}

void write_manifest(std::ostream &out, const Manifest &manifest) {
    for (const auto &[k, v] : manifest) out << k << '=' << v << '\n';
}

Manifest read_manifest(std::istream &in) {
    Manifest m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "manifest line without '='");
        m.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return m;
}

std::optional<std::string> manifest_value(const Manifest &manifest, std::string_view key) {
    for (const auto &[k, v] : manifest)
        if (k == key) return v;
    return std::nullopt;
}

namespace {

template <class T> T parse_unsigned(const std::string &text, std::string_view what) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw UsageError("bad " + std::string(what) + " '" + text + "'");
    return value;
}

bool parse_bool(const std::string &text) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw UsageError("bad boolean '" + text + "'");
}

const char *bool_text(bool b) { return b ? "true" : "false"; }

} // namespace

RunConfig config_from_manifest(const Manifest &manifest) {
    auto need = [&](std::string_view key) {
        auto v = manifest_value(manifest, key);
        if (!v) throw UsageError("manifest lacks '" + std::string(key) + "'");
        return *v;
    };
    if (need("command") != "run") throw UsageError("not a run manifest");
    RunConfig c;
    c.alignment = parse_alignment(need("alignment"));
    c.selection = parse_selection(need("selection"));
    if (auto m = manifest_value(manifest, "mean"); m && !m->empty()) c.mean = parse_mean(*m);
    c.trials = parse_unsigned<std::size_t>(need("trials"), "trials");
    c.seed = parse_unsigned<std::uint64_t>(need("seed"), "seed");
    c.shuffle = parse_bool(need("shuffle"));
    c.exclude_trivial = parse_bool(need("exclude_trivial"));
    c.min_length = parse_unsigned<std::size_t>(need("min_length"), "min_length");
    c.gold = need("gold");
    validate(c);
    return c;
}

void write_file_atomic(const fs::path &path, const std::string &contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw DataError("cannot write " + tmp.string());
        f << contents;
        if (!f.flush()) throw DataError("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    return order;
}

SelectionOutcome learn_and_select(const Corpus &corpus, const RunConfig &config,
                                  std::uint64_t selection_seed, LearnStats *stats) {
    LearnOptions opts;
    opts.method = config.alignment;
    opts.min_align_length = config.min_length;
    if (config.selection == SelectionMethod::Incr) opts.filter = incr_hook();
    auto learned = learn(corpus, opts);
    if (stats) *stats = learned.stats;
    return select_corpus(learned.space, config.selection, config.effective_mean(), selection_seed);
}

std::string render_selection(const Corpus &corpus, const SelectionOutcome &outcome) {
    std::string text;
    for (const auto &s : outcome.sentences) {
        std::vector<LabelledSpan> brackets;
        for (const auto &h : s.chosen) brackets.push_back({h.span, std::to_string(h.type)});
        text += write_brackets(corpus.vocab, corpus.sentences.at(s.sid), brackets);
        text += '\n';
    }
    return text;
}

namespace {

std::ifstream open_input(const std::string &path, std::string_view what) {
    if (path.empty()) throw UsageError(std::string(what) + " file is required");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + std::string(what) + " file '" + path + "'");
    return in;
}

Corpus load_plain(const std::string &path) {
    auto in = open_input(path, "input");
    return parse_plain(in);
}

TreeBank load_treebank(const std::string &path, std::string_view what) {
    auto in = open_input(path, what);
    try {
        return parse_treebank(in);
    } catch (const ParseError &e) {
        throw DataError(path + ": " + e.what());
    }
}

fs::path output_dir(const RunConfig &config) {
    return config.output.empty() ? fs::path(".") : config.output;
}

std::string manifest_text(const Manifest &m) {
    std::ostringstream os;
    write_manifest(os, m);
    return os.str();
}

Manifest base_manifest(std::string_view command, const RunConfig &c) {
    Manifest m{{"tool", "abl"}, {"tool_version", kToolVersion}, {"command", std::string(command)}};
    m.emplace_back("alignment", to_string(c.alignment));
    m.emplace_back("selection", to_string(c.selection));
    m.emplace_back("mean", c.selection == SelectionMethod::Incr ? "" : std::string(to_string(c.effective_mean())));
    m.emplace_back("seed", std::to_string(c.seed));
    m.emplace_back("min_length", std::to_string(c.min_length));
    return m;
}

std::string recursion_text(const std::vector<RecursionInstance> &found) {
    std::string text;
    for (const auto &r : found)
        text += std::to_string(r.sid) + '\t' + std::to_string(r.outer.begin) + ':' +
                std::to_string(r.outer.end) + '\t' + std::to_string(r.inner.begin) + ':' +
                std::to_string(r.inner.end) + '\t' + r.type + '\n';
    return text;
}

std::string metrics_kv_text(const MetricsReport &r) {
    std::ostringstream os;
    write_metrics_kv(os, r);
    return os.str();
}

std::string metrics_table_text(const MetricsReport &r) {
    std::ostringstream os;
    write_metrics_table(os, r);
    return os.str();
}

} // namespace

void cmd_learn(const RunConfig &config, std::ostream &out) {
    validate(config);
    Corpus corpus = load_plain(config.input);
    if (corpus.empty()) throw DataError("input corpus '" + config.input + "' has no sentences");
    const auto checksum = corpus_checksum(corpus);

    LearnOptions opts;
    opts.method = config.alignment;
    opts.min_align_length = config.min_length;
    if (config.selection == SelectionMethod::Incr) opts.filter = incr_hook();
    auto result = learn(std::move(corpus), opts);

    std::ostringstream space_text;
    write_space(space_text, result.space);
    const fs::path dir = output_dir(config);
    write_file_atomic(dir / "space.tsv", space_text.str());

    Manifest m = base_manifest("learn", config);
    m.emplace_back("input", config.input);
    m.emplace_back("corpus_checksum", hex64(checksum));
    m.emplace_back("sentences", std::to_string(result.space.sentence_count()));
    m.emplace_back("hypotheses", std::to_string(result.space.total_count()));
    m.emplace_back("types", std::to_string(result.space.live_type_count()));
    m.emplace_back("pairs_aligned", std::to_string(result.stats.pairs_aligned));
    m.emplace_back("capped_pairs", std::to_string(result.stats.capped_pairs.size()));
    write_file_atomic(dir / "learn.manifest", manifest_text(m));

    out << "sentences=" << result.space.sentence_count() << " hypotheses="
        << result.space.total_count() << " types=" << result.space.live_type_count()
        << " pairs_aligned=" << result.stats.pairs_aligned << '\n';
    for (const auto &[a, b] : result.stats.capped_pairs)
        out << "capped_pair=" << a << ',' << b << '\n';
}

void cmd_select(const RunConfig &config, std::ostream &out) {
    validate(config);
    auto in = open_input(config.space, "space");
    HypothesisSpace space = [&] {
        try {
            return read_space(in);
        } catch (const ParseError &e) {
            throw DataError(config.space + ": " + e.what());
        }
    }();
    const std::string checksum = hex64(corpus_checksum(space.corpus()));

    const fs::path learn_manifest = fs::path(config.space).parent_path() / "learn.manifest";
    if (fs::exists(learn_manifest)) {
        std::ifstream mf(learn_manifest);
        const auto expected = manifest_value(read_manifest(mf), "corpus_checksum");
        if (expected && *expected != checksum)
            throw DataError("space file does not match the corpus checksum in " +
                            learn_manifest.string());
    }
    if (!config.input.empty()) {
        const auto expected = hex64(corpus_checksum(load_plain(config.input)));
        if (expected != checksum)
            throw DataError("space file sentences do not match corpus '" + config.input + "'");
    }

    const auto outcome =
        select_corpus(space, config.selection, config.effective_mean(), config.seed);
    const fs::path dir = output_dir(config);
    write_file_atomic(dir / "selected.txt", render_selection(space.corpus(), outcome));
    const auto recursion = recursion_report(outcome);
    write_file_atomic(dir / "recursion.tsv", recursion_text(recursion));

    Manifest m = base_manifest("select", config);
    m.emplace_back("space", config.space);
    m.emplace_back("corpus_checksum", checksum);
    std::size_t chosen = 0;
    for (const auto &s : outcome.sentences) chosen += s.chosen.size();
    m.emplace_back("selected", std::to_string(chosen));
    m.emplace_back("recursion_pairs", std::to_string(recursion.size()));
    write_file_atomic(dir / "select.manifest", manifest_text(m));

    out << "sentences=" << outcome.sentences.size() << " selected=" << chosen
        << " recursion_pairs=" << recursion.size() << '\n';
}

MetricsReport cmd_eval(const RunConfig &config, std::ostream &out) {
    validate(config);
    const TreeBank learned = load_treebank(config.learned, "learned");
    const TreeBank gold = load_treebank(config.gold, "gold");
    MetricsReport report;
    try {
        check_same_sentences(learned, gold);
        report = aggregate({evaluate(span_sets(learned, config.exclude_trivial),
                                     span_sets(gold, config.exclude_trivial))});
    } catch (const SentenceMismatch &e) {
        throw DataError(std::string("sentence mismatch at index ") + std::to_string(e.index()) +
                        ": " + e.what());
    } catch (const MetricError &e) {
        throw DataError(e.what());
    }
    out << metrics_table_text(report);
    if (!config.output.empty()) {
        write_file_atomic(config.output / "metrics.txt", metrics_table_text(report));
        Manifest m{{"tool", "abl"}, {"tool_version", kToolVersion}, {"command", "eval"},
                   {"learned", config.learned}, {"gold", config.gold},
                   {"exclude_trivial", bool_text(config.exclude_trivial)}};
        write_file_atomic(config.output / "metrics.kv", manifest_text(m) + metrics_kv_text(report));
    }
    return report;
}

void cmd_baseline(const RunConfig &config, std::ostream &out) {
    validate(config);
    if (config.gold.empty() == config.input.empty())
        throw UsageError("baseline needs exactly one of --gold or --input");
    std::optional<TreeBank> gold;
    Corpus corpus;
    if (!config.gold.empty()) {
        gold = load_treebank(config.gold, "gold");
        corpus = strip(*gold);
    } else {
        corpus = load_plain(config.input);
    }

    SpanCorpus spans;
    std::string text;
    for (const auto &s : corpus.sentences) {
        auto chain = config.direction == Direction::Right ? right_branching(s.length())
                                                          : left_branching(s.length());
        std::vector<LabelledSpan> brackets;
        for (const auto &sp : chain) brackets.push_back({sp, "0"});
        text += write_brackets(corpus.vocab, s, brackets) + '\n';
        spans.push_back(span_set(chain, s.length(), config.exclude_trivial));
    }
    const fs::path dir = output_dir(config);
    write_file_atomic(dir / "baseline.txt", text);

    Manifest m{{"tool", "abl"}, {"tool_version", kToolVersion}, {"command", "baseline"},
               {"direction", std::string(to_string(config.direction))},
               {"source", config.gold.empty() ? config.input : config.gold},
               {"corpus_checksum", hex64(corpus_checksum(corpus))},
               {"exclude_trivial", bool_text(config.exclude_trivial)}};
    if (gold) {
        MetricsReport report;
        try {
            report = aggregate({evaluate(spans, span_sets(*gold, config.exclude_trivial))});
        } catch (const MetricError &e) {
            throw DataError(e.what());
        }
        out << format_results_row(std::string(to_string(config.direction)) + "-branching", report)
            << '\n';
        write_file_atomic(dir / "metrics.kv", manifest_text(m) + metrics_kv_text(report));
    }
    write_file_atomic(dir / "baseline.manifest", manifest_text(m));
}

MetricsReport cmd_run(const RunConfig &config, std::ostream &out) {
    validate(config);
    const TreeBank gold = load_treebank(config.gold, "gold");
    if (gold.entries.empty()) throw DataError("gold treebank '" + config.gold + "' is empty");
    const Corpus corpus = strip(gold);
    const SpanCorpus gold_spans = span_sets(gold, config.exclude_trivial);
    const fs::path dir = output_dir(config);
    const bool reorder = config.shuffle && config.selection == SelectionMethod::Incr;

    std::vector<MetricValues> trials;
    std::string capped;
    for (std::size_t t = 0; t < config.trials; ++t) {
        const std::uint64_t trial_seed = derive_seed(config.seed, t);
        std::vector<std::size_t> order(corpus.size());
        std::iota(order.begin(), order.end(), 0);
        if (reorder) order = shuffled_order(corpus.size(), derive_seed(trial_seed, 1));

        Corpus permuted;
        permuted.vocab = corpus.vocab;
        for (std::size_t k = 0; k < order.size(); ++k) {
            Sentence s = corpus.sentences[order[k]];
            s.sid = k;
            permuted.sentences.push_back(std::move(s));
        }
        LearnStats stats;
        const auto outcome = learn_and_select(permuted, config, derive_seed(trial_seed, 2), &stats);
        if (!stats.capped_pairs.empty())
            capped += "trial " + std::to_string(t) + ": " + std::to_string(stats.capped_pairs.size()) +
                      " capped pairs\n";

        // Back to gold order.
        SelectionOutcome restored;
        restored.seed = outcome.seed;
        restored.sentences.resize(corpus.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            SentenceSelection sel = outcome.sentences[k];
            sel.sid = order[k];
            for (auto &h : sel.chosen) h.sid = order[k];
            restored.sentences[order[k]] = std::move(sel);
        }
        char name[32];
        std::snprintf(name, sizeof name, "trial-%02zu.txt", t);
        write_file_atomic(dir / name, render_selection(corpus, restored));
        try {
            trials.push_back(evaluate(span_sets(restored, corpus, config.exclude_trivial), gold_spans));
        } catch (const MetricError &e) {
            throw DataError(e.what());
        }
    }
    const auto report = aggregate(trials);
    const std::string row = format_results_row(system_name(config), report);
    out << row << '\n';
    if (!capped.empty()) out << capped;

    Manifest m = base_manifest("run", config);
    m.emplace_back("trials", std::to_string(config.trials));
    m.emplace_back("shuffle", bool_text(config.shuffle));
    m.emplace_back("exclude_trivial", bool_text(config.exclude_trivial));
    m.emplace_back("gold", config.gold);
    m.emplace_back("gold_checksum", hex64(corpus_checksum(corpus)));
    write_file_atomic(dir / "run.manifest", manifest_text(m));
    write_file_atomic(dir / "summary.txt", row + '\n' + metrics_table_text(report));
    write_file_atomic(dir / "metrics.kv", metrics_kv_text(report));
    return report;
}

} // namespace abl
