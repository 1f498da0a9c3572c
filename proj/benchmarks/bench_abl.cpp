#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "abl/alignment.hpp"
#include "abl/hypothesis.hpp"
#include "abl/random.hpp"
#include "abl/selection.hpp"

namespace {

// Sentences over a small vocabulary so that pairs share many words.
abl::Corpus synthetic_corpus(std::size_t sentences, std::size_t max_len, std::size_t vocab,
                             std::uint64_t seed) {
    abl::Rng rng(seed);
    std::vector<std::string> words;
    for (std::size_t i = 0; i < vocab; ++i) words.push_back("w" + std::to_string(i));
    abl::Corpus corpus;
    for (std::size_t s = 0; s < sentences; ++s) {
        const std::size_t len = 2 + rng.below(max_len - 1);
        std::vector<std::string_view> line;
        for (std::size_t k = 0; k < len; ++k) line.push_back(words[rng.below(vocab)]);
        corpus.add(line);
    }
    return corpus;
}

void BM_EditDistance(benchmark::State &state) {
    const auto corpus = synthetic_corpus(2, static_cast<std::size_t>(state.range(0)), 20, 7);
    const auto method = state.range(1) ? abl::AlignmentMethod::Biased : abl::AlignmentMethod::Default;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            abl::edit_distance_align(corpus.sentences[0], corpus.sentences[1], method));
}
BENCHMARK(BM_EditDistance)->ArgsProduct({{8, 16, 32, 64}, {0, 1}});

void BM_AllAlignments(benchmark::State &state) {
    const auto corpus = synthetic_corpus(2, static_cast<std::size_t>(state.range(0)), 6, 11);
    for (auto _ : state)
        benchmark::DoNotOptimize(abl::all_alignments(corpus.sentences[0], corpus.sentences[1]));
}
BENCHMARK(BM_AllAlignments)->Arg(8)->Arg(16)->Arg(24);

void BM_Learn(benchmark::State &state) {
    const auto corpus = synthetic_corpus(static_cast<std::size_t>(state.range(0)), 12, 30, 3);
    abl::LearnOptions opts;
    opts.method = static_cast<abl::AlignmentMethod>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(abl::learn(corpus, opts));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Learn)->ArgsProduct({{50, 100, 200}, {0, 1, 2}})->Unit(benchmark::kMillisecond);

void BM_SelectCorpus(benchmark::State &state) {
    const auto corpus = synthetic_corpus(static_cast<std::size_t>(state.range(0)), 12, 30, 5);
    abl::LearnOptions opts;
    const auto space = abl::learn(corpus, opts).space;
    for (auto _ : state)
        benchmark::DoNotOptimize(abl::select_corpus(space, abl::SelectionMethod::Branch,
                                                    abl::MeanVariant::GeoPlus, 42));
}
BENCHMARK(BM_SelectCorpus)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
