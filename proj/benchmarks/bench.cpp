#include <benchmark/benchmark.h>

#include <random>

#include "symr/bpe.hpp"
#include "symr/graph.hpp"
#include "symr/net.hpp"
#include "symr/pianoroll.hpp"
#include "symr/synth.hpp"
#include "symr/tokenizer.hpp"

using namespace symr;

namespace {

PieceDoc fixture(int notes) {
    std::mt19937_64 rng(1234);
    return random_performance(rng, notes);
}

void BM_BuildRoll(benchmark::State& state) {
    PieceDoc d = fixture(static_cast<int>(state.range(0)));
    MatrixConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(build_roll(d, 0.0, cfg));
}
BENCHMARK(BM_BuildRoll)->Arg(50)->Arg(200);

void BM_Tokenize(benchmark::State& state) {
    PieceDoc d = fixture(static_cast<int>(state.range(0)));
    auto vocab = build_vocabulary(Scheme::MIDILike, Modality::performance,
                                  QuantSpec::defaults());
    for (auto _ : state)
        benchmark::DoNotOptimize(tokenize(d, Scheme::MIDILike, vocab));
}
BENCHMARK(BM_Tokenize)->Arg(50)->Arg(200);

void BM_BuildGraph(benchmark::State& state) {
    PieceDoc d = fixture(static_cast<int>(state.range(0)));
    GraphConfig cfg;
    cfg.include_silence_edges = true;
    cfg.inverse_edges = true;
    for (auto _ : state)
        benchmark::DoNotOptimize(build_graph(d, 0.0, 60.0, cfg));
}
BENCHMARK(BM_BuildGraph)->Arg(50)->Arg(200);

void BM_BpeApply(benchmark::State& state) {
    std::mt19937_64 rng(99);
    auto vocab = build_vocabulary(Scheme::MIDILike, Modality::performance,
                                  QuantSpec::defaults());
    std::vector<TokenSequence> corpus;
    for (int i = 0; i < 40; ++i)
        corpus.push_back(
            tokenize(random_performance(rng, 150), Scheme::MIDILike, vocab));
    auto model = bpe_train(corpus, vocab.size(), 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(bpe_apply(corpus[0], model));
}
BENCHMARK(BM_BpeApply);

void BM_EncodeWindow(benchmark::State& state) {
    PieceDoc d = fixture(static_cast<int>(state.range(0)));
    GraphConfig gc;
    gc.include_silence_edges = true;
    auto in = net::graph_input(build_graph(d, 0.0, 60.0, gc), false);
    net::ModelConfig cfg;
    auto params = net::Parameters::init(cfg, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(net::encode_window(in, params, cfg));
}
BENCHMARK(BM_EncodeWindow)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
