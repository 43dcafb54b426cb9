#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "emdash/attribution.hpp"
#include "emdash/dashcontext.hpp"
#include "emdash/harness.hpp"
#include "emdash/mdfeatures.hpp"
#include "emdash/suppression.hpp"
#include "emdash/textmetrics.hpp"

namespace {

// Roughly `words` words of essay-like markdown with dashes and bold text.
std::string corpus_text(std::size_t words) {
    emdash::MockClient mock(8.0, 5.0, 1);
    return mock.compose(emdash::build_prompt("bench", emdash::Condition::unconstrained,
                                             static_cast<int>(words)),
                        0);
}

void BM_CountWords(benchmark::State& state) {
    const auto text = corpus_text(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(emdash::count_words(text));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_CountWords)->Arg(1000)->Arg(100000);

void BM_CountDashes(benchmark::State& state) {
    const auto text = corpus_text(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(emdash::count_dashes(text));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_CountDashes)->Arg(1000)->Arg(100000);

void BM_DetectFeatures(benchmark::State& state) {
    const auto text = corpus_text(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(emdash::detect_features(text));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_DetectFeatures)->Arg(1000)->Arg(100000);

void BM_ScanContexts(benchmark::State& state) {
    const auto text = "---\ntitle: bench\n---\n" + corpus_text(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(emdash::summarize(emdash::scan(text)));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ScanContexts)->Arg(1000)->Arg(100000);

void BM_Attribute(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> rate(0.0, 12.0);
    const emdash::AttributionQuery q{rate(rng), rate(rng), rate(rng), 0.0};
    const auto& profiles = emdash::builtin_profiles();
    const auto scaling = emdash::FeatureScaling::fit(profiles);
    for (auto _ : state) benchmark::DoNotOptimize(emdash::attribute(q, profiles, scaling));
}
BENCHMARK(BM_Attribute);

}  // namespace
BENCHMARK_MAIN();
