#include "dqw/gluing.hpp"
#include "dqw/random.hpp"
#include "dqw/star.hpp"

#include <benchmark/benchmark.h>

using namespace dqw;

namespace {

std::vector<PolyTriple> triples(int count, int d, int order) {
    RandomSource rs(7);
    std::vector<PolyTriple> out;
    for (int k = 0; k < count; ++k)
        out.push_back({rs.poly_x(d, order, 3, 4), rs.poly_x(d, order, 3, 4), rs.poly_x(d, order, 3, 4)});
    return out;
}

std::vector<GlueJob> glue_jobs(int count, int d, int order) {
    RandomSource rs(11);
    std::vector<GlueJob> out;
    for (int k = 0; k < count; ++k) {
        std::vector<Rational> x;
        for (int i = 0; i < d; ++i) x.push_back(rs.rational());
        out.push_back({rs.poly_x(d, order, 3, 4), rs.poly_x(d, order, 3, 4), x});
    }
    return out;
}

Exec mode(const benchmark::State& st) { return st.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_moyal(benchmark::State& st) {
    auto jobs = triples(32, 3, 4);
    RandomSource rs(3);
    PoissonTensor a = rs.tensor(3);
    for (auto _ : st) benchmark::DoNotOptimize(moyal_batch(jobs, a, 4, mode(st)));
}

void BM_associativity(benchmark::State& st) {
    auto jobs = triples(16, 3, 3);
    RandomSource rs(5);
    PoissonTensor a = rs.tensor(3);
    for (auto _ : st) benchmark::DoNotOptimize(associativity_batch(jobs, a, 3, mode(st)));
}

void BM_gluing(benchmark::State& st) {
    auto jobs = glue_jobs(8, 2, 3);
    PoissonTensor a = PoissonTensor::standard(2);
    for (auto _ : st) benchmark::DoNotOptimize(gluing_batch(jobs, a, 3, mode(st)));
}

}  // namespace

// arg 0: serial reference, 1: OpenMP
BENCHMARK(BM_moyal)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_associativity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gluing)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
