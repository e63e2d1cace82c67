// Pointwise kernels on the worked example, parallel against serial.
#include <benchmark/benchmark.h>

#include "tfl/cli/problem.hpp"
#include "tfl/cond/conditions.hpp"
#include "tfl/par/pointwise.hpp"

using namespace tfl;

namespace {

struct Setup {
    lift::LiftedSystem ls;
    cond::FlagData fd;
    std::vector<sym::Point> pts;
};

const Setup& setup() {
    static const Setup s = [] {
        auto p = cli::load_problem(std::string(TFL_FIXTURE_DIR) + "/paper-sec5.tfl");
        auto ls = lift::lift_system(p.sys);
        auto fd = cond::flag_data(ls);
        auto pts = cond::sample_on_L(ls, 256, 0.3, 7);
        return Setup{std::move(ls), std::move(fd), std::move(pts)};
    }();
    return s;
}

par::Mode mode_of(const benchmark::State& st) { return st.range(1) ? par::Mode::Parallel : par::Mode::Serial; }

std::vector<sym::Point> first(std::size_t n) {
    const auto& p = setup().pts;
    return {p.begin(), p.begin() + static_cast<std::ptrdiff_t>(std::min(n, p.size()))};
}

void BM_EvaluateAll(benchmark::State& st) {
    const auto& s = setup();
    const auto pts = first(static_cast<std::size_t>(st.range(0)));
    const auto& I = s.fd.closure[0];
    for (auto _ : st) benchmark::DoNotOptimize(par::evaluate_all(I.generators(), s.ls.vs.dim(), pts, mode_of(st)));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(pts.size()));
}

void BM_Ranks(benchmark::State& st) {
    const auto& s = setup();
    const auto pts = first(static_cast<std::size_t>(st.range(0)));
    const auto ms = par::evaluate_all(s.fd.closure[0].generators(), s.ls.vs.dim(), pts, par::Mode::Serial);
    for (auto _ : st) benchmark::DoNotOptimize(par::ranks(ms, mode_of(st)));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(ms.size()));
}

void BM_DimTable(benchmark::State& st) {
    const auto& s = setup();
    const auto pts = first(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(cond::dim_table(s.ls, s.fd, pts, mode_of(st)));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(pts.size()));
}

} // namespace

BENCHMARK(BM_EvaluateAll)->ArgsProduct({{16, 256}, {0, 1}})->ArgNames({"points", "parallel"});
BENCHMARK(BM_Ranks)->ArgsProduct({{16, 256}, {0, 1}})->ArgNames({"points", "parallel"});
BENCHMARK(BM_DimTable)->ArgsProduct({{8, 64}, {0, 1}})->ArgNames({"points", "parallel"});

BENCHMARK_MAIN();
