#include <benchmark/benchmark.h>

#include <cstddef>
#include <memory>
#include <string>

#include "residuum/checker.hpp"
#include "residuum/dfa.hpp"
#include "residuum/enumerate.hpp"
#include "residuum/parser.hpp"
#include "residuum/registry.hpp"
#include "residuum/resolve.hpp"
#include "residuum/trace.hpp"

namespace {

using namespace residuum;

void finiteOp(benchmark::State& state, const char* key, bool useResidual) {
  auto sys = makeSystem(key);
  auto carrier = *sys->carrier();
  std::size_t i = 0;
  for (auto _ : state) {
    const Effect& a = carrier[i % carrier.size()];
    const Effect& b = carrier[(i * 7 + 3) % carrier.size()];
    if (useResidual)
      benchmark::DoNotOptimize(sys->residual(a, b));
    else
      benchmark::DoNotOptimize(sys->seq(a, b));
    ++i;
  }
}

void sequencing(benchmark::State& state) {
  finiteOp(state, "atomicity", false);
}
BENCHMARK(sequencing);

void residual(benchmark::State& state) {
  finiteOp(state, "reentrancy", true);
}
BENCHMARK(residual);

void traceResidual(benchmark::State& state) {
  TraceSystem ts({"a", "b"}, "trace:a,b");
  Effect x = *ts.parseLiteral("re\"(a|b)*a\"");
  Effect y = *ts.parseLiteral("re\"a(a|b)*(ab)+\"");
  for (auto _ : state) benchmark::DoNotOptimize(ts.residual(x, y));
}
BENCHMARK(traceResidual);

constexpr const char* kProgram = R"(
fn begin_tx() -> unit @effect(locking) {
    perform begin;
}

fn end_tx() -> unit @effect(unlocking) {
    perform end;
}

fn work() -> unit @effect(critical) {
    perform inside;
    perform inside;
}

fn run() -> unit @effect(entrant) {
    begin_tx();
    while (true) {
        work();
    }
    work();
    end_tx();
}
)";

void checkPipeline(benchmark::State& state) {
  auto sys = makeSystem("reentrancy");
  CheckOptions opts;
  opts.early = state.range(0) != 0;
  for (auto _ : state) {
    ParseResult parsed = parseSource(kProgram, "<bench>", sys->id());
    ResolvedModule resolved = resolveModule(parsed.module, sys);
    CheckResult result = checkModule(parsed.module, resolved, sys, opts);
    benchmark::DoNotOptimize(result.diags.size());
  }
}
BENCHMARK(checkPipeline)->Arg(0)->Arg(1);

void exhaustiveVerification(benchmark::State& state) {
  auto sys = makeSystem("atomicity");
  VerifyOptions opts;
  opts.maxNodes = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    VerifyReport rep = runVerification(sys, opts);
    benchmark::DoNotOptimize(rep.programs);
  }
}
BENCHMARK(exhaustiveVerification)->Arg(3)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
