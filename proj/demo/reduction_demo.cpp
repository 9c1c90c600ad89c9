// Product Partition instances decided through phase retrieval: the exact
// oracle always succeeds, iterative solvers typically do not.

#include <cstdio>
#include <vector>

#include "fprlab/fprlab.hpp"

using namespace fprlab;

namespace {

void show(const std::vector<std::int64_t>& u) {
  const PPInstance pp(u);
  std::printf("u =");
  for (const auto v : u) std::printf(" %lld", static_cast<long long>(v));
  const auto hard = construct_hard_instance(pp);
  std::printf("\n  x(0) = %s, r(N-1) = %s\n", hard.anchor_exact.str().c_str(), hard.scale_exact.str().c_str());

  const auto truth = brute_force_pp(pp);
  std::printf("  brute force: %s\n", to_string(truth.answer));
  if (truth.witness) {
    const auto x = ground_truth_signal(pp, *truth.witness);
    std::printf("  ground truth signal:");
    for (const auto& v : x.entries) std::printf(" %s", v.str().c_str());
    std::printf("\n");
  }

  const auto t = decide_pp_traced(pp, oracle_solve);
  for (std::size_t i = 0; i < t.rounds.size(); ++i) {
    std::printf("  round %zu:", i + 1);
    for (std::size_t j = 0; j < t.rounds[i].results.size(); ++j) {
      std::printf(" k=%zu:%s", t.rounds[i].indices[j], to_string(t.rounds[i].results[j].verdict));
    }
    std::printf("\n");
  }
  std::printf("  oracle reduction: %s", to_string(t.decision.answer));
  if (t.decision.witness) {
    std::printf(", Gamma = {");
    for (std::size_t i = 0; i < t.decision.witness->size(); ++i) std::printf("%s%zu", i ? "," : "", (*t.decision.witness)[i]);
    std::printf("}");
  }
  std::printf("\n");

  for (const char* name : {"er", "hio"}) {
    DecideOptions opts;
    opts.solver.seed = 1;
    const auto d = decide_pp(pp, solver_by_name(name), opts);
    std::printf("  %-3s reduction: %s\n", name, to_string(d.answer));
  }
  std::printf("\n");
}

}  // namespace

int main() {
  show({2, 3, 6});
  show({2, 3, 5});
  show({2, 2, 3, 3});
  show({3, 4, 5, 2, 6, 5});
}
