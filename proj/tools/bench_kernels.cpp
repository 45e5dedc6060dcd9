// Benchmark of the power-set and batch evaluation kernels: serial reference
// versus the OpenMP variant, with a result equality check.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "idealkit/constructions.hpp"
#include "idealkit/kernels.hpp"

using namespace idealkit;

namespace {

template <class F>
double timed(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

int main(int argc, char** argv) {
  int nthreads = 4;
  Nat support_size = 14;
  std::size_t batch = 20000;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--threads" && i + 1 < argc) nthreads = std::atoi(argv[++i]);
    if (arg == "--support" && i + 1 < argc)
      support_size = static_cast<Nat>(std::atoi(argv[++i]));
    if (arg == "--batch" && i + 1 < argc)
      batch = static_cast<std::size_t>(std::atoll(argv[++i]));
  }

  const Nat window = 64;
  std::vector<ExprPtr> measures;
  std::uint64_t state = 42;
  for (int i = 0; i < 5; ++i) {
    std::vector<std::pair<Nat, Rat>> w;
    for (Nat p = 0; p < 32; ++p)
      if (splitmix64(state) % 2 == 0) w.emplace_back(p, Rat(1 + splitmix64(state) % 64, 64));
    if (w.empty()) w.emplace_back(0, Rat(1, 2));
    measures.push_back(SubmeasureExpr::measure_nat(std::move(w), window));
  }
  ExprPtr expr = SubmeasureExpr::sup(std::move(measures));
  AnySet support = NatSet::interval(0, support_size);

  std::vector<QValue> serial, parallel;
  double t_serial = timed([&] { serial = subset_values_serial(expr, support); });
  set_threads(nthreads);
  double t_parallel = timed([&] { parallel = subset_values_parallel(expr, support); });
  bool same = serial.size() == parallel.size();
  for (std::size_t i = 0; same && i < serial.size(); ++i)
    same = serial[i] == parallel[i];

  std::printf("subset-values  n=%u  serial %.4fs  omp(%d) %.4fs  speedup %.2fx  %s\n",
              support_size, t_serial, nthreads, t_parallel,
              t_parallel > 0 ? t_serial / t_parallel : 0.0,
              same ? "identical" : "MISMATCH");

  std::vector<AnySet> targets;
  for (std::size_t i = 0; i < batch; ++i) {
    std::vector<Nat> pts;
    for (Nat p = 0; p < 32; ++p)
      if (splitmix64(state) % 3 == 0) pts.push_back(p);
    targets.push_back(NatSet(std::move(pts)));
  }
  std::vector<QValue> bs, bp;
  double tb_serial = timed([&] { bs = batch_eval_serial(expr, targets); });
  double tb_parallel = timed([&] { bp = batch_eval_parallel(expr, targets); });
  bool bsame = bs.size() == bp.size();
  for (std::size_t i = 0; bsame && i < bs.size(); ++i) bsame = bs[i] == bp[i];

  std::printf("batch-eval     k=%zu  serial %.4fs  omp(%d) %.4fs  speedup %.2fx  %s\n",
              batch, tb_serial, nthreads, tb_parallel,
              tb_parallel > 0 ? tb_serial / tb_parallel : 0.0,
              bsame ? "identical" : "MISMATCH");
  return same && bsame ? 0 : 1;
}
