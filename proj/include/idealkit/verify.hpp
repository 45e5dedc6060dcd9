#ifndef IDEALKIT_VERIFY_HPP
#define IDEALKIT_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace idealkit {

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
};

/// The bundled verification suite: blockwise counting counterexample
/// certificates, the capped counting example, the envelope batteries, and
/// the support-normalization battery. Output is deterministic for a fixed
/// seed and independent of the thread count.
std::vector<CheckLine> run_verification_suite(const VerifyOptions& options);

bool all_pass(const std::vector<CheckLine>& checks);

}  // namespace idealkit

#endif
