#ifndef IDEALKIT_SIMPLEX_HPP
#define IDEALKIT_SIMPLEX_HPP

#include <cmath>
#include <utility>
#include <vector>

namespace idealkit {

/// Dense two-phase simplex for max c'x s.t. Ax <= b, x >= 0, in the compact
/// codebook layout: D is (m+2) x (n+2) with basis/nonbasis index arrays.
/// Ties break on the variable index, so runs are deterministic.
class SimplexSolver {
public:
  enum class Status { Optimal, Infeasible, Unbounded };

  SimplexSolver(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                const std::vector<double>& c)
      : m_(b.size()), n_(c.size()), nonbasic_(n_ + 1), basic_(m_),
        tableau_(m_ + 2, std::vector<double>(n_ + 2)) {
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) tableau_[i][j] = a[i][j];
    for (std::size_t i = 0; i < m_; ++i) {
      basic_[i] = static_cast<int>(n_ + i);
      tableau_[i][n_] = -1;
      tableau_[i][n_ + 1] = b[i];
    }
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasic_[j] = static_cast<int>(j);
      tableau_[m_][j] = -c[j];
    }
    nonbasic_[n_] = -1;
    tableau_[m_ + 1][n_] = 1;
  }

  Status solve(std::vector<double>& x, double& value) {
    std::size_t r = 0;
    for (std::size_t i = 1; i < m_; ++i)
      if (tableau_[i][n_ + 1] < tableau_[r][n_ + 1]) r = i;
    if (m_ > 0 && tableau_[r][n_ + 1] < -eps_) {
      pivot(r, n_);
      if (!run_phase(2) || tableau_[m_ + 1][n_ + 1] < -eps_) return Status::Infeasible;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basic_[i] != -1) continue;
        std::size_t s = 0;
        for (std::size_t j = 1; j <= n_; ++j)
          if (pick(tableau_[i][j], nonbasic_[j], tableau_[i][s], nonbasic_[s])) s = j;
        pivot(i, s);
      }
    }
    bool bounded = run_phase(1);
    x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basic_[i] >= 0 && basic_[i] < static_cast<int>(n_))
        x[static_cast<std::size_t>(basic_[i])] = tableau_[i][n_ + 1];
    value = tableau_[m_][n_ + 1];
    return bounded ? Status::Optimal : Status::Unbounded;
  }

private:
  static bool pick(double va, int ia, double vb, int ib) {
    return std::make_pair(va, ia) < std::make_pair(vb, ib);
  }

  void pivot(std::size_t r, std::size_t s) {
    double* a = tableau_[r].data();
    double inv = 1.0 / a[s];
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i != r && std::fabs(tableau_[i][s]) > eps_) {
        double* b = tableau_[i].data();
        double inv2 = b[s] * inv;
        for (std::size_t j = 0; j < n_ + 2; ++j) b[j] -= a[j] * inv2;
        b[s] = a[s] * inv2;
      }
    }
    for (std::size_t j = 0; j < n_ + 2; ++j)
      if (j != s) tableau_[r][j] *= inv;
    for (std::size_t i = 0; i < m_ + 2; ++i)
      if (i != r) tableau_[i][s] *= -inv;
    tableau_[r][s] = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  bool run_phase(int phase) {
    std::size_t obj = m_ + static_cast<std::size_t>(phase) - 1;
    while (true) {
      std::size_t s = n_ + 1;
      for (std::size_t j = 0; j < n_ + 1; ++j) {
        if (nonbasic_[j] == -phase) continue;
        if (s == n_ + 1 ||
            pick(tableau_[obj][j], nonbasic_[j], tableau_[obj][s], nonbasic_[s]))
          s = j;
      }
      if (tableau_[obj][s] >= -eps_) return true;
      std::size_t r = m_;
      for (std::size_t i = 0; i < m_; ++i) {
        if (tableau_[i][s] <= eps_) continue;
        if (r == m_ ||
            pick(tableau_[i][n_ + 1] / tableau_[i][s], basic_[i],
                 tableau_[r][n_ + 1] / tableau_[r][s], basic_[r]))
          r = i;
      }
      if (r == m_) return false;  // unbounded
      pivot(r, s);
    }
  }

  static constexpr double eps_ = 1e-11;
  std::size_t m_, n_;
  std::vector<int> nonbasic_, basic_;
  std::vector<std::vector<double>> tableau_;
};

}  // namespace idealkit

#endif
