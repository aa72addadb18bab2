#pragma once

// Dense bounded-variable primal simplex.
//
//   maximize  c.x   subject to  A x = b,  lo <= x <= hi
//
// Bounds may be infinite. Pricing is Dantzig's largest reduced cost; after a
// run of degenerate pivots it falls back to Bland's rule (lowest-index
// entering column, lowest-index leaving variable among ratio-test ties), which
// rules out cycling. No randomness: identical inputs give bit-identical output.
// The basis is refactored periodically and before optimality is declared.
// Sizes are desk scale: a full tableau of rows x (columns + artificials) is
// kept in memory.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "resil/error.hpp"

namespace resil::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<double> objective;  ///< maximized
  std::vector<double> matrix;     ///< row-major, rows() x num_vars
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;

  explicit LinearProgram(std::size_t vars = 0)
      : num_vars(vars), objective(vars, 0.0), lower(vars, 0.0), upper(vars, kInf) {}

  std::size_t rows() const { return rhs.size(); }

  /// Appends a zero row and returns its index.
  std::size_t add_row(double b) {
    rhs.push_back(b);
    matrix.resize(matrix.size() + num_vars, 0.0);
    return rhs.size() - 1;
  }

  double& at(std::size_t row, std::size_t col) { return matrix[row * num_vars + col]; }
  double at(std::size_t row, std::size_t col) const { return matrix[row * num_vars + col]; }

  void validate() const {
    require(objective.size() == num_vars && lower.size() == num_vars && upper.size() == num_vars,
            Errc::dimension_mismatch, "LP vector sizes disagree with num_vars");
    require(matrix.size() == rows() * num_vars, Errc::dimension_mismatch,
            "LP matrix size disagrees with rows x num_vars");
    for (double b : rhs) require(std::isfinite(b), Errc::invalid_argument, "LP rhs must be finite");
    for (std::size_t j = 0; j < num_vars; ++j)
      require(lower[j] <= upper[j] && lower[j] < kInf && upper[j] > -kInf,
              Errc::invalid_argument, "LP bounds are inconsistent for column " + std::to_string(j));
  }
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration-limit";
  }
  return "unknown";
}

struct Result {
  Status status = Status::infeasible;
  double value = 0.0;
  std::vector<double> point;
  std::size_t iterations = 0;
  double residual = 0.0;  ///< max_i |A_i x - b_i| recomputed from `point`
};

struct Options {
  double tol = 1e-9;           ///< reduced-cost / feasibility tolerance
  double pivot_tol = 1e-9;     ///< smallest admissible pivot magnitude
  std::size_t max_iterations = 20'000'000;
};

inline double max_residual(const LinearProgram& lp, const std::vector<double>& x) {
  double worst = 0.0;
  for (std::size_t i = 0; i < lp.rows(); ++i) {
    double s = -lp.rhs[i];
    for (std::size_t j = 0; j < lp.num_vars; ++j) s += lp.at(i, j) * x[j];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

namespace detail {

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const Options& opt) : lp_(lp), opt_(opt), m_(lp.rows()) {
    const std::size_t n = lp.num_vars;
    lo_ = lp.lower;
    hi_ = lp.upper;
    x_.resize(n);
    for (std::size_t j = 0; j < n; ++j) x_[j] = resting_value(j);

    // Residual of the rows with every structural column at rest.
    std::vector<double> r(lp.rhs);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n; ++j) r[i] -= lp.at(i, j) * x_[j];

    // Crash basis: singleton columns that can absorb a row's residual.
    std::vector<int> nnz(n, 0);
    std::vector<std::size_t> nz_row(n, 0);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (lp.at(i, j) != 0.0) {
          ++nnz[j];
          nz_row[j] = i;
        }
    basis_.assign(m_, kNone);
    for (std::size_t j = 0; j < n; ++j) {
      if (nnz[j] != 1) continue;
      const std::size_t i = nz_row[j];
      if (basis_[i] != kNone) continue;
      const double v = x_[j] + r[i] / lp.at(i, j);
      if (v < lo_[j] - opt_.tol || v > hi_[j] + opt_.tol) continue;
      basis_[i] = j;
    }
    std::vector<double> art_sign;
    std::vector<std::size_t> art_row;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] != kNone) continue;
      basis_[i] = n + art_sign.size();
      art_sign.push_back(r[i] >= 0.0 ? 1.0 : -1.0);
      art_row.push_back(i);
    }
    num_art_ = art_sign.size();
    cols_ = n + num_art_;
    stride_ = cols_ + 1;  // last column holds B^-1 b
    lo_.resize(cols_, 0.0);
    hi_.resize(cols_, kInf);
    x_.resize(cols_, 0.0);

    orig_.assign(m_ * stride_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      double* row = &orig_[i * stride_];
      for (std::size_t j = 0; j < n; ++j) row[j] = lp.at(i, j);
      row[cols_] = lp.rhs[i];
    }
    for (std::size_t a = 0; a < num_art_; ++a) orig_[art_row[a] * stride_ + n + a] = art_sign[a];
    // The starting basis is diagonal: scale each row by its basic entry.
    t_ = orig_;
    for (std::size_t i = 0; i < m_; ++i) {
      double* row = &t_[i * stride_];
      const double p = row[basis_[i]];
      for (std::size_t j = 0; j < stride_; ++j) row[j] /= p;
    }
    is_basic_.assign(cols_, false);
    for (std::size_t i = 0; i < m_; ++i) is_basic_[basis_[i]] = true;
    for (std::size_t j = 0; j < n; ++j)
      if (is_basic_[j]) x_[j] = 0.0;
    refresh_basic_values();
  }

  std::size_t num_artificials() const { return num_art_; }

  Status run_phase(const std::vector<double>& cost, std::size_t& iterations) {
    cost_ = cost;
    compute_reduced_costs();
    std::size_t since_reinvert = 0;
    std::size_t degenerate_run = 0;
    while (true) {
      if (iterations >= opt_.max_iterations) return Status::iteration_limit;
      const bool bland = degenerate_run >= kDegenerateSwitch;
      auto [enter, dir] = choose_entering(bland);
      if (enter == kNone) {
        // Confirm optimality on a freshly factored tableau.
        if (since_reinvert == 0) return Status::optimal;
        reinvert();
        since_reinvert = 0;
        std::tie(enter, dir) = choose_entering(bland);
        if (enter == kNone) return Status::optimal;
      }
      ++iterations;

      const double flip = hi_[enter] - lo_[enter];
      double row_theta = kInf;
      std::size_t leave_row = kNone;
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = t_[i * stride_ + enter];
        if (std::abs(a) <= opt_.pivot_tol) continue;
        const std::size_t b = basis_[i];
        const double rate = -dir * a;
        double limit;
        if (rate < 0.0) {
          if (lo_[b] == -kInf) continue;
          limit = (x_[b] - lo_[b]) / -rate;
        } else {
          if (hi_[b] == kInf) continue;
          limit = (hi_[b] - x_[b]) / rate;
        }
        limit = std::max(limit, 0.0);
        const bool strictly_better = leave_row == kNone || limit < row_theta - kTie;
        bool tie_wins = false;
        if (!strictly_better && limit <= row_theta + kTie)
          tie_wins = bland ? b < basis_[leave_row]
                           : std::abs(a) > std::abs(t_[leave_row * stride_ + enter]);
        if (strictly_better || tie_wins) {
          row_theta = strictly_better ? limit : std::min(row_theta, limit);
          leave_row = i;
        }
      }
      if (flip <= row_theta) leave_row = kNone;
      const double theta = std::min(flip, row_theta);
      if (theta == kInf) return Status::unbounded;
      degenerate_run = theta <= kTie ? degenerate_run + 1 : 0;

      const double step = dir * theta;
      x_[enter] += step;
      for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] -= step * t_[i * stride_ + enter];

      if (leave_row == kNone) {
        x_[enter] = dir > 0 ? hi_[enter] : lo_[enter];
        continue;
      }
      const std::size_t leave = basis_[leave_row];
      const double rate = -dir * t_[leave_row * stride_ + enter];
      x_[leave] = rate < 0.0 ? lo_[leave] : hi_[leave];
      pivot(leave_row, enter);
      if (++since_reinvert == kReinvertEvery) {
        reinvert();
        since_reinvert = 0;
      }
    }
  }

  /// Freezes artificials at zero for phase two.
  void retire_artificials() {
    for (std::size_t j = lp_.num_vars; j < cols_; ++j) {
      hi_[j] = 0.0;
      if (!is_basic_[j]) x_[j] = 0.0;
    }
    refresh_basic_values();
  }

  double artificial_sum() const {
    double s = 0.0;
    for (std::size_t j = lp_.num_vars; j < cols_; ++j) s += x_[j];
    return s;
  }

  std::vector<double> structural_point() {
    refresh_basic_values();
    std::vector<double> out(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(lp_.num_vars));
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::clamp(out[j], lp_.lower[j], lp_.upper[j]);
    return out;
  }

  std::size_t columns() const { return cols_; }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  static constexpr double kTie = 1e-12;
  static constexpr std::size_t kDegenerateSwitch = 500;
  static constexpr std::size_t kReinvertEvery = 500;

  double resting_value(std::size_t j) const {
    if (lo_[j] > -kInf) return lo_[j];
    if (hi_[j] < kInf) return hi_[j];
    return 0.0;
  }

  /// Dantzig pricing (largest |reduced cost|, lowest index on ties); after a
  /// run of degenerate pivots, Bland's lowest-index rule until progress resumes.
  std::pair<std::size_t, double> choose_entering(bool bland) const {
    std::size_t enter = kNone;
    double dir = 0.0;
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (is_basic_[j]) continue;
      double score = 0.0;
      double this_dir = 0.0;
      if (d_[j] > opt_.tol && x_[j] < hi_[j]) {
        score = d_[j];
        this_dir = 1.0;
      } else if (d_[j] < -opt_.tol && x_[j] > lo_[j]) {
        score = -d_[j];
        this_dir = -1.0;
      } else {
        continue;
      }
      if (bland) return {j, this_dir};
      if (score > best) {
        best = score;
        enter = j;
        dir = this_dir;
      }
    }
    return {enter, dir};
  }

  void compute_reduced_costs() {
    d_.assign(cols_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) d_[j] = cost_[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &t_[i * stride_];
      for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * row[j];
    }
    for (std::size_t i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
  }

  void refresh_basic_values() {
    for (std::size_t i = 0; i < m_; ++i) {
      const double* row = &t_[i * stride_];
      double v = row[cols_];
      for (std::size_t j = 0; j < cols_; ++j)
        if (!is_basic_[j] && x_[j] != 0.0) v -= row[j] * x_[j];
      x_[basis_[i]] = v;
    }
  }

  /// Rebuilds B^-1 [A | b] from the original columns to shed pivot drift.
  void reinvert() {
    std::vector<double> b(m_ * m_);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t k = 0; k < m_; ++k) b[i * m_ + k] = orig_[i * stride_ + basis_[k]];
    // Gauss-Jordan with partial pivoting on [B | orig]; rows end up ordered
    // by basis position.
    t_ = orig_;
    for (std::size_t k = 0; k < m_; ++k) {
      std::size_t piv = k;
      for (std::size_t i = k + 1; i < m_; ++i)
        if (std::abs(b[i * m_ + k]) > std::abs(b[piv * m_ + k])) piv = i;
      if (piv != k) {
        for (std::size_t c = 0; c < m_; ++c) std::swap(b[k * m_ + c], b[piv * m_ + c]);
        for (std::size_t c = 0; c < stride_; ++c) std::swap(t_[k * stride_ + c], t_[piv * stride_ + c]);
      }
      const double p = b[k * m_ + k];
      if (std::abs(p) < 1e-14) throw Error(Errc::solver_failure, "singular basis during reinversion");
      for (std::size_t c = 0; c < m_; ++c) b[k * m_ + c] /= p;
      for (std::size_t c = 0; c < stride_; ++c) t_[k * stride_ + c] /= p;
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == k) continue;
        const double f = b[i * m_ + k];
        if (f == 0.0) continue;
        for (std::size_t c = 0; c < m_; ++c) b[i * m_ + c] -= f * b[k * m_ + c];
        for (std::size_t c = 0; c < stride_; ++c) t_[i * stride_ + c] -= f * t_[k * stride_ + c];
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      t_[i * stride_ + basis_[i]] = 1.0;
      for (std::size_t k = 0; k < m_; ++k)
        if (k != i) t_[k * stride_ + basis_[i]] = 0.0;
    }
    refresh_basic_values();
    compute_reduced_costs();
  }

  void pivot(std::size_t r, std::size_t enter) {
    double* prow = &t_[r * stride_];
    const double p = prow[enter];
    for (std::size_t j = 0; j < stride_; ++j) prow[j] /= p;
    prow[enter] = 1.0;
    nz_.clear();
    for (std::size_t j = 0; j < stride_; ++j)
      if (prow[j] != 0.0) nz_.push_back(j);
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &t_[i * stride_];
      const double f = row[enter];
      if (f == 0.0) continue;
      for (std::size_t j : nz_) row[j] -= f * prow[j];
      row[enter] = 0.0;
    }
    const double f = d_[enter];
    if (f != 0.0)
      for (std::size_t j : nz_)
        if (j < cols_) d_[j] -= f * prow[j];
    d_[enter] = 0.0;
    is_basic_[basis_[r]] = false;
    is_basic_[enter] = true;
    basis_[r] = enter;
  }

  const LinearProgram& lp_;
  Options opt_;
  std::size_t m_;
  std::size_t cols_ = 0;
  std::size_t stride_ = 0;
  std::size_t num_art_ = 0;
  std::vector<double> orig_;
  std::vector<double> t_;
  std::vector<double> lo_, hi_, x_, cost_, d_;
  std::vector<std::size_t> basis_;
  std::vector<bool> is_basic_;
  std::vector<std::size_t> nz_;
};

}  // namespace detail

/// Dense storage cap (entries per tableau copy).
inline constexpr std::size_t kMaxTableauEntries = std::size_t{1} << 26;

inline Result solve(const LinearProgram& lp, const Options& opt = {}) {
  lp.validate();
  require(lp.rows() * (lp.num_vars + lp.rows() + 1) <= kMaxTableauEntries, Errc::dimension_too_large,
          "LP too large for the dense tableau");
  Result res;
  detail::Tableau tab(lp, opt);

  if (tab.num_artificials() > 0) {
    std::vector<double> phase1(tab.columns(), 0.0);
    for (std::size_t j = lp.num_vars; j < tab.columns(); ++j) phase1[j] = -1.0;
    const Status s = tab.run_phase(phase1, res.iterations);
    if (s == Status::iteration_limit) {
      res.status = s;
      return res;
    }
    double scale = 1.0;
    for (double b : lp.rhs) scale = std::max(scale, std::abs(b));
    if (tab.artificial_sum() > 1e-7 * scale) {
      res.status = Status::infeasible;
      return res;
    }
    tab.retire_artificials();
  }

  std::vector<double> phase2(tab.columns(), 0.0);
  std::copy(lp.objective.begin(), lp.objective.end(), phase2.begin());
  res.status = tab.run_phase(phase2, res.iterations);
  res.point = tab.structural_point();
  res.value = 0.0;
  for (std::size_t j = 0; j < lp.num_vars; ++j) res.value += lp.objective[j] * res.point[j];
  res.residual = max_residual(lp, res.point);
  return res;
}

}  // namespace resil::lp
