#include "bernpop/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bernpop {

std::string to_string(LPStatus status) {
  switch (status) {
    case LPStatus::Optimal: return "optimal";
    case LPStatus::Infeasible: return "infeasible";
    case LPStatus::Unbounded: return "unbounded";
    case LPStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

template <class T>
LinearProgram<T> LinearProgram<T>::with_variables(std::size_t n) {
  LinearProgram lp;
  lp.objective.assign(n, ScalarTraits<T>::from_int(0));
  lp.lower.assign(n, ScalarTraits<T>::from_int(0));
  lp.upper.assign(n, std::nullopt);
  return lp;
}

template <class T>
void LinearProgram<T>::add_inequality(std::vector<T> row, T rhs) {
  if (row.size() != num_vars()) throw std::invalid_argument("LP inequality row has wrong width");
  ineq_rows.push_back(std::move(row));
  ineq_rhs.push_back(std::move(rhs));
}

template <class T>
void LinearProgram<T>::add_equality(std::vector<T> row, T rhs) {
  if (row.size() != num_vars()) throw std::invalid_argument("LP equality row has wrong width");
  eq_rows.push_back(std::move(row));
  eq_rhs.push_back(std::move(rhs));
}

template <class T>
void LinearProgram<T>::validate() const {
  const std::size_t n = num_vars();
  if (lower.size() != n || upper.size() != n) throw std::invalid_argument("LP bound vectors have wrong length");
  if (ineq_rows.size() != ineq_rhs.size() || eq_rows.size() != eq_rhs.size())
    throw std::invalid_argument("LP rows and right-hand sides differ in count");
  for (const auto& r : ineq_rows)
    if (r.size() != n) throw std::invalid_argument("LP inequality row has wrong width");
  for (const auto& r : eq_rows)
    if (r.size() != n) throw std::invalid_argument("LP equality row has wrong width");
  for (std::size_t j = 0; j < n; ++j) {
    if constexpr (ScalarTraits<T>::exact) {
      if (!lower[j] || !upper[j]) throw std::invalid_argument("rational LPs need finite variable bounds");
    }
    if (lower[j] && upper[j] && *upper[j] < *lower[j]) throw std::invalid_argument("LP variable bounds cross");
  }
}

namespace {

template <class T>
class Simplex {
 public:
  Simplex(const LinearProgram<T>& lp, const SimplexOptions& options)
      : lp_(lp), options_(options), n_(lp.num_vars()), mi_(lp.ineq_rows.size()), me_(lp.eq_rows.size()),
        m_(mi_ + me_), bland_(options.force_bland || ScalarTraits<T>::exact) {
    iteration_cap_ = options.iteration_factor * (m_ + n_ + 1);
  }

  LPSolution<T> run() {
    setup();
    LPSolution<T> sol;
    if (num_art_ > 0) {
      cost_.assign(width_, zero());
      for (std::size_t c = first_art_; c < width_; ++c) cost_[c] = ScalarTraits<T>::from_int(1);
      const LPStatus s = iterate();
      if (s == LPStatus::IterationLimit) return finish(sol, s);
      T infeasibility = zero();
      for (std::size_t c = first_art_; c < width_; ++c) infeasibility += value_of(c);
      if (infeasibility > phase_one_tol()) return finish(sol, LPStatus::Infeasible);
      for (std::size_t c = first_art_; c < width_; ++c) up_[c] = zero();
    }
    cost_.assign(width_, zero());
    for (std::size_t j = 0; j < n_; ++j) cost_[j] = lp_.objective[j];
    return finish(sol, iterate());
  }

 private:
  enum class State : unsigned char { Basic, AtLower, AtUpper, FreeZero };

  static T zero() { return ScalarTraits<T>::from_int(0); }
  T& tab(std::size_t i, std::size_t j) { return tab_[i * width_ + j]; }

  T phase_one_tol() const {
    if constexpr (ScalarTraits<T>::exact) {
      return zero();
    } else {
      double scale = 1.0;
      for (const auto& r : lp_.ineq_rhs) scale = std::max(scale, std::fabs(r));
      for (const auto& r : lp_.eq_rhs) scale = std::max(scale, std::fabs(r));
      return 1e-9 * scale;
    }
  }

  const std::vector<T>& row_of(std::size_t i) const { return i < mi_ ? lp_.ineq_rows[i] : lp_.eq_rows[i - mi_]; }
  const T& rhs_of(std::size_t i) const { return i < mi_ ? lp_.ineq_rhs[i] : lp_.eq_rhs[i - mi_]; }

  T value_of(std::size_t c) const { return state_[c] == State::Basic ? beta_[row_of_basic_[c]] : x_[c]; }

  void setup() {
    lp_.validate();
    // Structural variables start at a finite bound (or 0 when free).
    lo_.assign(lp_.lower.begin(), lp_.lower.end());
    up_.assign(lp_.upper.begin(), lp_.upper.end());
    x_.assign(n_, zero());
    state_.assign(n_, State::AtLower);
    for (std::size_t j = 0; j < n_; ++j) {
      if (lo_[j]) {
        x_[j] = *lo_[j];
      } else if (up_[j]) {
        x_[j] = *up_[j];
        state_[j] = State::AtUpper;
      } else {
        state_[j] = State::FreeZero;
      }
    }
    // Residuals decide which rows need an artificial variable.
    std::vector<T> residual(m_);
    std::vector<int> sign(m_, 1);
    std::vector<bool> needs_art(m_, false);
    for (std::size_t i = 0; i < m_; ++i) {
      T r = rhs_of(i);
      const auto& row = row_of(i);
      for (std::size_t j = 0; j < n_; ++j)
        if (row[j] != 0 && x_[j] != 0) r -= row[j] * x_[j];
      residual[i] = r;
      if (r < 0) sign[i] = -1;
      needs_art[i] = i >= mi_ || r < 0;
    }
    first_art_ = n_ + mi_;
    num_art_ = static_cast<std::size_t>(std::count(needs_art.begin(), needs_art.end(), true));
    width_ = first_art_ + num_art_;
    for (std::size_t i = 0; i < mi_; ++i) {
      lo_.push_back(zero());
      up_.push_back(std::nullopt);
    }
    for (std::size_t a = 0; a < num_art_; ++a) {
      lo_.push_back(zero());
      up_.push_back(std::nullopt);
    }
    x_.resize(width_, zero());
    state_.resize(width_, State::AtLower);
    row_of_basic_.assign(width_, 0);
    basis_.assign(m_, 0);
    beta_.assign(m_, zero());
    art_col_.assign(m_, width_);
    art_sign_.assign(m_, 1);
    tab_.assign(m_ * width_, zero());

    std::size_t next_art = first_art_;
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = row_of(i);
      const int s = sign[i];
      for (std::size_t j = 0; j < n_; ++j)
        if (row[j] != 0) tab(i, j) = s > 0 ? row[j] : T(-row[j]);
      if (i < mi_) tab(i, n_ + i) = ScalarTraits<T>::from_int(s);
      std::size_t basic = n_ + i;
      if (needs_art[i]) {
        basic = next_art++;
        art_col_[i] = basic;
        art_sign_[i] = s;
        tab(i, basic) = ScalarTraits<T>::from_int(1);
      }
      basis_[i] = basic;
      state_[basic] = State::Basic;
      row_of_basic_[basic] = i;
      beta_[i] = s > 0 ? residual[i] : T(-residual[i]);
    }
  }

  void compute_reduced_costs() {
    d_ = cost_;
    for (std::size_t i = 0; i < m_; ++i) {
      const T& cb = cost_[basis_[i]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j < width_; ++j)
        if (tab(i, j) != 0) d_[j] -= cb * tab(i, j);
    }
  }

  T dual_tol() const {
    if constexpr (ScalarTraits<T>::exact)
      return zero();
    else
      return 1e-9;
  }

  // Returns (column, direction) of the entering variable, or column == width_.
  std::pair<std::size_t, int> price() const {
    const T tol = dual_tol();
    std::size_t best = width_;
    int best_dir = 0;
    T best_score = zero();
    for (std::size_t j = 0; j < width_; ++j) {
      const State st = state_[j];
      if (st == State::Basic) continue;
      if (lo_[j] && up_[j] && *lo_[j] == *up_[j]) continue;
      int dir = 0;
      if ((st == State::AtLower || st == State::FreeZero) && d_[j] < -tol) dir = 1;
      if ((st == State::AtUpper || st == State::FreeZero) && d_[j] > tol) dir = -1;
      if (dir == 0) continue;
      if (bland_) return {j, dir};
      const T score = ScalarTraits<T>::abs(d_[j]);
      if (best == width_ || score > best_score) {
        best = j;
        best_dir = dir;
        best_score = score;
      }
    }
    return {best, best_dir};
  }

  LPStatus iterate() {
    compute_reduced_costs();
    std::size_t stall = 0;
    const T ptol = ScalarTraits<T>::pivot_tol();
    while (true) {
      auto [q, dir] = price();
      if (q == width_) return LPStatus::Optimal;
      if (++iterations_ > iteration_cap_) return LPStatus::IterationLimit;

      // Ratio test.
      std::optional<T> step;
      std::size_t leave = m_;
      T leave_mag = zero();
      for (std::size_t i = 0; i < m_; ++i) {
        const T a = tab(i, q);
        if (a == 0) continue;
        const T g = dir > 0 ? a : T(-a);
        const std::size_t b = basis_[i];
        T ratio;
        if (g > ptol) {
          if (!lo_[b]) continue;
          ratio = (beta_[i] - *lo_[b]) / g;
        } else if (g < -ptol) {
          if (!up_[b]) continue;
          ratio = (*up_[b] - beta_[i]) / T(-g);
        } else {
          continue;
        }
        if (ratio < 0) ratio = zero();
        const T mag = ScalarTraits<T>::abs(g);
        bool take = false;
        if (!step || ratio < *step - tie_tol()) {
          take = true;
        } else if (ratio <= *step + tie_tol()) {
          take = bland_ ? b < basis_[leave] : mag > leave_mag;
        }
        if (take) {
          if (!step || ratio < *step) step = ratio;
          leave = i;
          leave_mag = mag;
        }
      }
      std::optional<T> flip;
      if (lo_[q] && up_[q]) flip = *up_[q] - *lo_[q];
      if (!step && !flip) return LPStatus::Unbounded;

      const bool do_flip = flip && (!step || *flip <= *step);
      const T t = do_flip ? *flip : *step;

      if constexpr (!ScalarTraits<T>::exact) {
        if (t * ScalarTraits<T>::abs(d_[q]) <= 1e-12) {
          if (++stall > options_.stall_limit) bland_ = used_bland_ = true;
        } else {
          stall = 0;
        }
      }

      // Move the entering variable by dir * t.
      if (t != 0) {
        const T delta = dir > 0 ? t : T(-t);
        for (std::size_t i = 0; i < m_; ++i) {
          const T a = tab(i, q);
          if (a != 0) beta_[i] -= delta * a;
        }
      }
      if (do_flip) {
        if (dir > 0) {
          x_[q] = *up_[q];
          state_[q] = State::AtUpper;
        } else {
          x_[q] = *lo_[q];
          state_[q] = State::AtLower;
        }
        continue;
      }
      const T entering_value = x_[q] + (dir > 0 ? t : T(-t));
      pivot(leave, q, dir, entering_value);
    }
  }

  T tie_tol() const {
    if constexpr (ScalarTraits<T>::exact)
      return zero();
    else
      return 1e-12;
  }

  void pivot(std::size_t p, std::size_t q, int dir, const T& entering_value) {
    const std::size_t b = basis_[p];
    const T g = dir > 0 ? tab(p, q) : T(-tab(p, q));
    // The leaving variable lands on the bound that limited the step.
    if (g > 0) {
      x_[b] = *lo_[b];
      state_[b] = State::AtLower;
    } else {
      x_[b] = *up_[b];
      state_[b] = State::AtUpper;
    }
    beta_[p] = entering_value;
    basis_[p] = q;
    state_[q] = State::Basic;
    row_of_basic_[q] = p;

    const T piv = tab(p, q);
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < width_; ++j) {
      if (tab(p, j) == 0) continue;
      tab(p, j) /= piv;
      nz.push_back(j);
    }
    tab(p, q) = ScalarTraits<T>::from_int(1);
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == p) continue;
      const T f = tab(i, q);
      if (f == 0) continue;
      for (std::size_t j : nz) tab(i, j) -= f * tab(p, j);
      tab(i, q) = zero();
    }
    const T fd = d_[q];
    if (fd != 0) {
      for (std::size_t j : nz) d_[j] -= fd * tab(p, j);
      d_[q] = zero();
    }
  }

  LPSolution<T>& finish(LPSolution<T>& sol, LPStatus status) {
    sol.status = status;
    sol.iterations = iterations_;
    sol.used_bland = used_bland_;
    if (status != LPStatus::Optimal) return sol;
    sol.primal.resize(n_);
    sol.value = zero();
    for (std::size_t j = 0; j < n_; ++j) {
      sol.primal[j] = value_of(j);
      sol.value += lp_.objective[j] * sol.primal[j];
    }
    sol.ineq_duals.resize(mi_);
    for (std::size_t i = 0; i < mi_; ++i) sol.ineq_duals[i] = -d_[n_ + i];
    sol.eq_duals.resize(me_);
    for (std::size_t i = 0; i < me_; ++i) {
      const std::size_t a = art_col_[mi_ + i];
      sol.eq_duals[i] = art_sign_[mi_ + i] > 0 ? T(-d_[a]) : d_[a];
    }
    return sol;
  }

  const LinearProgram<T>& lp_;
  SimplexOptions options_;
  std::size_t n_, mi_, me_, m_;
  std::size_t width_ = 0, first_art_ = 0, num_art_ = 0;
  std::vector<T> tab_, beta_, x_, cost_, d_;
  std::vector<Bound<T>> lo_, up_;
  std::vector<State> state_;
  std::vector<std::size_t> basis_, row_of_basic_, art_col_;
  std::vector<int> art_sign_;
  bool bland_;
  bool used_bland_ = false;
  std::size_t iterations_ = 0, iteration_cap_ = 0;
};

}  // namespace

template <class T>
LPSolution<T> solve(const LinearProgram<T>& lp, const SimplexOptions& options) {
  return Simplex<T>(lp, options).run();
}

template <class T>
std::optional<T> lagrangian_bound(const LinearProgram<T>& lp, std::span<const T> ineq_duals,
                                  std::span<const T> eq_duals) {
  if (ineq_duals.size() != lp.ineq_rows.size() || eq_duals.size() != lp.eq_rows.size())
    throw std::invalid_argument("lagrangian_bound: multiplier count mismatch");
  const T zero = ScalarTraits<T>::from_int(0);
  std::vector<T> y(ineq_duals.begin(), ineq_duals.end());
  for (auto& v : y)
    if (v > 0) v = zero;
  T bound = zero;
  std::vector<T> reduced = lp.objective;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 0) continue;
    bound += y[i] * lp.ineq_rhs[i];
    for (std::size_t j = 0; j < reduced.size(); ++j) reduced[j] -= y[i] * lp.ineq_rows[i][j];
  }
  for (std::size_t i = 0; i < eq_duals.size(); ++i) {
    if (eq_duals[i] == 0) continue;
    bound += eq_duals[i] * lp.eq_rhs[i];
    for (std::size_t j = 0; j < reduced.size(); ++j) reduced[j] -= eq_duals[i] * lp.eq_rows[i][j];
  }
  for (std::size_t j = 0; j < reduced.size(); ++j) {
    if (reduced[j] > 0) {
      if (!lp.lower[j]) return std::nullopt;
      bound += reduced[j] * *lp.lower[j];
    } else if (reduced[j] < 0) {
      if (!lp.upper[j]) return std::nullopt;
      bound += reduced[j] * *lp.upper[j];
    }
  }
  return bound;
}

template <class T>
T max_violation(const LinearProgram<T>& lp, std::span<const T> z) {
  T worst = ScalarTraits<T>::from_int(0);
  auto dot = [&](const std::vector<T>& row) {
    T s = ScalarTraits<T>::from_int(0);
    for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * z[j];
    return s;
  };
  for (std::size_t i = 0; i < lp.ineq_rows.size(); ++i) {
    const T v = dot(lp.ineq_rows[i]) - lp.ineq_rhs[i];
    if (v > worst) worst = v;
  }
  for (std::size_t i = 0; i < lp.eq_rows.size(); ++i) {
    const T v = ScalarTraits<T>::abs(T(dot(lp.eq_rows[i]) - lp.eq_rhs[i]));
    if (v > worst) worst = v;
  }
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (lp.lower[j] && *lp.lower[j] - z[j] > worst) worst = *lp.lower[j] - z[j];
    if (lp.upper[j] && z[j] - *lp.upper[j] > worst) worst = z[j] - *lp.upper[j];
  }
  return worst;
}

#define BERNPOP_INSTANTIATE(T)                                                                       \
  template struct LinearProgram<T>;                                                                  \
  template LPSolution<T> solve(const LinearProgram<T>&, const SimplexOptions&);                      \
  template std::optional<T> lagrangian_bound(const LinearProgram<T>&, std::span<const T>, std::span<const T>); \
  template T max_violation(const LinearProgram<T>&, std::span<const T>);

BERNPOP_INSTANTIATE(double)
BERNPOP_INSTANTIATE(Rational)
#undef BERNPOP_INSTANTIATE

}  // namespace bernpop
