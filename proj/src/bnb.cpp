#include "bernpop/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <memory>
#include <queue>
#include <stdexcept>
#include <thread>

namespace bernpop {

std::string to_string(SplitStrategy split) {
  return split == SplitStrategy::ZeroCentered ? "zero" : "longest";
}

SplitStrategy parse_split(const std::string& text) {
  if (text == "longest" || text == "longest_edge") return SplitStrategy::LongestEdge;
  if (text == "zero" || text == "zero_centered") return SplitStrategy::ZeroCentered;
  throw std::invalid_argument("unknown split strategy '" + text + "' (expected longest or zero)");
}

char to_char(AxisSign sign) {
  switch (sign) {
    case AxisSign::Increasing: return '+';
    case AxisSign::Decreasing: return '-';
    case AxisSign::Mixed: return '~';
  }
  return '?';
}

template <class T>
Degree problem_degree(const Polynomial<T>& objective, std::span<const Polynomial<T>> constraints) {
  Degree d = objective.degree();
  for (const auto& g : constraints) {
    if (g.dimension() != objective.dimension()) throw std::invalid_argument("constraint dimension differs from objective");
    d = d.max(g.degree());
  }
  return d;
}

namespace {

template <class T>
std::vector<AxisSign> unit_signs(const Polynomial<T>& q) {
  std::vector<AxisSign> signs;
  for (std::size_t r = 0; r < q.dimension(); ++r) {
    const Polynomial<T> d = partial_derivative(q, r);
    if (d.terms().empty()) {
      signs.push_back(AxisSign::Increasing);
      continue;
    }
    const auto form = to_bernstein(d, d.degree());
    bool pos = true, neg = true;
    for (const auto& c : form.coeffs) {
      pos = pos && c > 0;
      neg = neg && c < 0;
    }
    signs.push_back(pos ? AxisSign::Increasing : neg ? AxisSign::Decreasing : AxisSign::Mixed);
  }
  return signs;
}

template <class T>
bool satisfies(std::span<const Polynomial<T>> constraints, std::span<const T> x, const T& tol) {
  for (const auto& g : constraints)
    if (g.evaluate(x) > tol) return false;
  return true;
}

struct Budget {
  std::size_t used = 0;
  std::size_t max = 0;
};

template <class T>
struct NodeEval {
  explicit NodeEval(Box<T> b) : box(std::move(b)) {}
  Box<T> box;
  T bound{};
  bool infeasible = false;
  bool exact = false;
  T exact_value{};
  std::vector<T> exact_point;
  std::vector<std::pair<T, std::vector<T>>> samples;
  std::vector<AxisSign> signs;
};

template <class T>
struct Node {
  T bound;
  std::size_t seq;
  std::shared_ptr<NodeEval<T>> eval;
};

template <class T>
struct NodeOrder {
  bool operator()(const Node<T>& a, const Node<T>& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq;
  }
};

template <class T>
class Solver {
 public:
  Solver(const Polynomial<T>& objective, std::span<const Polynomial<T>> constraints, const BnbConfig& config,
         Budget& budget)
      : p_(objective), g_(constraints), config_(config), budget_(budget) {
    const Degree own = problem_degree(objective, constraints);
    if (config.degree) {
      if (config.degree->size() != own.size() || !own.leq(*config.degree))
        throw std::invalid_argument("degree " + config.degree->to_string() + " is below the problem degree " +
                                    own.to_string());
      degree_ = *config.degree;
    } else {
      degree_ = own;
    }
    eps_ = scalar_cast<T>(config.epsilon);
  }

  BnbResult<T> run(const Box<T>& box, const std::optional<T>& seed) {
    const auto start = std::chrono::steady_clock::now();
    incumbent_ = seed;
    integrate(evaluate(box, std::nullopt));
    bool stopped = false;
    const std::size_t jobs = std::max(1u, config_.jobs);
    while (!heap_.empty()) {
      std::vector<std::pair<Box<T>, T>> tasks;
      for (std::size_t k = 0; k < jobs && !heap_.empty(); ++k) {
        if (budget_.used >= budget_.max) {
          stopped = true;
          break;
        }
        Node<T> node = heap_.top();
        heap_.pop();
        ++budget_.used;
        ++stats_.subdivisions;
        if (incumbent_ && cutoff_test(node.bound, *incumbent_, config_.epsilon)) {
          ++stats_.cutoffs;
          record_leaf(node.bound);
          continue;
        }
        const auto& signs = node.eval->signs;
        if (std::any_of(signs.begin(), signs.end(), [](AxisSign s) { return s != AxisSign::Mixed; })) {
          ++stats_.mono;
          solve_edge(*node.eval);
          if (budget_.used >= budget_.max) stopped = true;
          continue;
        }
        const Box<T>& b = node.eval->box;
        if (to_double(b.width(b.widest_axis())) <= config_.min_box_width) {
          ++stats_.unsplittable;
          unresolved_ = true;
          record_leaf(node.bound);
          continue;
        }
        auto [left, right] = split_box(b, config_.split);
        tasks.emplace_back(std::move(left), node.bound);
        tasks.emplace_back(std::move(right), node.bound);
      }
      for (auto& e : evaluate_all(tasks)) integrate(std::move(e));
      if (stopped) break;
    }
    while (!heap_.empty()) {
      record_leaf(heap_.top().bound);
      heap_.pop();
    }

    BnbResult<T> result;
    result.upper = incumbent_;
    result.witness = witness_;
    result.lower = incumbent_;
    if (leaf_lower_ && (!result.lower || *leaf_lower_ < *result.lower)) result.lower = leaf_lower_;
    if (!stopped && !unresolved_) {
      if (!result.upper && !result.lower) {
        result.converged = true;
      } else if (result.upper && result.lower) {
        const T scale = std::max(ScalarTraits<T>::from_int(1), T(ScalarTraits<T>::abs(*result.upper)));
        result.converged = *result.upper - *result.lower <= eps_ * scale;
      }
    }
    stats_.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.stats = stats_;
    return result;
  }

 private:
  std::shared_ptr<NodeEval<T>> evaluate(const Box<T>& box, const std::optional<T>& parent) const {
    auto e = std::make_shared<NodeEval<T>>(box);
    auto [q, map] = to_unit_box(p_, box);
    const BernsteinForm<T> form = to_bernstein(q, degree_);

    std::vector<LinearCut<T>> rows;
    for (const auto& g : g_) {
      const auto gf = to_bernstein(compose_affine(g, map), degree_);
      if (min_coefficient(gf).value > 0) {
        e->infeasible = true;
        return e;
      }
      if (max_coefficient(gf) > 0) rows.push_back({gf.coeffs, ScalarTraits<T>::from_int(0)});
    }
    if (auto s = sample_upper_bound<T>(p_, g_, box, form)) e->samples.push_back(std::move(*s));

    RelaxationOutcome<T> out = relax(config_.level, form, map, std::span<const LinearCut<T>>(rows));
    if (out.infeasible) {
      e->infeasible = true;
      return e;
    }
    e->bound = out.bound;
    if (parent && *parent > e->bound) e->bound = *parent;

    std::optional<std::vector<T>> witness = std::move(out.witness);
    if (!out.exact) {
      witness.reset();
      if (auto vertex = vertex_minimizer(form)) witness = map.apply(grid_point<T>(*vertex, degree_));
    }
    if (witness && satisfies<T>(g_, *witness, ScalarTraits<T>::feasibility_tol())) {
      e->exact = true;
      e->exact_value = p_.evaluate(*witness);
      e->exact_point = std::move(*witness);
    }
    if (config_.monotonicity && rows.empty() && !e->exact) e->signs = unit_signs(q);
    return e;
  }

  std::vector<std::shared_ptr<NodeEval<T>>> evaluate_all(const std::vector<std::pair<Box<T>, T>>& tasks) const {
    std::vector<std::shared_ptr<NodeEval<T>>> out(tasks.size());
    const std::size_t jobs = std::min<std::size_t>(std::max(1u, config_.jobs), tasks.size());
    if (jobs <= 1) {
      for (std::size_t i = 0; i < tasks.size(); ++i) out[i] = evaluate(tasks[i].first, tasks[i].second);
      return out;
    }
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < tasks.size(); i += jobs) out[i] = evaluate(tasks[i].first, tasks[i].second);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : workers) t.join();
    for (auto& err : errors)
      if (err) std::rethrow_exception(err);
    return out;
  }

  void integrate(std::shared_ptr<NodeEval<T>> e) {
    for (auto& [value, point] : e->samples) offer(value, point);
    if (e->infeasible) {
      ++stats_.infeasible_boxes;
      return;
    }
    if (e->exact) {
      ++stats_.exact_boxes;
      offer(e->exact_value, e->exact_point);
      record_leaf(e->exact_value < e->bound ? e->exact_value : e->bound);
      return;
    }
    if (incumbent_ && cutoff_test(e->bound, *incumbent_, config_.epsilon)) {
      ++stats_.cutoffs;
      record_leaf(e->bound);
      return;
    }
    const T bound = e->bound;
    heap_.push(Node<T>{bound, seq_++, std::move(e)});
  }

  void solve_edge(const NodeEval<T>& e) {
    const EdgeProblem<T> edge = edge_subproblem<T>(p_, e.box, e.signs);
    if (edge.free_axes.empty()) {
      const T value = edge.objective.evaluate(std::span<const T>());
      offer(value, edge.anchor);
      record_leaf(value);
      return;
    }
    BnbConfig sub = config_;
    if (config_.degree) {
      Degree reduced(edge.free_axes.size());
      for (std::size_t k = 0; k < edge.free_axes.size(); ++k) reduced[k] = (*config_.degree)[edge.free_axes[k]];
      sub.degree = reduced;
    }
    Solver<T> inner(edge.objective, {}, sub, budget_);
    const BnbResult<T> r = inner.run(Box<T>(edge.lower, edge.upper), incumbent_);
    stats_.edge_subdivisions += r.stats.subdivisions + r.stats.edge_subdivisions;
    stats_.edge_cutoffs += r.stats.cutoffs + r.stats.edge_cutoffs;
    stats_.mono += r.stats.mono;
    stats_.exact_boxes += r.stats.exact_boxes;
    stats_.unsplittable += r.stats.unsplittable;
    stats_.edge_elapsed += r.stats.elapsed;
    if (r.upper && !r.witness.empty()) offer(*r.upper, edge.lift(r.witness));
    if (r.lower) record_leaf(*r.lower);
    if (!r.converged) unresolved_ = true;
  }

  void offer(const T& value, const std::vector<T>& point) {
    if (!incumbent_ || value < *incumbent_) {
      incumbent_ = value;
      witness_ = point;
    }
  }

  void record_leaf(const T& bound) {
    if (!leaf_lower_ || bound < *leaf_lower_) leaf_lower_ = bound;
  }

  const Polynomial<T>& p_;
  std::span<const Polynomial<T>> g_;
  BnbConfig config_;
  Budget& budget_;
  Degree degree_;
  T eps_;
  std::priority_queue<Node<T>, std::vector<Node<T>>, NodeOrder<T>> heap_;
  std::size_t seq_ = 0;
  std::optional<T> incumbent_;
  std::vector<T> witness_;
  std::optional<T> leaf_lower_;
  bool unresolved_ = false;
  BnbStats stats_;
};

}  // namespace

template <class T>
BnbResult<T> branch_and_bound(const Polynomial<T>& objective, std::span<const Polynomial<T>> constraints,
                              const Box<T>& box, const BnbConfig& config) {
  if (box.dimension() != objective.dimension()) throw std::invalid_argument("box dimension differs from objective");
  if (!(config.epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  if (config.max_boxes < 1) throw std::invalid_argument("max_boxes must be at least 1");
  Budget budget{0, config.max_boxes};
  return Solver<T>(objective, constraints, config, budget).run(box, std::nullopt);
}

template <class T>
std::vector<AxisSign> monotonicity_test(const Polynomial<T>& p, const Box<T>& box) {
  return unit_signs(to_unit_box(p, box).first);
}

template <class T>
std::pair<Box<T>, Box<T>> split_box(const Box<T>& box, SplitStrategy strategy, double min_width) {
  const std::size_t axis = box.widest_axis();
  const T& lo = box.lower()[axis];
  const T& hi = box.upper()[axis];
  if (to_double(T(hi - lo)) <= min_width) throw std::domain_error("split_box: box too small to split");
  T cut = (lo + hi) / ScalarTraits<T>::from_int(2);
  if (strategy == SplitStrategy::ZeroCentered && lo < 0 && hi > 0) cut = ScalarTraits<T>::from_int(0);
  std::vector<T> left_upper = box.upper(), right_lower = box.lower();
  left_upper[axis] = cut;
  right_lower[axis] = cut;
  return {Box<T>(box.lower(), std::move(left_upper)), Box<T>(std::move(right_lower), box.upper())};
}

template <class T>
bool cutoff_test(const T& box_bound, const T& incumbent, double epsilon) {
  const T scale = std::max(ScalarTraits<T>::from_int(1), T(ScalarTraits<T>::abs(incumbent)));
  return box_bound >= incumbent - scalar_cast<T>(epsilon) * scale;
}

template <class T>
std::optional<std::pair<T, std::vector<T>>> sample_upper_bound(const Polynomial<T>& p,
                                                               std::span<const Polynomial<T>> constraints,
                                                               const Box<T>& box, const BernsteinForm<T>& unit_form) {
  const AffineMap<T> map = AffineMap<T>::from_box(box);
  std::vector<std::vector<T>> points{box.center(),
                                     map.apply(grid_point<T>(min_coefficient(unit_form).index, unit_form.degree))};
  std::optional<std::pair<T, std::vector<T>>> best;
  for (auto& x : points) {
    if (!satisfies<T>(constraints, x, ScalarTraits<T>::from_int(0))) continue;
    T v = p.evaluate(x);
    if (!best || v < best->first) best.emplace(std::move(v), std::move(x));
  }
  return best;
}

template <class T>
std::vector<T> EdgeProblem<T>::lift(std::span<const T> reduced) const {
  if (reduced.size() != free_axes.size()) throw std::invalid_argument("EdgeProblem::lift: dimension mismatch");
  std::vector<T> x = anchor;
  for (std::size_t k = 0; k < free_axes.size(); ++k) x[free_axes[k]] = reduced[k];
  return x;
}

template <class T>
EdgeProblem<T> edge_subproblem(const Polynomial<T>& p, const Box<T>& box, std::span<const AxisSign> signs) {
  const std::size_t n = p.dimension();
  if (signs.size() != n || box.dimension() != n) throw std::invalid_argument("edge_subproblem: dimension mismatch");
  EdgeProblem<T> edge{p, {}, {}, {}, box.center()};
  // Eliminate from the highest axis down so lower indices stay valid.
  for (std::size_t r = n; r-- > 0;) {
    if (signs[r] == AxisSign::Mixed) continue;
    const T& value = signs[r] == AxisSign::Increasing ? box.lower()[r] : box.upper()[r];
    edge.anchor[r] = value;
    edge.objective = restrict_facet(edge.objective, r, value);
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (signs[r] != AxisSign::Mixed) continue;
    edge.free_axes.push_back(r);
    edge.lower.push_back(box.lower()[r]);
    edge.upper.push_back(box.upper()[r]);
  }
  return edge;
}

#define BERNPOP_INSTANTIATE(T)                                                                                \
  template Degree problem_degree(const Polynomial<T>&, std::span<const Polynomial<T>>);                       \
  template BnbResult<T> branch_and_bound(const Polynomial<T>&, std::span<const Polynomial<T>>, const Box<T>&,  \
                                         const BnbConfig&);                                                    \
  template std::vector<AxisSign> monotonicity_test(const Polynomial<T>&, const Box<T>&);                      \
  template std::pair<Box<T>, Box<T>> split_box(const Box<T>&, SplitStrategy, double);                         \
  template bool cutoff_test(const T&, const T&, double);                                                      \
  template std::optional<std::pair<T, std::vector<T>>> sample_upper_bound(                                    \
      const Polynomial<T>&, std::span<const Polynomial<T>>, const Box<T>&, const BernsteinForm<T>&);          \
  template struct EdgeProblem<T>;                                                                             \
  template EdgeProblem<T> edge_subproblem(const Polynomial<T>&, const Box<T>&, std::span<const AxisSign>);

BERNPOP_INSTANTIATE(double)
BERNPOP_INSTANTIATE(Rational)
#undef BERNPOP_INSTANTIATE

}  // namespace bernpop
