// Acceptance harness: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bernpop/bnb.hpp"
#include "bernpop/lyapunov.hpp"
#include "bernpop/problem_io.hpp"
#include "bernpop/relax.hpp"

using namespace bernpop;

namespace {

const std::filesystem::path kData = BERNPOP_TEST_DATA;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [miss: " << what << "]";
    }
  }
};

std::string g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

template <class T>
struct Unit {
  BernsteinForm<T> form;
  AffineMap<T> map;
};

template <class T>
Unit<T> unit(const ProblemFile<T>& pf, const Degree& d) {
  auto [q, map] = to_unit_box(pf.objective, pf.box);
  return {to_bernstein(q, d), map};
}

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

Check criterion1() {
  Check c;
  const auto t = Clock::now();
  {
    const auto pf = load_problem<double>(kData / "example2.json");
    const auto u1 = unit(pf, Degree{2});
    const auto ub = upper_bounds<double>(Degree{2});
    const double p0 = relax0(u1.form, u1.map).bound, p1 = relax1(u1.form, ub, u1.map).bound;
    c.expect(near(p0, -1, 1e-9), "x^2 p0=" + g(p0));
    c.expect(near(p1, 0, 1e-9), "x^2 p1=" + g(p1));
    c.detail << " x^2: p0=" << g(p0) << " p1=" << g(p1) << ";";
  }
  {
    const auto pf = load_problem<double>(kData / "unitsq.json");
    const Degree d{2, 2};
    const auto u2 = unit(pf, d);
    const auto ub = upper_bounds<double>(d);
    const double p0 = relax0(u2.form, u2.map).bound, p1 = relax1(u2.form, ub, u2.map).bound;
    const double p2 = relax2_iterative(u2.form, ub, *cached_cut_matrix<double>(d), u2.map).bound;
    c.expect(near(p0, -2, 1e-9) && near(p1, -0.5, 1e-9) && near(p2, 0, 1e-9), "x^2+y^2 chain");
    c.detail << " x^2+y^2: p0=" << g(p0) << " p1=" << g(p1) << " p2=" << g(p2) << ";";
  }
  {
    const auto e = load_problem<Rational>(kData / "example2.json");
    const auto s = load_problem<Rational>(kData / "unitsq.json");
    const auto a = unit(e, Degree{2});
    const auto b = unit(s, Degree{2, 2});
    const auto ua = upper_bounds<Rational>(Degree{2});
    const auto ubb = upper_bounds<Rational>(Degree{2, 2});
    const bool exact = relax0(a.form, a.map).bound == -1 && relax1(a.form, ua, a.map).bound == 0 &&
                       relax0(b.form, b.map).bound == -2 && relax1(b.form, ubb, b.map).bound == Rational(-1, 2) &&
                       relax2_iterative(b.form, ubb, *cached_cut_matrix<Rational>(Degree{2, 2}), b.map).bound == 0;
    c.expect(exact, "rational chain");
    c.detail << " rational chain " << (exact ? "exact" : "inexact") << ";";
  }
  const double secs = since(t);
  c.expect(secs < 1.0, "runtime");
  c.detail << " time=" << g(secs) << "s";
  return c;
}

Check criterion2() {
  Check c;
  const auto t = Clock::now();
  const auto pf = load_problem<double>(kData / "himmelblau.json");
  const Degree d{4, 4};
  const auto h = unit(pf, d);
  const auto ub = upper_bounds<double>(d);
  const auto cuts = build_cut_matrix<double>(d);
  const double p0 = relax0(h.form, h.map).bound, p1 = relax1(h.form, ub, h.map).bound;
  const auto r2 = relax2_iterative(h.form, ub, cuts, h.map);
  c.expect(p0 == -1170.0, "p0");
  c.expect(near(p1, -911.47, 0.01), "p1");
  c.expect(near(r2.bound, -856.42, 0.01), "p2");
  c.expect(cuts.rows.size() == 200, "rows");
  c.expect(r2.activated_rows.size() <= 10, "activated");
  const double secs = since(t);
  c.expect(secs < 5.0, "runtime");
  c.detail << " p0=" << g(p0) << " p1=" << g(p1) << " p2=" << g(r2.bound) << " rows=" << cuts.rows.size()
           << " activated=" << r2.activated_rows.size() << " time=" << g(secs) << "s";
  return c;
}

Check criterion3() {
  Check c;
  const auto t = Clock::now();
  const auto pf = load_problem<double>(kData / "himmelblau.json");
  const std::vector<std::pair<std::uint32_t, double>> table{{6, -436.57}, {10, -165.89}, {20, -62.23}};
  for (const auto& [k, expected] : table) {
    const Degree d{k, k};
    const auto h = unit(pf, d);
    const double b = relax2_iterative(h.form, upper_bounds<double>(d), *cached_cut_matrix<double>(d), h.map).bound;
    c.expect(near(b, expected, 0.5), "delta=(" + std::to_string(k) + "," + std::to_string(k) + ") got " + g(b) +
                                         " want " + g(expected) + "+-0.5");
    c.detail << " (" << k << "," << k << ")=" << g(b) << ";";
  }
  const double secs = since(t);
  c.expect(secs < 60.0, "runtime");
  c.detail << " time=" << g(secs) << "s";
  return c;
}

Check criterion4() {
  Check c;
  struct Case {
    const char* file;
    double optimum, width;
  };
  for (const Case& k : {Case{"himmelblau.json", 0.0, 1e-6}, Case{"motzkin3.json", 0.0, 1e-4},
                        Case{"algebraic4.json", -1.0, 1e-2}}) {
    const auto pf = load_problem<double>(kData / k.file);
    BnbConfig cfg;
    cfg.epsilon = *pf.epsilon;
    std::size_t subs[2] = {0, 0};
    for (int which = 0; which < 2; ++which) {
      cfg.level = which == 0 ? Level::Zero : Level::Two;
      const auto t = Clock::now();
      const auto res = branch_and_bound<double>(pf.objective, pf.constraints, pf.box, cfg);
      const double secs = since(t);
      subs[which] = res.stats.subdivisions;
      const bool encloses = res.lower && res.upper && *res.lower <= k.optimum + 1e-12 && k.optimum <= *res.upper + 1e-12;
      const double w = res.lower && res.upper ? *res.upper - *res.lower : INFINITY;
      c.expect(res.converged && encloses && w <= k.width && secs < 600.0,
               pf.name + " level " + to_string(cfg.level) + " [" + g(res.lower.value_or(NAN)) + ", " +
                   g(res.upper.value_or(NAN)) + "]");
      if (which == 0)
        c.detail << " " << pf.name << ": [" << g(*res.lower) << ", " << g(*res.upper) << "] Sub=" << subs[0];
    }
    c.expect(subs[1] <= subs[0], pf.name + " level dominance");
    c.detail << "/" << subs[1] << ";";
  }
  return c;
}

Check criterion5() {
  Check c;
  const auto t = Clock::now();
  BnbConfig cfg;
  cfg.level = Level::One;
  cfg.max_boxes = 50000;
  for (const auto& pf : benchmark_registry<double>(kData)) {
    if (pf.ode.empty()) continue;
    const auto v = verify_lyapunov(lyapunov_case(pf), cfg);
    const double pv = v.v_bound ? *v.v_bound : INFINITY, pd = v.vdot_bound ? *v.vdot_bound : INFINITY;
    c.detail << " " << pf.name.substr(pf.name.size() - 1) << ":" << (v.stable ? "ok" : "x") << "(" << g(pv) << ","
             << g(pd) << ")";
    if (pf.name == "lyapunov2")
      c.expect(!v.stable && pv <= -0.0625 + 1e-6, "lyapunov2 needs p_V <= -0.0625, got " + g(pv));
    else if (pf.name == "lyapunov8")
      c.expect(!v.stable && pv <= -10.97, "lyapunov8 needs p_V <= -10.97, got " + g(pv));
    else
      c.expect(v.stable && pv >= -1e-9 && pd >= -1e-9, pf.name + " not verified");
  }
  const double secs = since(t);
  c.expect(secs < 900.0, "runtime");
  c.detail << " time=" << g(secs) << "s";
  return c;
}

Check criterion6() {
  Check c;
  std::mt19937 rng(2024);
  int order_fail = 0, greedy_fail = 0, loop_fail = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    Degree d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = std::uniform_int_distribution<std::uint32_t>(1, 4)(rng);
    Polynomial<double> p(n);
    for (int k = 0; k < 7; ++k) {
      MultiIndex e(n);
      for (std::size_t j = 0; j < n; ++j) e[j] = std::uniform_int_distribution<std::uint32_t>(0, d[j])(rng);
      p.add_term(e, std::uniform_int_distribution<int>(-9, 9)(rng));
    }
    const Box<double> box(std::vector<double>(n, -1.0), std::vector<double>(n, 1.0));
    auto [q, map] = to_unit_box(p, box);
    const auto bf = to_bernstein(q, d);
    const auto ub = upper_bounds<double>(d);
    const auto cuts = cached_cut_matrix<double>(d);
    const double b0 = relax0(bf, map).bound, bfl = first_lp_bound(bf, ub), b1 = relax1(bf, ub, map).bound;
    const double b2 = relax2_iterative(bf, ub, *cuts, map).bound;
    Degree grid(n);
    for (std::size_t j = 0; j < n; ++j) grid[j] = 16;
    MultiIndex i(n);
    double gm = INFINITY;
    std::vector<double> x(n);
    do {
      for (std::size_t j = 0; j < n; ++j) x[j] = -1.0 + i[j] / 8.0;
      gm = std::min(gm, p.evaluate(x));
    } while (DenseIndexer::next(i, grid));
    const double tol = 1e-8 * std::max(1.0, std::fabs(gm));
    if (!(b0 <= bfl + tol && bfl <= b1 + tol && b1 <= b2 + tol && b2 <= gm + tol)) ++order_fail;
    if (!near(b1, relax1_lp(bf, ub, map).bound, 1e-8)) ++greedy_fail;
    if (!near(b2, relax2_monolithic(bf, ub, *cuts, map).bound, 1e-8)) ++loop_fail;
  }
  c.expect(order_fail == 0, "(a) ordering");
  c.expect(greedy_fail == 0, "(b) greedy vs simplex");
  c.expect(loop_fail == 0, "(c) iterative vs monolithic");

  int bern_fail = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    Degree d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = std::uniform_int_distribution<std::uint32_t>(1, 4)(rng);
    Polynomial<Rational> p(n);
    for (int k = 0; k < 6; ++k) {
      MultiIndex e(n);
      for (std::size_t j = 0; j < n; ++j) e[j] = std::uniform_int_distribution<std::uint32_t>(0, d[j])(rng);
      p.add_term(e, Rational(std::uniform_int_distribution<int>(-9, 9)(rng)));
    }
    const auto bf = to_bernstein(p, d);
    if (!(to_monomial(bf) == p)) ++bern_fail;
    const Rational lo = min_coefficient(bf).value, hi = max_coefficient(bf);
    for (int k = 0; k < 20; ++k) {
      std::vector<Rational> x(n);
      for (auto& v : x) {
        v = Rational(std::uniform_int_distribution<int>(0, 16)(rng), 16);
        v.canonicalize();
      }
      const Rational v = p.evaluate(x);
      if (bernstein_eval(bf, std::span<const Rational>(x)) != v || v < lo || v > hi) ++bern_fail;
    }
  }
  c.expect(bern_fail == 0, "(d) Bernstein round trip / enclosure");

  const std::vector<Rational> z{Rational(1, 4), Rational(1, 2), Rational(1, 4)};
  const auto xt = exactness_check(std::span<const Rational>(z), Degree{2}, AffineMap<Rational>::identity(1));
  c.expect(xt && (*xt)[0] == Rational(1, 2), "(e) exactness recovery");
  c.detail << " (a) " << order_fail << " (b) " << greedy_fail << " (c) " << loop_fail << " (d) " << bern_fail
           << " failures; (e) x~=" << (xt ? (*xt)[0].get_str() : std::string("none"));
  return c;
}

Check criterion7() {
  Check c;
  const auto e = load_problem<Rational>(kData / "example2.json");
  const auto s = load_problem<Rational>(kData / "unitsq.json");
  const auto h = load_problem<Rational>(kData / "himmelblau.json");
  const auto ue = unit(e, Degree{2});
  const auto us = unit(s, Degree{2, 2});
  const auto uh = unit(h, Degree{4, 4});
  const Rational a = relax0(ue.form, ue.map).bound;
  const Rational b = relax0(us.form, us.map).bound;
  const Rational d = relax0(uh.form, uh.map).bound;
  c.expect(a == -1 && b == -2 && d == -1170, "exact p0");
  c.detail << " p0 = " << a.get_str() << ", " << b.get_str() << ", " << d.get_str();
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria{
      {"1 exact chain on x^2 and x^2+y^2", criterion1},
      {"2 Himmelblau degree (4,4)", criterion2},
      {"3 Himmelblau degree elevation", criterion3},
      {"4 branch-and-bound optima", criterion4},
      {"5 Lyapunov verdicts", criterion5},
      {"6 property suites", criterion6},
      {"7 exact arithmetic", criterion7},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Check c;
    try {
      c = fn();
    } catch (const std::exception& ex) {
      c.ok = false;
      c.detail << " exception: " << ex.what();
    }
    std::printf("%s criterion %s:%s\n", c.ok ? "PASS" : "FAIL", name, c.detail.str().c_str());
    std::fflush(stdout);
    if (!c.ok) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
