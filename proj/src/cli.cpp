#include "bernpop/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "bernpop/lyapunov.hpp"
#include "bernpop/problem_io.hpp"

namespace bernpop {

using ojson = nlohmann::ordered_json;

Mode parse_mode(const std::string& text) {
  if (text == "relax") return Mode::Relax;
  if (text == "bnb") return Mode::Bnb;
  if (text == "lyapunov") return Mode::Lyapunov;
  if (text == "bench") return Mode::Bench;
  throw std::invalid_argument("unknown mode '" + text + "' (expected relax, bnb, lyapunov or bench)");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Relax: return "relax";
    case Mode::Bnb: return "bnb";
    case Mode::Lyapunov: return "lyapunov";
    case Mode::Bench: return "bench";
  }
  return "?";
}

std::string dump_report(const ojson& report) { return report.dump(2); }

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class T>
void put(ojson& obj, const std::string& key, const T& v) {
  const double d = to_double(v);
  if (std::isfinite(d))
    obj[key] = d;
  else
    obj[key] = std::isnan(d) ? "nan" : d > 0 ? "inf" : "-inf";
  if constexpr (ScalarTraits<T>::exact) obj[key + "_exact"] = v.get_str();
}

template <class T>
void put(ojson& obj, const std::string& key, const std::optional<T>& v) {
  if (v)
    put(obj, key, *v);
  else
    obj[key] = "inf";
}

template <class T>
void put_point(ojson& obj, const std::string& key, const std::vector<T>& x) {
  ojson values = ojson::array();
  for (const auto& v : x) values.push_back(to_double(v));
  obj[key] = std::move(values);
  if constexpr (ScalarTraits<T>::exact) {
    ojson exact = ojson::array();
    for (const auto& v : x) exact.push_back(v.get_str());
    obj[key + "_exact"] = std::move(exact);
  }
}

std::string fmt(const ojson& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v.get<double>());
    return buf;
  }
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  if (v.is_array()) {
    std::string s = "(";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt(v[k]);
    return s + ")";
  }
  return v.dump();
}

std::string fmt_time(const ojson& v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v.is_number() ? v.get<double>() : 0.0);
  return buf;
}

template <class T>
Degree resolve_degree(const RunSpec& spec, const ProblemFile<T>& pf, const Degree& needed) {
  if (spec.degree.empty()) return needed;
  Degree d(pf.dimension);
  if (spec.degree.size() == 1) {
    for (std::size_t j = 0; j < pf.dimension; ++j) d[j] = spec.degree[0];
  } else if (spec.degree.size() == pf.dimension) {
    for (std::size_t j = 0; j < pf.dimension; ++j) d[j] = spec.degree[j];
  } else {
    throw InputError("--degree has " + std::to_string(spec.degree.size()) + " entries but " + pf.name +
                     " has dimension " + std::to_string(pf.dimension));
  }
  if (!needed.leq(d))
    throw InputError("unsupported degree " + d.to_string() + " for " + pf.name + ": below the problem degree " +
                     needed.to_string());
  return d;
}

ojson degree_json(const Degree& d) { return ojson(d.entries()); }

template <class T>
BnbConfig make_config(const RunSpec& spec, const ProblemFile<T>& pf, Level default_level) {
  BnbConfig cfg;
  cfg.level = spec.level.value_or(default_level);
  cfg.epsilon = spec.epsilon ? *spec.epsilon : pf.epsilon.value_or(1e-9);
  if (!(cfg.epsilon > 0)) throw InputError("--eps must be positive");
  cfg.max_boxes = spec.max_boxes;
  if (cfg.max_boxes < 1) throw InputError("--max-boxes must be at least 1");
  cfg.split = spec.split ? *spec.split : pf.split.value_or(SplitStrategy::LongestEdge);
  cfg.jobs = std::max(1u, spec.jobs);
  return cfg;
}

ojson header(Mode mode, const std::string& problem, Arithmetic arith) {
  ojson r;
  r["mode"] = to_string(mode);
  r["problem"] = problem;
  r["arithmetic"] = arith == Arithmetic::Rational ? "rational" : "float";
  return r;
}

template <class T>
ojson bnb_json(const BnbResult<T>& res) {
  ojson b;
  put(b, "lower", res.lower);
  put(b, "upper", res.upper);
  put_point(b, "witness", res.witness);
  b["converged"] = res.converged;
  ojson s;
  s["sub"] = res.stats.subdivisions;
  s["cutoff"] = res.stats.cutoffs;
  s["mono"] = res.stats.mono;
  s["sub_edge"] = res.stats.edge_subdivisions;
  s["cutoff_edge"] = res.stats.edge_cutoffs;
  s["exact_boxes"] = res.stats.exact_boxes;
  s["infeasible_boxes"] = res.stats.infeasible_boxes;
  s["unsplittable"] = res.stats.unsplittable;
  b["stats"] = std::move(s);
  return b;
}

template <class T>
ojson relax_report(const ProblemFile<T>& pf, const RunSpec& spec) {
  const auto start = Clock::now();
  const Level top = spec.level.value_or(Level::Two);
  const Degree degree = resolve_degree(spec, pf, problem_degree<T>(pf.objective, pf.constraints));
  auto [q, map] = to_unit_box(pf.objective, pf.box);
  const BernsteinForm<T> form = to_bernstein(q, degree);
  std::vector<Polynomial<T>> mapped;
  for (const auto& g : pf.constraints) mapped.push_back(compose_affine(g, map));
  const auto extra = semialgebraic_cuts<T>(mapped, degree);

  ojson r = header(Mode::Relax, pf.name, spec.arithmetic);
  r["level"] = to_string(top);
  r["degree"] = degree_json(degree);
  ojson bounds, timings, info;
  std::optional<std::vector<T>> witness;
  std::string exact_level;
  auto feasible = [&](const std::vector<T>& x) {
    for (const auto& g : pf.constraints)
      if (g.evaluate(x) > ScalarTraits<T>::feasibility_tol()) return false;
    return true;
  };
  auto consider = [&](const RelaxationOutcome<T>& out, Level level) {
    if (out.exact && out.witness && feasible(*out.witness)) {
      witness = out.witness;
      exact_level = to_string(level);
    }
  };

  auto t = Clock::now();
  const auto r0 = relax0(form, map);
  put(bounds, "p0", r0.bound);
  timings["p0"] = seconds_since(t);
  consider(r0, Level::Zero);
  if (top != Level::Zero) {
    t = Clock::now();
    put(bounds, "first", first_lp_bound(form, upper_bounds<T>(degree)));
    timings["first"] = seconds_since(t);
  }
  bool infeasible = false;
  if (top == Level::One || top == Level::Two) {
    t = Clock::now();
    const auto r1 = relax(Level::One, form, map, std::span<const LinearCut<T>>(extra));
    timings["p1"] = seconds_since(t);
    if (r1.infeasible) {
      bounds["p1"] = "inf";
      infeasible = true;
    } else {
      put(bounds, "p1", r1.bound);
      consider(r1, Level::One);
    }
  }
  if (top == Level::Two) {
    t = Clock::now();
    const auto cuts = cached_cut_matrix<T>(degree);
    const auto r2 = relax2_iterative(form, upper_bounds<T>(degree), *cuts, map, std::span<const LinearCut<T>>(extra));
    timings["p2"] = seconds_since(t);
    info["cut_rows"] = cuts->rows.size();
    info["activated_rows"] = r2.activated_rows.size();
    info["lp_rounds"] = r2.iterations;
    if (r2.infeasible) {
      bounds["p2"] = "inf";
      infeasible = true;
    } else {
      put(bounds, "p2", r2.bound);
      consider(r2, Level::Two);
    }
  }
  r["bounds"] = std::move(bounds);
  info["constraint_rows"] = extra.size();
  info["infeasible"] = infeasible;
  info["exact"] = witness.has_value();
  if (witness) {
    info["exact_level"] = exact_level;
    put_point(info, "witness", *witness);
    put(info, "witness_value", pf.objective.evaluate(*witness));
  }
  r["relaxation"] = std::move(info);
  timings["total"] = seconds_since(start);
  r["timings"] = std::move(timings);
  return r;
}

template <class T>
ojson bnb_report(const ProblemFile<T>& pf, const RunSpec& spec, int& status) {
  BnbConfig cfg = make_config(spec, pf, Level::Zero);
  cfg.degree = resolve_degree(spec, pf, problem_degree<T>(pf.objective, pf.constraints));
  const auto res = branch_and_bound<T>(pf.objective, pf.constraints, pf.box, cfg);
  if (!res.converged) status = kExitNotConverged;
  ojson r = header(Mode::Bnb, pf.name, spec.arithmetic);
  r["level"] = to_string(cfg.level);
  r["epsilon"] = cfg.epsilon;
  r["split"] = to_string(cfg.split);
  r["degree"] = degree_json(*cfg.degree);
  ojson b = bnb_json(res);
  if (pf.known_optimum) {
    const double opt = *pf.known_optimum;
    // Witnesses are feasible only up to the LP feasibility tolerance.
    const double tol = 1e-8 * std::max(1.0, std::fabs(opt));
    b["known_optimum"] = opt;
    b["contains_optimum"] =
        res.lower && res.upper && to_double(*res.lower) <= opt + tol && opt <= to_double(*res.upper) + tol;
  }
  r["bnb"] = std::move(b);
  ojson timings;
  timings["bnb"] = res.stats.elapsed;
  timings["bnb_edge"] = res.stats.edge_elapsed;
  r["timings"] = std::move(timings);
  return r;
}

template <class T>
ojson lyapunov_report(const ProblemFile<T>& pf, const RunSpec& spec, int& status) {
  const LyapunovCase<T> c = lyapunov_case(pf);
  BnbConfig cfg = make_config(spec, pf, Level::Zero);
  cfg.split = SplitStrategy::ZeroCentered;
  if (!spec.degree.empty()) {
    const Polynomial<T> vdot = lie_derivative<T>(c.v, c.system.f);
    cfg.degree = resolve_degree(spec, pf, c.v.degree().max(vdot.degree()));
  }
  const Verdict<T> v = verify_lyapunov(c, cfg);
  if (!v.v_run.converged || !v.vdot_run.converged) status = kExitNotConverged;

  ojson r = header(Mode::Lyapunov, pf.name, spec.arithmetic);
  r["level"] = to_string(cfg.level);
  r["epsilon"] = cfg.epsilon;
  r["split"] = to_string(cfg.split);
  ojson lie;
  lie["terms"] = v.vdot.terms().size();
  if (pf.printed_lie_derivative) {
    const DerivativeCheck check = check_lie_derivative(pf);
    lie["printed_match"] = check.match;
    lie["max_difference"] = check.max_difference;
    lie["differences"] = check.differences;
  }
  r["lie_derivative"] = std::move(lie);
  ojson runs;
  runs["V"] = bnb_json(v.v_run);
  runs["neg_vdot"] = bnb_json(v.vdot_run);
  r["bnb"] = std::move(runs);
  ojson verdict;
  put(verdict, "v_bound", v.v_bound);
  put(verdict, "vdot_bound", v.vdot_bound);
  verdict["stable"] = v.stable;
  verdict["v_vanishes_at_origin"] = v.v_vanishes_at_origin;
  if (c.expected_stable) {
    verdict["expected"] = *c.expected_stable ? "stable" : "unstable";
    verdict["matches_expected"] = *c.expected_stable == v.stable;
  }
  r["verdict"] = std::move(verdict);
  ojson timings;
  timings["v"] = v.v_run.stats.elapsed;
  timings["neg_vdot"] = v.vdot_run.stats.elapsed;
  r["timings"] = std::move(timings);
  return r;
}

// ---- text rendering -------------------------------------------------------

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s + " ";
}

void render_relax(const ojson& r, std::ostream& out) {
  out << r["problem"].get<std::string>() << "  relax  " << r["arithmetic"].get<std::string>() << "  degree "
      << fmt(r["degree"]) << "\n";
  out << "  " << pad("level", 6) << pad("bound", 22) << "time[s]\n";
  const ojson& timings = r.contains("timings") ? r["timings"] : ojson::object();
  for (const char* key : {"p0", "first", "p1", "p2"}) {
    if (!r["bounds"].contains(key)) continue;
    const std::string exact_key = std::string(key) + "_exact";
    std::string value = fmt(r["bounds"][key]);
    if (r["bounds"].contains(exact_key)) value += " [" + r["bounds"][exact_key].get<std::string>() + "]";
    out << "  " << pad(key, 6) << pad(value, 22) << (timings.contains(key) ? fmt_time(timings[key]) : "") << "\n";
  }
  const ojson& info = r["relaxation"];
  if (info.contains("cut_rows"))
    out << "  cut rows " << info["cut_rows"] << ", activated " << info["activated_rows"] << ", LP rounds "
        << info["lp_rounds"] << "\n";
  if (info["constraint_rows"].get<std::size_t>() > 0) out << "  constraint rows " << info["constraint_rows"] << "\n";
  if (info["infeasible"].get<bool>()) out << "  relaxation infeasible: the feasible set is empty\n";
  if (info["exact"].get<bool>())
    out << "  exact at level " << info["exact_level"].get<std::string>() << ": minimizer " << fmt(info["witness"])
        << ", value " << fmt(info["witness_value"]) << "\n";
  else
    out << "  exact: no\n";
}

void bnb_table_header(std::ostream& out) {
  out << pad("ID", 18) << pad("level", 5) << pad("Sub", 8) << pad("Time", 9) << pad("Cutoff", 8) << pad("Mono", 6)
      << pad("Sub*", 7) << pad("Cutoff*", 8) << pad("Time*", 9) << "Opt\n";
}

void bnb_table_row(const ojson& r, std::ostream& out) {
  const ojson& b = r["bnb"];
  const ojson& s = b["stats"];
  const ojson& t = r.contains("timings") ? r["timings"] : ojson::object();
  out << pad(r["problem"].get<std::string>(), 18) << pad(r["level"].get<std::string>(), 5)
      << pad(fmt(s["sub"]), 8) << pad(fmt_time(t.value("bnb", ojson())), 9) << pad(fmt(s["cutoff"]), 8)
      << pad(fmt(s["mono"]), 6) << pad(fmt(s["sub_edge"]), 7) << pad(fmt(s["cutoff_edge"]), 8)
      << pad(fmt_time(t.value("bnb_edge", ojson())), 9) << fmt(b["upper"]) << "\n";
}

void render_bnb(const ojson& r, std::ostream& out) {
  bnb_table_header(out);
  bnb_table_row(r, out);
  const ojson& b = r["bnb"];
  out << "  lower " << fmt(b["lower"]) << "  upper " << fmt(b["upper"]) << "  converged " << fmt(b["converged"])
      << "  witness " << fmt(b["witness"]) << "\n";
  if (b.contains("known_optimum"))
    out << "  known optimum " << fmt(b["known_optimum"]) << (b["contains_optimum"].get<bool>() ? " (enclosed)" : " (NOT enclosed)")
        << "\n";
}

void lyapunov_table_header(const std::string& level, std::ostream& out) {
  out << pad("EX", 14) << pad("p_V*(" + level + ")", 18) << pad("p_Vdot*(" + level + ")", 18) << pad("verdict", 10)
      << "expected\n";
}

void lyapunov_table_row(const ojson& r, std::ostream& out) {
  const ojson& v = r["verdict"];
  out << pad(r["problem"].get<std::string>(), 14) << pad(fmt(v["v_bound"]), 18) << pad(fmt(v["vdot_bound"]), 18)
      << pad(v["stable"].get<bool>() ? "stable" : "rejected", 10) << v.value("expected", std::string("-")) << "\n";
}

void lyapunov_notes(const ojson& r, std::ostream& out) {
  const ojson& lie = r["lie_derivative"];
  if (lie.contains("printed_match") && !lie["printed_match"].get<bool>()) {
    out << "  " << r["problem"].get<std::string>() << ": printed Lie derivative differs from the computed one ("
        << lie["differences"].size() << " terms); the computed derivative is used\n";
  }
  if (!r["verdict"]["v_vanishes_at_origin"].get<bool>())
    out << "  " << r["problem"].get<std::string>() << ": warning, V(0) != 0\n";
}

void render_lyapunov(const ojson& r, std::ostream& out) {
  lyapunov_table_header(r["level"].get<std::string>(), out);
  lyapunov_table_row(r, out);
  lyapunov_notes(r, out);
}

void render(const ojson& r, std::ostream& out) {
  const std::string mode = r["mode"].get<std::string>();
  if (mode == "relax") render_relax(r, out);
  if (mode == "bnb") render_bnb(r, out);
  if (mode == "lyapunov") render_lyapunov(r, out);
  if (mode == "bench") {
    bool any_bnb = false, any_lyap = false;
    for (const auto& c : r["cases"]) (c["mode"] == "bnb" ? any_bnb : any_lyap) = true;
    if (any_bnb) {
      bnb_table_header(out);
      for (const auto& c : r["cases"])
        if (c["mode"] == "bnb") bnb_table_row(c, out);
    }
    if (any_lyap) {
      if (any_bnb) out << "\n";
      lyapunov_table_header(r["level"].get<std::string>(), out);
      for (const auto& c : r["cases"])
        if (c["mode"] == "lyapunov") lyapunov_table_row(c, out);
      for (const auto& c : r["cases"])
        if (c["mode"] == "lyapunov") lyapunov_notes(c, out);
    }
  }
}

void strip_timings(ojson& r) {
  r.erase("timings");
  if (r.contains("cases"))
    for (auto& c : r["cases"]) strip_timings(c);
}

template <class T>
ojson run_one(const RunSpec& spec, const ProblemFile<T>& pf, Mode mode, int& status) {
  switch (mode) {
    case Mode::Relax: return relax_report(pf, spec);
    case Mode::Bnb: return bnb_report(pf, spec, status);
    case Mode::Lyapunov: return lyapunov_report(pf, spec, status);
    case Mode::Bench: break;
  }
  throw std::logic_error("run_one: bench is not a single-problem mode");
}

template <class T>
ojson run_bench(const RunSpec& spec, int& status) {
  std::filesystem::path dir = spec.inputs.empty() ? default_fixture_dir() : std::filesystem::path(spec.inputs[0]);
  if (spec.inputs.size() > 1) throw InputError("bench takes at most one fixture directory");
  const auto registry = benchmark_registry<T>(dir);
  RunSpec inner = spec;
  inner.jobs = 1;
  std::vector<ojson> cases(registry.size());
  std::vector<int> codes(registry.size(), kExitOk);
  std::vector<std::exception_ptr> errors(registry.size());
  auto work = [&](std::size_t i) {
    try {
      const Mode m = registry[i].ode.empty() ? Mode::Bnb : Mode::Lyapunov;
      cases[i] = run_one(inner, registry[i], m, codes[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t jobs = std::max(1u, spec.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < registry.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < registry.size(); i += jobs) work(i);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  ojson r;
  r["mode"] = "bench";
  r["arithmetic"] = spec.arithmetic == Arithmetic::Rational ? "rational" : "float";
  r["level"] = to_string(spec.level.value_or(Level::Zero));
  r["cases"] = ojson::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    r["cases"].push_back(std::move(cases[i]));
    if (codes[i] != kExitOk) status = codes[i];
  }
  return r;
}

template <class T>
int run_typed(const RunSpec& spec, std::ostream& out) {
  int status = kExitOk;
  std::vector<ojson> reports;
  if (spec.mode == Mode::Bench) {
    reports.push_back(run_bench<T>(spec, status));
  } else {
    if (spec.inputs.empty()) throw InputError("no problem file given");
    for (const auto& path : spec.inputs) reports.push_back(run_one(spec, load_problem<T>(path), spec.mode, status));
  }
  if (spec.output == OutputFormat::Json) {
    if (!spec.timings)
      for (auto& r : reports) strip_timings(r);
    if (reports.size() == 1)
      out << dump_report(reports[0]) << "\n";
    else
      out << dump_report(ojson(reports)) << "\n";
  } else {
    for (std::size_t k = 0; k < reports.size(); ++k) {
      if (k) out << "\n";
      render(reports[k], out);
    }
  }
  return status;
}

}  // namespace

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    if (spec.arithmetic == Arithmetic::Rational) return run_typed<Rational>(spec, out);
    return run_typed<double>(spec, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    err << "error: invalid input: " << e.what() << "\n";
  } catch (const std::overflow_error& e) {
    err << "error: unsupported degree: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitInputError;
}

}  // namespace bernpop
