#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bernpop/cli.hpp"

int main(int argc, char** argv) {
  using namespace bernpop;

  CLI::App app{"Bernstein-basis bounds and branch and bound for box-constrained polynomial optimization"};
  std::string mode = "relax";
  std::string level, split, arith = "float", output = "text";
  RunSpec spec;
  double eps = 0.0;
  bool no_timings = false;

  app.add_option("mode", mode, "relax | bnb | lyapunov | bench")->required();
  app.add_option("inputs", spec.inputs, "problem files (bench: fixture directory)");
  app.add_option("--level", level, "0 | first | 1 | 2");
  app.add_option("--degree", spec.degree, "Bernstein degree: one value per axis, or one for all")
      ->delimiter(',')
      ->allow_extra_args(false);
  auto* eps_opt = app.add_option("--eps", eps, "relative tolerance for cutoff and termination");
  app.add_option("--max-boxes", spec.max_boxes, "budget of popped boxes");
  app.add_option("--split", split, "longest | zero");
  app.add_option("--arith", arith, "float | rational")->check(CLI::IsMember({"float", "rational"}));
  app.add_option("--output", output, "text | json")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--jobs", spec.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--no-timings", no_timings, "omit the timings section from JSON reports");

  try {
    app.parse(argc, argv);
    spec.mode = parse_mode(mode);
    if (!level.empty()) spec.level = parse_level(level);
    if (!split.empty()) spec.split = parse_split(split);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  if (*eps_opt) spec.epsilon = eps;
  spec.arithmetic = arith == "rational" ? Arithmetic::Rational : Arithmetic::Float;
  spec.output = output == "json" ? OutputFormat::Json : OutputFormat::Text;
  spec.timings = !no_timings;
  return run(spec, std::cout, std::cerr);
}
