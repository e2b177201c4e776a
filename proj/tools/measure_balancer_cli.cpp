// measure-balancer: classify, weigh and balance atomic measures on P^n.
//
// Structured results go to stdout as JSON (CSV for weight tables), human
// readable summaries to stderr. Exit codes:
//   0   success / Stable / Converged
//   2   input error (unreadable or malformed file, invalid measure or flag)
//   3   numerical failure
//   10  PolystableNotStable       11  SemistableNotPolystable   12  Unstable
//   20  DivergedWithCertificate   21  MaxIterations             22  TargetOutsidePolytope

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mbal/balancer.hpp"
#include "mbal/classifier.hpp"
#include "mbal/io.hpp"
#include "mbal/random.hpp"
#include "mbal/sphere.hpp"
#include "mbal/torus.hpp"
#include "mbal/weights.hpp"

using namespace mbal;

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json subspace_json(const CandidateSubspace& c) {
  return {{"dim", c.projective_dim()}, {"mass", c.mass}, {"atoms", c.atoms}, {"basis", matrix_to_json(c.basis)}};
}

Json vector3_json(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

void print_json(const Json& doc) { std::cout << doc.dump(2) << '\n'; }

// --- classify / decompose ---------------------------------------------------

struct ClassifyArgs {
  std::string file;
  bool strict = false;
  double tol_eq = kDefaultTolEq;
  bool decompose = false;
};

int exit_code(StabilityKind kind) {
  switch (kind) {
    case StabilityKind::Stable: return 0;
    case StabilityKind::PolystableNotStable: return 10;
    case StabilityKind::SemistableNotPolystable: return 11;
    case StabilityKind::Unstable: return 12;
  }
  return 2;
}

int run_classify(const ClassifyArgs& args) {
  const AtomicMeasure nu = measure_from_json(load_json_file(args.file));
  ClassifyOptions options;
  // --strict drops the equality tolerance: only exact mass ties are boundary cases.
  options.tol_eq = args.strict ? 0.0 : args.tol_eq;
  const StabilityVerdict v = classify(nu, options);

  Json out = {{"kind", to_string(v.kind)},
              {"margin", v.margin},
              {"tol_eq", options.tol_eq},
              {"near_boundary", std::abs(v.margin) <= args.tol_eq}};
  out["certificate"] = v.certificate ? subspace_json(*v.certificate) : Json(nullptr);

  std::optional<PolystableSplitting> split = v.decomposition;
  if (args.decompose && !split && v.kind == StabilityKind::Stable) split = polystable_decompose(nu, options);
  if (split && (args.decompose || v.kind == StabilityKind::PolystableNotStable)) {
    Json blocks = Json::array();
    for (const auto& b : split->blocks) {
      blocks.push_back({{"dim", b.basis.cols() - 1}, {"mass", b.mass}, {"atoms", b.atoms},
                        {"basis", matrix_to_json(b.basis)}});
    }
    out["decomposition"] = std::move(blocks);
  } else if (args.decompose) {
    out["decomposition"] = nullptr;
  }
  print_json(out);

  std::cerr << to_string(v.kind) << ", margin " << num(v.margin) << '\n';
  if (v.certificate) {
    std::cerr << "certificate: subspace of projective dimension " << v.certificate->projective_dim() << " with mass "
              << num(v.certificate->mass) << " (bound " << num(static_cast<double>(v.certificate->basis.cols()) /
                                                                static_cast<double>(nu.ambient_dim()))
              << ")\n";
  }
  if (out.contains("decomposition")) {
    if (out["decomposition"].is_null()) {
      std::cerr << "not polystable\n";
    } else {
      for (const auto& b : out["decomposition"]) {
        std::cerr << "block: dim " << b["dim"] << ", mass " << num(b["mass"].get<double>()) << '\n';
      }
    }
  }
  return exit_code(v.kind);
}

// --- weight -----------------------------------------------------------------

struct WeightArgs {
  std::string file;
  std::string direction;
  int random = 0;
  std::uint64_t seed = 0;
  double flow_check = -1.0;
};

std::vector<CMatrix> load_directions(const std::string& path) {
  const Json doc = load_json_file(path);
  std::vector<CMatrix> out;
  if (doc.is_object() && doc.contains("directions")) {
    for (const Json& m : doc.at("directions")) out.push_back(matrix_from_json(m));
  } else {
    out.push_back(matrix_from_json(doc));
  }
  return out;
}

std::string joined(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ";" : "") + num(values[i]);
  return s;
}

int run_weight(const WeightArgs& args) {
  const AtomicMeasure nu = measure_from_json(load_json_file(args.file));
  std::vector<CMatrix> directions;
  if (!args.direction.empty()) {
    directions = load_directions(args.direction);
  } else {
    Rng rng(args.seed);
    for (int k = 0; k < args.random; ++k) directions.push_back(random_traceless_hermitian(rng, nu.ambient_dim()));
  }
  for (const auto& a : directions) {
    if (a.rows() != nu.ambient_dim() || a.cols() != nu.ambient_dim()) {
      throw Error(ErrorKind::InvalidDirection, "direction must be " + std::to_string(nu.ambient_dim()) + "x" +
                                                   std::to_string(nu.ambient_dim()));
    }
  }

  // Decompose everything first so invalid input fails before any output.
  std::vector<SpectralDirection> decomposed;
  for (const auto& a : directions) decomposed.push_back(spectral_decompose(a));

  const bool flow = args.flow_check >= 0.0;
  std::cout << "direction,eigenvalues,stratum_masses,lambda" << (flow ? ",flow_lambda,discrepancy" : "") << '\n';
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < decomposed.size(); ++k) {
    const SpectralDirection& d = decomposed[k];
    const WeightReport r = maximal_weight(nu, d);
    std::vector<double> masses;
    for (const auto& s : r.strata) masses.push_back(s.mass);
    std::cout << k << ',' << joined(d.eigenvalues()) << ',' << joined(masses) << ',' << num(r.lambda);
    if (flow) {
      const double f = lambda_via_flow(nu, d, args.flow_check);
      std::cout << ',' << num(f) << ',' << num(std::abs(f - r.lambda));
    }
    std::cout << '\n';
    lowest = std::min(lowest, r.lambda);
  }
  std::cerr << directions.size() << " directions, smallest lambda " << num(lowest) << '\n';
  return 0;
}

// --- balance ----------------------------------------------------------------

struct BalanceArgs {
  std::string file;
  std::string target;
  std::string method = "fixed-point";
  double tol = kDefaultBalanceTol;
  int max_iter = kDefaultBalanceMaxIter;
  std::string trace;
};

int exit_code(BalanceVerdict verdict) {
  switch (verdict) {
    case BalanceVerdict::Converged: return 0;
    case BalanceVerdict::DivergedWithCertificate: return 20;
    case BalanceVerdict::MaxIterations: return 21;
  }
  return 2;
}

void write_trace(const std::string& path, const std::vector<TraceRow>& trace) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  out << trace_to_csv(trace);
}

int run_balance(const BalanceArgs& args) {
  const AtomicMeasure nu = measure_from_json(load_json_file(args.file));
  BalanceOptions options;
  options.method = args.method == "descent" ? BalanceMethod::GeodesicDescent : BalanceMethod::FixedPoint;
  options.tol = args.tol;
  options.max_iter = args.max_iter;
  if (!args.target.empty()) options.target_rho = matrix_from_json(load_json_file(args.target));

  const BalanceResult r = balance(nu, options);
  write_trace(args.trace, r.trace);
  const CMatrix& g = r.g.matrix();
  Json out = {{"verdict", to_string(r.verdict)},
              {"method", options.target_rho ? "newton" : to_string(options.method)},
              {"iterations", r.iterations},
              {"residual", r.residual},
              {"g", matrix_to_json(g)},
              {"S", matrix_to_json(g.adjoint() * g)}};
  out["certificate"] = r.certificate ? subspace_json(*r.certificate) : Json(nullptr);
  print_json(out);

  std::cerr << to_string(r.verdict) << " after " << r.iterations << " iterations, residual " << num(r.residual)
            << '\n';
  if (r.certificate) {
    std::cerr << "certificate: subspace of projective dimension " << r.certificate->projective_dim()
              << " with mass " << num(r.certificate->mass) << '\n';
  }
  return exit_code(r.verdict);
}

// --- sphere -----------------------------------------------------------------

struct SphereArgs {
  std::string file;
  double tol = kDefaultBalanceTol;
  int max_iter = kDefaultBalanceMaxIter;
};

int run_sphere_com(const SphereArgs& args) {
  const SphereMeasure sm = sphere_from_json(load_json_file(args.file));
  const Eigen::Vector3d com = center_of_mass(sm);
  print_json({{"center_of_mass", vector3_json(com)}, {"norm", com.norm()}});
  std::cerr << "center of mass (" << num(com.x()) << ", " << num(com.y()) << ", " << num(com.z()) << ")\n";
  return 0;
}

int run_sphere_balance(const SphereArgs& args) {
  const SphereMeasure sm = sphere_from_json(load_json_file(args.file));
  const HerschResult h = hersch_balance(sm, args.tol, args.max_iter);
  const CMatrix& g = h.mobius.matrix();
  // On w = z1/z0 the matrix acts as w -> (a w + b)/(c w + d).
  const auto c = [](Complex z) { return Json::array({z.real(), z.imag()}); };
  Json out = {{"verdict", to_string(h.result.verdict)},
              {"stability", to_string(h.verdict.kind)},
              {"iterations", h.result.iterations},
              {"residual", h.result.residual},
              {"mobius", matrix_to_json(g)},
              {"mobius_map", {{"a", c(g(1, 1))}, {"b", c(g(1, 0))}, {"c", c(g(0, 1))}, {"d", c(g(0, 0))}}},
              {"final_center_of_mass", vector3_json(h.final_com)}};
  out["offending_atom"] = h.offending_atom ? vector3_json(*h.offending_atom) : Json(nullptr);
  print_json(out);

  std::cerr << to_string(h.verdict.kind) << "; " << to_string(h.result.verdict) << " after " << h.result.iterations
            << " iterations, |center of mass| " << num(h.final_com.norm()) << '\n';
  if (h.offending_atom) {
    std::cerr << "offending atom (" << num(h.offending_atom->x()) << ", " << num(h.offending_atom->y()) << ", "
              << num(h.offending_atom->z()) << ")\n";
  }
  return exit_code(h.result.verdict);
}

// --- torus ------------------------------------------------------------------

struct TorusArgs {
  std::string file;
  std::string beta;
  double tol = 1e-10;
  int max_iter = 200;
};

RVector parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, "not a number: \"" + item + "\"");
    }
  }
  return Eigen::Map<RVector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

int run_torus(const TorusArgs& args) {
  const AtomicMeasure nu = measure_from_json(load_json_file(args.file));
  const RVector beta = args.beta.empty() ? RVector::Zero(nu.ambient_dim()) : parse_vector(args.beta);
  const TorusSolveResult r = torus_solve(nu, beta, args.tol, args.max_iter);
  const bool converged = r.verdict == TorusVerdict::Converged;
  print_json({{"verdict", converged ? "Converged" : "MaxIterations"},
              {"theta", real_vector_to_json(r.theta)},
              {"residual", r.residual},
              {"iterations", r.iterations}});
  std::cerr << (converged ? "Converged" : "MaxIterations") << " after " << r.iterations << " Newton steps, residual "
            << num(r.residual) << '\n';
  return converged ? 0 : 21;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability, maximal weights and momentum balancing of atomic measures on P^n"};
  app.require_subcommand(1);

  ClassifyArgs classify_args;
  auto* classify_cmd = app.add_subcommand("classify", "Stability verdict via the subspace-mass criterion");
  classify_cmd->add_option("measure", classify_args.file, "measure JSON file")->required();
  classify_cmd->add_flag("--strict", classify_args.strict, "compare masses exactly (tol-eq = 0)");
  classify_cmd->add_option("--tol-eq", classify_args.tol_eq, "tolerance for mass equality")
      ->check(CLI::PositiveNumber);
  classify_cmd->add_flag("--decompose", classify_args.decompose, "always report the polystable splitting");

  ClassifyArgs decompose_args;
  decompose_args.decompose = true;
  auto* decompose_cmd = app.add_subcommand("decompose", "Alias for classify --decompose");
  decompose_cmd->add_option("measure", decompose_args.file, "measure JSON file")->required();
  decompose_cmd->add_flag("--strict", decompose_args.strict, "compare masses exactly (tol-eq = 0)");
  decompose_cmd->add_option("--tol-eq", decompose_args.tol_eq, "tolerance for mass equality")
      ->check(CLI::PositiveNumber);

  WeightArgs weight_args;
  auto* weight_cmd = app.add_subcommand("weight", "Maximal weights along directions (CSV)");
  weight_cmd->add_option("measure", weight_args.file, "measure JSON file")->required();
  auto* direction_opt =
      weight_cmd->add_option("--direction", weight_args.direction, "matrix JSON file, or {\"directions\": [...]}");
  auto* random_opt = weight_cmd->add_option("--random", weight_args.random, "number of random unit directions")
                         ->check(CLI::PositiveNumber);
  weight_cmd->add_option("--seed", weight_args.seed, "seed for --random (mt19937_64)");
  weight_cmd->add_option("--flow-check", weight_args.flow_check, "also evaluate the flow oracle at this time")
      ->check(CLI::NonNegativeNumber);
  direction_opt->excludes(random_opt);
  random_opt->excludes(direction_opt);

  BalanceArgs balance_args;
  auto* balance_cmd = app.add_subcommand("balance", "Find g with momentum(g . nu) = 0 or a target density");
  balance_cmd->add_option("measure", balance_args.file, "measure JSON file")->required();
  balance_cmd->add_option("--target", balance_args.target, "target density rho (positive, trace 1) JSON file");
  balance_cmd->add_option("--method", balance_args.method, "fixed-point or descent")
      ->check(CLI::IsMember({"fixed-point", "descent"}));
  balance_cmd->add_option("--tol", balance_args.tol, "residual tolerance")->check(CLI::PositiveNumber);
  balance_cmd->add_option("--max-iter", balance_args.max_iter, "iteration cap")->check(CLI::PositiveNumber);
  balance_cmd->add_option("--trace", balance_args.trace, "write iteration,residual,kempf_ness CSV here");

  SphereArgs sphere_args;
  auto* sphere_cmd = app.add_subcommand("sphere", "Measures on the 2-sphere");
  sphere_cmd->require_subcommand(1);
  auto* sphere_balance = sphere_cmd->add_subcommand("balance", "Conformally center the measure");
  sphere_balance->add_option("sphere", sphere_args.file, "sphere measure JSON file")->required();
  sphere_balance->add_option("--tol", sphere_args.tol, "bound on the final |center of mass|")
      ->check(CLI::PositiveNumber);
  sphere_balance->add_option("--max-iter", sphere_args.max_iter, "iteration cap")->check(CLI::PositiveNumber);
  auto* sphere_com = sphere_cmd->add_subcommand("com", "Euclidean center of mass");
  sphere_com->add_option("sphere", sphere_args.file, "sphere measure JSON file")->required();

  TorusArgs torus_args;
  auto* torus_cmd = app.add_subcommand("torus", "Balance under the diagonal torus");
  torus_cmd->add_option("measure", torus_args.file, "measure JSON file")->required();
  torus_cmd->add_option("--beta", torus_args.beta, "comma-separated target, summing to zero (default 0)");
  torus_cmd->add_option("--tol", torus_args.tol, "gradient residual tolerance")->check(CLI::PositiveNumber);
  torus_cmd->add_option("--max-iter", torus_args.max_iter, "Newton step cap")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*classify_cmd) return run_classify(classify_args);
    if (*decompose_cmd) return run_classify(decompose_args);
    if (*weight_cmd) {
      if (weight_args.direction.empty() && weight_args.random == 0) {
        throw Error(ErrorKind::InvalidArgument, "give --direction or --random");
      }
      return run_weight(weight_args);
    }
    if (*balance_cmd) return run_balance(balance_args);
    if (*sphere_balance) return run_sphere_balance(sphere_args);
    if (*sphere_com) return run_sphere_com(sphere_args);
    if (*torus_cmd) return run_torus(torus_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.kind() == ErrorKind::TargetOutsidePolytope) return 22;
    if (e.kind() == ErrorKind::NumericalDegeneracy) return 3;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
