#include "conewishart/cli.hpp"

#include "conewishart/errors.hpp"
#include "conewishart/io.hpp"
#include "conewishart/sampling.hpp"
#include "conewishart/verification.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>

namespace conewishart {
namespace {

struct RunConfig {
  std::string cone = "sym(3)";
  std::string weights;
  std::string theta = "identity";
  std::string eta;
  std::string point;
  std::string out;
  std::string method = "bartlett";
  std::string criteria;
  std::uint64_t seed = 1;
  std::uint64_t verify_seed = BatteryOptions{}.seed;
  long count = 1000;
  int order = 2;
  double tol = kAxiomTol;
};

Vector weights_for(const ConeRealization& cone, const RunConfig& cfg) {
  if (cfg.weights.empty())
    throw Error(ErrorCode::InvalidArgument, "--weights is required");
  Vector w = parse_vector(cfg.weights);
  if (w.size() != cone.rank())
    throw Error(ErrorCode::DimensionMismatch,
                "--weights needs " + std::to_string(cone.rank()) + " values");
  return w;
}

Vector raw_vector(const ConeRealization& cone, const std::string& spec, const char* flag) {
  Vector v = parse_vector(spec);
  if (v.size() != cone.dim())
    throw Error(ErrorCode::DimensionMismatch,
                std::string(flag) + " needs " + std::to_string(cone.dim()) + " coordinates");
  return v;
}

Json matrix_rows(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index a = 0; a < m.rows(); ++a) rows.push_back(vector_json(m.row(a).transpose()));
  return rows;
}

int cmd_inspect(const RunConfig& cfg, std::ostream& out) {
  const ConePtr cone = load_cone(cfg.cone);
  const int r = cone->rank();
  Json j;
  j["name"] = cone->name();
  j["partition"] = cone->vsystem().partition;
  j["N"] = cone->ambient_size();
  j["rank"] = r;
  j["dimZ"] = cone->dim();
  Json nlk = Json::array();
  for (int l = 0; l < r; ++l) {
    Json row = Json::array();
    for (int k = 0; k < r; ++k) row.push_back(k < l ? cone->block_dim(l, k) : 0);
    nlk.push_back(row);
  }
  j["n_lk"] = nlk;
  Json m = Json::array();
  for (int i = 0; i < r; ++i) m.push_back(vector_json(cone->m_vector(i)));
  j["m"] = m;
  j["p"] = vector_json(cone->p_full());
  j["d"] = vector_json(cone->d_vector());
  j["coordinates"] = cone->coordinate_names();
  Json ax = Json::array();
  for (const auto& c : check_axioms(cone->vsystem(), cfg.tol))
    ax.push_back({{"rule", c.rule}, {"passed", c.passed}, {"max_residual", c.max_residual}});
  j["axioms"] = ax;
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_axioms(const RunConfig& cfg, std::ostream& out) {
  const auto [vs, name] = load_vsystem(cfg.cone);
  bool ok = true;
  Json ax = Json::array();
  for (const auto& c : check_axioms(vs, cfg.tol)) {
    ok = ok && c.passed;
    Json e = {{"rule", c.rule}, {"passed", c.passed}, {"max_residual", c.max_residual}};
    if (!c.passed) e["worst"] = {c.l, c.k, c.j};
    ax.push_back(e);
  }
  out << Json{{"cone", name}, {"tol", cfg.tol}, {"passed", ok}, {"checks", ax}}.dump(2) << '\n';
  return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_gindikin(const RunConfig& cfg, std::ostream& out) {
  const ConePtr cone = load_cone(cfg.cone);
  const Vector w = weights_for(*cone, cfg);
  Json j = gindikin_report(*cone, sigma_of_weights(*cone, w));
  j["weights"] = vector_json(w);
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_laplace(const RunConfig& cfg, std::ostream& out) {
  const ConePtr cone = load_cone(cfg.cone);
  const Vector w = weights_for(*cone, cfg);
  const Vector theta = parse_theta(cone, cfg.theta);
  const RieszDescriptor desc = riesz_exists(cone, w);
  Json j;
  j["theta"] = vector_json(theta);
  j["sigma"] = vector_json(desc.param.sigma);
  j["riesz_laplace"] = riesz_laplace(desc, theta);
  if (!cfg.eta.empty()) {
    const WishartLaw law = basic_law(cone, w, theta);
    const Vector eta = raw_vector(*cone, cfg.eta, "--eta");
    j["eta"] = vector_json(eta);
    j["wishart_laplace"] = wishart_laplace(law, eta);
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_moments(const RunConfig& cfg, std::ostream& out) {
  const ConePtr cone = load_cone(cfg.cone);
  const WishartLaw law = basic_law(cone, weights_for(*cone, cfg), parse_theta(cone, cfg.theta));
  Json j;
  j["coordinates"] = cone->coordinate_names();
  j["mean"] = vector_json(mean_element(law));
  j["covariance"] = matrix_rows(covariance_matrix(law));
  if (!cfg.eta.empty()) {
    if (cfg.order < 1) throw Error(ErrorCode::InvalidArgument, "--order must be >= 1");
    const Vector eta = raw_vector(*cone, cfg.eta, "--eta");
    j["eta"] = vector_json(eta);
    j["order"] = cfg.order;
    j["univariate_moment"] = univariate_moment(law, eta, cfg.order);
    if (cfg.order <= kMaxPermutationOrder)
      j["permutation_moment"] = moment(law, std::vector<Vector>(cfg.order, eta));
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_density(const RunConfig& cfg, std::ostream& out) {
  const ConePtr cone = load_cone(cfg.cone);
  const WishartLaw law = basic_law(cone, weights_for(*cone, cfg), parse_theta(cone, cfg.theta));
  if (cfg.point.empty()) throw Error(ErrorCode::InvalidArgument, "--point is required");
  const Vector y = raw_vector(*cone, cfg.point, "--point");
  out << Json{{"point", vector_json(y)}, {"density", density(law, y)},
              {"log_density", log_density(law, y)}}
             .dump(2)
      << '\n';
  return kExitOk;
}

int cmd_sample(const RunConfig& cfg, std::ostream& out) {
  const ConePtr cone = load_cone(cfg.cone);
  const Vector w = weights_for(*cone, cfg);
  const Vector theta = parse_theta(cone, cfg.theta);
  if (cfg.count < 0) throw Error(ErrorCode::InvalidArgument, "--count must be >= 0");
  if (cfg.out.empty()) throw Error(ErrorCode::InvalidArgument, "--out is required");
  const WishartLaw law = basic_law(cone, w, theta);
  SampleBatch batch;
  if (cfg.method == "bartlett") {
    batch = bartlett_sample(law, cfg.seed, cfg.count);
  } else if (cfg.method == "direct") {
    std::vector<QuadraticMap> copies;
    for (int i = 0; i < cone->rank(); ++i) {
      if (w(i) < 0 || w(i) != std::round(w(i)))
        throw Error(ErrorCode::VirtualMapUnsupported,
                    "direct sampling needs non-negative integer weights");
      for (int c = 0; c < w(i); ++c) copies.push_back(basic_map(cone, i));
    }
    if (copies.empty()) throw Error(ErrorCode::VirtualMapUnsupported, "all weights are zero");
    batch = direct_sample(WishartLaw::make(direct_sum(copies), theta), cfg.seed, cfg.count);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown --method '" + cfg.method + "'");
  }

  std::filesystem::path csv = cfg.out;
  if (csv.extension() != ".csv") csv += ".csv";
  std::filesystem::path sidecar = csv;
  sidecar.replace_extension(".json");
  write_csv(batch, cone->coordinate_names(), csv.string());

  const auto& param = law.riesz()->param;
  Json side;
  side["cone"] = cone->name();
  side["cone_spec"] = cone_to_json(*cone);
  side["weights"] = vector_json(w);
  side["theta"] = vector_json(theta);
  side["sigma"] = vector_json(param.sigma);
  side["epsilon"] = param.epsilon;
  side["u"] = vector_json(param.u);
  side["singular"] = !param.nonsingular();
  side["seed"] = cfg.seed;
  side["count"] = cfg.count;
  side["method"] = cfg.method;
  side["columns"] = cone->coordinate_names();
  write_json(side, sidecar.string());
  out << Json{{"csv", csv.string()}, {"sidecar", sidecar.string()}, {"count", cfg.count}}.dump()
      << '\n';
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  BatteryOptions opts;
  opts.seed = cfg.verify_seed;
  std::vector<int> ids;
  if (!cfg.criteria.empty()) {
    const Vector v = parse_vector(cfg.criteria);
    for (double x : v) ids.push_back(static_cast<int>(x));
  }
  bool ok = true;
  for (const auto& r : run_battery(opts, ids)) {
    out << format_result(r) << '\n';
    ok = ok && r.passed;
  }
  out << (ok ? "all checks passed" : "verification FAILED") << '\n';
  return ok ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wishart distributions on matrix-realized homogeneous cones",
               "conewishart"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_cone = [&](CLI::App* c) {
    c->add_option("--cone", cfg.cone, "preset name or JSON cone spec (path or inline)");
  };
  auto add_law = [&](CLI::App* c) {
    add_cone(c);
    c->add_option("--weights", cfg.weights, "basic-map weights s_1,...,s_r");
    c->add_option("--theta", cfg.theta,
                  "identity | T coordinates (theta = -rho*(T)I) | raw:<coordinates>");
  };

  auto* inspect = app.add_subcommand("inspect", "show the realization data");
  add_cone(inspect);
  inspect->add_option("--tol", cfg.tol, "axiom tolerance");

  auto* axioms = app.add_subcommand("axioms", "check the V-system axioms");
  add_cone(axioms);
  axioms->add_option("--tol", cfg.tol, "axiom tolerance");

  auto* gindikin = app.add_subcommand("gindikin", "Gindikin set membership of sigma(s)");
  add_cone(gindikin);
  gindikin->add_option("--weights", cfg.weights, "basic-map weights");

  auto* laplace = app.add_subcommand("laplace", "Riesz and Wishart Laplace transforms");
  add_law(laplace);
  laplace->add_option("--eta", cfg.eta, "dual point for the Wishart Laplace transform");

  auto* moments = app.add_subcommand("moments", "mean, covariance and higher moments");
  add_law(moments);
  moments->add_option("--eta", cfg.eta, "dual point for <Y,eta>^N");
  moments->add_option("--order", cfg.order, "moment order N");

  auto* dens = app.add_subcommand("density", "density at a point");
  add_law(dens);
  dens->add_option("--point", cfg.point, "cone point in structured coordinates");

  auto* sample = app.add_subcommand("sample", "draw a sample to CSV plus JSON sidecar");
  add_law(sample);
  sample->add_option("--seed", cfg.seed, "random seed");
  sample->add_option("--count", cfg.count, "number of draws");
  sample->add_option("--out", cfg.out, "output CSV path");
  sample->add_option("--method", cfg.method, "bartlett | direct");

  auto* verify = app.add_subcommand("verify", "run the cross-validation battery");
  verify->add_option("--seed", cfg.verify_seed, "random seed");
  verify->add_option("--criteria", cfg.criteria, "comma-separated criterion ids");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*inspect) return cmd_inspect(cfg, out);
    if (*axioms) return cmd_axioms(cfg, out);
    if (*gindikin) return cmd_gindikin(cfg, out);
    if (*laplace) return cmd_laplace(cfg, out);
    if (*moments) return cmd_moments(cfg, out);
    if (*dens) return cmd_density(cfg, out);
    if (*sample) return cmd_sample(cfg, out);
    if (*verify) return cmd_verify(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace conewishart
