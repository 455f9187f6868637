// JSON-driven command line over the library's decision procedures and
// constructors. Machine-readable JSON goes to stdout, a short human summary
// to stderr. Exit codes: 0 completed (verdicts live inside the JSON),
// 2 malformed input, 3 numerical failure, 4 unsupported class.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstar/extremity.hpp>
#include <cstar/hardy.hpp>
#include <cstar/json_io.hpp>
#include <cstar/kmapprox.hpp>
#include <cstar/random.hpp>

namespace {

using namespace cstar;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Unsupported:
      return 4;
    case ErrorCode::NumericalFailure:
    case ErrorCode::NotConverged:
    case ErrorCode::FactorizationFailed:
    case ErrorCode::SingularCompression:
    case ErrorCode::NonMinimal:
    case ErrorCode::NotDominated:
    case ErrorCode::StructureMismatch:
      return 3;
    default:
      return 2;
  }
}

void emit(const Json& value, const std::string& out_path) {
  std::string text = canonical_dump(value);
  std::cout << text << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) raise(ErrorCode::ParseError, "cannot write file: " + out_path);
    out << text << "\n";
  }
}

struct Options {
  NumericContext ctx;
  std::string out_path;
};

StinespringTriple load_triple(const std::string& map_path, const Options& opt) {
  UcpMap map = ucp_from_json(load_json_file(map_path), opt.ctx, true);
  return minimal_stinespring(map, opt.ctx);
}

void cmd_dilate(const std::string& map_path, const Options& opt) {
  StinespringTriple triple = load_triple(map_path, opt);
  emit(triple_to_json(triple), opt.out_path);
  std::cerr << "dilation space dimension " << triple.rep.total_dim << "\n";
}

void cmd_commutant(const std::string& map_path, const Options& opt) {
  StinespringTriple triple = load_triple(map_path, opt);
  OperatorAlgebraSpan commutant = commutant_basis(triple.rep, opt.ctx);
  Json basis = Json::array();
  for (const CMatrix& b : commutant.basis) basis.push_back(matrix_to_json(b));
  emit(Json{{"schema", kSchemaTag},
            {"dimension", commutant.dim()},
            {"basis", std::move(basis)}},
       opt.out_path);
  std::cerr << "commutant dimension " << commutant.dim() << "\n";
}

void cmd_check_extreme(const std::string& map_path, const Options& opt) {
  UcpMap map = ucp_from_json(load_json_file(map_path), opt.ctx, true);
  DecisionReport report = is_extreme(map, opt.ctx);
  emit(decision_to_json(report), opt.out_path);
  std::cerr << "extreme: " << verdict_name(report.verdict) << "\n";
}

void cmd_check_cstar(const std::string& map_path, const Options& opt) {
  UcpMap map = ucp_from_json(load_json_file(map_path), opt.ctx, true);
  DecisionReport report = cstar_extreme(map, opt.ctx);
  emit(decision_to_json(report), opt.out_path);
  std::cerr << "C*-extreme: " << verdict_name(report.verdict) << "\n";
}

void cmd_check_cstar_normal(const std::string& isometry_path, Index g, Index k,
                            const Options& opt) {
  Json value = load_json_file(isometry_path);
  CMatrix v;
  if (value.contains("v")) {
    // output of `dilate` for a single-block map
    v = matrix_from_json(value.at("v"));
    if ((g == 0 || k == 0) && value.contains("block_dims") &&
        value.at("block_dims").is_array() && value.at("block_dims").size() == 1) {
      g = value.at("block_dims").at(0).get<Index>();
      k = value.at("multiplicities").at(0).get<Index>();
    }
  } else {
    v = matrix_from_json(value);
  }
  if (g <= 0 || k <= 0)
    raise(ErrorCode::ParseError, "provide --g and --k (or a dilate file)");
  DecisionReport report = cstar_extreme_normal(v, g, k, opt.ctx);
  emit(decision_to_json(report), opt.out_path);
  std::cerr << "C*-extreme (normal form): " << verdict_name(report.verdict) << "\n";
}

void cmd_rn(const std::string& phi_path, const std::string& psi_path, bool cp,
            const Options& opt) {
  StinespringTriple triple = load_triple(phi_path, opt);
  UcpMap psi = ucp_from_json(load_json_file(psi_path), opt.ctx, !cp);
  RnResult rn = rn_derivative(triple, psi, opt.ctx, GeneratorOrder::Forward,
                              /*require_dominated=*/false);
  emit(Json{{"schema", kSchemaTag},
            {"d", matrix_to_json(rn.derivative)},
            {"residual", rn.residual},
            {"eig_min", rn.eig_min},
            {"eig_max", rn.eig_max},
            {"dominated", rn.dominated}},
       opt.out_path);
  std::cerr << "dominated: " << (rn.dominated ? "yes" : "no") << "\n";
}

void cmd_fz_cert(const std::string& map_path, const std::string& d_path,
                 const Options& opt) {
  StinespringTriple triple = load_triple(map_path, opt);
  CMatrix d = matrix_from_json(load_json_file(d_path));
  FZCertificate cert = fz_find_certificate(triple, d, opt.ctx);
  emit(certificate_to_json(cert), opt.out_path);
  std::cerr << "certificate found; factorization residual "
            << cert.residuals.at("factorization") << "\n";
}

void cmd_fz_verify(const std::string& map_path, const std::string& cert_path,
                   const Options& opt) {
  StinespringTriple triple = load_triple(map_path, opt);
  FZCertificate cert = certificate_from_json(load_json_file(cert_path));
  FzVerification check = fz_verify_certificate(triple, cert, opt.ctx);
  Json residuals = Json::object();
  for (const auto& [key, val] : check.residuals) residuals[key] = val;
  emit(Json{{"schema", kSchemaTag}, {"ok", check.ok}, {"residuals", residuals}},
       opt.out_path);
  std::cerr << "certificate " << (check.ok ? "verifies" : "fails") << "\n";
}

void cmd_nest_factor(const std::string& matrix_path, const std::string& nest_path,
                     const Options& opt) {
  CMatrix d = matrix_from_json(load_json_file(matrix_path));
  Nest nest = nest_from_json(load_json_file(nest_path), opt.ctx);
  CMatrix s = nest_cholesky(d, nest, opt.ctx);
  double residual = (s.adjoint() * s - d).norm() / (1.0 + d.norm());
  emit(Json{{"schema", kSchemaTag},
            {"s", matrix_to_json(s)},
            {"residual", residual}},
       opt.out_path);
  std::cerr << "factor residual " << residual << "\n";
}

void cmd_szego(const std::string& symbol_path, Index order, double tol,
               const Options& opt) {
  TrigSymbol sym = symbol_from_json(load_json_file(symbol_path), opt.ctx);
  OuterFactor outer = szego_factor(sym, order, tol, opt.ctx);
  Json coeffs = Json::array();
  for (const CMatrix& c : outer.coeffs) coeffs.push_back(matrix_to_json(c));
  emit(Json{{"schema", kSchemaTag},
            {"block", outer.block},
            {"degree", outer.degree},
            {"coeffs", std::move(coeffs)},
            {"drift", outer.drift},
            {"autocorrelation_residual", outer.autocorrelation_residual}},
       opt.out_path);
  std::cerr << "outer factor of degree " << outer.degree << ", drift "
            << outer.drift << "\n";
}

void cmd_km(const std::string& map_path, const std::string& anchor_path,
            Index steps, const std::string& test_set_path, const Options& opt) {
  UcpMap phi = ucp_from_json(load_json_file(map_path), opt.ctx, true);
  std::optional<UcpMap> anchor;
  if (!anchor_path.empty())
    anchor = ucp_from_json(load_json_file(anchor_path), opt.ctx, true);
  KMApproximant approx = km_build(phi, anchor, opt.ctx);

  std::vector<AlgebraElement> test_set;
  if (!test_set_path.empty()) {
    Json value = load_json_file(test_set_path);
    const Json& list = value.contains("elements") ? value.at("elements") : value;
    if (!list.is_array())
      raise(ErrorCode::ParseError, "test set must be an array of elements");
    for (const auto& item : list) {
      AlgebraElement a = algebra_element_from_json(item);
      if (!(a.algebra == phi.algebra))
        raise(ErrorCode::AlgebraMismatch, "test element on a different algebra");
      test_set.push_back(std::move(a));
    }
  } else {
    test_set = matrix_unit_generators(phi.algebra);
  }

  Index count = static_cast<Index>(approx.components.size());
  Index last = steps > 0 ? std::min(steps, count) : count;
  Json rows = Json::array();
  for (Index n = 0; n <= last; ++n) {
    KMStep step = km_step(approx, n, opt.ctx);
    double envelope = 0.0;
    for (const AlgebraElement& a : test_set) {
      double a_norm = 0.0;
      for (const CMatrix& x : a.blocks) a_norm = std::max(a_norm, operator_norm(x));
      envelope = std::max(
          envelope,
          operator_norm(approx.remainders[static_cast<size_t>(n)]) * a_norm +
              operator_norm(km_tail(approx, a, n)));
    }
    rows.push_back(Json{
        {"n", n},
        {"distance", bw_distance_on(phi, step.psi, test_set, opt.ctx)},
        {"envelope", envelope},
        {"coefficient_residual", step.coefficient_residual},
        {"unitality_residual", unitality_defect(step.psi).norm()}});
  }
  emit(Json{{"schema", kSchemaTag}, {"steps", std::move(rows)}}, opt.out_path);
  std::cerr << "approximation ladder with " << count << " components\n";
}

void cmd_subdiag_demo(Index n, const Options& opt) {
  Rng rng(opt.ctx.rng_seed);
  CMatrix x = rng.positive_definite(n, 100.0);
  SubdiagonalReport report = subdiagonal_demo(x, opt.ctx);
  emit(Json{{"schema", kSchemaTag},
            {"n", n},
            {"x", matrix_to_json(x)},
            {"z", matrix_to_json(report.z)},
            {"residuals",
             Json{{"factorization", report.factorization_residual},
                  {"right_multiplication", report.right_mult_residual},
                  {"invariance", report.invariance_residual},
                  {"compression", report.compression_residual},
                  {"compression_min_singular", report.compression_min_singular}}}},
       opt.out_path);
  std::cerr << "factorization residual " << report.factorization_residual << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-dimensional computational toolkit for UCP maps"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--seed", opt.ctx.rng_seed, "seed for all randomized steps");
  app.add_option("--eps-eq", opt.ctx.eps_eq, "equality tolerance");
  app.add_option("--eps-rank", opt.ctx.eps_rank, "rank cutoff");
  app.add_option("--out", opt.out_path, "also write the JSON result to a file");

  std::string map_path, psi_path, d_path, cert_path, matrix_path, nest_path;
  std::string symbol_path, anchor_path, test_set_path, isometry_path;
  Index g = 0, k = 0, order = 128, steps = 0, demo_n = 8;
  double tol = 1e-8;
  bool cp = false;

  CLI::App* dilate = app.add_subcommand("dilate", "minimal dilation of a map");
  dilate->add_option("--map", map_path)->required();

  CLI::App* commutant = app.add_subcommand("commutant", "commutant basis");
  commutant->add_option("--map", map_path)->required();

  CLI::App* check_extreme =
      app.add_subcommand("check-extreme", "linear extreme-point test");
  check_extreme->add_option("--map", map_path)->required();

  CLI::App* check_cstar =
      app.add_subcommand("check-cstar", "C*-extreme decision for a map");
  check_cstar->add_option("--map", map_path)->required();

  CLI::App* check_normal = app.add_subcommand(
      "check-cstar-normal", "C*-extreme decision for a dilated subspace");
  check_normal->add_option("--isometry", isometry_path)->required();
  check_normal->add_option("--g", g);
  check_normal->add_option("--k", k);

  CLI::App* rn = app.add_subcommand("rn", "derivative of psi against phi");
  rn->add_option("--phi", map_path)->required();
  rn->add_option("--psi", psi_path)->required();
  rn->add_flag("--cp", cp, "psi is a non-unital CP payload");

  CLI::App* fz_cert = app.add_subcommand("fz-cert", "factorization certificate");
  fz_cert->add_option("--map", map_path)->required();
  fz_cert->add_option("--d", d_path)->required();

  CLI::App* fz_verify = app.add_subcommand("fz-verify", "verify a certificate");
  fz_verify->add_option("--map", map_path)->required();
  fz_verify->add_option("--cert", cert_path)->required();

  CLI::App* nest_factor =
      app.add_subcommand("nest-factor", "triangular factorization along a nest");
  nest_factor->add_option("--matrix", matrix_path)->required();
  nest_factor->add_option("--nest", nest_path)->required();

  CLI::App* szego = app.add_subcommand("szego", "spectral factorization");
  szego->add_option("--symbol", symbol_path)->required();
  szego->add_option("--order", order);
  szego->add_option("--tol", tol);

  CLI::App* km = app.add_subcommand("km", "approximation ladder");
  km->add_option("--map", map_path)->required();
  km->add_option("--anchor", anchor_path);
  km->add_option("--steps", steps);
  km->add_option("--test-set", test_set_path);

  CLI::App* subdiag = app.add_subcommand("subdiag-demo", "trace-algebra demo");
  subdiag->add_option("--n", demo_n);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    opt.ctx.validate();
    if (dilate->parsed()) cmd_dilate(map_path, opt);
    if (commutant->parsed()) cmd_commutant(map_path, opt);
    if (check_extreme->parsed()) cmd_check_extreme(map_path, opt);
    if (check_cstar->parsed()) cmd_check_cstar(map_path, opt);
    if (check_normal->parsed()) cmd_check_cstar_normal(isometry_path, g, k, opt);
    if (rn->parsed()) cmd_rn(map_path, psi_path, cp, opt);
    if (fz_cert->parsed()) cmd_fz_cert(map_path, d_path, opt);
    if (fz_verify->parsed()) cmd_fz_verify(map_path, cert_path, opt);
    if (nest_factor->parsed()) cmd_nest_factor(matrix_path, nest_path, opt);
    if (szego->parsed()) cmd_szego(symbol_path, order, tol, opt);
    if (km->parsed()) cmd_km(map_path, anchor_path, steps, test_set_path, opt);
    if (subdiag->parsed()) cmd_subdiag_demo(demo_n, opt);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
