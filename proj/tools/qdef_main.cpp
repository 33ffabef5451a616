// Command-line surface for the deficiency toolkit. Subcommands:
//
//   deficiency    optimize the deficiency of a state loaded from JSON
//   monotonicity  randomized selective-measurement monotonicity search
//   discriminate  subchannel-discrimination games against a reference state
//   selftest      run the built-in verification suites
//
// Exit codes: 0 ok, 1 check failure or internal error, 2 malformed input,
// 3 invariant violation in the data, 4 unsupported dimensions or option
// combination, 5 reference state not pure.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qdef/coherence.hpp"
#include "qdef/discrimination.hpp"
#include "qdef/entanglement.hpp"
#include "qdef/freeops.hpp"
#include "qdef/qcore.hpp"
#include "qdef/selfcheck.hpp"
#include "qdef/serialization.hpp"

namespace {

using namespace qdef;

// --out wins; otherwise QDEF_OUT_DIR selects a directory for a fixed
// default filename; otherwise the report goes to stdout. Filenames carry the
// seed but never a timestamp, so reruns overwrite their own output.
void emit(const std::string& text, const std::string& out_path,
          const std::string& default_name) {
  if (!out_path.empty()) {
    write_text_file(out_path, text);
    return;
  }
  if (const char* dir = std::getenv("QDEF_OUT_DIR"); dir != nullptr && *dir != '\0') {
    write_text_file(std::string(dir) + "/" + default_name, text);
    return;
  }
  std::fputs(text.c_str(), stdout);
}

Resource resource_from_name(const std::string& name) {
  if (name == "coherence") return Resource::coherence;
  if (name == "entanglement") return Resource::entanglement;
  throw DimensionError("unknown resource: " + name);
}

IncoherentFlavor flavor_from_name(const std::string& name) {
  if (name == "perm_phase_mixture") return IncoherentFlavor::perm_phase_mixture;
  if (name == "basis_measurement") return IncoherentFlavor::basis_measurement;
  if (name == "composed") return IncoherentFlavor::composed;
  throw DimensionError("unknown channel flavor: " + name);
}

// Splits a loaded state into bipartite factors, insisting the file declared
// both local dimensions.
BipartiteState bipartite_from_file(const StateFile& sf) {
  if (sf.dims.size() != 2) {
    throw DimensionError("entanglement needs a state file with dims = [dA, dB]");
  }
  return BipartiteState(sf.state, sf.dims[0], sf.dims[1]);
}

PureState pure_from_density(const DensityOperator& rho) {
  if (!rho.is_pure()) {
    throw TargetStateError("reference state must be pure");
  }
  return principal_component(rho);
}

struct CommonArgs {
  std::string state_path;
  std::string out_path;
  std::uint64_t seed = 0;
};

int cmd_deficiency(const std::string& resource_name_arg, const CommonArgs& args,
                   const std::string& method, int restarts) {
  const StateFile sf = load_state_file(args.state_path);
  const Resource resource = resource_from_name(resource_name_arg);
  RngStream rng(args.seed);

  DeficiencyResult result;
  std::optional<OracleResult> oracle;
  if (resource == Resource::coherence) {
    if (method == "auto") {
      result = coherence_deficiency(sf.state, restarts, rng.substream("optimize"));
    } else if (method == "closed") {
      result = coherence_closed_form(sf.state);
    } else if (method == "ascent") {
      auto sub = rng.substream("optimize");
      result = coherence_fidelity_ascent(sf.state, restarts, sub);
    } else if (method == "oracle") {
      oracle = coherence_fidelity_oracle(sf.state, 64);
      result.fidelity = oracle->value;
      result.value = 1.0 - oracle->value;
      result.raw_value = result.value;
      result.method = Method::grid_oracle;
      result.oracle_gap = oracle->gap;
      Vector witness(sf.state.dim());
      for (int i = 0; i < sf.state.dim(); ++i) {
        witness(i) = std::polar(1.0 / std::sqrt(static_cast<double>(sf.state.dim())),
                                oracle->best_angles(i));
      }
      result.witness = PureState(witness);
    } else {
      throw DimensionError("coherence methods: auto, closed, ascent, oracle");
    }
  } else {
    const BipartiteState state = bipartite_from_file(sf);
    if (method == "auto") {
      result = entanglement_deficiency(state, restarts, rng.substream("optimize"));
    } else if (method == "power") {
      auto sub = rng.substream("optimize");
      result = entangled_fraction(state, restarts, sub);
    } else {
      throw DimensionError("entanglement methods: auto, power");
    }
  }

  nlohmann::json report = report_envelope(
      "deficiency", args.seed,
      {{"hermitian", kHermitianTol}, {"trace", kTraceTol}, {"psd_floor", -kPsdFloor}},
      {{"state", matrix_digest(sf.state.matrix())}});
  report["resource"] = resource_name_arg;
  report["dims"] = sf.dims;
  report["restarts"] = restarts;
  report["result"] = deficiency_result_json(result);
  emit(dump_report(report), args.out_path,
       "deficiency-" + std::to_string(args.seed) + ".json");
  return 0;
}

int cmd_monotonicity(const std::string& resource_name_arg, const CommonArgs& args,
                     const std::vector<int>& dims, const std::string& purity,
                     const std::string& flavor, int trials, int restarts, double tol,
                     const std::string& format) {
  ViolationSearchConfig config;
  config.resource = resource_from_name(resource_name_arg);
  if (config.resource == Resource::coherence) {
    if (dims.size() != 1) {
      throw DimensionError("coherence takes a single dimension (--dims d)");
    }
    config.dim = dims[0];
  } else {
    if (dims.size() != 2) {
      throw DimensionError("entanglement takes two dimensions (--dims dA dB)");
    }
    config.dim_a = dims[0];
    config.dim_b = dims[1];
  }
  if (purity != "pure" && purity != "mixed") {
    throw DimensionError("purity must be pure or mixed");
  }
  config.pure_states = purity == "pure";
  config.flavor = flavor_from_name(flavor);
  config.trials = trials;
  config.seed = args.seed;
  config.restarts = restarts;
  config.tol_violation = tol;

  const std::vector<TrialReport> reports = violation_search(config);

  if (format == "csv") {
    std::string text = "# tool_version=" + std::string(kToolVersion) +
                       " command=monotonicity seed=" + std::to_string(args.seed) +
                       " tol_violation=" + csv_number(tol) + "\n";
    text += trial_reports_csv(reports);
    emit(text, args.out_path, "monotonicity-" + std::to_string(args.seed) + ".csv");
    return 0;
  }
  if (format != "json") {
    throw DimensionError("format must be csv or json");
  }
  nlohmann::json report =
      report_envelope("monotonicity", args.seed, {{"violation", tol}}, {});
  report["resource"] = resource_name_arg;
  report["trials"] = nlohmann::json::array();
  int violations = 0;
  double min_margin = reports.empty() ? 0.0 : reports.front().margin;
  for (const TrialReport& r : reports) {
    report["trials"].push_back(trial_report_json(r));
    if (r.verdict == Verdict::violation) ++violations;
  }
  report["summary"] = {{"trials", reports.size()},
                       {"violations", violations},
                       {"min_margin", min_margin}};
  emit(dump_report(report), args.out_path,
       "monotonicity-" + std::to_string(args.seed) + ".json");
  return 0;
}

int cmd_discriminate(const CommonArgs& args, const std::string& sigma_path,
                     const std::string& optimize, int samples, int restarts) {
  const StateFile sf = load_state_file(args.state_path);
  RngStream rng(args.seed);
  std::map<std::string, std::string> digests{{"state", matrix_digest(sf.state.matrix())}};

  nlohmann::json report;
  if (!optimize.empty()) {
    DeficiencyMeasure measure{resource_from_name(optimize), 0, 0, restarts};
    if (measure.resource == Resource::entanglement) {
      const BipartiteState state = bipartite_from_file(sf);
      measure.dim_a = state.dim_a();
      measure.dim_b = state.dim_b();
    }
    auto orng = rng.substream("disadvantage");
    const DisadvantageResult res = operational_disadvantage(sf.state, measure, orng);
    report = report_envelope("discriminate", args.seed,
                             {{"simulation", 1e-8}, {"violation", kViolationTol}}, digests);
    report["optimize"] = optimize;
    report["disadvantage"] = {{"value", res.value},
                              {"deficiency_cross_check", res.deficiency_cross_check},
                              {"simulated_p_succ", res.simulated_p_succ},
                              {"residual", res.residual},
                              {"method", method_name(res.method)},
                              {"witness", vector_json(res.witness.amplitudes())}};
  } else {
    const StateFile sigma_file = load_state_file(sigma_path);
    if (sigma_file.state.dim() != sf.state.dim()) {
      throw DimensionError("state and reference state dimensions differ");
    }
    const PureState sigma = pure_from_density(sigma_file.state);
    digests["sigma"] = matrix_digest(sigma_file.state.matrix());

    auto mrng = rng.substream("omega");
    const OmegaMinimum om = min_over_omega(sf.state, sigma, samples, mrng);

    const int d = sigma.dim();
    auto brng = rng.substream("basis");
    const Matrix basis = haar_unitary(d, brng);
    auto srng = rng.substream("strategy");
    const DiscriminationStrategy constructed = build_perfect_strategy(
        sigma, RealVector::Constant(d, 1.0 / d), basis, srng);
    const GameResult game = play_game(constructed, sf.state, sigma.projector());
    if (!game.ratio || std::abs(*game.ratio - game.p_succ_rho) > 1e-12) {
      throw InvariantError("ratio and simplified success probability disagree");
    }

    report = report_envelope("discriminate", args.seed,
                             {{"omega_membership", 1e-9}, {"attainment", 1e-10}}, digests);
    report["samples"] = samples;
    report["analytic_fidelity"] = om.analytic;
    report["empirical_min"] = om.empirical_min;
    report["constructed_game"] = game_result_json(game);
  }
  emit(dump_report(report), args.out_path,
       "discriminate-" + std::to_string(args.seed) + ".json");
  return 0;
}

int cmd_selftest(const std::string& suite, std::uint64_t seed, const std::string& out_path) {
  if (suite != "quick" && suite != "full") {
    throw DimensionError("suite must be quick or full");
  }
  const std::vector<CheckResult> results = run_selfcheck(suite == "full", seed);
  std::fputs(selfcheck_table(results).c_str(), stdout);
  if (!out_path.empty()) {
    nlohmann::json report = report_envelope("selftest", seed, {}, {});
    report["suite"] = suite;
    report["checks"] = nlohmann::json::array();
    int passed = 0;
    for (const CheckResult& r : results) {
      if (r.pass) ++passed;
      report["checks"].push_back(
          {{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    }
    report["summary"] = {{"passed", passed},
                         {"total", static_cast<int>(results.size())}};
    write_text_file(out_path, dump_report(report));
  }
  return all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric resource-deficiency toolkit"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string resource = "coherence";
  std::string method = "auto";
  std::string purity = "mixed";
  std::string flavor = "composed";
  std::string format = "csv";
  std::string sigma_path;
  std::string optimize;
  std::string suite = "quick";
  std::vector<int> dims;
  int restarts = 32;
  int trials = 100;
  int samples = 100;
  double tol = kViolationTol;

  CLI::App* def = app.add_subcommand("deficiency", "Deficiency of a state");
  def->add_option("--resource", resource, "coherence or entanglement")->required();
  def->add_option("--state", common.state_path, "state JSON file")->required();
  def->add_option("--method", method, "auto, closed, ascent, oracle (coherence); power");
  def->add_option("--restarts", restarts, "optimizer restarts");
  def->add_option("--seed", common.seed, "master seed");
  def->add_option("--out", common.out_path, "output file");

  CLI::App* mono = app.add_subcommand("monotonicity", "Selective-measurement search");
  mono->add_option("--resource", resource, "coherence or entanglement")->required();
  mono->add_option("--dims", dims, "d (coherence) or dA dB (entanglement)")->required();
  mono->add_option("--purity", purity, "pure or mixed");
  mono->add_option("--flavor", flavor,
                   "perm_phase_mixture, basis_measurement or composed (coherence)");
  mono->add_option("--trials", trials, "number of random trials");
  mono->add_option("--restarts", restarts, "optimizer restarts");
  mono->add_option("--tol", tol, "violation tolerance");
  mono->add_option("--format", format, "csv or json");
  mono->add_option("--seed", common.seed, "master seed");
  mono->add_option("--out", common.out_path, "output file");

  CLI::App* disc = app.add_subcommand("discriminate", "Discrimination games");
  disc->add_option("--state", common.state_path, "state JSON file")->required();
  CLI::Option* sig = disc->add_option("--sigma", sigma_path, "pure reference state file");
  disc->add_option("--optimize", optimize, "coherence or entanglement")->excludes(sig);
  disc->add_option("--samples", samples, "sampled perfect-answer strategies");
  disc->add_option("--restarts", restarts, "optimizer restarts");
  disc->add_option("--seed", common.seed, "master seed");
  disc->add_option("--out", common.out_path, "output file");

  CLI::App* self = app.add_subcommand("selftest", "Verification suites");
  self->add_option("--suite", suite, "quick or full");
  self->add_option("--seed", common.seed, "master seed");
  self->add_option("--out", common.out_path, "report file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (def->parsed()) {
      return cmd_deficiency(resource, common, method, restarts);
    }
    if (mono->parsed()) {
      return cmd_monotonicity(resource, common, dims, purity, flavor, trials, restarts, tol,
                              format);
    }
    if (disc->parsed()) {
      if (sigma_path.empty() && optimize.empty()) {
        throw DimensionError("discriminate needs --sigma or --optimize");
      }
      return cmd_discriminate(common, sigma_path, optimize, samples, restarts);
    }
    return cmd_selftest(suite, common.seed, common.out_path);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const TargetStateError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 5;
  } catch (const DimensionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const InvariantError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
