#include "qdef/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qdef/coherence.hpp"
#include "qdef/discrimination.hpp"
#include "qdef/entanglement.hpp"
#include "qdef/freeops.hpp"
#include "qdef/qcore.hpp"
#include "qdef/serialization.hpp"

namespace qdef {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

PureState random_phase_state(int d, RngStream& rng) {
  Vector v(d);
  for (int i = 0; i < d; ++i) {
    v(i) = std::polar(1.0 / std::sqrt(static_cast<double>(d)), rng.uniform(0.0, 2.0 * std::numbers::pi));
  }
  return PureState(v);
}

// Pushes a state a fixed distance away from every maximal resource state by
// mixing in the maximally mixed state: any unit vector then has overlap at
// most (1 - lambda) + lambda / D, so the deficiency is at least
// lambda (1 - 1/D).
DensityOperator depolarized(const DensityOperator& rho, double lambda) {
  const int d = rho.dim();
  return DensityOperator((1.0 - lambda) * rho.matrix() +
                         lambda * Matrix::Identity(d, d) / static_cast<double>(d));
}

// --- check 1: the d <= 3 closed form against the grid oracle and ascent ---

CheckResult check_closed_form_vs_oracle(bool full, RngStream root) {
  const int per_dim = full ? 100 : 20;
  CheckResult out{"closed-form-vs-grid-oracle", true, ""};
  std::ostringstream detail;
  for (int d : {2, 3}) {
    int beyond_gap = 0;
    int beyond_ascent = 0;
    double worst = 0.0;
    for (int t = 0; t < per_dim; ++t) {
      auto sub = root.substream("d" + std::to_string(d) + "/" + std::to_string(t));
      const DensityOperator rho = random_density(d, d, sub);
      const DeficiencyResult closed = coherence_closed_form(rho);
      const OracleResult oracle = coherence_fidelity_oracle(rho, 64);
      auto arng = sub.substream("ascent");
      const DeficiencyResult ascent = coherence_fidelity_ascent(rho, 32, arng);
      const double vs_oracle = std::abs(closed.fidelity - oracle.value);
      const double vs_ascent = std::abs(closed.value - ascent.value);
      if (oracle.gap > 1e-3 || vs_oracle > oracle.gap) ++beyond_gap;
      if (vs_ascent > 1e-8) ++beyond_ascent;
      worst = std::max({worst, vs_ascent});
    }
    if (beyond_gap > 0 || beyond_ascent > 0) out.pass = false;
    if (d == 3) detail << "; ";
    detail << "d=" << d << ": " << beyond_gap << "/" << per_dim << " beyond oracle gap, "
           << beyond_ascent << "/" << per_dim << " beyond ascent tol, worst |dD|="
           << num(worst);
  }
  out.detail = detail.str();
  return out;
}

// --- check 2: optimizers against the exact pure-state expressions ---

CheckResult check_pure_formulas(bool full, RngStream root) {
  const int count = full ? 200 : 40;
  CheckResult out{"pure-state-formulas", true, ""};
  double worst_c = 0.0;
  for (int t = 0; t < count; ++t) {
    auto sub = root.substream("coh/" + std::to_string(t));
    const int d = 2 + t % 5;
    const PureState psi = random_pure(d, sub);
    double amp_sum = 0.0;
    for (int i = 0; i < d; ++i) amp_sum += std::abs(psi.amplitudes()(i));
    const double formula = 1.0 - amp_sum * amp_sum / d;
    auto arng = sub.substream("opt");
    const DeficiencyResult res = coherence_fidelity_ascent(psi.projector(), 32, arng);
    worst_c = std::max(worst_c, std::abs(res.value - formula));
  }
  double worst_e = 0.0;
  for (int t = 0; t < count; ++t) {
    auto sub = root.substream("ent/" + std::to_string(t));
    const int d = 2 + t % 2;
    const PureState psi = random_pure(d * d, sub);
    const SchmidtData sd = schmidt(psi, d, d);
    const double q_sum = sd.coefficients.sum();
    const double formula = 1.0 - q_sum * q_sum / d;
    auto arng = sub.substream("opt");
    const BipartiteState state(psi.projector(), d, d);
    const DeficiencyResult res = entangled_fraction(state, 32, arng);
    worst_e = std::max(worst_e, std::abs(res.value - formula));
  }
  out.pass = worst_c <= 1e-8 && worst_e <= 1e-7;
  out.detail = "coherence worst |dD|=" + num(worst_c) + " (tol 1e-8), entanglement worst |dD|=" +
               num(worst_e) + " (tol 1e-7), " + std::to_string(count) + " states each";
  return out;
}

// --- check 3: zero deficiency on maximal states, bounded-away otherwise ---

CheckResult check_faithfulness(bool full, RngStream root) {
  const int count = full ? 100 : 20;
  CheckResult out{"faithfulness", true, ""};
  double worst_max = 0.0;
  for (int t = 0; t < count; ++t) {
    auto sub = root.substream("maxcoh/" + std::to_string(t));
    const int d = 2 + t % 4;
    const DensityOperator rho = random_phase_state(d, sub).projector();
    worst_max = std::max(worst_max, coherence_deficiency(rho).value);
  }
  for (int t = 0; t < count; ++t) {
    auto sub = root.substream("maxent/" + std::to_string(t));
    const int d = 2 + t % 2;
    const MaxEntWitness w = max_entangled_from_unitary(haar_unitary(d, sub));
    const BipartiteState state(PureState(w.vector).projector(), d, d);
    worst_max = std::max(worst_max, entanglement_deficiency(state).value);
  }
  double least_nonmax = 1.0;
  for (int t = 0; t < count; ++t) {
    auto sub = root.substream("offcoh/" + std::to_string(t));
    const int d = 2 + t % 4;
    const DensityOperator rho = depolarized(random_density(d, d, sub), sub.uniform(0.3, 0.9));
    least_nonmax = std::min(least_nonmax, coherence_deficiency(rho).value);
  }
  for (int t = 0; t < count; ++t) {
    auto sub = root.substream("offent/" + std::to_string(t));
    const DensityOperator rho = depolarized(random_density(4, 4, sub), sub.uniform(0.3, 0.9));
    least_nonmax =
        std::min(least_nonmax, entanglement_deficiency(BipartiteState(rho, 2, 2)).value);
  }
  out.pass = worst_max <= 1e-8 && least_nonmax >= 1e-4;
  out.detail = "maximal states worst D=" + num(worst_max) + " (tol 1e-8), non-maximal least D=" +
               num(least_nonmax) + " (floor 1e-4), " + std::to_string(2 * count) +
               " states per group";
  return out;
}

// --- checks 4/5: monotonicity searches ---

struct SearchTally {
  int violations = 0;
  double worst = 0.0;
  std::string example;
};

SearchTally tally(const std::vector<TrialReport>& reports) {
  SearchTally t;
  for (const TrialReport& r : reports) {
    if (r.verdict == Verdict::violation) {
      ++t.violations;
      if (t.example.empty()) {
        t.example = "trial " + std::to_string(r.trial) + " state " + r.state_digest;
      }
    }
  }
  if (!reports.empty()) t.worst = reports.front().margin;  // sorted ascending
  return t;
}

CheckResult check_pure_monotonicity(bool full, std::uint64_t seed) {
  CheckResult out{"pure-state-monotonicity", true, ""};
  SearchTally coh;
  coh.worst = 1.0;
  const int per_dim = full ? 250 : 40;
  for (int d = 2; d <= 5; ++d) {
    ViolationSearchConfig cfg;
    cfg.resource = Resource::coherence;
    cfg.dim = d;
    cfg.pure_states = true;
    cfg.trials = per_dim;
    cfg.seed = seed + d;
    cfg.tol_violation = 1e-7;
    const SearchTally t = tally(violation_search(cfg));
    coh.violations += t.violations;
    coh.worst = std::min(coh.worst, t.worst);
  }

  ViolationSearchConfig ent;
  ent.resource = Resource::entanglement;
  ent.dim_a = 3;
  ent.dim_b = 3;
  ent.pure_states = true;
  ent.trials = full ? 500 : 60;
  ent.seed = seed + 100;
  ent.tol_violation = 1e-6;
  const SearchTally et = tally(violation_search(ent));

  out.pass = coh.violations == 0 && et.violations == 0;
  out.detail = "coherence d=2..5: " + std::to_string(coh.violations) + "/" +
               std::to_string(4 * per_dim) + " violations, worst margin " + num(coh.worst) +
               "; entanglement 3x3: " + std::to_string(et.violations) + "/" +
               std::to_string(ent.trials) + ", worst margin " + num(et.worst);
  return out;
}

CheckResult check_universal_monotonicity(bool full, std::uint64_t seed) {
  CheckResult out{"universal-monotonicity", true, ""};
  SearchTally coh;
  coh.worst = 1.0;
  const int per_dim = full ? 500 : 100;
  for (int d = 2; d <= 3; ++d) {
    ViolationSearchConfig cfg;
    cfg.resource = Resource::coherence;
    cfg.dim = d;
    cfg.trials = per_dim;
    cfg.seed = seed + d;
    cfg.tol_violation = 1e-7;
    const SearchTally t = tally(violation_search(cfg));
    coh.violations += t.violations;
    coh.worst = std::min(coh.worst, t.worst);
  }

  ViolationSearchConfig ent;
  ent.resource = Resource::entanglement;
  ent.dim_a = 2;
  ent.dim_b = 2;
  ent.trials = full ? 500 : 100;
  ent.seed = seed + 100;
  ent.tol_violation = 1e-6;
  const SearchTally et = tally(violation_search(ent));

  out.pass = coh.violations == 0 && et.violations == 0;
  out.detail = "coherence d=2,3: " + std::to_string(coh.violations) + "/" +
               std::to_string(2 * per_dim) + " violations, worst margin " + num(coh.worst) +
               "; entanglement 2x2: " + std::to_string(et.violations) + "/" +
               std::to_string(ent.trials) + ", worst margin " + num(et.worst) +
               (et.example.empty() ? "" : " (" + et.example + ")");
  return out;
}

// --- check 6: mixing never beats the average deficiency ---

CheckResult check_concavity(bool full, RngStream root) {
  const int count = full ? 200 : 40;
  CheckResult out{"mixing-concavity", true, ""};
  double worst = 1.0;
  for (int t = 0; t < count; ++t) {
    auto sub = root.substream("coh/" + std::to_string(t));
    const int d = 2 + t % 3;
    const int parts = 2 + static_cast<int>(sub.integer(2));
    Matrix mix = Matrix::Zero(d, d);
    double avg = 0.0;
    RealVector w(parts);
    for (int i = 0; i < parts; ++i) w(i) = sub.uniform(0.1, 1.0);
    w /= w.sum();
    for (int i = 0; i < parts; ++i) {
      const DensityOperator part = random_density(d, d, sub);
      mix += w(i) * part.matrix();
      avg += w(i) * coherence_deficiency(part).value;
    }
    worst = std::min(worst, coherence_deficiency(DensityOperator(mix)).value - avg);
  }
  for (int t = 0; t < count; ++t) {
    auto sub = root.substream("ent/" + std::to_string(t));
    const int parts = 2 + static_cast<int>(sub.integer(2));
    Matrix mix = Matrix::Zero(4, 4);
    double avg = 0.0;
    RealVector w(parts);
    for (int i = 0; i < parts; ++i) w(i) = sub.uniform(0.1, 1.0);
    w /= w.sum();
    for (int i = 0; i < parts; ++i) {
      const DensityOperator part = random_density(4, 2 + static_cast<int>(sub.integer(3)), sub);
      mix += w(i) * part.matrix();
      avg += w(i) * entanglement_deficiency(BipartiteState(part, 2, 2)).value;
    }
    worst = std::min(
        worst, entanglement_deficiency(BipartiteState(DensityOperator(mix), 2, 2)).value - avg);
  }
  out.pass = worst >= -1e-6;
  out.detail = "worst D(mix) - avg D = " + num(worst) + " over " + std::to_string(2 * count) +
               " mixtures (floor -1e-6)";
  return out;
}

// --- check 7: majorization rows and the Schur-step inequality ---

CheckResult check_majorization(bool full, RngStream root) {
  const int count = full ? 200 : 40;
  CheckResult out{"majorization-schur-steps", true, ""};
  int bad_rows = 0;
  double worst_schur = 0.0;
  for (int t = 0; t < count; ++t) {
    auto sub = root.substream("t/" + std::to_string(t));
    const int d = 2 + t % 2;
    const PureState psi = random_pure(d * d, sub);
    auto crng = sub.substream("ch");
    const int n_a = 1 + static_cast<int>(crng.integer(3));
    const KrausChannel family =
        make_channel(random_local_channel(d, d, n_a, 1, crng).factors_a,
                     ChannelStructure::general);
    for (const MajorizationRow& row : majorization_witness(psi, family, d, d)) {
      if (!row.x_majorizes_y) ++bad_rows;
      double sx = 0.0;
      double sy = 0.0;
      for (int i = 0; i < row.x.size(); ++i) {
        for (int j = 0; j < row.x.size(); ++j) {
          sx += std::sqrt(std::max(0.0, row.x(i) * row.x(j)));
          sy += std::sqrt(std::max(0.0, row.y(i) * row.y(j)));
        }
      }
      worst_schur = std::max(worst_schur, sx - sy);
    }
  }
  out.pass = bad_rows == 0 && worst_schur <= 1e-9;
  out.detail = std::to_string(bad_rows) + " failed majorization rows, worst Schur-step excess " +
               num(worst_schur) + " (tol 1e-9) over " + std::to_string(count) + " witnesses";
  return out;
}

// --- check 8: cross-term bound on every generated incoherent channel ---

CheckResult check_cross_term(bool full, RngStream root) {
  const int per_cell = full ? 25 : 5;
  CheckResult out{"cross-term-bound", true, ""};
  double worst = 0.0;
  int total = 0;
  for (int d = 2; d <= 5; ++d) {
    for (int f = 0; f < 3; ++f) {
      for (int t = 0; t < per_cell; ++t) {
        auto sub = root.substream("d" + std::to_string(d) + "/f" + std::to_string(f) + "/" +
                                  std::to_string(t));
        const KrausChannel ch =
            random_incoherent_channel(d, static_cast<IncoherentFlavor>(f), sub);
        worst = std::max(worst, cross_term_bound(ch));
        ++total;
      }
    }
  }
  out.pass = worst <= 1.0 + 1e-9;
  out.detail = "max cross-term sum " + num(worst) + " (cap 1+1e-9) over " +
               std::to_string(total) + " channels";
  return out;
}

// --- check 9: the discrimination game reproduces the deficiency ---

CheckResult check_discrimination(bool full, RngStream root) {
  const int count = full ? 100 : 20;
  const int samples = full ? 200 : 30;
  CheckResult out{"discrimination-identity", true, ""};
  double worst_identity = 0.0;
  double worst_attain = 0.0;
  double worst_dip = 0.0;
  for (int resource = 0; resource < 2; ++resource) {
    for (int t = 0; t < count; ++t) {
      auto sub = root.substream((resource == 0 ? "coh/" : "ent/") + std::to_string(t));
      DeficiencyMeasure measure{resource == 0 ? Resource::coherence : Resource::entanglement,
                                2, 2, 32};
      const int dim = resource == 0 ? 2 + t % 2 : 4;
      const DensityOperator rho = random_density(dim, 1 + static_cast<int>(sub.integer(dim)), sub);

      auto orng = sub.substream("game");
      const DisadvantageResult res = operational_disadvantage(rho, measure, orng);
      const double indep = measure.evaluate(rho, sub.substream("indep"));
      worst_identity = std::max(worst_identity, std::abs(res.simulated_p_succ - (1.0 - indep)));

      auto mrng = sub.substream("omega");
      const OmegaMinimum om = min_over_omega(rho, res.witness, samples, mrng);
      worst_attain = std::max(worst_attain, res.residual);
      worst_dip = std::max(worst_dip, om.analytic - om.empirical_min);
    }
  }
  out.pass = worst_identity <= 1e-6 && worst_attain <= 1e-10 && worst_dip <= 1e-9;
  out.detail = "worst |p_succ-(1-D)|=" + num(worst_identity) + " (tol 1e-6), attainment " +
               num(worst_attain) + " (tol 1e-10), sampled-min dip " + num(worst_dip) +
               " (tol 1e-9), " + std::to_string(count) + " states x " +
               std::to_string(samples) + " samples per resource";
  return out;
}

// --- check 10: in-process report determinism ---

std::string determinism_probe(std::uint64_t seed) {
  ViolationSearchConfig cfg;
  cfg.resource = Resource::coherence;
  cfg.dim = 2;
  cfg.trials = 10;
  cfg.seed = seed;
  nlohmann::json trials = nlohmann::json::array();
  const std::vector<TrialReport> reports = violation_search(cfg);
  for (const TrialReport& r : reports) trials.push_back(trial_report_json(r));

  RngStream root(seed);
  auto drng = root.substream("state");
  const DensityOperator rho = random_density(3, 3, drng);
  auto orng = root.substream("opt");
  const DeficiencyResult res = coherence_deficiency(rho, 16, std::move(orng));

  auto grng = root.substream("sigma");
  const PureState sigma = random_phase_state(3, grng);
  auto mrng = root.substream("omega");
  const OmegaMinimum om = min_over_omega(rho, sigma, 25, mrng);

  nlohmann::json report =
      report_envelope("selfcheck-probe", seed, {{"violation", kViolationTol}},
                      {{"state", matrix_digest(rho.matrix())}});
  report["trials"] = std::move(trials);
  report["trials_csv"] = trial_reports_csv(reports);
  report["deficiency"] = deficiency_result_json(res);
  report["omega_min"] = nlohmann::json{{"analytic", om.analytic},
                                       {"empirical_min", om.empirical_min}};
  return dump_report(report);
}

CheckResult check_determinism(std::uint64_t seed) {
  CheckResult out{"report-determinism", true, ""};
  const std::string a = determinism_probe(seed);
  const std::string b = determinism_probe(seed);
  out.pass = a == b;
  out.detail = out.pass ? "two in-process runs rendered identical " +
                              std::to_string(a.size()) + "-byte reports"
                        : "reports differ between identically seeded runs";
  return out;
}

}  // namespace

std::vector<CheckResult> run_selfcheck(bool full, std::uint64_t seed) {
  RngStream root(seed);
  std::vector<CheckResult> results;
  results.push_back(check_closed_form_vs_oracle(full, root.substream("closed-form")));
  results.push_back(check_pure_formulas(full, root.substream("pure-formulas")));
  results.push_back(check_faithfulness(full, root.substream("faithfulness")));
  results.push_back(check_pure_monotonicity(full, seed));
  results.push_back(check_universal_monotonicity(full, seed + 7919));
  results.push_back(check_concavity(full, root.substream("concavity")));
  results.push_back(check_majorization(full, root.substream("majorization")));
  results.push_back(check_cross_term(full, root.substream("cross-term")));
  results.push_back(check_discrimination(full, root.substream("discrimination")));
  results.push_back(check_determinism(seed));
  return results;
}

std::string selfcheck_table(const std::vector<CheckResult>& results) {
  std::ostringstream out;
  std::size_t width = 0;
  for (const CheckResult& r : results) width = std::max(width, r.name.size());
  int passed = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const CheckResult& r = results[i];
    out << "check " << (i + 1 < 10 ? " " : "") << (i + 1) << "/" << results.size() << " "
        << r.name << std::string(width - r.name.size() + 2, ' ')
        << (r.pass ? "PASS" : "FAIL") << "  " << r.detail << "\n";
    if (r.pass) ++passed;
  }
  out << "result: " << passed << "/" << results.size() << " checks passed\n";
  return out.str();
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const CheckResult& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

}  // namespace qdef
