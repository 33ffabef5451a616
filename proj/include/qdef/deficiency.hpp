#ifndef QDEF_DEFICIENCY_HPP
#define QDEF_DEFICIENCY_HPP

#include <optional>
#include <string>

#include "qdef/types.hpp"

namespace qdef {

enum class Method {
  closed_form,       // analytic d <= 3 coherence formula, self-certified
  pure_formula,      // exact pure-state expression (phases / Schmidt)
  grid_oracle,       // brute-force phase grid with rigorous gap
  coordinate_ascent, // exact per-phase coordinate maximization, multistart
  power_iteration,   // projected power iteration over local unitaries
};

std::string method_name(Method m);

struct DeficiencyResult {
  double value = 0.0;     // deficiency, clamped to [0, 1]
  double fidelity = 0.0;  // best fidelity found, = 1 - value
  PureState witness;      // maximal resource state achieving `fidelity`
  Method method = Method::closed_form;
  int iterations = 0;     // sweeps/steps used by the winning restart
  bool converged = true;  // winning restart hit its tolerance before the cap
  double raw_value = 0.0; // pre-clamp value, kept for diagnostics
  // value - (l1 lower bound); coherence paths only. Must be >= -1e-9.
  std::optional<double> bound_gap;
  // Rigorous optimum enclosure width; grid-oracle results only.
  std::optional<double> oracle_gap;
};

enum class Resource { coherence, entanglement };

std::string resource_name(Resource r);

}  // namespace qdef

#endif  // QDEF_DEFICIENCY_HPP
