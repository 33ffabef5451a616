#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdef/deficiency.hpp"
#include "qdef/discrimination.hpp"
#include "qdef/freeops.hpp"
#include "qdef/types.hpp"

namespace qdef {

inline constexpr const char* kToolVersion = "1.0.0";

// All JSON carries complex matrices as separate real 2-D arrays "re"/"im"
// (row major). Doubles are emitted in shortest-round-trip decimal form, so
// serialize -> deserialize reproduces every matrix bit for bit.

nlohmann::json matrix_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_json(const Vector& v);

// On-disk density operator: {"dims": [d] or [dA, dB], "re": ..., "im": ...}.
// Structural problems (missing keys, ragged or mismatched arrays) raise
// ParseError; a well-formed matrix that is not a density operator raises
// InvariantError from validation.
struct StateFile {
  std::vector<int> dims;
  DensityOperator state;
};

StateFile state_file_from_json(const nlohmann::json& j);
StateFile load_state_file(const std::string& path);
nlohmann::json state_file_json(const std::vector<int>& dims, const DensityOperator& state);

nlohmann::json deficiency_result_json(const DeficiencyResult& r);

nlohmann::json channel_json(const KrausChannel& ch);
KrausChannel channel_from_json(const nlohmann::json& j);

nlohmann::json strategy_json(const DiscriminationStrategy& s);
DiscriminationStrategy strategy_from_json(const nlohmann::json& j);

nlohmann::json game_result_json(const GameResult& g);

// Reproduction bundle for one harness trial; embeds the full state and Kraus
// family whenever the verdict is not a clean pass.
nlohmann::json trial_report_json(const TrialReport& r);

// Decimal form with enough digits to round-trip exactly.
std::string csv_number(double x);

// Trial table: header, one row per report in the given order, and a trailing
// summary comment with the minimum margin and the violation count.
std::string trial_reports_csv(const std::vector<TrialReport>& reports);

// Common header fields every emitted report starts from.
nlohmann::json report_envelope(const std::string& command, std::uint64_t seed,
                               const std::map<std::string, double>& tolerances,
                               const std::map<std::string, std::string>& input_digests);

// Stable rendering: sorted keys, two-space indent, trailing newline.
std::string dump_report(const nlohmann::json& j);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace qdef
