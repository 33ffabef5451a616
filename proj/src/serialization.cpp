#include "qdef/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include "qdef/qcore.hpp"

namespace qdef {

namespace {

constexpr int kMaxSide = 4096;  // sanity cap against absurd input files

std::string structure_name(ChannelStructure s) {
  switch (s) {
    case ChannelStructure::general:
      return "general";
    case ChannelStructure::incoherent:
      return "incoherent";
    case ChannelStructure::permutation_mixture:
      return "permutation_mixture";
    case ChannelStructure::local_product:
      return "local_product";
  }
  return "general";
}

ChannelStructure structure_from_name(const std::string& name) {
  if (name == "general") return ChannelStructure::general;
  if (name == "incoherent") return ChannelStructure::incoherent;
  if (name == "permutation_mixture") return ChannelStructure::permutation_mixture;
  if (name == "local_product") return ChannelStructure::local_product;
  throw ParseError("unknown channel structure: " + name);
}

// Real 2-D array -> dense real matrix; rejects ragged rows.
Eigen::MatrixXd real_rows_from_json(const nlohmann::json& rows, const char* key) {
  if (!rows.is_array() || rows.empty()) {
    throw ParseError(std::string(key) + " must be a nonempty 2-D array");
  }
  const std::size_t n_rows = rows.size();
  if (!rows[0].is_array() || rows[0].empty()) {
    throw ParseError(std::string(key) + " must be a nonempty 2-D array");
  }
  const std::size_t n_cols = rows[0].size();
  if (n_rows > kMaxSide || n_cols > kMaxSide) {
    throw ParseError(std::string(key) + " is implausibly large");
  }
  Eigen::MatrixXd out(n_rows, n_cols);
  for (std::size_t r = 0; r < n_rows; ++r) {
    if (!rows[r].is_array() || rows[r].size() != n_cols) {
      throw ParseError(std::string(key) + " has ragged rows");
    }
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (!rows[r][c].is_number()) {
        throw ParseError(std::string(key) + " entries must be numbers");
      }
      out(static_cast<int>(r), static_cast<int>(c)) = rows[r][c].get<double>();
    }
  }
  return out;
}

nlohmann::json real_rows_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

nlohmann::json matrix_json(const Matrix& m) {
  return nlohmann::json{{"re", real_rows_json(m.real())}, {"im", real_rows_json(m.imag())}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im")) {
    throw ParseError("matrix object needs re and im arrays");
  }
  const Eigen::MatrixXd re = real_rows_from_json(j["re"], "re");
  const Eigen::MatrixXd im = real_rows_from_json(j["im"], "im");
  if (re.rows() != im.rows() || re.cols() != im.cols()) {
    throw ParseError("re and im shapes differ");
  }
  return re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
}

nlohmann::json vector_json(const Vector& v) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) {
    re.push_back(std::real(v(i)));
    im.push_back(std::imag(v(i)));
  }
  return nlohmann::json{{"re", std::move(re)}, {"im", std::move(im)}};
}

StateFile state_file_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("re") || !j.contains("im")) {
    throw ParseError("state file needs dims, re and im fields");
  }
  const auto& dims_json = j["dims"];
  if (!dims_json.is_array() || dims_json.empty() || dims_json.size() > 2) {
    throw ParseError("dims must hold one or two positive integers");
  }
  std::vector<int> dims;
  long long side = 1;
  for (const auto& entry : dims_json) {
    if (!entry.is_number_integer() || entry.get<long long>() <= 0) {
      throw ParseError("dims must hold one or two positive integers");
    }
    dims.push_back(entry.get<int>());
    side *= dims.back();
    if (side > kMaxSide) {
      throw ParseError("state dimension is implausibly large");
    }
  }
  Matrix m = matrix_from_json(j);
  if (m.rows() != m.cols() || m.rows() != side) {
    throw ParseError("matrix must be square with side equal to the product of dims");
  }
  return StateFile{std::move(dims), DensityOperator(std::move(m))};
}

StateFile load_state_file(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return state_file_from_json(j);
}

nlohmann::json state_file_json(const std::vector<int>& dims, const DensityOperator& state) {
  nlohmann::json j = matrix_json(state.matrix());
  j["dims"] = dims;
  return j;
}

nlohmann::json deficiency_result_json(const DeficiencyResult& r) {
  nlohmann::json j{{"value", r.value},
                   {"fidelity", r.fidelity},
                   {"witness", vector_json(r.witness.amplitudes())},
                   {"method", method_name(r.method)},
                   {"iterations", r.iterations},
                   {"converged", r.converged},
                   {"raw_value", r.raw_value}};
  if (r.bound_gap) j["bound_gap"] = *r.bound_gap;
  if (r.oracle_gap) j["oracle_gap"] = *r.oracle_gap;
  return j;
}

nlohmann::json channel_json(const KrausChannel& ch) {
  nlohmann::json kraus = nlohmann::json::array();
  for (const Matrix& k : ch.kraus) kraus.push_back(matrix_json(k));
  nlohmann::json j{{"structure", structure_name(ch.structure)}, {"kraus", std::move(kraus)}};
  if (ch.structure == ChannelStructure::local_product) {
    nlohmann::json fa = nlohmann::json::array();
    for (const Matrix& k : ch.factors_a) fa.push_back(matrix_json(k));
    nlohmann::json fb = nlohmann::json::array();
    for (const Matrix& k : ch.factors_b) fb.push_back(matrix_json(k));
    j["factors_a"] = std::move(fa);
    j["factors_b"] = std::move(fb);
  }
  return j;
}

KrausChannel channel_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("structure") || !j.contains("kraus") ||
      !j["kraus"].is_array() || j["kraus"].empty()) {
    throw ParseError("channel needs a structure label and a kraus array");
  }
  if (!j["structure"].is_string()) {
    throw ParseError("channel structure must be a string");
  }
  KrausChannel ch;
  ch.structure = structure_from_name(j["structure"].get<std::string>());
  for (const auto& k : j["kraus"]) ch.kraus.push_back(matrix_from_json(k));
  if (ch.structure == ChannelStructure::local_product) {
    if (!j.contains("factors_a") || !j.contains("factors_b") || !j["factors_a"].is_array() ||
        !j["factors_b"].is_array()) {
      throw ParseError("local product channel needs factors_a and factors_b");
    }
    for (const auto& k : j["factors_a"]) ch.factors_a.push_back(matrix_from_json(k));
    for (const auto& k : j["factors_b"]) ch.factors_b.push_back(matrix_from_json(k));
  }
  validate_channel(ch);
  return ch;
}

nlohmann::json strategy_json(const DiscriminationStrategy& s) {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& family : s.ensemble.subchannels) {
    nlohmann::json fam = nlohmann::json::array();
    for (const Matrix& k : family) fam.push_back(matrix_json(k));
    subs.push_back(std::move(fam));
  }
  nlohmann::json effects = nlohmann::json::array();
  for (const Matrix& m : s.povm.effects) effects.push_back(matrix_json(m));
  return nlohmann::json{{"subchannels", std::move(subs)}, {"povm", std::move(effects)}};
}

DiscriminationStrategy strategy_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("subchannels") || !j.contains("povm") ||
      !j["subchannels"].is_array() || !j["povm"].is_array()) {
    throw ParseError("strategy needs subchannels and povm arrays");
  }
  DiscriminationStrategy s;
  for (const auto& family : j["subchannels"]) {
    if (!family.is_array()) {
      throw ParseError("each subchannel must be an array of matrices");
    }
    std::vector<Matrix> kraus;
    for (const auto& k : family) kraus.push_back(matrix_from_json(k));
    s.ensemble.subchannels.push_back(std::move(kraus));
  }
  for (const auto& m : j["povm"]) s.povm.effects.push_back(matrix_from_json(m));
  validate_strategy(s);
  return s;
}

nlohmann::json game_result_json(const GameResult& g) {
  nlohmann::json j{{"p_succ_rho", g.p_succ_rho},
                   {"p_succ_sigma", g.p_succ_sigma},
                   {"in_omega", g.in_omega}};
  j["ratio"] = g.ratio ? nlohmann::json(*g.ratio) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json trial_report_json(const TrialReport& r) {
  nlohmann::json j{{"trial", r.trial},
                   {"seed", r.seed},
                   {"resource", resource_name(r.resource)},
                   {"flavor", r.flavor},
                   {"dims", r.dims},
                   {"state_rank", r.state_rank},
                   {"state_digest", r.state_digest},
                   {"channel_digest", r.channel_digest},
                   {"lhs", r.lhs},
                   {"rhs", r.rhs},
                   {"margin", r.margin},
                   {"verdict", verdict_name(r.verdict)},
                   {"re_verified", r.re_verified}};
  if (r.verdict != Verdict::pass) {
    j["state"] = matrix_json(r.state);
    nlohmann::json kraus = nlohmann::json::array();
    for (const Matrix& k : r.kraus) kraus.push_back(matrix_json(k));
    j["kraus"] = std::move(kraus);
  }
  return j;
}

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string trial_reports_csv(const std::vector<TrialReport>& reports) {
  std::ostringstream out;
  out << "trial,seed,resource,flavor,dims,rank,state_digest,channel_digest,"
         "lhs,rhs,margin,verdict\n";
  double min_margin = 0.0;
  int violations = 0;
  int warns = 0;
  bool first = true;
  for (const TrialReport& r : reports) {
    std::string dims;
    for (std::size_t i = 0; i < r.dims.size(); ++i) {
      if (i > 0) dims += "x";
      dims += std::to_string(r.dims[i]);
    }
    out << r.trial << ',' << r.seed << ',' << resource_name(r.resource) << ',' << r.flavor
        << ',' << dims << ',' << r.state_rank << ',' << r.state_digest << ','
        << r.channel_digest << ',' << csv_number(r.lhs) << ',' << csv_number(r.rhs) << ','
        << csv_number(r.margin) << ',' << verdict_name(r.verdict) << '\n';
    if (first || r.margin < min_margin) min_margin = r.margin;
    first = false;
    if (r.verdict == Verdict::violation) ++violations;
    if (r.verdict == Verdict::numerical_warn) ++warns;
  }
  out << "# summary: trials=" << reports.size() << " violations=" << violations
      << " warns=" << warns << " min_margin=" << csv_number(min_margin) << '\n';
  return out.str();
}

nlohmann::json report_envelope(const std::string& command, std::uint64_t seed,
                               const std::map<std::string, double>& tolerances,
                               const std::map<std::string, std::string>& input_digests) {
  nlohmann::json j{{"tool_version", kToolVersion}, {"command", command}, {"seed", seed}};
  j["tolerances"] = nlohmann::json::object();
  for (const auto& [name, value] : tolerances) j["tolerances"][name] = value;
  j["input_digests"] = nlohmann::json::object();
  for (const auto& [name, value] : input_digests) j["input_digests"][name] = value;
  return j;
}

std::string dump_report(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot read file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot open for writing: " + path);
  }
  out << content;
  if (!out) {
    throw Error("write failed: " + path);
  }
}

}  // namespace qdef
