#include "sls/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sls {

Json to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Eigen::MatrixXd matrix_from_json(const Json& j) {
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  Eigen::MatrixXd m(rows, cols);
  const auto& data = j.at("data");
  if (static_cast<int>(data.size()) != rows) {
    throw std::invalid_argument("matrix_from_json: row count mismatch");
  }
  for (int r = 0; r < rows; ++r) {
    const auto& row = data.at(r);
    if (static_cast<int>(row.size()) != cols) {
      throw std::invalid_argument("matrix_from_json: column count mismatch");
    }
    for (int c = 0; c < cols; ++c) m(r, c) = row.at(c).get<double>();
  }
  return m;
}

Json to_json(const SparsityPattern& p) {
  Json entries = Json::array();
  for (const auto& [r, c] : p.entries()) entries.push_back(Json::array({r, c}));
  return Json{{"rows", p.rows()}, {"cols", p.cols()}, {"entries", entries}};
}

SparsityPattern pattern_from_json(const Json& j) {
  std::vector<SparsityPattern::Entry> entries;
  for (const auto& e : j.at("entries")) {
    entries.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  }
  return SparsityPattern(j.at("rows").get<int>(), j.at("cols").get<int>(),
                         std::move(entries));
}

Json to_json(const FirResponse& f) {
  Json taps = Json::array();
  for (const auto& m : f.taps()) taps.push_back(to_json(m));
  return Json{{"start_lag", f.startLag()}, {"taps", std::move(taps)}};
}

FirResponse fir_from_json(const Json& j) {
  std::vector<Eigen::MatrixXd> taps;
  for (const auto& t : j.at("taps")) taps.push_back(matrix_from_json(t));
  return FirResponse(j.at("start_lag").get<int>(), std::move(taps));
}

Json to_json(const PlantModel& p) {
  return Json{{"A", to_json(p.A)},       {"B", to_json(p.B)},
              {"Q", to_json(p.Q)},       {"R", to_json(p.R)},
              {"sigma_w", p.sigmaW},     {"sigma_v", p.sigmaV},
              {"K0", to_json(p.K0)}};
}

PlantModel plant_from_json(const Json& j) {
  PlantModel p;
  p.A = matrix_from_json(j.at("A"));
  p.B = matrix_from_json(j.at("B"));
  p.Q = matrix_from_json(j.at("Q"));
  p.R = matrix_from_json(j.at("R"));
  p.sigmaW = j.at("sigma_w").get<double>();
  p.sigmaV = j.at("sigma_v").get<double>();
  p.K0 = matrix_from_json(j.at("K0"));
  return p;
}

Json to_json(const Trajectory& t) {
  Json records = Json::array();
  for (int k = 0; k < t.T(); ++k) {
    Json row = Json::array();
    for (int i = 0; i < t.n(); ++i) row.push_back(t.states[k](i));
    for (int i = 0; i < t.m(); ++i) row.push_back(t.inputs[k](i));
    records.push_back(std::move(row));
  }
  Json last = Json::array();
  for (int i = 0; i < t.n(); ++i) last.push_back(t.states.back()(i));
  records.push_back(std::move(last));
  return Json{{"header",
               {{"n", t.n()},
                {"m", t.m()},
                {"T", t.T()},
                {"seed", t.seed},
                {"model_hash", t.modelId}}},
              {"records", std::move(records)}};
}

Trajectory trajectory_from_json(const Json& j) {
  const auto& h = j.at("header");
  const int n = h.at("n").get<int>();
  const int m = h.at("m").get<int>();
  const int T = h.at("T").get<int>();
  Trajectory t;
  t.seed = h.at("seed").get<uint64_t>();
  t.modelId = h.at("model_hash").get<uint64_t>();
  const auto& records = j.at("records");
  if (static_cast<int>(records.size()) != T + 1) {
    throw std::invalid_argument("trajectory_from_json: record count mismatch");
  }
  for (int k = 0; k <= T; ++k) {
    const auto& row = records.at(k);
    const int want = k < T ? n + m : n;
    if (static_cast<int>(row.size()) != want) {
      throw std::invalid_argument("trajectory_from_json: record width mismatch");
    }
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = row.at(i).get<double>();
    t.states.push_back(x);
    if (k < T) {
      Eigen::VectorXd u(m);
      for (int i = 0; i < m; ++i) u(i) = row.at(n + i).get<double>();
      t.inputs.push_back(u);
    }
  }
  return t;
}

Json to_json(const LassoEstimate& e) {
  return Json{{"Ahat", to_json(e.Ahat)},
              {"Bhat", to_json(e.Bhat)},
              {"lambda", e.lambda},
              {"support", to_json(e.support)},
              {"iterations", e.iterations},
              {"converged", e.converged},
              {"kkt_residual", e.kktResidual},
              {"degenerate_columns", e.degenerateColumns}};
}

LassoEstimate estimate_from_json(const Json& j) {
  LassoEstimate e;
  e.Ahat = matrix_from_json(j.at("Ahat"));
  e.Bhat = matrix_from_json(j.at("Bhat"));
  e.lambda = j.at("lambda").get<double>();
  e.support = pattern_from_json(j.at("support"));
  e.iterations = j.at("iterations").get<std::vector<int>>();
  e.converged = j.at("converged").get<std::vector<bool>>();
  e.kktResidual = j.at("kkt_residual").get<std::vector<double>>();
  e.degenerateColumns = j.at("degenerate_columns").get<std::vector<int>>();
  return e;
}

Json to_json(const BootstrapResult& r) {
  return Json{{"eps_bar", r.epsBar},   {"samples", r.samples},
              {"delta", r.delta},      {"rounds", r.rounds},
              {"seed", r.seed},        {"excluded_rounds", r.excludedRounds},
              {"exclusion_warning", r.exclusionWarning}};
}

BootstrapResult bootstrap_from_json(const Json& j) {
  BootstrapResult r;
  r.epsBar = j.at("eps_bar").get<double>();
  r.samples = j.at("samples").get<std::vector<double>>();
  r.delta = j.at("delta").get<double>();
  r.rounds = j.at("rounds").get<int>();
  r.seed = j.at("seed").get<uint64_t>();
  r.excludedRounds = j.at("excluded_rounds").get<int>();
  r.exclusionWarning = j.at("exclusion_warning").get<bool>();
  return r;
}

namespace {

Json patterns_to_json(const std::vector<SparsityPattern>& ps) {
  Json arr = Json::array();
  for (const auto& p : ps) arr.push_back(to_json(p));
  return arr;
}

std::vector<SparsityPattern> patterns_from_json(const Json& j) {
  std::vector<SparsityPattern> ps;
  for (const auto& p : j) ps.push_back(pattern_from_json(p));
  return ps;
}

}  // namespace

Json to_json(const SynthesisProblem& p) {
  return Json{{"Ahat", to_json(p.Ahat)},
              {"Bhat", to_json(p.Bhat)},
              {"Q", to_json(p.Q)},
              {"R", to_json(p.R)},
              {"eps_bar", p.epsBar},
              {"alpha", p.alpha},
              {"L", p.L},
              {"Cx", patterns_to_json(p.Cx)},
              {"Cu", patterns_to_json(p.Cu)},
              {"Cv", patterns_to_json(p.Cv)},
              {"eta1", p.eta1},
              {"eta2", p.eta2},
              {"v_budget_exponent", p.vBudgetExponent}};
}

SynthesisProblem synthesis_problem_from_json(const Json& j) {
  SynthesisProblem p;
  p.Ahat = matrix_from_json(j.at("Ahat"));
  p.Bhat = matrix_from_json(j.at("Bhat"));
  p.Q = matrix_from_json(j.at("Q"));
  p.R = matrix_from_json(j.at("R"));
  p.epsBar = j.at("eps_bar").get<double>();
  p.alpha = j.at("alpha").get<double>();
  p.L = j.at("L").get<int>();
  p.Cx = patterns_from_json(j.at("Cx"));
  p.Cu = patterns_from_json(j.at("Cu"));
  p.Cv = patterns_from_json(j.at("Cv"));
  p.eta1 = j.at("eta1").get<double>();
  p.eta2 = j.at("eta2").get<double>();
  p.vBudgetExponent = j.at("v_budget_exponent").get<double>();

  std::vector<SparsityPattern> stacked;
  for (int t = 0; t < p.L; ++t) {
    stacked.push_back(pattern_vcat(p.Cx[t], p.Cu[t]));
  }
  {
    std::vector<SparsityPattern::Entry> ea, eb;
    for (int c = 0; c < p.Ahat.cols(); ++c)
      for (int r = 0; r < p.Ahat.rows(); ++r)
        if (p.Ahat(r, c) != 0.0) ea.emplace_back(r, c);
    for (int c = 0; c < p.Bhat.cols(); ++c)
      for (int r = 0; r < p.Bhat.rows(); ++r)
        if (p.Bhat(r, c) != 0.0) eb.emplace_back(r, c);
    const SparsityPattern sa(p.n(), p.n(), std::move(ea));
    const SparsityPattern sb(p.n(), p.m(), std::move(eb));
    p.counts = structure_counts(pattern_hcat(sa, sb), stacked, p.Cv);
  }
  p.validate();
  return p;
}

Json to_json(const SynthesisSolution& s) {
  Json j{{"status", s.status == SynthesisStatus::Feasible ? "feasible"
                                                          : "infeasible"},
         {"gamma_iterations", s.gammaIterations},
         {"max_iter_columns", s.maxIterColumns}};
  if (s.status == SynthesisStatus::Feasible) {
    j["gamma_bar"] = s.gammaBar;
    j["phi_x"] = to_json(s.phiX);
    j["phi_u"] = to_json(s.phiU);
    j["v"] = to_json(s.v);
    j["g"] = s.g;
    j["scaled_objective"] = s.scaledObjective;
    j["per_column_objectives"] = s.perColumnObjectives;
    j["max_response_column_sum"] = s.maxResponseColumnSum;
    j["max_v_column_sum"] = s.maxVColumnSum;
    j["eps_bar_used"] = s.epsBarUsed;
    j["k_phi"] = s.kPhi;
    j["k_v"] = s.kV;
  }
  return j;
}

SynthesisSolution synthesis_solution_from_json(const Json& j) {
  SynthesisSolution s;
  s.gammaIterations = j.at("gamma_iterations").get<int>();
  s.maxIterColumns = j.at("max_iter_columns").get<int>();
  if (j.at("status").get<std::string>() != "feasible") {
    s.status = SynthesisStatus::Infeasible;
    return s;
  }
  s.status = SynthesisStatus::Feasible;
  s.gammaBar = j.at("gamma_bar").get<double>();
  s.phiX = fir_from_json(j.at("phi_x"));
  s.phiU = fir_from_json(j.at("phi_u"));
  s.v = fir_from_json(j.at("v"));
  s.g = j.at("g").get<double>();
  s.scaledObjective = j.at("scaled_objective").get<double>();
  s.perColumnObjectives = j.at("per_column_objectives").get<std::vector<double>>();
  s.maxResponseColumnSum = j.at("max_response_column_sum").get<double>();
  s.maxVColumnSum = j.at("max_v_column_sum").get<double>();
  s.epsBarUsed = j.at("eps_bar_used").get<double>();
  s.kPhi = j.at("k_phi").get<int>();
  s.kV = j.at("k_v").get<int>();
  return s;
}

uint64_t config_hash(const Json& j) {
  const std::string dump = j.dump();
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Byte offset -> 1-based line number for a usable message.
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') ++line;
    }
    throw std::runtime_error(path + ":" + std::to_string(line) +
                             ": parse error: " + e.what());
  }
}

void write_csv(const std::string& path, uint64_t configHash,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char hashbuf[32];
  std::snprintf(hashbuf, sizeof(hashbuf), "%016llx",
                static_cast<unsigned long long>(configHash));
  out << "# config_hash=" << hashbuf << " version=" << kArtifactVersion << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << header[i] << (i + 1 < header.size() ? "," : "");
  }
  out << "\n";
  out.precision(17);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << (i + 1 < row.size() ? "," : "");
    }
    out << "\n";
  }
}

std::string trajectory_to_csv(const Trajectory& t) {
  std::ostringstream out;
  out.precision(17);
  out << "t";
  for (int i = 0; i < t.n(); ++i) out << ",x" << i;
  for (int i = 0; i < t.m(); ++i) out << ",u" << i;
  out << "\n";
  for (int k = 0; k <= t.T(); ++k) {
    out << k;
    for (int i = 0; i < t.n(); ++i) out << "," << t.states[k](i);
    for (int i = 0; i < t.m(); ++i) {
      out << ",";
      if (k < t.T()) out << t.inputs[k](i);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace sls
