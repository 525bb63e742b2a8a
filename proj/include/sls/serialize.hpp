#pragma once

#include <string>

#include "json.hpp"
#include "sls/bootstrap.hpp"
#include "sls/fir.hpp"
#include "sls/pattern.hpp"
#include "sls/plant.hpp"
#include "sls/synthesis.hpp"
#include "sls/sysid.hpp"

namespace sls {

using Json = nlohmann::json;

Json to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const Json& j);

Json to_json(const SparsityPattern& p);
SparsityPattern pattern_from_json(const Json& j);

Json to_json(const FirResponse& f);
FirResponse fir_from_json(const Json& j);

Json to_json(const PlantModel& p);
PlantModel plant_from_json(const Json& j);

Json to_json(const Trajectory& t);
Trajectory trajectory_from_json(const Json& j);

Json to_json(const LassoEstimate& e);
LassoEstimate estimate_from_json(const Json& j);

Json to_json(const BootstrapResult& r);
BootstrapResult bootstrap_from_json(const Json& j);

Json to_json(const SynthesisProblem& p);
SynthesisProblem synthesis_problem_from_json(const Json& j);

Json to_json(const SynthesisSolution& s);
SynthesisSolution synthesis_solution_from_json(const Json& j);

// FNV-1a over the canonical dump; used for model/config hashes in headers.
uint64_t config_hash(const Json& j);

// File round trip.  load_json reports parse failures with the file name and
// 1-based line number.
void save_json(const std::string& path, const Json& j);
Json load_json(const std::string& path);

// CSV with a leading comment line carrying the config hash and artifact
// version, then a header row and data rows.
void write_csv(const std::string& path, uint64_t configHash,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string trajectory_to_csv(const Trajectory& t);

inline constexpr int kArtifactVersion = 1;

}  // namespace sls
