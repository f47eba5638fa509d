#ifndef RHLS_SERIALIZE_HPP
#define RHLS_SERIALIZE_HPP

#include <json.hpp>
#include <string>

#include "rhls/diagnostics.hpp"
#include "rhls/energy.hpp"
#include "rhls/geometry.hpp"
#include "rhls/sharp.hpp"
#include "rhls/solver.hpp"

namespace rhls {

// Reports keep a stable field order so identical runs serialize to
// identical bytes.
using ojson = nlohmann::ordered_json;

/// Raised on malformed files and mesh/solution mismatches (CLI exit 3).
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string hash_hex(std::uint64_t h);

ojson mesh_to_json(const Mesh& mesh);
MeshPtr mesh_from_json(const ojson& j);

ojson to_json(const SharpConstant& c);
ojson to_json(const EnergyReport& r);
ojson to_json(const SweepReport& r);
ojson to_json(const SolveTrace& t, bool include_iterates = false);
ojson to_json(const PohozaevReport& r);
ojson to_json(const SymmetryReport& r);
ojson to_json(const MovingPlaneResult& r);
ojson to_json(const BlowupReport& r, bool include_points = false);
ojson to_json(const ContinuationResult& r);
ojson to_json(const NonexistenceReport& r);

/// Solution bundle: resolved config, mesh (with content hash), scalings
/// and the normalized field.
ojson solution_to_json(const SolveTrace& trace, const ojson& config);

struct LoadedSolution {
  MeshPtr mesh;
  std::vector<double> field;  // normalized
  double alpha, lambda, q;
  double multiplier, raw_scale, residual;
  std::string status;
};
LoadedSolution solution_from_json(const ojson& j);

std::string sweep_csv(const SweepReport& r);
std::string iterations_csv(const SolveTrace& t);
std::string continuation_csv(const ContinuationResult& r);
std::string solution_csv(const Mesh& mesh, const std::vector<double>& field,
                         double raw_scale);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace rhls

#endif
