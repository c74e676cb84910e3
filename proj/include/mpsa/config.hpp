#pragma once

#include "mpsa/studies.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mpsa {

/// Axis-aligned box tagging boundary faces whose midpoints lie inside it.
struct BoxRule {
  Vec2 lo;
  Vec2 hi;
  BoundaryTag tag = BoundaryTag::Dirichlet;
};

/// Resolved run configuration. Sections and keys are listed in the README.
struct RunConfig {
  // [mesh]
  std::optional<std::string> mesh_file;
  MeshSpec mesh;
  // [material]
  double mu = 1.0;
  double lambda = 1.0;
  std::optional<double> nu;  // overrides lambda
  std::optional<std::string> material_file;
  double mu_min = 0.0;
  double mu_max = 1e300;
  // [variant]
  VariantConfig variant;
  // [boundary]
  BoundaryTag default_tag = BoundaryTag::Dirichlet;
  std::vector<BoxRule> boxes;  // applied in order, later boxes win
  // [problem]
  std::string case_name = "trig";
  LinearParams linear;
  // [solver]
  SolverOptions solver;
  int threads = 1;
  // [study]
  int levels = 5;
  int base_n = 4;
  std::vector<double> nus{0.3, 0.4, 0.49, 0.499, 0.4999};
  int n = 32;
  bool precheck = true;
  // [coercivity]
  bool global = true;
  int global_max_unknowns = 3000;
  int macro_block = 2;                     // counting check with blocks of this many cells per axis
  std::optional<std::string> partition_file;
  int macro_max_cells = 64;
  // [output]
  std::string dir = ".";
  bool debug_local = false;

  /// The resolved configuration as JSON (written to manifest.json).
  std::string to_json() const;
};

/// Parses INI text. Unknown sections or keys and malformed values throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Tagger from the boundary rules. Faces matching no box keep the tag they
/// carry in `mesh` (meshes read from file) or get the default. The returned
/// function refers to `mesh` when one is given.
Tagger make_tagger(const RunConfig& config, const Mesh* mesh = nullptr);

/// Generates or loads the mesh and applies the boundary rules.
Mesh build_mesh(const RunConfig& config);
MaterialField build_material(const RunConfig& config, const Mesh& mesh);

}  // namespace mpsa
