#pragma once

#include "mpsa/coercivity.hpp"
#include "mpsa/manufactured.hpp"
#include "mpsa/variants.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mpsa {

using Tagger = std::function<BoundaryTag(int, const Vec2&)>;

struct StudyOptions {
  MeshSpec mesh;         // nx, ny are replaced per level
  int base_n = 4;
  int levels = 5;
  VariantConfig variant;
  std::string case_name = "trig";
  double mu = 1.0;
  double lambda = 1.0;
  LinearParams linear;
  SolverOptions solver;
  int threads = 1;
  bool precheck = true;  // audit every level and flag failures
  Tagger tagger;         // boundary assignment; empty keeps Dirichlet everywhere
};

struct StudyRow {
  int level = 0;
  double h = 0.0;        // nominal spacing lx / nx
  ErrorNorms err;
  double rate_l2 = std::numeric_limits<double>::quiet_NaN();
  double rate_stress = std::numeric_limits<double>::quiet_NaN();
  bool flagged = false;
  double nu = std::numeric_limits<double>::quiet_NaN();
};

struct ErrorTable {
  std::vector<StudyRow> rows;
  bool locking = false;
  std::optional<CountingCheck> counting;

  std::string to_csv() const;
  void write_csv(const std::string& path) const;
};

/// log(e_i / e_{i+1}) / log(h_i / h_{i+1}); NaN if either error is zero.
double observed_rate(double e0, double e1, double h0, double h1);

/// Refinement study: level l uses base_n * 2^l cells per axis.
ErrorTable convergence_study(const StudyOptions& options);

struct LockingOptions {
  StudyOptions study;     // case, mesh kind, variant; mu is the shear modulus
  std::vector<double> nus{0.3, 0.4, 0.49, 0.499, 0.4999};
  int n = 32;
  int macro_block = 2;    // counting check on n/macro_block square blocks
};

ErrorTable locking_study(const LockingOptions& options);

/// One solve of a manufactured case on a given mesh.
struct CaseRun {
  Discretization disc;
  GlobalSystem sys;
  SolveResult result;
  ErrorNorms err;
  bool flagged = false;
};
CaseRun run_case(const Mesh& mesh, const ManufacturedCase& mc, const VariantConfig& variant,
                 const SolverOptions& solver, int threads, bool precheck);

}  // namespace mpsa
