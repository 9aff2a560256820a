#pragma once

#include <string>
#include <vector>

#include "ncplex/constraints.hpp"
#include "ncplex/plex.hpp"

namespace ncplex {

enum class ConstraintSource { Computed, Identity };

struct VerifyOptions {
  std::string element = "p1";  // p1 | p2 | q1 | q2
  ConstraintSource constraints = ConstraintSource::Computed;
  /// Added to the first constrained coefficient when nonzero.
  double perturb = 0.0;
  double tolerance = 1e-9;
};

struct VerifyReport {
  int local_size = 0;
  int global_size = 0;
  int constrained_dofs = 0;
  /// ||E m||_inf / (||E||_inf ||m||_inf) per rigid mode.
  std::vector<double> residuals;
  double max_residual = 0.0;
  bool passed = false;
};

/// Vector-valued element of the mesh dimension for `options.element`.
ReferenceElement verify_element(const Plex& plex, const std::string& element);

/// Builds sections and constraints, assembles the symmetric-gradient operator
/// and checks that every rigid body mode lies in its null space.
VerifyReport verify_rigid_body_null_space(const Plex& plex, const VerifyOptions& options);

/// Constraint matrix used by the verification for `element` (vector valued).
ConstraintMatrix verification_constraints(const Plex& plex, const VerifyOptions& options);

}  // namespace ncplex
