#include "ncplex/verify.hpp"

#include <algorithm>

#include "ncplex/assembly.hpp"

namespace ncplex {

ReferenceElement verify_element(const Plex& plex, const std::string& element) {
  const int dim = plex.dimension();
  return ReferenceElement::from_name(element, dim, dim);
}

ConstraintMatrix verification_constraints(const Plex& plex, const VerifyOptions& options) {
  const auto element = verify_element(plex, options.element);
  const Section section = section_from_element(plex, element);
  const GlobalSection global = global_section(plex, section);
  ConstraintMatrix c = options.constraints == ConstraintSource::Identity
                           ? trivial_constraint_matrix(section, global)
                           : build_constraint_matrix(plex, section, global, element);
  if (options.perturb != 0.0) perturb_first_constraint(c, options.perturb);
  return c;
}

VerifyReport verify_rigid_body_null_space(const Plex& plex, const VerifyOptions& options) {
  const auto element = verify_element(plex, options.element);
  const Section section = section_from_element(plex, element);
  const GlobalSection global = global_section(plex, section);
  const ConstraintMatrix c = verification_constraints(plex, options);
  const SystemMatrix e = assemble_symmetric_gradient(plex, section, global, c, element);
  const auto modes = rigid_body_modes(plex, global, element);

  VerifyReport report;
  report.local_size = section.storage_size();
  report.global_size = global.global_size();
  report.constrained_dofs = c.num_constrained_rows();
  for (const auto& m : modes) {
    report.residuals.push_back(null_space_residual(e, {m}));
    report.max_residual = std::max(report.max_residual, report.residuals.back());
  }
  report.passed = report.max_residual <= options.tolerance;
  return report;
}

}  // namespace ncplex
