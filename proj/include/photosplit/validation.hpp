#pragma once

// Acceptance checks: oracle equivalence, reported peaks, shape optimization,
// conservation, symmetries and the quadratic-form identity.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "photosplit/serialization.hpp"

namespace photosplit {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidationOptions {
  // Smaller grids and fewer random samples; skips the peak and shape checks.
  bool quick = false;
  std::uint64_t seed = 20240611;
  int workers = 0;
  double window = 20.0;
};

CheckResult check_oracle_unentangled(const ValidationOptions& options);
CheckResult check_oracle_entangled_stationary(const ValidationOptions& options);
CheckResult check_unentangled_peaks(const ValidationOptions& options);
CheckResult check_entangled_peaks(const ValidationOptions& options);
CheckResult check_shape_optimization(const ValidationOptions& options);
CheckResult check_conservation(const ValidationOptions& options);
CheckResult check_symmetry(const ValidationOptions& options);
CheckResult check_quadratic_form(const ValidationOptions& options);

struct NamedCheck {
  std::string name;
  std::function<CheckResult(const ValidationOptions&)> run;
  bool in_quick = true;
};
const std::vector<NamedCheck>& validation_checks();

/// Runs every check (the quick subset when options.quick). Exceptions inside
/// a check turn into a failed result.
std::vector<CheckResult> run_validation(const ValidationOptions& options,
                                        const std::function<void(const CheckResult&)>& on_result = {});

Json report_json(const std::vector<CheckResult>& results);

}  // namespace photosplit
