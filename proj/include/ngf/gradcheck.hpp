#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ngf/autodiff.hpp"

namespace ngf {

/// A named tensor taking part in a gradient check. The tensor must outlive
/// the check; its values are perturbed in place and restored.
struct NamedTensor {
  std::string name;
  Tensor* tensor;
};

/// Builds the scalar objective on a fresh tape. It must register every
/// checked tensor through `tape.parameter(...)`.
using ScalarObjective = std::function<Var(Tape&)>;

struct GradCheckOptions {
  double epsilon = 1e-4;
  double rel_tol = 1e-4;
  /// Upper bound on coordinates checked per tensor; 0 checks all of them.
  /// When capped, coordinates are taken at an even stride.
  std::size_t max_coords_per_tensor = 0;
};

struct GradCheckEntry {
  std::string tensor;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
  bool non_smooth = false;
};

struct GradCheckReport {
  /// Largest relative error over smooth coordinates, with denominator
  /// max(|analytic|, |numeric|, 1e-8).
  double max_rel_error = 0.0;
  GradCheckEntry worst;
  std::size_t checked = 0;
  /// Coordinates whose one-sided slopes betray a kink within epsilon; they
  /// are reported and excluded from max_rel_error.
  std::size_t non_smooth = 0;
  std::vector<GradCheckEntry> flagged;
  bool passed = true;
};

GradCheckReport finite_diff_check(const ScalarObjective& objective, const std::vector<NamedTensor>& params,
                                  const GradCheckOptions& options = {});

}  // namespace ngf
