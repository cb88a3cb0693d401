#include "ngf/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "ngf/error.hpp"

namespace ngf {

namespace {

double evaluate(const ScalarObjective& objective) {
  Tape tape;
  Var out = objective(tape);
  const double v = out.value().item();
  if (!std::isfinite(v)) throw NumericError("gradient check objective is not finite");
  return v;
}

// With D(h) = f'(x+) - f'(x-) estimated by one-sided slopes at step h, a
// smooth objective gives D(h) ~ h f''(x), so halving h halves D. A kink inside
// [x-h/2, x+h/2] leaves D roughly unchanged (the jump), and one between h/2
// and h makes D(h) much larger than D(h/2). Kinks near h/3 can still give a
// ratio close to 2, so the forward and backward second differences, which a
// smooth objective makes equal up to O(h^3), are compared as well.
bool looks_non_smooth(double f0, double fp, double fm, double fp2, double fm2, double eps) {
  const double fwd = (fp - f0) / eps, bwd = (f0 - fm) / eps;
  const double fwd2 = (fp2 - f0) / (eps / 2), bwd2 = (f0 - fm2) / (eps / 2);
  const double d1 = fwd - bwd, d2 = fwd2 - bwd2;
  const double noise = 1e-9 + 1e-7 * std::max(std::abs(fwd), std::abs(bwd));
  if (std::abs(d1) <= noise) return false;
  if (std::abs(d2) <= noise) return true;
  const double asym = std::abs((fp - 2 * fp2 + f0) - (fm - 2 * fm2 + f0)) / eps;
  if (asym > noise && asym > 0.01 * std::abs(d1)) return true;
  const double ratio = d1 / d2;
  return ratio < 1.5 || ratio > 2.5;
}

}  // namespace

GradCheckReport finite_diff_check(const ScalarObjective& objective, const std::vector<NamedTensor>& params,
                                  const GradCheckOptions& options) {
  if (!(options.epsilon > 0.0)) throw DomainError("finite_diff_check: epsilon must be positive");
  for (const auto& p : params) {
    p.tensor->set_requires_grad(true);
    p.tensor->zero_grad();
    p.tensor->grad();
  }
  {
    Tape tape;
    Var out = objective(tape);
    if (!std::isfinite(out.value().item())) throw NumericError("gradient check objective is not finite");
    tape.backward(out);
  }
  std::vector<std::vector<double>> analytic;
  for (const auto& p : params) {
    auto g = p.tensor->grad_values();
    analytic.emplace_back(g.begin(), g.end());
  }

  const double f0 = evaluate(objective);
  const double eps = options.epsilon;
  GradCheckReport report;
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto values = params[t].tensor->data();
    const std::size_t n = values.size();
    std::size_t stride = 1;
    if (options.max_coords_per_tensor > 0 && n > options.max_coords_per_tensor) {
      stride = (n + options.max_coords_per_tensor - 1) / options.max_coords_per_tensor;
    }
    for (std::size_t i = 0; i < n; i += stride) {
      const double orig = values[i];
      auto at = [&](double delta) {
        values[i] = orig + delta;
        double v = evaluate(objective);
        values[i] = orig;
        return v;
      };
      const double fp = at(eps), fm = at(-eps), fp2 = at(eps / 2), fm2 = at(-eps / 2);
      GradCheckEntry e;
      e.tensor = params[t].name;
      e.index = i;
      e.analytic = analytic[t][i];
      e.numeric = (fp - fm) / (2 * eps);
      e.rel_error = std::abs(e.analytic - e.numeric) /
                    std::max({std::abs(e.analytic), std::abs(e.numeric), 1e-8});
      e.non_smooth = looks_non_smooth(f0, fp, fm, fp2, fm2, eps);
      ++report.checked;
      if (e.non_smooth) {
        ++report.non_smooth;
        report.flagged.push_back(e);
        continue;
      }
      if (e.rel_error >= report.max_rel_error) {
        report.max_rel_error = e.rel_error;
        report.worst = e;
      }
    }
  }
  report.passed = report.max_rel_error < options.rel_tol;
  return report;
}

}  // namespace ngf
