#include "core/gradcheck.hpp"

#include <cmath>

namespace fxcast {

double finite_difference_check(const std::function<double()>& loss,
                               std::span<double* const> coords,
                               std::span<const double> analytic, double eps) {
  require(eps > 0.0, ErrorCode::InvalidArgument, "gradcheck: eps must be positive");
  require(coords.size() == analytic.size(), ErrorCode::Shape,
          "gradcheck: coordinate/gradient count mismatch");

  double max_err = 0.0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    double& theta = *coords[i];
    const double saved = theta;
    theta = saved + eps;
    const double plus = loss();
    theta = saved - eps;
    const double minus = loss();
    theta = saved;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      raise(ErrorCode::Numeric, "gradcheck: non-finite loss during perturbation");
    }
    const double numeric = (plus - minus) / (2.0 * eps);
    const double denom = std::max(1e-8, std::abs(analytic[i]) + std::abs(numeric));
    max_err = std::max(max_err, std::abs(analytic[i] - numeric) / denom);
  }
  return max_err;
}

}  // namespace fxcast
