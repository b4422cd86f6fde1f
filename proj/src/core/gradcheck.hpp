#pragma once

#include <functional>
#include <span>

#include "core/tensor.hpp"

namespace fxcast {

// Central finite-difference verification of analytic gradients. `coords`
// points at the live parameter coordinates the loss closure reads; each is
// perturbed by +/- eps, the loss re-evaluated, and the coordinate restored.
// Returns the maximum over coordinates of
//   |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
// Throws a numeric-instability error if any perturbed loss is non-finite.
double finite_difference_check(const std::function<double()>& loss,
                               std::span<double* const> coords,
                               std::span<const double> analytic, double eps);

}  // namespace fxcast
