#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lpdgcn/tape.hpp"

namespace lpdgcn {

/// Builds a scalar loss on `tape` from leaf Vars bound to the parameters. Must
/// be deterministic: every call with equal parameter values returns the same
/// loss (seed any dropout identically per call).
using LossBuilder =
    std::function<ad::Var<double>(ad::Tape<double>& tape, std::span<const ad::Var<double>> params)>;

/// The same loss evaluated in extended precision, for the numeric side only.
using ExtendedLossBuilder = std::function<ad::Var<long double>(ad::Tape<long double>& tape,
                                                               std::span<const ad::Var<long double>> params)>;

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates = 0;
};

/// Compares tape gradients with central differences (f(p+h) - f(p-h)) / 2h,
/// coordinate by coordinate. Relative error uses the denominator
/// max(|analytic|, |numeric|, 1e-8).
GradCheckReport finite_difference_check(const LossBuilder& f, std::vector<Matrix<double>> params,
                                        double h);

/// As above, but the central differences evaluate `numeric` (the same loss in
/// long double) so that rounding in f stays far below the step. Analytic
/// gradients still come from the double-precision tape of `f`.
GradCheckReport finite_difference_check(const LossBuilder& f, const ExtendedLossBuilder& numeric,
                                        std::vector<Matrix<double>> params, double h);

}  // namespace lpdgcn
