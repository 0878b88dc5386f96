#include "lpdgcn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lpdgcn {

namespace {

template <typename T, typename Builder>
T evaluate(const Builder& f, const std::vector<Matrix<T>>& params) {
  ad::Tape<T> tape;
  std::vector<ad::Var<T>> vars;
  vars.reserve(params.size());
  for (const auto& p : params) vars.push_back(tape.constant(p));
  return f(tape, vars).value().item();
}

template <typename T, typename Builder>
GradCheckReport check(const LossBuilder& f, const Builder& numeric_f, std::vector<Matrix<double>> params_d,
                      double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_difference_check: step must be positive");
  std::vector<Matrix<T>> params;
  for (const auto& p : params_d) params.push_back(cast<T>(p));
  const T h = static_cast<T>(step);

  std::vector<Matrix<double>> analytic;
  {
    ad::Tape<double> tape;
    std::vector<ad::Var<double>> vars;
    vars.reserve(params.size());
    for (const auto& p : params_d) vars.push_back(tape.leaf(p));
    const auto loss = f(tape, vars);
    const auto grads = tape.backward(loss);
    for (const auto& v : vars) analytic.push_back(grads.of(v));
  }

  GradCheckReport report;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p].size(); ++i) {
      const T saved = params[p][i];
      params[p][i] = saved + h;
      const T up = evaluate<T>(numeric_f, params);
      params[p][i] = saved - h;
      const T down = evaluate<T>(numeric_f, params);
      params[p][i] = saved;

      const auto numeric = static_cast<double>((up - down) / (2 * h));
      const double exact = analytic[p][i];
      const double denom = std::max({std::abs(exact), std::abs(numeric), 1e-8});
      const double err = std::abs(exact - numeric) / denom;
      ++report.coordinates;
      if (err > report.max_rel_error) {
        report.max_rel_error = err;
        report.worst_param = p;
        report.worst_index = i;
        report.worst_analytic = exact;
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace

GradCheckReport finite_difference_check(const LossBuilder& f, std::vector<Matrix<double>> params, double h) {
  return check<double>(f, f, std::move(params), h);
}

GradCheckReport finite_difference_check(const LossBuilder& f, const ExtendedLossBuilder& numeric,
                                        std::vector<Matrix<double>> params, double h) {
  return check<long double>(f, numeric, std::move(params), h);
}

}  // namespace lpdgcn
