#include "gcs/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace gcs::ad {
namespace {

double evaluate(const ScalarFn& f, std::span<const double> x) {
  Tape tape;
  const Tensor input = tape.column({x.begin(), x.end()});
  return f(tape, input).value();
}

}  // namespace

GradcheckReport gradcheck_report(const ScalarFn& f, std::span<const double> x, double step) {
  GradcheckReport report;
  {
    Tape tape;
    const Tensor input = tape.column({x.begin(), x.end()});
    const Var root = f(tape, input);
    tape.backward(root);
    report.analytic.assign(input.grads().begin(), input.grads().end());
  }
  std::vector<double> probe(x.begin(), x.end());
  report.numeric.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + step;
    const double up = evaluate(f, probe);
    probe[i] = saved - step;
    const double down = evaluate(f, probe);
    probe[i] = saved;
    report.numeric[i] = (up - down) / (2.0 * step);
    const double err = std::abs(report.analytic[i] - report.numeric[i]) /
                       std::max(1.0, std::abs(report.analytic[i]));
    if (err > report.max_rel_error) {
      report.max_rel_error = err;
      report.worst_index = i;
    }
  }
  return report;
}

double gradcheck(const ScalarFn& f, std::span<const double> x, double step) {
  return gradcheck_report(f, x, step).max_rel_error;
}

}  // namespace gcs::ad
