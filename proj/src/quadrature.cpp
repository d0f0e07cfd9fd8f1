#include "obs/errors.hpp"
#include "obs/exact.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <sstream>

namespace obs::exact {

namespace {

constexpr long kMaxPanels = 1L << 20;

double composite(const std::function<double(double)>& f, double a, double b, long panels) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  const double h = (b - a) / static_cast<double>(panels);
  double sum = 0.0;
  for (long p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    sum += Rule::integrate(f, lo, p + 1 == panels ? b : lo + h);
  }
  return sum;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  double previous = composite(f, a, b, 1);
  for (long panels = 2; panels <= kMaxPanels; panels *= 2) {
    const double current = composite(f, a, b, panels);
    if (std::abs(current - previous) < tol * std::max(1.0, std::abs(current))) return current;
    previous = current;
  }
  std::ostringstream msg;
  msg << "Gauss-Legendre quadrature on [" << a << ", " << b << "] did not converge within " << kMaxPanels
      << " panels";
  throw SolverError(msg.str());
}

double integrate_2d(const std::function<double(double, double)>& f, double a, double b,
                    const std::function<double(double)>& lo, const std::function<double(double)>& hi, double tol) {
  return integrate(
      [&](double x) { return integrate([&](double y) { return f(x, y); }, lo(x), hi(x), 0.1 * tol); }, a, b, tol);
}

}  // namespace obs::exact
