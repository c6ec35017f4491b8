#include "winsim/grid_integration.hpp"

#include <algorithm>
#include <cmath>

#include "winsim/errors.hpp"

namespace winsim {

GridIntegrator::GridIntegrator(std::span<const double> values, int osr, long first_cell, double begin, double dt)
    : values_(values), osr_(osr), first_cell_(first_cell), begin_(begin), dt_(dt) {
  if (osr < 1) throw ArgumentError("oversampling ratio must be >= 1");
  if (!(dt > 0.0)) throw ArgumentError("grid step must be positive");
}

GridIntegrator::Quadratic GridIntegrator::local(long i) const {
  const auto n = static_cast<long>(values_.size());
  const double f0 = values_[static_cast<std::size_t>(i)];
  if (osr_ < 3) return {f0, 0.0, 0.0};
  long pos = (first_cell_ + i) % osr_;
  if (pos < 0) pos += osr_;
  auto at = [&](long j) { return values_[static_cast<std::size_t>(j)]; };
  if (pos == 0) {
    if (i + 2 >= n) return {f0, 0.0, 0.0};
    const double d1 = at(i + 1) - f0;
    const double d2 = at(i + 2) - 2.0 * at(i + 1) + f0;
    return {f0, d1 - 0.5 * d2, 0.5 * d2};
  }
  if (pos == osr_ - 1) {
    if (i - 2 < 0) return {f0, 0.0, 0.0};
    const double d1 = at(i - 1) - f0;
    const double d2 = at(i - 2) - 2.0 * at(i - 1) + f0;
    return {f0, -d1 + 0.5 * d2, 0.5 * d2};
  }
  if (i - 1 < 0 || i + 1 >= n) return {f0, 0.0, 0.0};
  const double fm = at(i - 1), fp = at(i + 1);
  return {f0, 0.5 * (fp - fm), 0.5 * (fp - 2.0 * f0 + fm)};
}

double GridIntegrator::cell(long i) const {
  const Quadratic q = local(i);
  return (q.a + q.c / 12.0) * dt_;
}

double GridIntegrator::partial(long i, double u_lo, double u_hi) const {
  const Quadratic q = local(i);
  const double du = u_hi - u_lo;
  const double du2 = u_hi * u_hi - u_lo * u_lo;
  const double du3 = u_hi * u_hi * u_hi - u_lo * u_lo * u_lo;
  return (q.a * du + q.b * du2 / 2.0 + q.c * du3 / 3.0) * dt_;
}

double GridIntegrator::integral(double a, double b) const {
  const auto n = static_cast<long>(values_.size());
  const double tol = 1e-9 * dt_;
  if (a < begin_ - tol || b > end() + tol || a > b + tol)
    throw ArgumentError("integration limits outside the sampled span");
  const double sa = std::clamp((a - begin_) / dt_, 0.0, static_cast<double>(n));
  const double sb = std::clamp((b - begin_) / dt_, sa, static_cast<double>(n));
  long ia = std::min(static_cast<long>(std::floor(sa)), n - 1);
  long ib = std::min(static_cast<long>(std::floor(sb)), n - 1);
  const double ua = sa - static_cast<double>(ia) - 0.5;
  const double ub = sb - static_cast<double>(ib) - 0.5;
  if (ia == ib) return partial(ia, ua, ub);
  double acc = (ua == -0.5) ? cell(ia) : partial(ia, ua, 0.5);
  for (long i = ia + 1; i < ib; ++i) acc += cell(i);
  if (ub > -0.5) acc += (ub == 0.5) ? cell(ib) : partial(ib, -0.5, ub);
  return acc;
}

}  // namespace winsim
