#pragma once

#include <span>

namespace winsim {

/// Exact integration of a piecewise-quadratic reconstruction of cell-center
/// samples. Each cell uses the quadratic through itself and its neighbours,
/// but stencils never cross a symbol boundary (every `osr` cells): the first
/// and last cell of a symbol use one-sided stencils. Consequences:
///  - signals that are constant on each symbol interval integrate exactly,
///    whatever the integration limits;
///  - smooth signals integrate with O(dt^4) error per symbol interval;
///  - integrals are continuous in the limits.
class GridIntegrator {
public:
  /// `values[0]` is the cell starting at time `begin`; `first_cell` is its
  /// index on the symbol-aligned grid (symbol boundaries at multiples of osr).
  GridIntegrator(std::span<const double> values, int osr, long first_cell, double begin, double dt);

  /// Integral over [a, b], a <= b, both within the covered span.
  double integral(double a, double b) const;
  /// Integral over the whole cell i.
  double cell(long i) const;

  double begin() const noexcept { return begin_; }
  double end() const noexcept { return begin_ + static_cast<double>(values_.size()) * dt_; }

private:
  struct Quadratic {
    double a, b, c;  // a + b u + c u^2, u in [-1/2, 1/2] over the cell
  };
  Quadratic local(long i) const;
  double partial(long i, double u_lo, double u_hi) const;

  std::span<const double> values_;
  int osr_;
  long first_cell_;
  double begin_;
  double dt_;
};

}  // namespace winsim
