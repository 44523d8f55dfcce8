#include "msnet/quadrature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace msnet {

namespace {

struct Panel {
  double lo, hi, f_lo, f_mid, f_hi, whole;
};

double simpson(double lo, double hi, double f_lo, double f_mid, double f_hi) {
  return (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
}

QuadratureResult refine(const std::function<double(double)>& f, const Panel& p, double tol, int depth) {
  const double mid = 0.5 * (p.lo + p.hi);
  const double left_mid = 0.5 * (p.lo + mid);
  const double right_mid = 0.5 * (mid + p.hi);
  const double f_lm = f(left_mid);
  const double f_rm = f(right_mid);
  const double left = simpson(p.lo, mid, p.f_lo, f_lm, p.f_mid);
  const double right = simpson(mid, p.hi, p.f_mid, f_rm, p.f_hi);
  const double delta = left + right - p.whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return {left + right + delta / 15.0, std::abs(delta) / 15.0};
  }
  const auto l = refine(f, {p.lo, mid, p.f_lo, f_lm, p.f_mid, left}, 0.5 * tol, depth - 1);
  const auto r = refine(f, {mid, p.hi, p.f_mid, f_rm, p.f_hi, right}, 0.5 * tol, depth - 1);
  return {l.value + r.value, l.error + r.error};
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                                  double abs_tol, int max_depth) {
  if (!(hi >= lo)) throw std::invalid_argument("adaptive_simpson: hi < lo");
  if (hi == lo) return {0.0, 0.0};
  const double mid = 0.5 * (lo + hi);
  const double f_lo = f(lo), f_mid = f(mid), f_hi = f(hi);
  return refine(f, {lo, hi, f_lo, f_mid, f_hi, simpson(lo, hi, f_lo, f_mid, f_hi)}, abs_tol, max_depth);
}

QuadratureResult integrate_tail_numeric(const std::function<double(double)>& tail, double x,
                                        double rel_tol) {
  if (std::isinf(x)) return {0.0, 0.0};
  const double t0 = tail(x);
  if (t0 <= 0.0) return {0.0, 0.0};

  double total = 0.0;
  double error = 0.0;
  double lo = x;
  double width = std::max(1.0, std::abs(x)) * 0.125;
  for (int piece = 0; piece < 2000; ++piece) {
    const double hi = lo + width;
    // Pieces are integrated to a small fraction of the running total; the first
    // piece uses the tail value times its width as the scale.
    const double scale = std::max(total, t0 * width);
    const auto part = adaptive_simpson(tail, lo, hi, 1e-3 * rel_tol * scale);
    total += part.value;
    error += part.error;
    const bool negligible = part.value <= rel_tol * total;
    const bool vanished = tail(hi) < 1e-16 * t0;
    if (negligible && vanished) return {total, error};
    if (vanished && part.value == 0.0) return {total, error};
    lo = hi;
    width *= 2.0;
    if (!std::isfinite(lo)) break;
  }
  throw std::runtime_error("integrate_tail_numeric: tail does not vanish; mean not finite");
}

}  // namespace msnet
