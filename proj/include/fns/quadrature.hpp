#pragma once

#include <cmath>
#include <vector>

namespace fns {

// Adaptive Gauss-Kronrod 7-15 panels. Error estimate per panel is the
// difference between the Kronrod and embedded Gauss results; panels split
// until the local estimate fits their share of the absolute tolerance.
namespace gk {

// QUADPACK abscissae and weights on [-1, 1]; even indices are Kronrod-only
// points, odd indices plus the center are the embedded Gauss-7 points.
inline constexpr double nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};

inline constexpr double kronrod_w[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr double gauss_w[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void panel(const F& f, double a, double b, double& result, double& error) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fk = 0.0, fg = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double x = nodes[i] * h;
    const double v = f(c - x) + f(c + x);
    fk += kronrod_w[i] * v;
    if (i % 2 == 1) fg += gauss_w[i / 2] * v;
  }
  const double vc = f(c);
  fk += kronrod_w[7] * vc;
  fg += gauss_w[3] * vc;
  result = fk * h;
  error = std::abs((fk - fg) * h);
}

}  // namespace gk

// integral of f over [a, b] to absolute tolerance
template <class F>
double integrate(const F& f, double a, double b, double abs_tol, int max_depth = 30) {
  if (!(b > a)) return 0.0;
  struct Frame {
    double a, b;
    int depth;
  };
  double total = 0.0;
  std::vector<Frame> stack{{a, b, 0}};
  while (!stack.empty()) {
    const Frame fr = stack.back();
    stack.pop_back();
    double result = 0.0, error = 0.0;
    gk::panel(f, fr.a, fr.b, result, error);
    const double share = abs_tol * (fr.b - fr.a) / (b - a);
    if (error <= std::max(share, 1e-300) || fr.depth >= max_depth) {
      total += result;
    } else {
      const double mid = 0.5 * (fr.a + fr.b);
      stack.push_back({fr.a, mid, fr.depth + 1});
      stack.push_back({mid, fr.b, fr.depth + 1});
    }
  }
  return total;
}

// integral over [a, b] with extra panel breaks at a + k*step (for integrands
// oscillating with period ~ 2*step); each base panel is integrated adaptively
template <class F>
double integrate_oscillatory(const F& f, double a, double b, double step, double abs_tol) {
  if (!(b > a)) return 0.0;
  if (!(step > 0.0) || step >= (b - a)) return integrate(f, a, b, abs_tol);
  const double span = b - a;
  const std::size_t panels = std::min<std::size_t>(200000, std::size_t(span / step) + 1);
  const double width = span / double(panels);
  double total = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double lo = a + double(i) * width;
    const double hi = (i + 1 == panels) ? b : lo + width;
    total += integrate(f, lo, hi, abs_tol * width / span, 12);
  }
  return total;
}

}  // namespace fns
