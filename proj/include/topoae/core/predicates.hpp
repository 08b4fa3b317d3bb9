#pragma once

// Adaptive orientation and incircle tests. A floating-point filter with
// Shewchuk's forward error bounds answers almost every query; the rest fall
// back to exact expansion arithmetic.

#include <cmath>
#include <vector>

namespace topoae::geom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

namespace detail {

using Expansion = std::vector<double>;

inline void two_sum(double a, double b, double& x, double& y) {
  x = a + b;
  const double bv = x - a;
  const double av = x - bv;
  y = (a - av) + (b - bv);
}

inline void two_product(double a, double b, double& x, double& y) {
  x = a * b;
  y = std::fma(a, b, -x);
}

// e + f, both nonoverlapping with increasing magnitude. Zero components are
// dropped so expansions stay short.
inline Expansion expansion_sum(const Expansion& e, const Expansion& f) {
  Expansion h = e;
  for (double b : f) {
    Expansion g;
    g.reserve(h.size() + 1);
    double q = b;
    for (double hi : h) {
      double s, err;
      two_sum(q, hi, s, err);
      if (err != 0.0) g.push_back(err);
      q = s;
    }
    if (q != 0.0 || g.empty()) g.push_back(q);
    h = std::move(g);
  }
  return h;
}

inline Expansion scale_expansion(const Expansion& e, double b) {
  Expansion h;
  h.reserve(2 * e.size());
  double q = 0.0;
  bool first = true;
  for (double ei : e) {
    double p, perr;
    two_product(ei, b, p, perr);
    if (first) {
      if (perr != 0.0) h.push_back(perr);
      q = p;
      first = false;
      continue;
    }
    double s, serr;
    two_sum(q, perr, s, serr);
    if (serr != 0.0) h.push_back(serr);
    double t, terr;
    two_sum(p, s, t, terr);
    if (terr != 0.0) h.push_back(terr);
    q = t;
  }
  if (q != 0.0 || h.empty()) h.push_back(q);
  return h;
}

inline Expansion product_term(double a, double b, bool negate) {
  double x, y;
  two_product(a, b, x, y);
  if (negate) {
    x = -x;
    y = -y;
  }
  return y != 0.0 ? Expansion{y, x} : Expansion{x};
}

inline double estimate(const Expansion& e) {
  // Largest component dominates, so the sign of the total is the sign of the
  // last nonzero component.
  for (auto it = e.rbegin(); it != e.rend(); ++it)
    if (*it != 0.0) return *it;
  return 0.0;
}

inline Expansion orient_exact(const Vec2& p, const Vec2& q, const Vec2& r) {
  Expansion acc = product_term(p.x, q.y, false);
  acc = expansion_sum(acc, product_term(p.x, r.y, true));
  acc = expansion_sum(acc, product_term(p.y, q.x, true));
  acc = expansion_sum(acc, product_term(p.y, r.x, false));
  acc = expansion_sum(acc, product_term(q.x, r.y, false));
  acc = expansion_sum(acc, product_term(q.y, r.x, true));
  return acc;
}

inline Expansion lift_exact(const Vec2& p) {
  return expansion_sum(product_term(p.x, p.x, false), product_term(p.y, p.y, false));
}

inline Expansion multiply(const Expansion& a, const Expansion& b) {
  Expansion acc{0.0};
  for (double bi : b) acc = expansion_sum(acc, scale_expansion(a, bi));
  return acc;
}

inline Expansion negate(Expansion e) {
  for (double& v : e) v = -v;
  return e;
}

constexpr double kEps = 1.1102230246251565e-16;  // 2^-53
constexpr double kCcwBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIccBound = (10.0 + 96.0 * kEps) * kEps;

}  // namespace detail

/// Positive when p, q, r turn counterclockwise, negative when clockwise,
/// exactly zero when collinear. Only the sign is meaningful.
inline double orient2d(const Vec2& p, const Vec2& q, const Vec2& r) {
  const double detleft = (p.x - r.x) * (q.y - r.y);
  const double detright = (p.y - r.y) * (q.x - r.x);
  const double det = detleft - detright;
  double detsum;
  if (detleft > 0.0) {
    if (detright <= 0.0) return det;
    detsum = detleft + detright;
  } else if (detleft < 0.0) {
    if (detright >= 0.0) return det;
    detsum = -detleft - detright;
  } else {
    return det;
  }
  if (std::abs(det) >= detail::kCcwBound * detsum) return det;
  return detail::estimate(detail::orient_exact(p, q, r));
}

/// Positive when d lies strictly inside the circle through counterclockwise
/// a, b, c; zero when cocircular.
inline double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double alift = adx * adx + ady * ady;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double blift = bdx * bdx + bdy * bdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double clift = cdx * cdx + cdy * cdy;

  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                           (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                           (std::abs(adxbdy) + std::abs(bdxady)) * clift;
  if (std::abs(det) > detail::kIccBound * permanent) return det;

  using namespace detail;
  // Lifted 4x4 determinant expanded along the lift column.
  Expansion acc = multiply(lift_exact(a), orient_exact(b, c, d));
  acc = expansion_sum(acc, negate(multiply(lift_exact(b), orient_exact(a, c, d))));
  acc = expansion_sum(acc, multiply(lift_exact(c), orient_exact(a, b, d)));
  acc = expansion_sum(acc, negate(multiply(lift_exact(d), orient_exact(a, b, c))));
  return estimate(acc);
}

inline int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace topoae::geom
