#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "topoae/core/errors.hpp"
#include "topoae/ph/diagram.hpp"

namespace topoae {

enum class MatchingMethod { Auction, Exact };

struct WassersteinOptions {
  double q = 2.0;                 // outer exponent
  double p = 2.0;                 // ground norm, infinity allowed
  double relative_tol = 0.01;     // on the matching cost sum c^q
  MatchingMethod method = MatchingMethod::Auction;
};

/// One matched couple. Indices refer to the diagrams' pairs(); -1 stands for
/// the diagonal projection of the other point.
struct MatchedPoints {
  int a = -1;
  int b = -1;
  double cost = 0.0;  // c_p^q
};

struct Matching {
  std::vector<MatchedPoints> couples;
  double cost = 0.0;  // sum of c_p^q
};

struct WassersteinResult {
  double distance = 0.0;
  Matching matching;
  double lower_bound = 0.0;  // certified lower bound on the optimal cost
  int phases = 0;
};

inline double ground_distance(const DiagramPoint& x, const DiagramPoint& y, double p) {
  const double dx = std::abs(x.birth - y.birth), dy = std::abs(x.death - y.death);
  if (std::isinf(p)) return std::max(dx, dy);
  if (p == 2.0) return std::hypot(dx, dy);
  if (p == 1.0) return dx + dy;
  return std::pow(std::pow(dx, p) + std::pow(dy, p), 1.0 / p);
}

inline DiagramPoint diagonal_projection(const DiagramPoint& x) {
  const double m = 0.5 * (x.birth + x.death);
  return {m, m};
}

namespace detail {

// Square assignment problem between augmented diagrams. Rows: points of the
// first diagram, then diagonal copies of the second. Columns: points of the
// second, then diagonal copies of the first. A point may only go to another
// point or to its own projection; diagonal copies match each other for free.
class AugmentedCost {
 public:
  AugmentedCost(std::vector<DiagramPoint> a, std::vector<DiagramPoint> b, double p, double q)
      : a_(std::move(a)), b_(std::move(b)), p_(p), q_(q) {
    diag_a_.reserve(a_.size());
    diag_b_.reserve(b_.size());
    for (const auto& x : a_) diag_a_.push_back(power(ground_distance(x, diagonal_projection(x), p_)));
    for (const auto& y : b_) diag_b_.push_back(power(ground_distance(y, diagonal_projection(y), p_)));
  }

  std::size_t na() const { return a_.size(); }
  std::size_t nb() const { return b_.size(); }
  std::size_t size() const { return a_.size() + b_.size(); }

  bool allowed(std::size_t r, std::size_t c) const {
    const bool real_r = r < na(), real_c = c < nb();
    if (real_r && !real_c) return c - nb() == r;
    if (!real_r && real_c) return r - na() == c;
    return true;
  }

  double operator()(std::size_t r, std::size_t c) const {
    const bool real_r = r < na(), real_c = c < nb();
    if (real_r && real_c) return power(ground_distance(a_[r], b_[c], p_));
    if (real_r) return diag_a_[r];
    if (real_c) return diag_b_[c];
    return 0.0;
  }

  double max_cost() const {
    double m = 0.0;
    for (double v : diag_a_) m = std::max(m, v);
    for (double v : diag_b_) m = std::max(m, v);
    for (const auto& x : a_)
      for (const auto& y : b_) m = std::max(m, power(ground_distance(x, y, p_)));
    return m;
  }

 private:
  double power(double d) const { return q_ == 1.0 ? d : q_ == 2.0 ? d * d : std::pow(d, q_); }

  std::vector<DiagramPoint> a_, b_;
  std::vector<double> diag_a_, diag_b_;
  double p_, q_;
};

struct Assignment {
  std::vector<std::size_t> col_of_row;
  double cost = 0.0;
  double lower_bound = 0.0;
  int phases = 0;
};

// Shortest augmenting path Hungarian method, O(N^3).
inline Assignment hungarian(const AugmentedCost& cost) {
  const std::size_t n = cost.size();
  Assignment out;
  out.col_of_row.assign(n, 0);
  if (n == 0) return out;
  // Forbidden couples get a cost above any feasible total.
  double big = 1.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (cost.allowed(r, c)) big += cost(r, c);
  auto a = [&](std::size_t r, std::size_t c) { return cost.allowed(r, c) ? cost(r, c) : 4.0 * big; };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);  // 1-based, match[col] = row
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (std::size_t j = 1; j <= n; ++j) out.col_of_row[match[j] - 1] = j - 1;
  for (std::size_t r = 0; r < n; ++r) out.cost += cost(r, out.col_of_row[r]);
  out.lower_bound = out.cost;
  return out;
}

// Forward auction with epsilon scaling. Stops once the duality gap is within
// the relative tolerance.
inline Assignment auction(const AugmentedCost& cost, double relative_tol) {
  const std::size_t n = cost.size(), na = cost.na(), nb = cost.nb();
  Assignment out;
  out.col_of_row.assign(n, 0);
  if (n == 0) return out;
  const double cmax = cost.max_cost();
  if (cmax == 0.0) {
    // Every point sits on the diagonal; pair each with its projection.
    for (std::size_t r = 0; r < na; ++r) out.col_of_row[r] = nb + r;
    for (std::size_t j = 0; j < nb; ++j) out.col_of_row[na + j] = j;
    return out;
  }
  const double inf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<double> price(n, 0.0);
  std::vector<std::size_t> owner(n, kNone), col_of(n, kNone);

  // Best and second-best reduced cost of row r with the current prices.
  auto scan = [&](std::size_t r, std::size_t& best_col, double& best, double& second) {
    best = inf;
    second = inf;
    best_col = kNone;
    auto offer = [&](std::size_t c) {
      const double v = cost(r, c) + price[c];
      if (v < best) {
        second = best;
        best = v;
        best_col = c;
      } else if (v < second) {
        second = v;
      }
    };
    if (r < na) {
      for (std::size_t c = 0; c < nb; ++c) offer(c);
      offer(nb + r);
    } else {
      offer(r - na);
      for (std::size_t c = nb; c < n; ++c) offer(c);
    }
  };

  double eps = cmax / 4.0;
  const double eps_floor = cmax * 1e-15;
  for (;;) {
    ++out.phases;
    std::fill(owner.begin(), owner.end(), kNone);
    std::fill(col_of.begin(), col_of.end(), kNone);
    std::deque<std::size_t> queue;
    for (std::size_t r = 0; r < n; ++r) queue.push_back(r);
    while (!queue.empty()) {
      const std::size_t r = queue.front();
      queue.pop_front();
      std::size_t c;
      double best, second;
      scan(r, c, best, second);
      const double raise = (std::isinf(second) ? 0.0 : second - best) + eps;
      price[c] += raise;
      if (owner[c] != kNone) {
        col_of[owner[c]] = kNone;
        queue.push_back(owner[c]);
      }
      owner[c] = r;
      col_of[r] = c;
    }
    double primal = 0.0, dual = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      primal += cost(r, col_of[r]);
      std::size_t c;
      double best, second;
      scan(r, c, best, second);
      dual += best;
    }
    for (double pr : price) dual -= pr;
    out.cost = primal;
    out.lower_bound = std::max(0.0, std::min(dual, primal));
    out.col_of_row = col_of;
    if (primal - out.lower_bound <= relative_tol * primal || eps <= eps_floor) break;
    eps /= 5.0;
  }
  return out;
}

inline std::vector<DiagramPoint> finite_points(const PersistenceDiagram& d, std::vector<int>& index) {
  std::vector<DiagramPoint> pts;
  index.clear();
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i].essential() || std::isinf(d[i].death)) continue;
    pts.push_back({d[i].birth, d[i].death});
    index.push_back(static_cast<int>(i));
  }
  return pts;
}

inline std::size_t infinite_count(const PersistenceDiagram& d) {
  return std::count_if(d.pairs().begin(), d.pairs().end(),
                       [](const PersistencePair& p) { return p.essential() || std::isinf(p.death); });
}

}  // namespace detail

/// L_q Wasserstein distance between diagrams with ground norm p. Essential
/// points are dropped when both diagrams hold equally many, otherwise the
/// distance is infinite.
inline WassersteinResult wasserstein(const PersistenceDiagram& d1, const PersistenceDiagram& d2,
                                     const WassersteinOptions& opt = {}) {
  if (d1.dim() != d2.dim()) throw ValidationError("wasserstein: diagrams of different dimensions");
  if (!(opt.q >= 1.0) || std::isinf(opt.q)) throw ValidationError("wasserstein: q must be finite and >= 1");
  if (!(opt.p >= 1.0)) throw ValidationError("wasserstein: p must be >= 1");
  if (!(opt.relative_tol >= 0.0)) throw ValidationError("wasserstein: negative tolerance");
  WassersteinResult res;
  if (detail::infinite_count(d1) != detail::infinite_count(d2)) {
    res.distance = kInfinity;
    res.matching.cost = kInfinity;
    res.lower_bound = kInfinity;
    return res;
  }
  std::vector<int> ia, ib;
  auto pa = detail::finite_points(d1, ia);
  auto pb = detail::finite_points(d2, ib);
  const detail::AugmentedCost cost(std::move(pa), std::move(pb), opt.p, opt.q);
  const auto as = opt.method == MatchingMethod::Exact ? detail::hungarian(cost) : detail::auction(cost, opt.relative_tol);
  const std::size_t na = cost.na(), nb = cost.nb();
  double total = 0.0;
  for (std::size_t r = 0; r < cost.size(); ++r) {
    const std::size_t c = as.col_of_row[r];
    if (r >= na && c >= nb) continue;  // diagonal to diagonal
    MatchedPoints m;
    m.a = r < na ? ia[r] : -1;
    m.b = c < nb ? ib[c] : -1;
    m.cost = cost(r, c);
    total += m.cost;
    res.matching.couples.push_back(m);
  }
  res.matching.cost = total;
  res.lower_bound = as.lower_bound;
  res.phases = as.phases;
  res.distance = opt.q == 1.0 ? total : opt.q == 2.0 ? std::sqrt(total) : std::pow(total, 1.0 / opt.q);
  return res;
}

inline double wasserstein_distance(const PersistenceDiagram& d1, const PersistenceDiagram& d2,
                                   const WassersteinOptions& opt = {}) {
  return wasserstein(d1, d2, opt).distance;
}

}  // namespace topoae
