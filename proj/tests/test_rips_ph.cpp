#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "support.hpp"
#include "topoae/core/graphs.hpp"
#include "topoae/ph/rips.hpp"

using namespace topoae;
using testsupport::brute_rips_dim1;
using testsupport::BrutePair;

namespace {

std::vector<BrutePair> as_brute(const std::vector<PersistencePair>& pairs) {
  std::vector<BrutePair> out;
  for (const auto& p : pairs) out.push_back({p.birth_simplex, p.death_simplex, p.birth, p.death});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BrutePair> finite_dim1(const RipsDiagrams& d) {
  std::vector<PersistencePair> fin;
  for (const auto& p : d.dgm1.pairs())
    if (!p.essential()) fin.push_back(p);
  return as_brute(fin);
}

PointCloud mixed_cloud(std::size_t i) {
  const std::size_t n = 6 + i % 17;
  switch (i % 5) {
    case 0: return testsupport::uniform_cloud(n, 2, 100 + i);
    case 1: return testsupport::uniform_cloud(n, 3 + i % 4, 100 + i);
    case 2: return testsupport::clustered_cloud(n, 100 + i);
    case 3: return testsupport::noisy_circle(n, 0.1, 100 + i);
    default: return testsupport::grid_cloud(n, 100 + i);
  }
}

// Parity of every vertex degree in an edge set.
bool is_cycle(const EdgeSet& edges, std::size_t n) {
  std::vector<int> deg(n, 0);
  for (const Edge& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return std::all_of(deg.begin(), deg.end(), [](int d) { return d % 2 == 0; });
}

Edge youngest(const EdgeSet& edges) {
  Edge best = *edges.begin();
  for (const Edge& e : edges)
    if (key_less(best, e)) best = e;
  return best;
}

}  // namespace

TEST(RipsFiltration, RanksFollowKeyOrder) {
  const auto c = testsupport::uniform_cloud(30, 4, 7);
  const RipsFiltration f(c);
  ASSERT_EQ(f.edge_count(), 30u * 29u / 2u);
  for (std::uint32_t r = 1; r < f.edge_count(); ++r) EXPECT_TRUE(key_less(f.edge(r - 1), f.edge(r)));
  for (std::uint32_t r = 0; r < f.edge_count(); ++r) EXPECT_EQ(f.rank(f.edge(r).u, f.edge(r).v), r);
}

TEST(RipsFiltration, TriangleIdRoundTrip) {
  const auto c = testsupport::uniform_cloud(15, 2, 3);
  const RipsFiltration f(c);
  std::vector<std::uint64_t> ids;
  for (Index a = 0; a < 15; ++a)
    for (Index b = a + 1; b < 15; ++b)
      for (Index d = b + 1; d < 15; ++d) {
        const auto id = f.triangle_id(a, b, d);
        const auto v = f.vertices(id);
        EXPECT_EQ(v[0], a);
        EXPECT_EQ(v[1], b);
        EXPECT_EQ(v[2], d);
        ids.push_back(id);
      }
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(std::unique(ids.begin(), ids.end()), ids.end());
}

TEST(RipsFiltration, BoundaryOfBoundaryVanishes) {
  const auto c = testsupport::uniform_cloud(12, 3, 11);
  const RipsFiltration f(c);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::set<std::uint32_t> edges;
    for (int k = 0; k < 6; ++k) {
      Index v[3];
      for (Index& x : v) x = static_cast<Index>(rng() % 12);
      if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2]) continue;
      for (auto e : f.boundary(f.triangle_id(v[0], v[1], v[2])))
        if (!edges.erase(e)) edges.insert(e);
    }
    std::vector<int> parity(12, 0);
    for (auto e : edges) {
      parity[f.edge(e).u] ^= 1;
      parity[f.edge(e).v] ^= 1;
    }
    for (int p : parity) EXPECT_EQ(p, 0);
  }
}

TEST(RipsFiltration, ApparentCofacetIsLensMinimum) {
  for (std::size_t i = 0; i < 20; ++i) {
    const auto c = mixed_cloud(i);
    const RipsFiltration f(c);
    for (std::uint32_t r = 0; r < f.edge_count(); ++r) {
      const Edge e = f.edge(r);
      // lens vertex whose longer spoke is shortest
      std::int32_t expect = -1;
      Edge best{};
      for (Index x = 0; x < c.size(); ++x) {
        if (x == e.u || x == e.v) continue;
        const Edge s1 = make_edge(c, x, e.u), s2 = make_edge(c, x, e.v);
        if (!key_less(s1, e) || !key_less(s2, e)) continue;
        const Edge spoke = key_less(s1, s2) ? s2 : s1;
        if (expect < 0 || key_less(spoke, best)) {
          expect = static_cast<std::int32_t>(x);
          best = spoke;
        }
      }
      EXPECT_EQ(f.apparent_vertex(r), expect);
      const auto t = f.apparent_cofacet(r);
      EXPECT_EQ(t.has_value(), expect >= 0);
      if (t) {
        EXPECT_EQ(f.longest(*t), r);
      }
    }
  }
}

TEST(RipsPersistence, UnitSquare) {
  const auto d = rips_persistence(testsupport::square());
  ASSERT_EQ(d.dgm1.size(), 1u);
  EXPECT_DOUBLE_EQ(d.dgm1[0].birth, 1.0);
  EXPECT_NEAR(d.dgm1[0].death, std::sqrt(2.0), 1e-12);
  EXPECT_EQ(d.dgm1[0].birth_simplex, (std::vector<Index>{2, 3}));
  EXPECT_EQ(d.dgm1[0].death_simplex, (std::vector<Index>{0, 2, 3}));
  ASSERT_EQ(d.dgm0.size(), 4u);
  EXPECT_EQ(d.dgm0.essential_count(), 1u);
  for (const auto& p : d.dgm0.pairs()) {
    if (!p.essential()) {
      EXPECT_DOUBLE_EQ(p.death, 1.0);
    }
  }
}

TEST(RipsPersistence, RegularHexagon) {
  const auto d = rips_persistence(testsupport::hexagon());
  ASSERT_EQ(d.dgm1.size(), 1u);
  EXPECT_NEAR(d.dgm1[0].birth, 1.0, 1e-12);
  EXPECT_NEAR(d.dgm1[0].death, std::sqrt(3.0), 1e-12);
}

TEST(RipsPersistence, CounterExampleClouds) {
  const auto dx = rips_persistence(testsupport::counterexample_x());
  ASSERT_EQ(dx.dgm1.size(), 1u);
  EXPECT_NEAR(dx.dgm1[0].birth, 1.0, 1e-3);
  EXPECT_NEAR(dx.dgm1[0].death, 1.732, 1e-3);
  const auto dz = rips_persistence(testsupport::counterexample_z());
  ASSERT_EQ(dz.dgm1.size(), 1u);
  EXPECT_NEAR(dz.dgm1[0].birth, 1.0, 1e-3);
  EXPECT_NEAR(dz.dgm1[0].death, 1.819, 1e-3);
}

TEST(RipsPersistence, TinyInputs) {
  const PointCloud one(2, {0.5, 0.5});
  const auto d1 = rips_persistence(one);
  EXPECT_EQ(d1.dgm0.size(), 1u);
  EXPECT_TRUE(d1.dgm1.empty());
  EXPECT_TRUE(positive_pairs(one, 1).empty());
  EXPECT_TRUE(positive_pairs(one, 0).empty());
  const PointCloud two(2, {0, 0, 3, 4});
  const auto d2 = rips_persistence(two);
  ASSERT_EQ(d2.dgm0.size(), 2u);
  EXPECT_DOUBLE_EQ(d2.dgm0[0].death, 5.0);
  EXPECT_TRUE(d2.dgm1.empty());
}

TEST(RipsPersistence, MatchesBruteForceReduction) {
  for (std::size_t i = 0; i < 60; ++i) {
    const auto c = mixed_cloud(i);
    const auto expect = brute_rips_dim1(c);
    EXPECT_EQ(finite_dim1(rips_persistence(c)), expect) << "cloud " << i;
    RipsOptions h;
    h.reduction = ReductionKind::Homology;
    EXPECT_EQ(finite_dim1(rips_persistence(c, 1, h)), expect) << "cloud " << i;
  }
}

TEST(RipsPersistence, ZeroPersistencePairsOnRequest) {
  for (std::size_t i = 0; i < 15; ++i) {
    const auto c = mixed_cloud(i);
    RipsOptions o;
    o.include_zero_persistence = true;
    EXPECT_EQ(finite_dim1(rips_persistence(c, 1, o)), brute_rips_dim1(c, true)) << "cloud " << i;
  }
}

TEST(RipsPersistence, ReductionVariantsAgree) {
  for (std::size_t i = 0; i < 30; ++i) {
    const auto c = i % 2 ? testsupport::uniform_cloud(60, 2, i) : testsupport::grid_cloud(60, i);
    const RipsFiltration f(c);
    RipsOptions base;
    const auto ref = finite_dim1(rips_persistence(f, 1, base));
    for (auto kind : {ReductionKind::Cohomology, ReductionKind::Homology})
      for (bool apparent : {false, true}) {
        RipsOptions o;
        o.reduction = kind;
        o.apparent_pairs = apparent;
        EXPECT_EQ(finite_dim1(rips_persistence(f, 1, o)), ref);
      }
  }
}

TEST(RipsPersistence, Dgm0MatchesSingleLinkage) {
  for (std::size_t i = 0; i < 20; ++i) {
    const auto c = mixed_cloud(i);
    const auto d = rips_persistence(c);
    std::vector<double> deaths, mst;
    for (const auto& p : d.dgm0.pairs())
      if (!p.essential()) deaths.push_back(p.death);
    for (auto [a, b] : testsupport::prim_mst(c)) mst.push_back(c.distance(a, b));
    std::sort(deaths.begin(), deaths.end());
    std::sort(mst.begin(), mst.end());
    EXPECT_EQ(deaths, mst);
    const auto d0 = rips_persistence(c, 0);
    EXPECT_EQ(d0.dgm0.size(), d.dgm0.size());
    EXPECT_TRUE(d0.dgm1.empty());
  }
}

TEST(RipsPersistence, PermutationInvariant) {
  std::mt19937_64 rng(17);
  for (std::size_t i = 0; i < 20; ++i) {
    const auto c = i % 2 ? testsupport::uniform_cloud(40, 3, i) : testsupport::noisy_circle(40, 0.15, i);
    std::vector<Index> perm(c.size());
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> coords;
    for (Index p : perm)
      for (std::size_t k = 0; k < c.dim(); ++k) coords.push_back(c(p, k));
    const PointCloud q(c.dim(), coords);
    auto a = rips_persistence(c).dgm1.points();
    auto b = rips_persistence(q).dgm1.points();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_DOUBLE_EQ(a[k].birth, b[k].birth);
      EXPECT_DOUBLE_EQ(a[k].death, b[k].death);
    }
  }
}

TEST(RipsPersistence, PairsAnchorOnTheirSimplices) {
  for (std::size_t i = 0; i < 20; ++i) {
    const auto c = mixed_cloud(i);
    for (const auto& p : positive_pairs(c, 1)) {
      EXPECT_DOUBLE_EQ(p.birth, c.distance(p.birth_simplex[0], p.birth_simplex[1]));
      EXPECT_DOUBLE_EQ(p.death, p.death_edge.length);
      EXPECT_LT(p.birth, p.death + 1e-300);
      EXPECT_TRUE(p.key_positive());
    }
  }
}

TEST(RipsPersistence, MemoryGuard) {
  const auto c = testsupport::uniform_cloud(50, 2, 1);
  RipsOptions o;
  o.max_points = 49;
  EXPECT_THROW(rips_persistence(c, 1, o), ValidationError);
  EXPECT_THROW(positive_pairs(c, 1, 10), ValidationError);
  EXPECT_NO_THROW(rips_persistence(c, 0, o));
}

TEST(Cascades, UnitSquare) {
  const auto c = testsupport::square();
  const auto pairs = positive_pairs(c, 1);
  ASSERT_EQ(pairs.size(), 1u);
  const auto recs = cascades(c, pairs);
  ASSERT_EQ(recs.size(), 1u);
  // Propagation from {0,1,2} reaches {0,2,3}, whose youngest edge is the birth edge.
  EXPECT_EQ(recs[0].triangles.size(), 2u);
  EXPECT_EQ(recs[0].generator.size(), 4u);
  EXPECT_EQ(skeleton_gcs(c, 1).size(), 5u);
  EXPECT_EQ(critical_edges(c, 1).size(), 5u);
  EXPECT_EQ(critical_edges(c, 0).size(), 3u);
  EXPECT_EQ(skeleton_gcs(c, 0).size(), 3u);
}

TEST(Cascades, GeneratorsAreCyclesBornAtBirthEdge) {
  for (std::size_t i = 0; i < 40; ++i) {
    const auto c = mixed_cloud(i);
    const auto pairs = positive_pairs(c, 1);
    for (const auto& rec : cascades(c, pairs)) {
      ASSERT_FALSE(rec.generator.empty());
      EXPECT_TRUE(is_cycle(rec.generator, c.size()));
      EXPECT_EQ(youngest(rec.generator), rec.pair.birth_edge);
      EXPECT_TRUE(rec.generator.is_subset_of(rec.skeleton));
      // the death triangle is part of the cascade
      const std::array<Index, 3> t = {rec.pair.death_simplex[0], rec.pair.death_simplex[1], rec.pair.death_simplex[2]};
      EXPECT_NE(std::find(rec.triangles.begin(), rec.triangles.end(), t), rec.triangles.end());
    }
  }
}

TEST(Cascades, SkeletonContainsCriticalEdges) {
  for (std::size_t i = 0; i < 30; ++i) {
    const auto c = mixed_cloud(i);
    EXPECT_TRUE(critical_edges(c, 1).is_subset_of(skeleton_gcs(c, 1)));
    EXPECT_TRUE(critical_edges(c, 0).is_subset_of(critical_edges(c, 1)));
  }
}

TEST(Cascades, CounterExampleNeedsExtraEdge) {
  const auto c = testsupport::counterexample_z();
  const auto gcs = skeleton_gcs(c, 1);
  const auto crit = critical_edges(c, 1);
  bool found = false;
  for (const Edge& e : set_difference(gcs, crit))
    if (std::abs(e.length - 1.623) < 1e-3) found = true;
  EXPECT_TRUE(found);
}

TEST(Cascades, RejectsEssentialPairs) {
  const auto c = testsupport::square();
  PersistencePair p;
  p.dim = 1;
  EXPECT_THROW(cascades(c, {p}), ValidationError);
}

TEST(Cascades, NestedCyclesReuseEarlierCascades) {
  // Ring of ten points around a small skewed square; the ring's cascade
  // sweeps through the three cycles that die before it.
  const PointCloud c(2, {1.990, 0.200, 1.493, 1.331, 0.425, 1.954, -0.805, 1.831, -1.727, 1.008, -1.990, -0.200,
                         -1.493, -1.331, -0.425, -1.954, 0.805, -1.831, 1.727, -1.008, 0.334, 0.103, -0.103, 0.384,
                         -0.334, -0.003, 0.103, -0.184});
  const auto recs = cascades(c, positive_pairs(c, 1));
  ASSERT_EQ(recs.size(), 5u);
  const std::vector<std::size_t> sizes = {2, 3, 2, 3, 14};
  for (std::size_t i = 0; i < recs.size(); ++i) EXPECT_EQ(recs[i].triangles.size(), sizes[i]);
  const auto& outer = recs.back();
  EXPECT_EQ(outer.pair.birth_simplex, (std::vector<Index>{6, 7}));
  EXPECT_EQ(outer.pair.death_simplex, (std::vector<Index>{7, 12, 13}));
  EXPECT_NEAR(outer.pair.death, 1.9531, 1e-4);
  for (std::size_t i = 1; i < 4; ++i)
    for (const auto& t : recs[i].triangles)
      EXPECT_NE(std::find(outer.triangles.begin(), outer.triangles.end(), t), outer.triangles.end());
  for (const auto& t : recs[0].triangles)
    EXPECT_EQ(std::find(outer.triangles.begin(), outer.triangles.end(), t), outer.triangles.end());
}
