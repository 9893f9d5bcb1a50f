// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "wlt/fractional.hpp"
#include "wlt/refinement.hpp"

namespace {

using namespace wlt;

Graph random_graph(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) e.emplace_back(u, v);
  return Graph::from_edges(n, e);
}

RationalMatrix filled(int n, const Rational& value) {
  RationalMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = value;
  return m;
}

RationalMatrix swap2() {
  RationalMatrix m(2, 2);
  m(0, 1) = 1;
  m(1, 0) = 1;
  return m;
}

TEST(Fraction, StringRoundTrip) {
  EXPECT_EQ(to_fraction_string(Rational(1, 6)), "1/6");
  EXPECT_EQ(to_fraction_string(Rational(0)), "0/1");
  EXPECT_EQ(to_fraction_string(Rational(-2)), "-2/1");
  EXPECT_EQ(parse_fraction("2/4"), Rational(1, 2));
  EXPECT_EQ(parse_fraction("3"), Rational(3));
  EXPECT_THROW(parse_fraction("x"), std::invalid_argument);
}

TEST(RationalMatrixTest, Predicates) {
  EXPECT_TRUE(RationalMatrix::identity(3).is_permutation_matrix());
  EXPECT_TRUE(filled(3, Rational(1, 3)).is_doubly_stochastic());
  EXPECT_FALSE(filled(3, Rational(1, 3)).is_permutation_matrix());
  EXPECT_FALSE(filled(3, Rational(1, 2)).is_doubly_stochastic());
  RationalMatrix neg = RationalMatrix::identity(2);
  neg(0, 0) = 2;
  neg(0, 1) = -1;
  neg(1, 0) = -1;
  neg(1, 1) = 2;
  EXPECT_FALSE(neg.is_doubly_stochastic());
}

TEST(Simplex, FeasibleAndInfeasible) {
  RationalMatrix a(2, 2);
  a(0, 0) = 1;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = -1;
  EXPECT_FALSE(FeasibleTableau::phase_one(a, {Rational(1), Rational(3)}).has_value());
  auto t = FeasibleTableau::phase_one(a, {Rational(3), Rational(1)});
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(t->solution(), (std::vector<Rational>{2, 1}));
}

TEST(Simplex, DropsRedundantRows) {
  RationalMatrix a(3, 2);
  for (int r = 0; r < 3; ++r) {
    a(r, 0) = r + 1;
    a(r, 1) = r + 1;
  }
  auto t = FeasibleTableau::phase_one(a, {Rational(1), Rational(2), Rational(3)});
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(t->rows(), 1);
  auto x = t->solution();
  EXPECT_EQ(x[0] + x[1], 1);
}

TEST(FractionalIso, CycleVersusTwoTriangles) {
  Graph g = graphs::cycle(6);
  Graph h = graphs::two_cycles(3, 3);
  auto r = lp_feasible_fractional_iso(g, h);
  ASSERT_TRUE(r.feasible);
  EXPECT_TRUE(satisfies_fractional_system(g, h, *r.witness));
  EXPECT_TRUE(satisfies_fractional_system(g, h, filled(6, Rational(1, 6))));
}

TEST(FractionalIso, TriangleVersusPathInfeasible) {
  auto r = lp_feasible_fractional_iso(graphs::complete(3), graphs::path(3));
  EXPECT_FALSE(r.feasible);
  EXPECT_FALSE(r.witness.has_value());
}

TEST(FractionalIso, SelfWithIdentity) {
  Graph g = graphs::star(3);
  EXPECT_TRUE(lp_feasible_fractional_iso(g, g).feasible);
  EXPECT_TRUE(satisfies_fractional_system(g, g, RationalMatrix::identity(4)));
}

TEST(FractionalIso, SizeMismatchIsInfeasible) {
  EXPECT_FALSE(lp_feasible_fractional_iso(graphs::path(2), graphs::path(3)).feasible);
}

TEST(FractionalIso, LimitEnforced) {
  EXPECT_THROW(lp_feasible_fractional_iso(graphs::cycle(6), graphs::cycle(6), 5), TooLarge);
  try {
    lp_feasible_fractional_iso(graphs::cycle(6), graphs::cycle(6), 5);
  } catch (const TooLarge& e) {
    EXPECT_EQ(e.n(), 6);
    EXPECT_EQ(e.limit(), 5);
  }
}

TEST(FractionalIso, PermutationMatrixOfIsomorphismSatisfiesSystem) {
  Graph g = graphs::path(4);
  Permutation p({3, 1, 0, 2});
  Graph h = apply_permutation(g, p);
  EXPECT_TRUE(satisfies_fractional_system(g, h, permutation_matrix(p)));
}

TEST(FractionalIso, AgreesWithWlOnRandomPairs) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 1 + trial % 5;
    Graph g = random_graph(n, 0.5, rng);
    Graph h = random_graph(n, 0.5, rng);
    auto r = lp_feasible_fractional_iso(g, h);
    EXPECT_EQ(r.feasible, wl_pair_test(g, h).outcome == WlOutcome::PossiblyIsomorphic);
    if (r.feasible) {
      EXPECT_TRUE(satisfies_fractional_system(g, h, *r.witness));
    }
  }
}

TEST(Automorphisms, Counts) {
  EXPECT_EQ(automorphisms(graphs::complete(3)).size(), 6u);
  EXPECT_EQ(automorphisms(graphs::path(3)).size(), 2u);
  EXPECT_EQ(automorphisms(graphs::cycle(4)).size(), 8u);
  EXPECT_EQ(automorphisms(graphs::star(3)).size(), 6u);
  EXPECT_EQ(automorphisms(graphs::two_cycles(3, 4)).size(), 48u);
}

TEST(Automorphisms, EachFixesGraphAndIdentityFirst) {
  Graph g = graphs::triangular_prism();
  auto autos = automorphisms(g);
  ASSERT_FALSE(autos.empty());
  EXPECT_EQ(autos.front(), Permutation::identity(6));
  for (const auto& p : autos) EXPECT_EQ(apply_permutation(g, p), g);
  EXPECT_EQ(autos.size(), 12u);
}

TEST(Automorphisms, LimitEnforced) { EXPECT_THROW(automorphisms(graphs::cycle(9)), TooLarge); }

TEST(BruteForce, Examples) {
  EXPECT_FALSE(brute_force_isomorphic(graphs::complete_bipartite(3, 3), graphs::triangular_prism()).has_value());
  EXPECT_FALSE(brute_force_isomorphic(graphs::complete(3), graphs::path(3)).has_value());
  Graph c6 = graphs::cycle(6);
  Graph rotated = apply_permutation(c6, Permutation({1, 2, 3, 4, 5, 0}));
  auto p = brute_force_isomorphic(c6, rotated);
  ASSERT_TRUE(p.has_value());
  EXPECT_TRUE(is_isomorphism(c6, rotated, *p));
}

TEST(BruteForce, SymmetricOnRandomPairs) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    Graph g = random_graph(n, 0.5, rng);
    Graph h = random_graph(n, 0.5, rng);
    auto a = brute_force_isomorphic(g, h);
    auto b = brute_force_isomorphic(h, g);
    EXPECT_EQ(a.has_value(), b.has_value());
    if (a) {
      EXPECT_TRUE(is_isomorphism(g, h, *a));
    }
  }
}

TEST(Vertices, SingleNode) {
  auto v = polytope_vertices_SA(graphs::empty(1));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], RationalMatrix::identity(1));
}

TEST(Vertices, EdgeAndEmptyPairGiveIdentityAndSwap) {
  auto expected = std::vector<RationalMatrix>{swap2(), RationalMatrix::identity(2)};
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(polytope_vertices_SA(graphs::complete(2)), expected);
  EXPECT_EQ(polytope_vertices_SA(graphs::empty(2)), expected);
}

TEST(Vertices, SatisfySystemAndAreNotMidpoints) {
  for (const Graph& g : {graphs::path(3), graphs::cycle(4), graphs::star(3), graphs::path(4),
                         build_graph(4, {{0, 1}, {2, 3}}), build_graph(5, {{0, 1}, {1, 2}, {3, 4}})}) {
    auto vs = polytope_vertices_SA(g);
    ASSERT_FALSE(vs.empty());
    for (const auto& x : vs) {
      EXPECT_TRUE(satisfies_fractional_system(g, g, x));
      EXPECT_TRUE(is_vertex_of_SA(g, x));
    }
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j)
        for (std::size_t k = 0; k < vs.size(); ++k) {
          if (k == i || k == j) continue;
          RationalMatrix mid(g.size(), g.size());
          for (int r = 0; r < g.size(); ++r)
            for (int c = 0; c < g.size(); ++c) mid(r, c) = (vs[i](r, c) + vs[j](r, c)) / 2;
          EXPECT_NE(mid, vs[k]);
        }
  }
}

TEST(Vertices, CompactGraphsHaveExactlyTheAutomorphismsAsVertices) {
  for (const Graph& g : {graphs::complete(3), graphs::cycle(4), graphs::path(4), graphs::star(3)}) {
    std::vector<RationalMatrix> expected;
    for (const auto& p : automorphisms(g)) expected.push_back(permutation_matrix(p));
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(polytope_vertices_SA(g), expected);
  }
}

TEST(Vertices, LimitEnforced) { EXPECT_THROW(polytope_vertices_SA(graphs::cycle(6)), TooLarge); }

TEST(VertexCheck, RejectsInteriorPoint) {
  Graph g = graphs::complete(3);
  EXPECT_FALSE(is_vertex_of_SA(g, filled(3, Rational(1, 3))));
  EXPECT_TRUE(is_vertex_of_SA(g, RationalMatrix::identity(3)));
}

TEST(Compactness, Examples) {
  for (const Graph& g : {graphs::complete(3), graphs::cycle(4), graphs::complete(2), graphs::path(4)}) {
    auto r = is_compact(g);
    EXPECT_EQ(r.status, Compactness::Compact);
    EXPECT_FALSE(r.witness.has_value());
  }
  EXPECT_EQ(is_compact(graphs::cycle(4)).automorphism_count, 8u);
}

TEST(Compactness, TwoCyclesOfDifferentLengthIsNotCompact) {
  Graph g = graphs::two_cycles(3, 4);
  auto r = is_compact(g, 7);
  ASSERT_EQ(r.status, Compactness::NotCompact);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_TRUE(satisfies_fractional_system(g, g, *r.witness));
  EXPECT_FALSE(r.witness->is_permutation_matrix());
  EXPECT_TRUE(is_vertex_of_SA(g, *r.witness));
  EXPECT_EQ(r.automorphism_count, 48u);
}

TEST(Compactness, TooLargeAboveLimit) {
  auto r = is_compact(graphs::two_cycles(3, 4));
  EXPECT_EQ(r.status, Compactness::TooLarge);
  EXPECT_FALSE(r.witness.has_value());
}

TEST(Compactness, EmptyGraphOnTwoNodes) {
  EXPECT_EQ(is_compact(graphs::empty(2)).status, Compactness::Compact);
}

}  // namespace
