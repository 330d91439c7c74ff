#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "schottky/unipotent.hpp"

using namespace schottky;

namespace {

IVec vec3(long a, long b, long c) {
  IVec v(3);
  v << a, b, c;
  return v;
}

ProjPoint pt(long a, long b, long c) { return ProjPoint(vec3(a, b, c)); }
ProjHyperplane hp(long a, long b, long c) { return ProjHyperplane(vec3(a, b, c)); }

Rank1Unipotent e12() { return from_pair(pt(1, 0, 0), hp(0, 1, 0)); }

bool rank_one_unipotent_matrix(const IMat& m) {
  const Eigen::Index n = m.rows();
  IMat nil = m - IMat::Identity(n, n);
  IMat sq = nil * nil;
  bool rank_le_1 = true;
  for (Eigen::Index i = 0; i < n && rank_le_1; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = i + 1; k < n; ++k)
        for (Eigen::Index l = j + 1; l < n; ++l)
          if (nil(i, j) * nil(k, l) - nil(i, l) * nil(k, j) != 0) rank_le_1 = false;
  bool nonzero = false;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (nil(i, j) != 0) nonzero = true;
      if (sq(i, j) != 0) return false;
    }
  return rank_le_1 && nonzero && det(m) == 1;
}

GroupElement random_element(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> idx(0, 2), coef(-3, 3);
  GroupElement g;
  g.mat = IMat::Identity(3, 3);
  for (int s = 0; s < 4; ++s) {
    int i = idx(rng), j = idx(rng);
    if (i == j) continue;
    g.mat = g.mat * elementary(3, i, j, Int(coef(rng)));
  }
  return g;
}

}  // namespace

TEST_CASE("from_pair worked instances") {
  Rank1Unipotent u = e12();
  CHECK(u.matrix() == elementary(3, 0, 1));
  CHECK(u.point() == pt(1, 0, 0));
  CHECK(u.hyperplane() == hp(0, 1, 0));

  Rank1Unipotent w = from_pair(pt(1, 1, 0), hp(1, -1, 0));
  IMat expected(3, 3);
  expected << 2, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK(w.matrix() == expected);
  CHECK(rank_one_unipotent_matrix(w.matrix()));

  CHECK_THROWS_AS(from_pair(pt(1, 0, 0), hp(1, 0, 0)), PointNotOnHyperplane);
}

TEST_CASE("powers") {
  Rank1Unipotent u = e12();
  CHECK(power(u, 3)->matrix() == elementary(3, 0, 1, 3));
  CHECK(!power(u, 0).has_value());
  Rank1Unipotent w = from_pair(pt(1, 0, 0), hp(0, 0, 1));
  CHECK(power(*power(w, 2), -1)->matrix() == elementary(3, 0, 2, -2));
  CHECK(power(*power(u, 6), 7)->matrix() == power(u, 42)->matrix());
  CHECK(power(u, 5)->point() == u.point());
  CHECK(power(u, 5)->hyperplane() == u.hyperplane());
}

TEST_CASE("conjugation worked instances") {
  Rank1Unipotent u = e12();
  GroupElement id;
  id.mat = IMat::Identity(3, 3);
  CHECK(conjugate(u, id).matrix() == u.matrix());

  GroupElement cyc;
  cyc.mat = IMat(3, 3);
  cyc.mat << 0, 0, 1, 1, 0, 0, 0, 1, 0;
  CHECK(conjugate(u, cyc).point() == pt(0, 1, 0));

  GroupElement e31;
  e31.mat = elementary(3, 2, 0);
  Rank1Unipotent c = conjugate(u, e31);
  CHECK(c.hyperplane() == u.hyperplane());
  CHECK(c.point() == pt(1, 0, 1));
}

TEST_CASE("conjugation equivariance and structure on random data") {
  std::mt19937_64 rng(21);
  Rank1Unipotent u = from_pair(pt(1, 2, 0), hp(2, -1, 1));
  for (int trial = 0; trial < 300; ++trial) {
    GroupElement g = random_element(rng);
    Rank1Unipotent c = conjugate(u, g);
    CHECK(c.point() == g.apply(u.point()));
    CHECK(c.hyperplane() == g.apply(u.hyperplane()));
    CHECK(c.matrix() == g.mat * u.matrix() * inverse_unimodular(g.mat));
    CHECK(rank_one_unipotent_matrix(c.matrix()));
  }
}

TEST_CASE("contraction power worked values") {
  CHECK(contraction_power(e12(), rat(1, 100), rat(1, 4)) == 22);
  CHECK(contraction_power(e12(), Rat(1), Rat(1)) == 2);
  CHECK_THROWS_AS(contraction_power(e12(), rat(1, 4), rat(1, 16)), InvalidRadii);
}

TEST_CASE("contraction certificate worked values") {
  CHECK(certify_contraction(*power(e12(), 22), rat(1, 100), rat(1, 4)));
  CHECK(!certify_contraction(e12(), rat(1, 100), rat(1, 4)));
  CHECK(certify_contraction(*power(e12(), 22), Rat(1), Rat(1)));
}

TEST_CASE("contraction power is minimal") {
  std::mt19937_64 rng(22);
  Rank1Unipotent u = from_pair(pt(1, 1, 2), hp(1, 1, -1));
  for (const auto& [e2, d2] : {std::pair{rat(1, 100), rat(1, 4)},
                               std::pair{rat(1, 50), rat(1, 9)},
                               std::pair{rat(1, 7), rat(1, 7)}}) {
    Int m = contraction_power(u, e2, d2);
    CHECK(certify_contraction(*power(u, m), e2, d2));
    if (m > 1) CHECK(!certify_contraction(*power(u, m - 1), e2, d2));
  }
}

TEST_CASE("contraction dynamics sampling oracle") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<long> d(-20, 20);
  Rat eps2 = rat(1, 100), del2 = rat(1, 4);
  Rank1Unipotent v = *power(e12(), contraction_power(e12(), eps2, del2));
  int checked = 0;
  while (checked < 1000) {
    IVec x = vec3(d(rng), d(rng), d(rng));
    if (is_zero(x)) continue;
    ProjPoint px(x);
    if (dist2_point_hyperplane(px, v.hyperplane()) < del2) continue;
    for (long k : {1L, -1L, 2L, -2L, 5L, -5L, 50L, -50L}) {
      ProjPoint img(v.apply_power(Int(k), px.coords));
      CHECK(dist2_points(img, v.point()) < eps2);
    }
    ++checked;
  }
}

TEST_CASE("apply_power matches matrix action") {
  std::mt19937_64 rng(24);
  std::uniform_int_distribution<long> d(-9, 9);
  Rank1Unipotent u = from_pair(pt(2, 1, 3), hp(0, 3, -1));
  for (int trial = 0; trial < 100; ++trial) {
    IVec x = vec3(d(rng), d(rng), d(rng));
    if (is_zero(x)) continue;
    CHECK(u.apply_power(4, x) == power(u, 4)->matrix() * x);
  }
}
