#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "schottky/congruence.hpp"

using namespace schottky;

namespace {

GroupElement elem(int i, int j, long c = 1) {
  GroupElement g;
  g.mat = elementary(3, i, j, Int(c));
  return g;
}

std::vector<GroupElement> all_elementary() {
  std::vector<GroupElement> gens;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) gens.push_back(elem(i, j));
  return gens;
}

GroupElement random_element(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> idx(0, 2), coef(-4, 4);
  GroupElement g;
  g.mat = IMat::Identity(3, 3);
  for (int s = 0; s < 5; ++s) {
    int i = idx(rng), j = idx(rng);
    if (i == j) continue;
    g.mat = g.mat * elementary(3, i, j, Int(coef(rng)));
  }
  return g;
}

}  // namespace

TEST_CASE("reduction worked values") {
  GroupElement g = elem(0, 1, 2);
  ModMatrix m = reduce_mod(g, 4);
  CHECK(m.e(0, 1) == 2);
  CHECK(m.e(0, 0) == 1);
  CHECK(reduce_mod(elem(0, 1, 3), 3).is_identity());
  GroupElement id;
  id.mat = IMat::Identity(3, 3);
  CHECK(reduce_mod(id, 7).is_identity());
  CHECK_THROWS_AS(reduce_mod(id, 1), BadModulus);
}

TEST_CASE("reduction is a homomorphism") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    GroupElement a = random_element(rng), b = random_element(rng);
    CHECK(reduce_mod(a * b, 5) == reduce_mod(a, 5) * reduce_mod(b, 5));
    CHECK(reduce_mod(a * b, 4) == reduce_mod(a, 4) * reduce_mod(b, 4));
  }
}

TEST_CASE("closure orders of the elementary generators") {
  CHECK(closure_order(elementary_gens_mod(3, 3)) == 5616);
  CHECK(closure_order(elementary_gens_mod(3, 4)) == 43008);
  CHECK(closure_order({mod_identity(3, 5)}) == 1);
  CHECK(closure_order({reduce_mod(elem(0, 1), 3)}) == 3);
}

TEST_CASE("order formula cross-checks") {
  for (long p : {2L, 3L, 5L, 7L})
    CHECK(Int(sl_order(3, p)) == sl_order_prime(3, p));
  CHECK(sl_order(3, 4) == 43008);           // |SL(3,2)| * 2^8
  CHECK(sl_order_prime(3, 2) == 168);
  // |SL(3,Z/9)| = 5616 * 3^8 exceeds the default BFS cap; the cap is an error,
  // never a wrong answer.
  CHECK_THROWS_AS(sl_order(3, 9, 1000000), CapExceeded);
}

TEST_CASE("surjectivity") {
  CHECK(is_surjective(all_elementary(), 3));
  CHECK(is_surjective(all_elementary(), 4));
  CHECK(!is_surjective({elem(0, 1)}, 3));
}

TEST_CASE("surjectivity is compatible with divisors") {
  // Surjective mod 4 implies surjective mod 2 for the same generators.
  std::vector<GroupElement> gens = all_elementary();
  REQUIRE(is_surjective(gens, 4));
  CHECK(is_surjective(gens, 2));
}

TEST_CASE("group exponents") {
  CHECK(exponent_of(3, 2) == 84);
  CHECK(exponent_of(3, 3) == 312);   // frozen regression value
  CHECK(exponent_of(3, 4) == 168);   // frozen regression value
  // The exponent divides the group order and kills sampled elements.
  Int t = exponent_of(3, 3);
  CHECK(Int(sl_order(3, 3)) % t == 0);
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    ModMatrix m = reduce_mod(random_element(rng), 3);
    ModMatrix acc = mod_identity(3, 3);
    for (Int i = 0; i < t; ++i) acc = acc * m;
    CHECK(acc.is_identity());
  }
}

TEST_CASE("kernel membership") {
  CHECK(in_kernel(elem(0, 1, 3), 3));
  CHECK(!in_kernel(elem(0, 1), 3));
  GroupElement g = elem(1, 2, 6);
  REQUIRE(in_kernel(g, 3));
  CHECK(reduce_mod(g, 3).is_identity());
}

TEST_CASE("density witness") {
  DensityWitness w = density_witness(all_elementary(), {3, 4, 5});
  CHECK(w.surjective == std::vector<bool>{true, true, true});
  CHECK(w.valid());

  DensityWitness bad = density_witness({elem(0, 1)}, {3, 4});
  CHECK(!bad.surjective[0]);
  CHECK(!bad.valid());

  // Missing modulus 4 or an odd prime invalidates the witness even when all
  // checked quotients are covered.
  DensityWitness no4 = density_witness(all_elementary(), {3});
  CHECK(!no4.valid());

  CHECK_THROWS_AS(density_witness(all_elementary(), {}), PreconditionViolated);
}
