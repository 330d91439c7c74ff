#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "schottky/congruence.hpp"
#include "schottky/unipotent.hpp"

namespace schottky {

struct SchottkyGenerator {
  Rank1Unipotent u;
  Rat eps2;
  Rat del2;
};

// (S, A, R): generators with per-generator radii, attracting region A,
// repelling region R. A density witness travels with the system once the
// generators are known to surject onto the checked congruence quotients.
struct SchottkySystem {
  std::vector<SchottkyGenerator> generators;
  Region attracting;
  Region repelling;
  std::optional<DensityWitness> density;

  int dim() const { return generators.empty() ? 0 : generators[0].u.point().dim(); }
  std::vector<GroupElement> elements() const;
};

// (S, A, N, R): Schottky system plus an open neighborhood N of A.
struct SchottkyQuadruple {
  SchottkySystem base;
  Region open_nbhd;
};

// Reduced word over the generators: no zero exponents, adjacent indices
// distinct.
struct Word {
  std::vector<std::pair<int, Int>> letters;
};

struct Violation {
  int condition;  // 0 structural, 1 contraction, 2 separation, 3 A, 4 R
  int i = -1;
  int j = -1;
  std::string detail;
};

struct VerifyReport {
  std::vector<Violation> violations;
  bool pass() const { return violations.empty(); }
};

struct Z2PairCert {
  Rank1Unipotent u;
  GroupElement w;
  bool unipotence = false;
  bool commutation = false;
  bool independence = false;

  bool ok() const { return unipotence && commutation && independence; }
};

struct FullGroupCert {
  Z2PairCert pair;
  DensityWitness density;
  std::string conclusion_basis = "cited:commuting-unipotent-finite-index-criterion";
  std::string adjoined;  // description of the element adjoined to the system

  bool ok() const { return pair.ok() && density.valid(); }
};

VerifyReport verify_system(const SchottkySystem& sys);

GroupElement evaluate_word(const SchottkySystem& sys, const Word& w);

SchottkySystem add_generator(const SchottkySystem& sys, const ProjPoint& p,
                             const ProjHyperplane& L, const Rat& eps2, const Rat& del2);

// Certifies that w is unipotent, commutes with u, and that u - I and w - I
// are not rationally proportional; for such pairs <u,w> is isomorphic to Z^2.
Z2PairCert z2_pair_cert(const Rank1Unipotent& u, const GroupElement& w);

// Throwing step: adjoins powered unipotents at (p1,L1) and (p2,L2) with
// p1 = g p2, L1 != g L2, and certifies <S_+, g> = SL(n,Z) through the
// commuting pair (v2, g^{-1} v1 g) and the system's density witness.
std::pair<SchottkySystem, FullGroupCert> throw_lemma(const SchottkySystem& sys,
                                                     const GroupElement& g,
                                                     const ProjPoint& p1,
                                                     const ProjPoint& p2,
                                                     const ProjHyperplane& L1,
                                                     const ProjHyperplane& L2,
                                                     const Rat& eps2, const Rat& del2);

struct SearchBudget {
  int depth = 6;
  long samples = 20000;
  int shear_doublings = 60;
};

// g with dist(g p1, p2) < eps and dist(g L1, L2) < del, constrained to the
// principal congruence subgroup mod d when kernel_mod is set. Tries an exact
// transporter, then kernel shears aimed at the target pair, then a seeded
// bounded word search.
GroupElement conjugator_search(const std::pair<ProjPoint, ProjHyperplane>& src,
                               const std::pair<ProjPoint, ProjHyperplane>& dst,
                               const Rat& eps2, const Rat& del2,
                               std::optional<long> kernel_mod,
                               const SearchBudget& budget, std::uint64_t seed);

// Unimodular frame for an incident pair: first column spans p, the first
// n-1 columns span ker f, and f times the last column is 1.
IMat pair_frame(const ProjPoint& p, const ProjHyperplane& L);

}  // namespace schottky
