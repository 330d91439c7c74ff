#pragma once

#include <array>

#include "schottky/schottky.hpp"

namespace schottky {

struct BuildConfig {
  long q = 2;                      // second congruence batch runs mod q^2
  std::vector<long> extra_moduli;  // extra moduli for the density witness
  std::uint64_t bfs_cap = kDefaultBfsCap;
  std::uint64_t seed = 0;
  int enum_bound = 10;     // coefficient bound in lattice point searches
  int perturb_min = 2;     // deformation denominators run over 2^j
  int perturb_max = 60;
  int halving_max = 200;   // radius halving iterations
  int aim_tries = 100000;  // shear parameter increments per generator
  SearchBudget word_search;
};

// Provenance of one dense-builder generator: u = g * e_{i,j}^s * g^{-1}
// with g in the principal congruence subgroup mod d and s = 1 mod the
// exponent of SL(n,Z/dZ).
struct RecipeEntry {
  int source_i = 0;
  int source_j = 0;
  GroupElement g;
  long d = 0;
  Int s;
};

struct DenseResult {
  SchottkySystem sys;
  DensityWitness witness;
  std::vector<RecipeEntry> recipe;  // generator i maps to recipe[i - exact_offset]
  int exact_index = -1;             // index of the exact (p, L) generator, if any
};

// Profinitely-dense Schottky system inside A = [p]_eps, R = [L]_del:
// 2n^2-2n generators conjugated off the elementary matrices, one batch of
// conjugators in K_3 and one in K_{q^2}, with exponents congruent to 1 mod
// the respective group exponents so the reductions mod 3 and mod q^2 are
// exactly the elementary matrices. include_exact prepends the generator
// with attraction data exactly (p, L).
DenseResult build_profinitely_dense(const ProjPoint& p, const ProjHyperplane& L,
                                    const Rat& eps2, const Rat& del2,
                                    const BuildConfig& config,
                                    bool include_exact = false);

struct Anchor {
  ProjPoint p;
  ProjHyperplane L;
};

struct StartCert {
  int intersection_gen = -1;  // generator index of the witness element w
  Word word;                  // w as a word in S
  GroupElement k;
  int base_gen = -1;  // generator index of u1
  Int conj_exponent;  // w = k * u1^conj_exponent * k^{-1}
  FullGroupCert full;
};

// Starting system: dense system at (p1, L1) plus powered conjugates at
// (p2, L2) = k(p1, L1) and at (p3, L3). The StartCert element lies in both
// <S> and k<S>k^{-1}; the FullGroupCert covers <S, k>.
std::pair<SchottkySystem, StartCert> starting_system(const GroupElement& k,
                                                     const std::array<Anchor, 3>& anchors,
                                                     const Rat& eps2, const Rat& del2,
                                                     const BuildConfig& config);

// Recomputes the StartCert identity w = k u1^e k^{-1} from raw matrices.
bool validate_start_cert(const SchottkySystem& sys, const StartCert& cert);

struct FamilyAnchor {
  ProjPoint p;
  ProjHyperplane L;
  Rat eps2;
  Rat del2;
};

struct FamilySpec {
  std::vector<FamilyAnchor> anchors;
  SchottkySystem base;
  // Two candidates per index sharing the attraction point, with distinct
  // hyperplanes inside the anchor tube.
  std::vector<std::array<SchottkyGenerator, 2>> candidates;
};

FamilySpec make_family_spec(const SchottkySystem& base,
                            const std::vector<FamilyAnchor>& anchors,
                            const BuildConfig& config);

// Ready-made spec at dimension n with N anchor indices over a dense base.
FamilySpec default_family_spec(int n, int N, const BuildConfig& config);

SchottkySystem family_member(const FamilySpec& spec, const std::vector<int>& bits);

FullGroupCert family_union_cert(const FamilySpec& spec, const std::vector<int>& f,
                                const std::vector<int>& g);

struct AvoidanceInstance {
  ProjHyperplane L1;
  ProjHyperplane L2;
  Rat rho2;
  ProjPoint p0;
  ProjHyperplane L0;
};

// Avoidance extension step: given L inside the rho-tube of L2 with gL inside
// the rho-tube of L1, extends sys so that <S_+, g> = SL(n,Z) is certified
// through h = g^{-1} u g for a helper generator u fixing a point of L.
std::pair<SchottkySystem, FullGroupCert> avoid_step(const SchottkySystem& sys,
                                                    const AvoidanceInstance& inst,
                                                    const GroupElement& g,
                                                    const ProjHyperplane& L,
                                                    const BuildConfig& config);

// Squared Lipschitz constant of the projective action of g in the sine
// metric: dist2(gx, gy) <= lipschitz2(g) * dist2(x, y).
Rat lipschitz2(const GroupElement& g);

// Quadruple start: anchors found by search so that the starting system's
// open neighborhood N of A satisfies p not in cl(N) + R + g cl(N) + gR and
// cl(N), g cl(N) disjoint.
std::pair<SchottkyQuadruple, StartCert> quad_start(const GroupElement& g,
                                                   const ProjPoint& p,
                                                   const GroupElement& k,
                                                   const BuildConfig& config);

struct QuadExtendResult {
  SchottkyQuadruple quad;
  FullGroupCert cert;
  std::string branch;  // "h" or "g^-1hg"
};

QuadExtendResult quad_extend(const SchottkyQuadruple& quad, const GroupElement& g,
                             const ProjPoint& p, const GroupElement& h,
                             const BuildConfig& config);

}  // namespace schottky
