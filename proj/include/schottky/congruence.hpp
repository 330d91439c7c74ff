#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "schottky/unipotent.hpp"

namespace schottky {

inline constexpr std::uint64_t kDefaultBfsCap = 10'000'000;

// n x n matrix over Z/dZ, entries in [0, d).
struct ModMatrix {
  long d = 0;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> e;

  int dim() const { return static_cast<int>(e.rows()); }
  std::string key() const;
  bool is_identity() const;

  friend ModMatrix operator*(const ModMatrix& a, const ModMatrix& b);
  friend bool operator==(const ModMatrix& a, const ModMatrix& b) {
    return a.d == b.d && a.e == b.e;
  }
};

ModMatrix reduce_mod(const GroupElement& g, long d);
ModMatrix mod_identity(int n, long d);

// All elementary matrices I + E_{ij}, i != j, reduced mod d.
std::vector<ModMatrix> elementary_gens_mod(int n, long d);

// Order of the subgroup generated inside SL(n,Z/dZ), by breadth-first closure.
std::uint64_t closure_order(const std::vector<ModMatrix>& gens,
                            std::uint64_t cap = kDefaultBfsCap);

// |SL(n,Z/pZ)| for prime p, by the product formula. Cross-check oracle only.
Int sl_order_prime(int n, long p);

// |SL(n,Z/dZ)| by BFS from elementary matrices (cached per (n,d)).
std::uint64_t sl_order(int n, long d, std::uint64_t cap = kDefaultBfsCap);

bool is_surjective(const std::vector<GroupElement>& gens, long d,
                   std::uint64_t cap = kDefaultBfsCap);

// Exponent of SL(n,Z/dZ): lcm of element orders over the whole group.
Int exponent_of(int n, long d, std::uint64_t cap = kDefaultBfsCap);

bool in_kernel(const GroupElement& g, long d);

struct DensityWitness {
  std::vector<long> moduli_checked;
  std::vector<bool> surjective;
  bool recipe_conformant = false;
  long q = 0;  // the coprimality constant of the cited strong-approximation step
  std::string full_density_basis = "cited:strong-approximation";

  bool valid() const;
};

DensityWitness density_witness(const std::vector<GroupElement>& gens,
                               const std::vector<long>& moduli,
                               std::uint64_t cap = kDefaultBfsCap);

}  // namespace schottky
