#pragma once

#include <optional>

#include "schottky/projective.hpp"

namespace schottky {

// Element of SL(n,Z).
struct GroupElement {
  IMat mat;

  GroupElement() = default;
  explicit GroupElement(const IMat& m) : mat(m) {
    if (det(m) != 1) throw PreconditionViolated("matrix determinant is not 1");
  }

  int dim() const { return static_cast<int>(mat.rows()); }
  GroupElement inverse() const;
  ProjPoint apply(const ProjPoint& p) const;
  ProjHyperplane apply(const ProjHyperplane& L) const;

  friend GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    GroupElement c;
    c.mat = a.mat * b.mat;
    return c;
  }
  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.mat == b.mat;
  }
};

// u = I + m * v * f^T with f.v = 0, v and f primitive, m != 0.
// Attraction point p_u = [v], fixed hyperplane L_u = ker f.
struct Rank1Unipotent {
  IVec v;
  IVec f;
  Int m = 1;

  ProjPoint point() const { return ProjPoint(v); }
  ProjHyperplane hyperplane() const { return ProjHyperplane(f); }
  GroupElement element() const;
  IMat matrix() const;

  // Floor of ||f|| * ||v||; the contraction certificates use this scale.
  Int scale() const { return floor_sqrt(Int(f.dot(f) * v.dot(v))); }

  // u^k applied to homogeneous coordinates: x + k*m*(f.x)*v.
  IVec apply_power(const Int& k, const IVec& x) const;
};

Rank1Unipotent from_pair(const ProjPoint& p, const ProjHyperplane& L);

// u^k; empty optional marks the identity (k = 0).
std::optional<Rank1Unipotent> power(const Rank1Unipotent& u, const Int& k);

Rank1Unipotent conjugate(const Rank1Unipotent& u, const GroupElement& g);

// True only if the exact sufficient inequality 1/(|m|*delta*s - 1) <= eps
// holds, where s = scale(); then u^k x lands in the open eps-ball around p_u
// for every k != 0 and every x at distance >= delta from L_u.
bool certify_contraction(const Rank1Unipotent& u, const Rat& eps2, const Rat& del2);

// Smallest m >= 1 with certify_contraction(u^m, eps2, del2).
Int contraction_power(const Rank1Unipotent& u, const Rat& eps2, const Rat& del2);

}  // namespace schottky
