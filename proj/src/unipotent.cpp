#include "schottky/unipotent.hpp"

namespace schottky {

GroupElement GroupElement::inverse() const {
  GroupElement g;
  g.mat = inverse_unimodular(mat);
  return g;
}

ProjPoint GroupElement::apply(const ProjPoint& p) const { return ProjPoint(mat * p.coords); }

ProjHyperplane GroupElement::apply(const ProjHyperplane& L) const {
  // Covectors transform by f -> f g^{-1}; stored as a column via transpose.
  IVec raw = inverse_unimodular(mat).transpose() * L.covector;
  return ProjHyperplane(raw);
}

IMat Rank1Unipotent::matrix() const {
  IMat m_ = IMat::Identity(v.size(), v.size());
  m_ += (m * v) * f.transpose();
  return m_;
}

GroupElement Rank1Unipotent::element() const {
  GroupElement g;
  g.mat = matrix();
  return g;
}

IVec Rank1Unipotent::apply_power(const Int& k, const IVec& x) const {
  Int c = k * m * f.dot(x);
  return x + c * v;
}

Rank1Unipotent from_pair(const ProjPoint& p, const ProjHyperplane& L) {
  if (!L.contains(p))
    throw PointNotOnHyperplane("f.p = " + Int(L.covector.dot(p.coords)).get_str());
  Rank1Unipotent u;
  u.v = p.coords;
  u.f = L.covector;
  u.m = 1;
  return u;
}

std::optional<Rank1Unipotent> power(const Rank1Unipotent& u, const Int& k) {
  if (k == 0) return std::nullopt;
  Rank1Unipotent w = u;
  w.m = u.m * k;
  return w;
}

namespace {

// raw = c * primitive_part(raw); returns c (signed content).
Int signed_content(const IVec& raw, const IVec& prim) {
  for (Eigen::Index i = 0; i < raw.size(); ++i)
    if (prim[i] != 0) return Int(raw[i] / prim[i]);
  throw ZeroVector();
}

}  // namespace

Rank1Unipotent conjugate(const Rank1Unipotent& u, const GroupElement& g) {
  IVec v_raw = g.mat * u.v;
  IVec f_raw = inverse_unimodular(g.mat).transpose() * u.f;
  Rank1Unipotent w;
  w.v = primitive_part(v_raw);
  w.f = primitive_part(f_raw);
  w.m = u.m * signed_content(v_raw, w.v) * signed_content(f_raw, w.f);
  if (w.f.dot(w.v) != 0) throw PreconditionViolated("conjugate lost f.v = 0");
  return w;
}

bool certify_contraction(const Rank1Unipotent& u, const Rat& eps2, const Rat& del2) {
  if (eps2 <= 0 || del2 <= 0) throw InvalidRadii("radii must be positive");
  Int a = abs(u.m);
  Int s = u.scale();
  // 1 + eps <= |m| * s * eps * delta, compared through squares.
  return sum_sqrt_le(Rat(1), eps2, Rat(a * a * s * s) * eps2 * del2);
}

Int contraction_power(const Rank1Unipotent& u, const Rat& eps2, const Rat& del2) {
  if (eps2 <= 0 || del2 <= 0) throw InvalidRadii("radii must be positive");
  if (eps2 > del2) throw InvalidRadii("eps2 > del2");
  auto ok = [&](const Int& k) {
    Rank1Unipotent w = u;
    w.m = u.m * k;
    return certify_contraction(w, eps2, del2);
  };
  Int hi = 1;
  while (!ok(hi)) hi *= 2;
  Int lo = hi / 2 + 1;
  if (hi == 1) lo = 1;
  while (lo < hi) {
    Int mid = (lo + hi) / 2;
    if (ok(mid))
      hi = mid;
    else
      lo = mid + 1;
  }
  return hi;
}

}  // namespace schottky
