#include "schottky/projective.hpp"

namespace schottky {

ProjPoint normalize(const IVec& raw) { return ProjPoint(raw); }

Rat dist2_points(const ProjPoint& x, const ProjPoint& y) {
  Int dot = x.coords.dot(y.coords);
  Int nx = x.coords.dot(x.coords);
  Int ny = y.coords.dot(y.coords);
  return Rat(1) - rat(dot * dot, nx * ny);
}

Rat dist2_point_hyperplane(const ProjPoint& x, const ProjHyperplane& L) {
  Int dot = L.covector.dot(x.coords);
  Int nf = L.covector.dot(L.covector);
  Int nx = x.coords.dot(x.coords);
  return rat(dot * dot, nf * nx);
}

Rat dist2_hyperplanes(const ProjHyperplane& L1, const ProjHyperplane& L2) {
  return dist2_points(ProjPoint(L1.covector), ProjPoint(L2.covector));
}

bool region_contains(const Region& R, const ProjPoint& x) {
  for (const Ball& b : R.balls)
    if (dist2_points(x, b.center) <= b.radius2) return true;
  for (const Tube& t : R.tubes)
    if (dist2_point_hyperplane(x, t.hyperplane) <= t.radius2) return true;
  return false;
}

bool region_contains_open(const Region& R, const ProjPoint& x) {
  for (const Ball& b : R.balls)
    if (dist2_points(x, b.center) < b.radius2) return true;
  for (const Tube& t : R.tubes)
    if (dist2_point_hyperplane(x, t.hyperplane) < t.radius2) return true;
  return false;
}

bool disjoint_ball_tube(const ProjPoint& p, const Rat& eps2, const ProjHyperplane& L,
                        const Rat& del2) {
  return sum_sqrt_lt(eps2, del2, dist2_point_hyperplane(p, L));
}

bool disjoint_balls(const ProjPoint& p, const Rat& eps2, const ProjPoint& q,
                    const Rat& del2) {
  return sum_sqrt_lt(eps2, del2, dist2_points(p, q));
}

bool ball_inside_tube(const ProjPoint& p, const Rat& eps2, const ProjHyperplane& L,
                      const Rat& del2) {
  return sum_sqrt_le(dist2_point_hyperplane(p, L), eps2, del2);
}

bool ball_inside_ball(const ProjPoint& p, const Rat& eps2, const ProjPoint& q,
                      const Rat& del2) {
  return sum_sqrt_le(dist2_points(p, q), eps2, del2);
}

bool ball_inside_ball_strict(const ProjPoint& p, const Rat& eps2, const ProjPoint& q,
                             const Rat& del2) {
  return sum_sqrt_lt(dist2_points(p, q), eps2, del2);
}

bool tube_inside_tube(const ProjHyperplane& L1, const Rat& d1, const ProjHyperplane& L2,
                      const Rat& d2) {
  return sum_sqrt_le(dist2_hyperplanes(L1, L2), d1, d2);
}

bool ball_disjoint_from_region(const ProjPoint& p, const Rat& eps2, const Region& R) {
  for (const Ball& b : R.balls)
    if (!disjoint_balls(p, eps2, b.center, b.radius2)) return false;
  for (const Tube& t : R.tubes)
    if (!disjoint_ball_tube(p, eps2, t.hyperplane, t.radius2)) return false;
  return true;
}

bool tube_disjoint_from_region(const ProjHyperplane& L, const Rat& del2, const Region& R) {
  if (!R.tubes.empty()) return false;
  for (const Ball& b : R.balls)
    if (!disjoint_ball_tube(b.center, b.radius2, L, del2)) return false;
  return true;
}

bool ball_inside_region(const ProjPoint& p, const Rat& eps2, const Region& R) {
  for (const Ball& b : R.balls)
    if (ball_inside_ball(p, eps2, b.center, b.radius2)) return true;
  for (const Tube& t : R.tubes)
    if (ball_inside_tube(p, eps2, t.hyperplane, t.radius2)) return true;
  return false;
}

bool tube_inside_region(const ProjHyperplane& L, const Rat& del2, const Region& R) {
  for (const Tube& t : R.tubes)
    if (tube_inside_tube(L, del2, t.hyperplane, t.radius2)) return true;
  return false;
}

}  // namespace schottky
