#pragma once

#include <vector>

#include "schottky/linalg.hpp"

namespace schottky {

// Projective point with primitive, sign-canonical homogeneous coordinates.
struct ProjPoint {
  IVec coords;

  ProjPoint() = default;
  explicit ProjPoint(const IVec& raw) : coords(primitive_part(raw)) {}

  int dim() const { return static_cast<int>(coords.size()); }
  friend bool operator==(const ProjPoint& a, const ProjPoint& b) {
    return a.coords == b.coords;
  }
  friend bool operator!=(const ProjPoint& a, const ProjPoint& b) { return !(a == b); }
};

// Hyperplane ker(f) stored through its primitive, sign-canonical covector.
struct ProjHyperplane {
  IVec covector;

  ProjHyperplane() = default;
  explicit ProjHyperplane(const IVec& raw) : covector(primitive_part(raw)) {}

  int dim() const { return static_cast<int>(covector.size()); }
  bool contains(const ProjPoint& p) const { return covector.dot(p.coords) == 0; }
  friend bool operator==(const ProjHyperplane& a, const ProjHyperplane& b) {
    return a.covector == b.covector;
  }
  friend bool operator!=(const ProjHyperplane& a, const ProjHyperplane& b) {
    return !(a == b);
  }
};

ProjPoint normalize(const IVec& raw);

// Squared sine of the angle between the representative lines:
// 1 - (x.y)^2 / ((x.x)(y.y)).
Rat dist2_points(const ProjPoint& x, const ProjPoint& y);

// Squared sine of the angle from x to ker f: (f.x)^2 / ((f.f)(x.x)).
Rat dist2_point_hyperplane(const ProjPoint& x, const ProjHyperplane& L);

// Hausdorff distance in the sine metric; equals the point distance of the
// dual covectors.
Rat dist2_hyperplanes(const ProjHyperplane& L1, const ProjHyperplane& L2);

struct Ball {
  ProjPoint center;
  Rat radius2;
};

struct Tube {
  ProjHyperplane hyperplane;
  Rat radius2;
};

// Finite union of closed balls and closed tubes.
struct Region {
  std::vector<Ball> balls;
  std::vector<Tube> tubes;

  void add_ball(const ProjPoint& p, const Rat& r2) { balls.push_back({p, r2}); }
  void add_tube(const ProjHyperplane& L, const Rat& r2) { tubes.push_back({L, r2}); }
  bool empty() const { return balls.empty() && tubes.empty(); }
};

// Closed membership: dist^2 <= radius^2 for some component.
bool region_contains(const Region& R, const ProjPoint& x);

// Open membership: dist^2 < radius^2 for some component.
bool region_contains_open(const Region& R, const ProjPoint& x);

// Certified disjointness of the closed eps-ball around p and the closed
// del-tube around L: sqrt(eps2) + sqrt(del2) < dist(p, L).
bool disjoint_ball_tube(const ProjPoint& p, const Rat& eps2, const ProjHyperplane& L,
                        const Rat& del2);

bool disjoint_balls(const ProjPoint& p, const Rat& eps2, const ProjPoint& q,
                    const Rat& del2);

// Certified containment of the closed eps-ball around p in the closed
// del-tube around L: dist(p, L) + eps <= del.
bool ball_inside_tube(const ProjPoint& p, const Rat& eps2, const ProjHyperplane& L,
                      const Rat& del2);

bool ball_inside_ball(const ProjPoint& p, const Rat& eps2, const ProjPoint& q,
                      const Rat& del2);

// Strict variant: the closed eps-ball sits in the open del-ball interior.
bool ball_inside_ball_strict(const ProjPoint& p, const Rat& eps2, const ProjPoint& q,
                             const Rat& del2);

bool tube_inside_tube(const ProjHyperplane& L1, const Rat& d1, const ProjHyperplane& L2,
                      const Rat& d2);

// Certified disjointness of a closed ball from every component of R.
bool ball_disjoint_from_region(const ProjPoint& p, const Rat& eps2, const Region& R);

// Certified disjointness of a closed tube from R. Tubes of R make this fail:
// two hyperplanes of P^{n-1} (n >= 3) always intersect.
bool tube_disjoint_from_region(const ProjHyperplane& L, const Rat& del2, const Region& R);

// Certified containment of a ball in the union via a single component.
bool ball_inside_region(const ProjPoint& p, const Rat& eps2, const Region& R);

bool tube_inside_region(const ProjHyperplane& L, const Rat& del2, const Region& R);

}  // namespace schottky
