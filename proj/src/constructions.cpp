#include "schottky/constructions.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace schottky {

namespace {

IVec unit(int n, int i) {
  IVec e = IVec::Zero(n);
  e[i] = 1;
  return e;
}

// Smallest k >= lo with k = 1 (mod t).
Int round_up_congruent_one(const Int& lo, const Int& t) {
  Int rem = (1 - lo) % t;
  if (rem < 0) rem += t;
  return lo + rem;
}

Rat min_rat(const Rat& a, const Rat& b) { return a < b ? a : b; }

// Enumerates primitive points of the column lattice of K by increasing
// coefficient norm until pred accepts one.
template <typename Pred>
std::optional<ProjPoint> search_lattice_point(const IMat& K, const Pred& pred, int bound) {
  const int k = static_cast<int>(K.cols());
  for (int B = 1; B <= bound; ++B) {
    std::vector<long> c(k, -B);
    while (true) {
      bool shell = false;
      for (int i = 0; i < k; ++i)
        if (c[i] == B || c[i] == -B) shell = true;
      if (shell) {
        IVec cc(k);
        for (int i = 0; i < k; ++i) cc[i] = c[i];
        IVec w = K * cc;
        if (!is_zero(w)) {
          ProjPoint pt(w);
          if (pred(pt)) return pt;
        }
      }
      int i = 0;
      while (i < k) {
        if (c[i] < B) {
          ++c[i];
          break;
        }
        c[i] = -B;
        ++i;
      }
      if (i == k) break;
    }
  }
  return std::nullopt;
}

template <typename Pred>
std::optional<ProjPoint> search_point_on_hyperplane(const ProjHyperplane& L,
                                                    const Pred& pred, int bound) {
  return search_lattice_point(kernel_basis(L.covector), pred, bound);
}

template <typename Pred>
std::optional<ProjHyperplane> search_hyperplane_through_point(const ProjPoint& p,
                                                              const Pred& pred,
                                                              int bound) {
  IMat K = kernel_basis(p.coords);
  auto lifted = [&](const ProjPoint& cand) { return pred(ProjHyperplane(cand.coords)); };
  auto found = search_lattice_point(K, lifted, bound);
  if (!found) return std::nullopt;
  return ProjHyperplane(found->coords);
}

// Rational points converging to x: [2^j x + e] for small integer e.
template <typename Pred>
std::optional<ProjPoint> search_point_near(const ProjPoint& x, const Pred& pred,
                                           int jmin, int jmax) {
  const int n = x.dim();
  std::vector<IVec> offsets;
  std::vector<long> c(n, -1);
  while (true) {
    IVec e(n);
    bool nonzero = false;
    for (int i = 0; i < n; ++i) {
      e[i] = c[i];
      if (c[i] != 0) nonzero = true;
    }
    if (nonzero) offsets.push_back(e);
    int i = 0;
    while (i < n) {
      if (c[i] < 1) {
        ++c[i];
        break;
      }
      c[i] = -1;
      ++i;
    }
    if (i == n) break;
  }
  Int scale = 1;
  for (int j = 0; j < jmin; ++j) scale *= 2;
  for (int j = jmin; j <= jmax; ++j, scale *= 2) {
    for (const IVec& e : offsets) {
      IVec y = scale * x.coords + e;
      if (is_zero(y)) continue;
      ProjPoint pt(y);
      if (pt == x) continue;
      if (pred(pt)) return pt;
    }
  }
  return std::nullopt;
}

template <typename Check>
Rat halve_radius2(Rat start, const Check& ok, int max_iter, const char* what) {
  Rat r = start;
  for (int i = 0; i < max_iter; ++i) {
    if (ok(r)) return r;
    r /= 4;
  }
  throw SearchExhausted(std::string("radius halving did not converge: ") + what);
}

bool avoids_balls(const Region& A, const ProjHyperplane& L) {
  for (const Ball& b : A.balls)
    if (dist2_point_hyperplane(b.center, L) <= b.radius2) return false;
  return true;
}

}  // namespace

DenseResult build_profinitely_dense(const ProjPoint& p, const ProjHyperplane& L,
                                    const Rat& eps2, const Rat& del2,
                                    const BuildConfig& config, bool include_exact) {
  Rank1Unipotent exact_base = from_pair(p, L);
  if (!(eps2 > 0 && del2 >= eps2)) throw InvalidRadii("need del2 >= eps2 > 0");
  const int n = p.dim();
  if (n < 3) throw PreconditionViolated("dimension must be at least 3");
  if (config.q < 2) throw PreconditionViolated("q must be at least 2");
  const IVec& P0 = p.coords;
  const IVec& F = L.covector;
  const long dq = config.q * config.q;
  const Int t3 = exponent_of(n, 3, config.bfs_cap);
  const Int tq = exponent_of(n, dq, config.bfs_cap);

  struct Cand {
    Rank1Unipotent w;
    RecipeEntry rec;
    Int texp;
  };
  std::vector<Cand> cands;
  std::vector<ProjPoint> pts;
  std::vector<ProjHyperplane> hyps;
  if (include_exact) {
    pts.push_back(p);
    hyps.push_back(L);
  }

  Int counter = 1;
  for (int batch = 0; batch < 2; ++batch) {
    const long d = batch == 0 ? 3 : dq;
    const Int texp = batch == 0 ? t3 : tq;
    // Degeneracy-breaking kernel elements for the aiming shear.
    std::vector<IMat> k0s;
    k0s.push_back(IMat::Identity(n, n));
    std::vector<IMat> singles;
    for (int c = 1; c <= 2; ++c)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) singles.push_back(elementary(n, i, j, Int(c) * d));
    for (const IMat& s : singles) k0s.push_back(s);
    for (const IMat& s1 : singles)
      for (const IMat& s2 : singles) k0s.push_back(s1 * s2);

    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (a == b) continue;
        Rank1Unipotent src;
        src.v = unit(n, a);
        src.f = unit(n, b);
        src.m = 1;
        const IMat* k0 = nullptr;
        for (const IMat& cand : k0s) {
          IVec vimg = cand * src.v;
          IVec fimg = inverse_unimodular(cand).transpose() * src.f;
          if (F.dot(vimg) != 0 && fimg.dot(P0) != 0) {
            k0 = &cand;
            break;
          }
        }
        if (!k0)
          throw SearchExhausted("no kernel element breaks aiming degeneracy");
        bool placed = false;
        for (int attempt = 0; attempt < config.aim_tries && !placed; ++attempt) {
          Int N = counter;
          ++counter;
          IMat shear = IMat::Identity(n, n);
          Int c = Int(d) * N;
          shear += (c * P0) * F.transpose();
          GroupElement g;
          g.mat = shear * (*k0);
          Rank1Unipotent w = conjugate(src, g);
          ProjPoint q = w.point();
          ProjHyperplane M = w.hyperplane();
          if (F.dot(w.v) == 0 || w.f.dot(P0) == 0) continue;
          if (dist2_points(q, p) * 9 > eps2) continue;
          if (dist2_hyperplanes(M, L) * 9 > del2) continue;
          bool fresh = true;
          for (size_t j = 0; j < pts.size() && fresh; ++j) {
            if (q == pts[j] || M == hyps[j]) fresh = false;
            if (dist2_point_hyperplane(q, hyps[j]) == 0) fresh = false;
            if (dist2_point_hyperplane(pts[j], M) == 0) fresh = false;
          }
          if (q == p || M == L) fresh = false;
          if (!fresh) continue;
          Cand cand;
          cand.w = w;
          cand.rec = {a, b, g, d, Int(0)};
          cand.texp = texp;
          cands.push_back(cand);
          pts.push_back(q);
          hyps.push_back(M);
          placed = true;
        }
        if (!placed) throw SearchExhausted("aiming shear budget exhausted");
      }
  }

  Rat dmin = Rat(1);
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = 0; j < hyps.size(); ++j) {
      if (i == j) continue;
      Rat d2 = dist2_point_hyperplane(pts[i], hyps[j]);
      if (d2 == 0) throw SearchExhausted("degenerate anchor configuration");
      dmin = min_rat(dmin, d2);
    }
  Rat rho2 = min_rat(dmin / 9, min_rat(eps2 * 4 / 9, del2 * 4 / 9));

  DenseResult result;
  SchottkySystem& sys = result.sys;
  sys.attracting.add_ball(p, eps2);
  sys.repelling.add_tube(L, del2);
  if (include_exact) {
    Int m0 = contraction_power(exact_base, rho2, rho2);
    sys.generators.push_back({*power(exact_base, m0), rho2, rho2});
    result.exact_index = 0;
  }
  for (Cand& cand : cands) {
    Int mbase = contraction_power(cand.w, rho2, rho2);
    Int s = round_up_congruent_one(mbase, cand.texp);
    cand.rec.s = s;
    sys.generators.push_back({*power(cand.w, s), rho2, rho2});
    result.recipe.push_back(cand.rec);
  }

  VerifyReport rep = verify_system(sys);
  if (!rep.pass())
    throw PreconditionViolated("dense system fails verification: " +
                               rep.violations.front().detail);

  std::set<long> moduli_set = {3, dq};
  for (long m : config.extra_moduli) moduli_set.insert(m);
  std::vector<long> moduli(moduli_set.begin(), moduli_set.end());
  DensityWitness witness = density_witness(sys.elements(), moduli, config.bfs_cap);
  witness.q = config.q;
  witness.recipe_conformant = true;
  for (bool s : witness.surjective)
    if (!s) throw PreconditionViolated("dense system is not surjective at a checked modulus");
  sys.density = witness;
  result.witness = witness;
  return result;
}

std::pair<SchottkySystem, StartCert> starting_system(const GroupElement& k,
                                                     const std::array<Anchor, 3>& anchors,
                                                     const Rat& eps2, const Rat& del2,
                                                     const BuildConfig& config) {
  const ProjPoint &p1 = anchors[0].p, &p2 = anchors[1].p, &p3 = anchors[2].p;
  const ProjHyperplane &L1 = anchors[0].L, &L2 = anchors[1].L, &L3 = anchors[2].L;
  for (const Anchor& a : anchors) from_pair(a.p, a.L);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      if (!disjoint_ball_tube(anchors[i].p, eps2, anchors[j].L, del2))
        throw PreconditionViolated("anchor separation [p_i]_eps vs [L_j]_del fails");
    }
  if (k.apply(p1) != p2) throw PreconditionViolated("p2 != k p1");
  GroupElement k2 = k * k;
  if (k2.apply(p1) != p3) throw PreconditionViolated("p3 != k^2 p1");
  if (k.apply(L1) != L2) throw PreconditionViolated("L2 != k L1");
  if (k2.apply(L1) == L3) throw PreconditionViolated("L3 = k^2 L1");

  DenseResult dense = build_profinitely_dense(p1, L1, eps2, del2, config, true);
  SchottkySystem sys = dense.sys;
  sys.attracting = Region();
  sys.repelling = Region();
  for (const Anchor& a : anchors) {
    sys.attracting.add_ball(a.p, eps2);
    sys.repelling.add_tube(a.L, del2);
  }

  Rank1Unipotent w2base = conjugate(from_pair(p1, L1), k);
  if (w2base.point() != p2 || w2base.hyperplane() != L2)
    throw PreconditionViolated("conjugated attraction data mismatch");
  Rank1Unipotent w3base = from_pair(p3, L3);

  const std::vector<SchottkyGenerator> old_gens = sys.generators;
  auto radii_ok = [&](const Rat& r2) {
    for (const SchottkyGenerator& g : old_gens) {
      for (const Anchor* a : {&anchors[1], &anchors[2]}) {
        if (!sum_sqrt_lt(r2, g.del2, dist2_point_hyperplane(a->p, g.u.hyperplane())))
          return false;
        if (!sum_sqrt_lt(g.eps2, r2, dist2_point_hyperplane(g.u.point(), a->L)))
          return false;
      }
    }
    if (!sum_sqrt_lt(r2, r2, dist2_point_hyperplane(p2, L3))) return false;
    if (!sum_sqrt_lt(r2, r2, dist2_point_hyperplane(p3, L2))) return false;
    return true;
  };
  Rat rho2 = halve_radius2(eps2, radii_ok, config.halving_max, "starting_system radii");

  Int m0 = abs(sys.generators[0].u.m);
  Int mb2 = contraction_power(w2base, rho2, rho2);
  Int y;
  mpz_cdiv_q(y.get_mpz_t(), mb2.get_mpz_t(), m0.get_mpz_t());
  Int k2exp = y * m0;
  Int mb3 = contraction_power(w3base, rho2, rho2);
  sys.generators.push_back({*power(w2base, k2exp), rho2, rho2});
  int idx2 = static_cast<int>(sys.generators.size()) - 1;
  sys.generators.push_back({*power(w3base, mb3), rho2, rho2});
  int idx3 = static_cast<int>(sys.generators.size()) - 1;

  VerifyReport rep = verify_system(sys);
  if (!rep.pass())
    throw PreconditionViolated("starting system fails verification: " +
                               rep.violations.front().detail);

  StartCert cert;
  cert.intersection_gen = idx2;
  cert.word.letters = {{idx2, Int(1)}};
  cert.k = k;
  cert.base_gen = 0;
  cert.conj_exponent = y;
  GroupElement k2inv = k2.inverse();
  GroupElement conj_w3 = k2inv * sys.generators[idx3].u.element() * k2;
  cert.full.pair = z2_pair_cert(sys.generators[0].u, conj_w3);
  if (!cert.full.pair.ok())
    throw PreconditionViolated("Z^2 pair certificate for <S,k> failed");
  cert.full.density = *sys.density;
  cert.full.adjoined = "k";
  if (!validate_start_cert(sys, cert))
    throw PreconditionViolated("start certificate did not re-validate");
  return {sys, cert};
}

bool validate_start_cert(const SchottkySystem& sys, const StartCert& cert) {
  const int count = static_cast<int>(sys.generators.size());
  if (cert.intersection_gen < 0 || cert.intersection_gen >= count) return false;
  if (cert.base_gen < 0 || cert.base_gen >= count) return false;
  GroupElement w = evaluate_word(sys, cert.word);
  auto u1pow = power(sys.generators[cert.base_gen].u, cert.conj_exponent);
  if (!u1pow) return false;
  GroupElement rhs = cert.k * u1pow->element() * cert.k.inverse();
  if (!(w == rhs)) return false;
  Z2PairCert re = z2_pair_cert(cert.full.pair.u, cert.full.pair.w);
  return re.ok() && cert.full.ok();
}

FamilySpec make_family_spec(const SchottkySystem& base,
                            const std::vector<FamilyAnchor>& anchors,
                            const BuildConfig& config) {
  if (anchors.empty()) throw PreconditionViolated("no family anchors");
  if (!base.density) throw PreconditionViolated("family base carries no density witness");
  FamilySpec spec;
  spec.base = base;
  spec.anchors = anchors;
  const size_t N = anchors.size();
  for (const FamilyAnchor& a : anchors) from_pair(a.p, a.L);
  for (size_t i = 0; i < N; ++i)
    for (size_t j = 0; j < N; ++j) {
      if (i == j) continue;
      if (!disjoint_ball_tube(anchors[i].p, anchors[i].eps2, anchors[j].L,
                              anchors[j].del2))
        throw PreconditionViolated("family anchors not separated");
    }
  for (const FamilyAnchor& a : anchors) {
    for (const Tube& t : base.repelling.tubes)
      if (!disjoint_ball_tube(a.p, a.eps2, t.hyperplane, t.radius2))
        throw PreconditionViolated("family anchor ball meets base R");
    for (const Ball& b : base.attracting.balls)
      if (!disjoint_ball_tube(b.center, b.radius2, a.L, a.del2))
        throw PreconditionViolated("family anchor tube meets base A");
  }

  // Second hyperplane per index: F' = lambda*F + E with E in the dual of p,
  // driven toward L by growing lambda.
  std::vector<ProjHyperplane> alt(N);
  for (size_t i = 0; i < N; ++i) {
    IMat K = kernel_basis(anchors[i].p.coords);
    IVec E;
    bool found_dir = false;
    for (Eigen::Index c = 0; c < K.cols() && !found_dir; ++c) {
      IVec cand = K.col(c);
      if (ProjHyperplane(cand) != anchors[i].L) {
        E = cand;
        found_dir = true;
      }
    }
    if (!found_dir) throw SearchExhausted("no independent dual direction");
    Int lambda = 1;
    bool placed = false;
    for (int j = 0; j <= config.perturb_max && !placed; ++j, lambda *= 2) {
      IVec fp = lambda * anchors[i].L.covector + E;
      if (is_zero(fp)) continue;
      ProjHyperplane Lp(fp);
      if (Lp == anchors[i].L) continue;
      if (dist2_hyperplanes(Lp, anchors[i].L) * 4 > anchors[i].del2) continue;
      bool clean = true;
      for (size_t j2 = 0; j2 < N && clean; ++j2)
        if (j2 != i && dist2_point_hyperplane(anchors[j2].p, Lp) == 0) clean = false;
      for (const Ball& b : base.attracting.balls)
        if (dist2_point_hyperplane(b.center, Lp) <= b.radius2) clean = false;
      if (!clean) continue;
      alt[i] = Lp;
      placed = true;
    }
    if (!placed) throw SearchExhausted("family hyperplane perturbation budget");
  }

  // Shared shrink factor for candidate radii.
  auto radii = [&](const Rat& s, size_t i) -> Rat {
    return min_rat(anchors[i].eps2, anchors[i].del2 / 4) * s;
  };
  auto ok = [&](const Rat& s) {
    for (size_t i = 0; i < N; ++i) {
      Rat ri = radii(s, i);
      for (size_t j = 0; j < N; ++j) {
        if (i == j) continue;
        Rat rj = radii(s, j);
        for (const ProjHyperplane* Lc : {&spec.anchors[j].L, &alt[j]})
          if (!sum_sqrt_lt(ri, rj, dist2_point_hyperplane(anchors[i].p, *Lc)))
            return false;
      }
      for (const SchottkyGenerator& g : base.generators) {
        if (!sum_sqrt_lt(ri, g.del2, dist2_point_hyperplane(anchors[i].p, g.u.hyperplane())))
          return false;
        for (const ProjHyperplane* Lc : {&spec.anchors[i].L, &alt[i]})
          if (!sum_sqrt_lt(g.eps2, ri, dist2_point_hyperplane(g.u.point(), *Lc)))
            return false;
      }
      if (!sum_sqrt_le(dist2_hyperplanes(alt[i], anchors[i].L), ri, anchors[i].del2))
        return false;
    }
    return true;
  };
  Rat s = halve_radius2(Rat(1), ok, config.halving_max, "family radii");

  for (size_t i = 0; i < N; ++i) {
    Rat ri = radii(s, i);
    Rank1Unipotent u1 = from_pair(anchors[i].p, anchors[i].L);
    Rank1Unipotent u2 = from_pair(anchors[i].p, alt[i]);
    Int m1 = contraction_power(u1, ri, ri);
    Int m2 = contraction_power(u2, ri, ri);
    spec.candidates.push_back(
        {SchottkyGenerator{*power(u1, m1), ri, ri}, SchottkyGenerator{*power(u2, m2), ri, ri}});
  }
  return spec;
}

SchottkySystem family_member(const FamilySpec& spec, const std::vector<int>& bits) {
  if (bits.size() != spec.anchors.size())
    throw PreconditionViolated("bit string length mismatch");
  for (int b : bits)
    if (b != 0 && b != 1) throw PreconditionViolated("bits must be 0 or 1");
  SchottkySystem sys = spec.base;
  for (size_t i = 0; i < bits.size(); ++i) {
    sys.generators.push_back(spec.candidates[i][bits[i]]);
    sys.attracting.add_ball(spec.anchors[i].p, spec.anchors[i].eps2);
    sys.repelling.add_tube(spec.anchors[i].L, spec.anchors[i].del2);
  }
  VerifyReport rep = verify_system(sys);
  if (!rep.pass())
    throw PreconditionViolated("family member fails verification: " +
                               rep.violations.front().detail);
  return sys;
}

FullGroupCert family_union_cert(const FamilySpec& spec, const std::vector<int>& f,
                                const std::vector<int>& g) {
  if (f.size() != spec.anchors.size() || g.size() != spec.anchors.size())
    throw PreconditionViolated("bit string length mismatch");
  if (f == g) throw EqualFunctions();
  size_t i = 0;
  while (f[i] == g[i]) ++i;
  FullGroupCert cert;
  cert.pair = z2_pair_cert(spec.candidates[i][0].u, spec.candidates[i][1].u.element());
  if (!cert.pair.ok()) throw PreconditionViolated("family pair certificate failed");
  cert.density = *spec.base.density;
  cert.adjoined = "union of two family members";
  return cert;
}

FamilySpec default_family_spec(int n, int N, const BuildConfig& config) {
  if (n < 3) throw PreconditionViolated("dimension must be at least 3");
  ProjPoint p0(unit(n, 0));
  ProjHyperplane L0(unit(n, 1));
  DenseResult dense = build_profinitely_dense(p0, L0, rat(1, 400), rat(1, 200), config);
  std::vector<ProjPoint> pts;
  for (int i = 0; i < N; ++i) {
    IVec v(n);
    Int a = i + 2;
    Int pw = 1;
    for (int c = 0; c < n; ++c) {
      v[c] = pw;
      pw *= a;
    }
    pts.emplace_back(v);
  }
  std::vector<FamilyAnchor> anchors;
  for (int i = 0; i < N; ++i) {
    auto pred = [&](const ProjHyperplane& L) {
      if (dist2_point_hyperplane(p0, L) * 100 <= 1) return false;
      for (int j = 0; j < N; ++j)
        if (j != i && L.covector.dot(pts[j].coords) == 0) return false;
      return true;
    };
    auto L = search_hyperplane_through_point(pts[i], pred, config.enum_bound);
    if (!L) throw SearchExhausted("family anchor hyperplane search");
    anchors.push_back({pts[i], *L, Rat(0), Rat(0)});
  }
  auto ok = [&](const Rat& r2) {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        if (i == j) continue;
        if (!sum_sqrt_lt(r2, r2, dist2_point_hyperplane(anchors[i].p, anchors[j].L)))
          return false;
      }
    for (int i = 0; i < N; ++i) {
      for (const Tube& t : dense.sys.repelling.tubes)
        if (!sum_sqrt_lt(r2, t.radius2, dist2_point_hyperplane(anchors[i].p, t.hyperplane)))
          return false;
      for (const Ball& b : dense.sys.attracting.balls)
        if (!sum_sqrt_lt(b.radius2, r2, dist2_point_hyperplane(b.center, anchors[i].L)))
          return false;
    }
    return true;
  };
  Rat r2 = halve_radius2(rat(1, 16), ok, config.halving_max, "default family radii");
  for (FamilyAnchor& a : anchors) {
    a.eps2 = r2;
    a.del2 = r2;
  }
  return make_family_spec(dense.sys, anchors, config);
}

Rat lipschitz2(const GroupElement& g) {
  Int a = 0, b = 0;
  IMat gi = inverse_unimodular(g.mat);
  for (Eigen::Index i = 0; i < g.mat.rows(); ++i)
    for (Eigen::Index j = 0; j < g.mat.cols(); ++j) {
      a += g.mat(i, j) * g.mat(i, j);
      b += gi(i, j) * gi(i, j);
    }
  // dist(gx, gy) <= ||g||_F^2 ||g^-1||_F^2 dist(x, y); squared distances
  // scale by the square of that factor.
  Int c = a * b;
  return Rat(c * c);
}

std::pair<SchottkySystem, FullGroupCert> avoid_step(const SchottkySystem& sys,
                                                    const AvoidanceInstance& inst,
                                                    const GroupElement& g,
                                                    const ProjHyperplane& L,
                                                    const BuildConfig& config) {
  if (inst.L0 == inst.L1 || inst.L0 == inst.L2 || inst.L1 == inst.L2)
    throw PreconditionViolated("instance hyperplanes must be distinct");
  if (!inst.L0.contains(inst.p0)) throw PreconditionViolated("p0 not on L0");
  if (inst.L1.contains(inst.p0) || inst.L2.contains(inst.p0))
    throw PreconditionViolated("p0 must avoid L1 and L2");
  if (!(inst.rho2 > 0)) throw InvalidRadii("rho2 must be positive");
  if (dist2_hyperplanes(L, inst.L2) > inst.rho2)
    throw PreconditionViolated("L is not inside the rho-tube of L2");
  if (dist2_hyperplanes(g.apply(L), inst.L1) > inst.rho2)
    throw PreconditionViolated("gL is not inside the rho-tube of L1");
  if (!sys.density) throw PreconditionViolated("system carries no density witness");
  if (!sys.attracting.tubes.empty())
    throw PreconditionViolated("attracting region must be a union of balls");
  if (!verify_system(sys).pass())
    throw PreconditionViolated("input system fails verification");

  auto w_opt = search_point_on_hyperplane(
      L,
      [&](const ProjPoint& x) {
        return !region_contains(sys.attracting, x) && !region_contains(sys.repelling, x);
      },
      config.enum_bound);
  if (!w_opt) throw SearchExhausted("no rational point on L outside A and R");
  ProjPoint w = *w_opt;
  ProjPoint w1 = g.apply(w);

  auto Lw1_opt = search_hyperplane_through_point(
      w1,
      [&](const ProjHyperplane& H) {
        if (H.covector.dot(w.coords) == 0) return false;
        return avoids_balls(sys.attracting, H);
      },
      config.enum_bound);
  if (!Lw1_opt) throw SearchExhausted("no hyperplane through gw avoiding A");
  ProjHyperplane Lw1 = *Lw1_opt;

  auto p1_opt = search_point_on_hyperplane(
      Lw1,
      [&](const ProjPoint& x) {
        if (region_contains(sys.attracting, x) || region_contains(sys.repelling, x))
          return false;
        if (dist2_point_hyperplane(x, inst.L2) <= inst.rho2) return false;
        return true;
      },
      config.enum_bound);
  if (!p1_opt) throw SearchExhausted("no helper point on the new hyperplane");
  ProjPoint p1 = *p1_opt;

  auto del1_ok = [&](const Rat& r2) {
    if (!ball_disjoint_from_region(p1, r2, sys.repelling)) return false;
    for (const Ball& b : sys.attracting.balls)
      if (!disjoint_ball_tube(b.center, b.radius2, Lw1, r2)) return false;
    if (dist2_points(w, p1) <= r2) return false;
    if (dist2_point_hyperplane(w, Lw1) <= r2) return false;
    return true;
  };
  Rat del1 = halve_radius2(inst.rho2, del1_ok, config.halving_max, "helper radius");
  SchottkySystem star = add_generator(sys, p1, Lw1, del1, del1);
  const Rank1Unipotent& u = star.generators.back().u;
  GroupElement h = g.inverse() * u.element() * g;
  if (is_identity(h.mat)) throw PreconditionViolated("helper element is trivial");
  if (h.apply(w) != w) throw PreconditionViolated("helper element does not fix w");

  auto p2_opt = search_point_near(
      w,
      [&](const ProjPoint& x) {
        if (region_contains(star.attracting, x) || region_contains(star.repelling, x))
          return false;
        ProjPoint x3 = h.apply(x);
        if (x3 == x) return false;
        if (region_contains(star.attracting, x3) || region_contains(star.repelling, x3))
          return false;
        return true;
      },
      config.perturb_min, config.perturb_max);
  if (!p2_opt) throw SearchExhausted("no throwable point near w");
  ProjPoint p2 = *p2_opt;
  ProjPoint p3 = h.apply(p2);

  auto Lp2_opt = search_hyperplane_through_point(
      p2,
      [&](const ProjHyperplane& H) {
        if (H.covector.dot(p3.coords) == 0) return false;
        return avoids_balls(star.attracting, H);
      },
      config.enum_bound);
  if (!Lp2_opt) throw SearchExhausted("no hyperplane through the throw source");
  ProjHyperplane Lp2 = *Lp2_opt;
  ProjHyperplane hLp2 = h.apply(Lp2);
  auto Lp3_opt = search_hyperplane_through_point(
      p3,
      [&](const ProjHyperplane& H) {
        if (H == hLp2) return false;
        if (H.covector.dot(p2.coords) == 0) return false;
        return avoids_balls(star.attracting, H);
      },
      config.enum_bound);
  if (!Lp3_opt) throw SearchExhausted("no hyperplane through the throw target");
  ProjHyperplane Lp3 = *Lp3_opt;

  auto del2_ok = [&](const Rat& r2) {
    if (!ball_disjoint_from_region(p2, r2, star.repelling)) return false;
    if (!ball_disjoint_from_region(p3, r2, star.repelling)) return false;
    for (const Ball& b : star.attracting.balls) {
      if (!disjoint_ball_tube(b.center, b.radius2, Lp2, r2)) return false;
      if (!disjoint_ball_tube(b.center, b.radius2, Lp3, r2)) return false;
    }
    if (!disjoint_ball_tube(p2, r2, Lp3, r2)) return false;
    if (!disjoint_ball_tube(p3, r2, Lp2, r2)) return false;
    return true;
  };
  Rat del2 = halve_radius2(del1, del2_ok, config.halving_max, "throw radius");
  auto [plus, cert] = throw_lemma(star, h, p3, p2, Lp3, Lp2, del2, del2);
  cert.adjoined = "g, through the fixed-point helper h = g^-1 u g";
  return {plus, cert};
}

std::pair<SchottkyQuadruple, StartCert> quad_start(const GroupElement& g,
                                                   const ProjPoint& p,
                                                   const GroupElement& k,
                                                   const BuildConfig& config) {
  const int n = p.dim();
  if (is_identity(g.mat)) throw PreconditionViolated("g must not be the identity");
  if (g.apply(p) != p) throw PreconditionViolated("g does not fix p");
  {
    std::vector<IMat> six;
    IMat id = IMat::Identity(n, n);
    six = {id, k.mat, (k * k).mat, g.mat, (g * k).mat, (g * k * k).mat};
    for (size_t i = 0; i < six.size(); ++i)
      for (size_t j = i + 1; j < six.size(); ++j)
        if (six[i] == six[j])
          throw PreconditionViolated("id, k, k^2, g, gk, gk^2 must be distinct");
  }
  Rat C2 = lipschitz2(g);
  GroupElement k2 = k * k;

  std::array<Anchor, 3> anchors;
  ProjPoint gp1(unit(n, 0));
  bool found = false;
  auto p1_pred = [&](const ProjPoint& p1) {
    ProjPoint p2 = k.apply(p1);
    ProjPoint p3 = k2.apply(p1);
    std::vector<ProjPoint> pts = {p1, p2, p3};
    for (int i = 0; i < 3; ++i) {
      if (pts[i] == p) return false;
      for (int j = i + 1; j < 3; ++j)
        if (pts[i] == pts[j]) return false;
    }
    for (int i = 0; i < 3; ++i) {
      ProjPoint gi = g.apply(pts[i]);
      if (gi == p) return false;
      for (int j = 0; j < 3; ++j)
        if (gi == pts[j]) return false;
    }
    auto L1_pred = [&](const ProjHyperplane& H) {
      if (H.covector.dot(p.coords) == 0) return false;
      if (H.covector.dot(p2.coords) == 0 || H.covector.dot(p3.coords) == 0) return false;
      ProjHyperplane L2c = k.apply(H);
      if (L2c.covector.dot(p.coords) == 0) return false;
      if (L2c.covector.dot(p1.coords) == 0 || L2c.covector.dot(p3.coords) == 0)
        return false;
      return true;
    };
    auto L1 = search_hyperplane_through_point(p1, L1_pred, config.enum_bound);
    if (!L1) return false;
    ProjHyperplane k2L1 = k2.apply(*L1);
    auto L3_pred = [&](const ProjHyperplane& H) {
      if (H == k2L1) return false;
      if (H.covector.dot(p.coords) == 0) return false;
      if (H.covector.dot(p1.coords) == 0 || H.covector.dot(p2.coords) == 0) return false;
      return true;
    };
    auto L3 = search_hyperplane_through_point(p3, L3_pred, config.enum_bound);
    if (!L3) return false;
    anchors = {Anchor{p1, *L1}, Anchor{p2, k.apply(*L1)}, Anchor{p3, *L3}};
    found = true;
    return true;
  };
  search_lattice_point(IMat::Identity(n, n), p1_pred, config.enum_bound);
  if (!found) throw SearchExhausted("no anchor triple for the quadruple start");

  auto del_ok = [&](const Rat& d2) {
    Rat e2 = d2 / 4;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        if (!sum_sqrt_lt(e2, d2, dist2_point_hyperplane(anchors[i].p, anchors[j].L)))
          return false;
      }
    for (int i = 0; i < 3; ++i) {
      if (dist2_points(p, anchors[i].p) <= d2) return false;
      if (dist2_point_hyperplane(p, anchors[i].L) <= d2) return false;
      for (int j = 0; j < 3; ++j)
        if (!disjoint_balls(anchors[j].p, d2, g.apply(anchors[i].p), C2 * d2))
          return false;
    }
    return true;
  };
  Rat del2 = halve_radius2(rat(1, 4), del_ok, config.halving_max, "quad start radii");
  Rat eps2 = del2 / 4;

  auto [sys, cert] = starting_system(k, anchors, eps2, del2, config);
  SchottkyQuadruple quad;
  quad.base = sys;
  for (const Anchor& a : anchors) quad.open_nbhd.add_ball(a.p, del2);
  return {quad, cert};
}

namespace {

// Assumption of the quadruple step: p outside cl(N) + R + g cl(N) + gR,
// and cl(N), g cl(N) disjoint (g images inflated by the Lipschitz bound).
bool quad_assumptions_hold(const SchottkyQuadruple& quad, const GroupElement& g,
                           const ProjPoint& p, const Rat& C2) {
  if (region_contains(quad.open_nbhd, p)) return false;
  if (region_contains(quad.base.repelling, p)) return false;
  ProjPoint gp = g.inverse().apply(p);
  if (region_contains(quad.open_nbhd, gp)) return false;
  if (region_contains(quad.base.repelling, gp)) return false;
  for (const Ball& b : quad.open_nbhd.balls)
    for (const Ball& c : quad.open_nbhd.balls)
      if (!disjoint_balls(b.center, b.radius2, g.apply(c.center), C2 * c.radius2))
        return false;
  for (const Ball& b : quad.base.attracting.balls) {
    bool inside = false;
    for (const Ball& c : quad.open_nbhd.balls)
      if (ball_inside_ball_strict(b.center, b.radius2, c.center, c.radius2)) inside = true;
    if (!inside) return false;
  }
  return true;
}

}  // namespace

QuadExtendResult quad_extend(const SchottkyQuadruple& quad, const GroupElement& g,
                             const ProjPoint& p, const GroupElement& h,
                             const BuildConfig& config) {
  if (is_identity(h.mat)) throw PreconditionViolated("h must not be the identity");
  if (g.apply(p) != p) throw PreconditionViolated("g does not fix p");
  if (!quad.base.density) throw PreconditionViolated("system carries no density witness");
  if (!quad.base.attracting.tubes.empty())
    throw PreconditionViolated("attracting region must be a union of balls");
  if (!verify_system(quad.base).pass())
    throw PreconditionViolated("input system fails verification");
  Rat C2 = lipschitz2(g);
  if (!quad_assumptions_hold(quad, g, p, C2))
    throw PreconditionViolated("quadruple assumptions fail on input");

  ProjPoint y = h.apply(p);
  GroupElement heff = h;
  std::string branch = "h";
  if (region_contains_open(quad.open_nbhd, y)) {
    branch = "g^-1hg";
    heff = g.inverse() * h * g;
    y = heff.apply(p);
    if (region_contains(quad.open_nbhd, y))
      throw PreconditionViolated("both branch points land in N");
  }
  if (y == p) throw PreconditionViolated("branch element fixes p");

  auto Ly_opt = search_hyperplane_through_point(
      y,
      [&](const ProjHyperplane& H) {
        if (H.covector.dot(p.coords) == 0) return false;
        return avoids_balls(quad.base.attracting, H);
      },
      config.enum_bound);
  if (!Ly_opt) throw SearchExhausted("no hyperplane through hp avoiding A");
  ProjHyperplane Ly = *Ly_opt;

  std::vector<ProjPoint> old_centers;
  for (const Ball& b : quad.open_nbhd.balls) old_centers.push_back(b.center);
  auto py_opt = search_point_on_hyperplane(
      Ly,
      [&](const ProjPoint& x) {
        if (x == p) return false;
        if (region_contains(quad.open_nbhd, x)) return false;
        if (region_contains(quad.base.repelling, x)) return false;
        ProjPoint gx = g.apply(x);
        if (gx == x || region_contains(quad.open_nbhd, gx)) return false;
        for (const Ball& b : quad.open_nbhd.balls) {
          if (g.apply(b.center) == x) return false;
          if (dist2_points(x, g.apply(b.center)) <= C2 * b.radius2) return false;
        }
        return true;
      },
      config.enum_bound);
  if (!py_opt) throw SearchExhausted("no attraction point on the helper hyperplane");
  ProjPoint py = *py_opt;

  auto rho_ok = [&](const Rat& r2) {
    Rat quarter = r2 / 4;
    if (!ball_disjoint_from_region(py, quarter, quad.base.repelling)) return false;
    for (const Ball& b : quad.base.attracting.balls)
      if (!disjoint_ball_tube(b.center, b.radius2, Ly, quarter)) return false;
    if (dist2_points(p, py) <= r2) return false;
    if (dist2_point_hyperplane(p, Ly) <= quarter) return false;
    for (const Ball& b : quad.open_nbhd.balls) {
      if (!disjoint_balls(py, r2, g.apply(b.center), C2 * b.radius2)) return false;
      if (!disjoint_balls(b.center, b.radius2, g.apply(py), C2 * r2)) return false;
    }
    if (!disjoint_balls(py, r2, g.apply(py), C2 * r2)) return false;
    return true;
  };
  Rat rho2 = halve_radius2(rat(1, 16), rho_ok, config.halving_max, "quad helper radius");

  SchottkySystem S0 = add_generator(quad.base, py, Ly, rho2 / 4, rho2 / 4);
  Region N0 = quad.open_nbhd;
  N0.add_ball(py, rho2);
  const Rank1Unipotent& u = S0.generators.back().u;

  GroupElement heff_inv = heff.inverse();
  GroupElement f;
  bool f_found = false;
  for (int mf = 1; mf <= 8 && !f_found; ++mf) {
    GroupElement cand = heff_inv * power(u, mf)->element() * heff;
    if (cand == g || cand == g.inverse()) continue;
    f = cand;
    f_found = true;
  }
  if (!f_found) throw SearchExhausted("no usable commuting conjugate power");
  if (f.apply(p) != p) throw PreconditionViolated("helper element does not fix p");

  std::vector<ProjPoint> centers0;
  for (const Ball& b : N0.balls) centers0.push_back(b.center);
  auto p1_pred = [&](const ProjPoint& x) {
    if (x == p) return false;
    if (region_contains(N0, x) || region_contains(S0.repelling, x)) return false;
    ProjPoint x2 = f.apply(x);
    if (x2 == x || x2 == p) return false;
    if (region_contains(N0, x2) || region_contains(S0.repelling, x2)) return false;
    ProjPoint x3 = g.apply(x);
    ProjPoint x4 = g.apply(x2);
    std::vector<ProjPoint> four = {x, x2, x3, x4};
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = i + 1; j < 4; ++j)
        if (four[i] == four[j]) return false;
    if (region_contains(N0, x3) || region_contains(N0, x4)) return false;
    for (const Ball& b : N0.balls) {
      ProjPoint gb = g.apply(b.center);
      if (gb == x || gb == x2) return false;
      if (dist2_points(x, gb) <= C2 * b.radius2) return false;
      if (dist2_points(x2, gb) <= C2 * b.radius2) return false;
    }
    return true;
  };
  auto p1_opt = search_point_near(p, p1_pred, config.perturb_min, config.perturb_max);
  if (!p1_opt) throw SearchExhausted("no throwable point near p");
  ProjPoint p1 = *p1_opt;
  ProjPoint q2 = f.apply(p1);
  ProjPoint q3 = g.apply(p1);
  ProjPoint q4 = g.apply(q2);

  auto L1_opt = search_hyperplane_through_point(
      p1,
      [&](const ProjHyperplane& H) {
        if (H.covector.dot(p.coords) == 0) return false;
        for (const ProjPoint* x : {&q2, &q3, &q4})
          if (H.covector.dot(x->coords) == 0) return false;
        return avoids_balls(S0.attracting, H);
      },
      config.enum_bound);
  if (!L1_opt) throw SearchExhausted("no hyperplane through the quad throw source");
  ProjHyperplane L1 = *L1_opt;
  ProjHyperplane fL1 = f.apply(L1);
  auto L2_opt = search_hyperplane_through_point(
      q2,
      [&](const ProjHyperplane& H) {
        if (H == fL1) return false;
        if (H.covector.dot(p.coords) == 0) return false;
        for (const ProjPoint* x : {&p1, &q3, &q4})
          if (H.covector.dot(x->coords) == 0) return false;
        return avoids_balls(S0.attracting, H);
      },
      config.enum_bound);
  if (!L2_opt) throw SearchExhausted("no hyperplane through the quad throw target");
  ProjHyperplane L2 = *L2_opt;

  auto sigma_ok = [&](const Rat& s2) {
    Rat big = s2 * 4;
    for (const ProjPoint* x : {&p1, &q2}) {
      if (!ball_disjoint_from_region(*x, s2, S0.repelling)) return false;
      if (dist2_points(p, *x) <= big) return false;
    }
    for (const Ball& b : S0.attracting.balls) {
      if (!disjoint_ball_tube(b.center, b.radius2, L1, s2)) return false;
      if (!disjoint_ball_tube(b.center, b.radius2, L2, s2)) return false;
    }
    if (!disjoint_ball_tube(p1, s2, L2, s2)) return false;
    if (!disjoint_ball_tube(q2, s2, L1, s2)) return false;
    if (dist2_point_hyperplane(p, L1) <= s2) return false;
    if (dist2_point_hyperplane(p, L2) <= s2) return false;
    for (const ProjPoint* x : {&p1, &q2}) {
      for (const Ball& b : N0.balls) {
        if (!disjoint_balls(*x, big, g.apply(b.center), C2 * b.radius2)) return false;
        if (!disjoint_balls(b.center, b.radius2, g.apply(*x), C2 * big)) return false;
      }
      for (const ProjPoint* x2 : {&p1, &q2})
        if (!disjoint_balls(*x, big, g.apply(*x2), C2 * big)) return false;
    }
    return true;
  };
  Rat sigma2 = halve_radius2(rho2 / 16, sigma_ok, config.halving_max, "quad throw radius");

  auto [Splus, cert] = throw_lemma(S0, f, q2, p1, L2, L1, sigma2, sigma2);
  cert.adjoined = branch + ", through the commuting conjugate f";
  SchottkyQuadruple out;
  out.base = Splus;
  out.open_nbhd = N0;
  out.open_nbhd.add_ball(p1, sigma2 * 4);
  out.open_nbhd.add_ball(q2, sigma2 * 4);
  if (!quad_assumptions_hold(out, g, p, C2))
    throw PreconditionViolated("quadruple assumptions fail on output");
  return {out, cert, branch};
}

}  // namespace schottky
