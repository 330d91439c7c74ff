#include "schottky/schottky.hpp"

#include <random>
#include <sstream>

namespace schottky {

std::vector<GroupElement> SchottkySystem::elements() const {
  std::vector<GroupElement> out;
  out.reserve(generators.size());
  for (const SchottkyGenerator& g : generators) out.push_back(g.u.element());
  return out;
}

namespace {

std::string rat_str(const Rat& r) { return r.get_str(); }

}  // namespace

VerifyReport verify_system(const SchottkySystem& sys) {
  VerifyReport rep;
  if (sys.generators.empty()) {
    rep.violations.push_back({0, -1, -1, "empty generator list"});
    return rep;
  }
  const int n = static_cast<int>(sys.generators.size());
  for (int i = 0; i < n; ++i) {
    const SchottkyGenerator& g = sys.generators[i];
    if (!(g.eps2 > 0 && g.del2 >= g.eps2))
      rep.violations.push_back({0, i, -1,
                                "need del2 >= eps2 > 0, got eps2=" + rat_str(g.eps2) +
                                    " del2=" + rat_str(g.del2)});
  }
  for (size_t b = 0; b < sys.attracting.balls.size(); ++b)
    if (!ball_inside_region(sys.attracting.balls[b].center,
                            sys.attracting.balls[b].radius2, sys.repelling))
      rep.violations.push_back(
          {0, static_cast<int>(b), -1, "ball of A not certified inside R"});
  for (size_t t = 0; t < sys.attracting.tubes.size(); ++t)
    if (!tube_inside_region(sys.attracting.tubes[t].hyperplane,
                            sys.attracting.tubes[t].radius2, sys.repelling))
      rep.violations.push_back(
          {0, static_cast<int>(t), -1, "tube of A not certified inside R"});
  for (int i = 0; i < n; ++i) {
    const SchottkyGenerator& g = sys.generators[i];
    if (!certify_contraction(g.u, g.eps2, g.del2))
      rep.violations.push_back(
          {1, i, -1,
           "contraction certificate fails: |m|=" + Int(abs(g.u.m)).get_str() +
               " s=" + g.u.scale().get_str()});
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const SchottkyGenerator& gi = sys.generators[i];
      const SchottkyGenerator& gj = sys.generators[j];
      if (!disjoint_ball_tube(gi.u.point(), gi.eps2, gj.u.hyperplane(), gj.del2)) {
        std::ostringstream os;
        os << "dist2(p_" << i << ", L_" << j << ") = "
           << rat_str(dist2_point_hyperplane(gi.u.point(), gj.u.hyperplane()))
           << " does not exceed (eps+del)^2";
        rep.violations.push_back({2, i, j, os.str()});
      }
    }
  for (int i = 0; i < n; ++i) {
    const SchottkyGenerator& g = sys.generators[i];
    if (!ball_inside_region(g.u.point(), g.eps2, sys.attracting))
      rep.violations.push_back({3, i, -1, "attracting ball not certified inside A"});
    if (!tube_inside_region(g.u.hyperplane(), g.del2, sys.repelling))
      rep.violations.push_back({4, i, -1, "repelling tube not certified inside R"});
  }
  return rep;
}

GroupElement evaluate_word(const SchottkySystem& sys, const Word& w) {
  const int count = static_cast<int>(sys.generators.size());
  int prev = -1;
  for (const auto& [idx, exp] : w.letters) {
    if (idx < 0 || idx >= count) throw IndexOutOfRange("generator index " + std::to_string(idx));
    if (exp == 0) throw PreconditionViolated("zero exponent in word");
    if (idx == prev) throw PreconditionViolated("word is not reduced");
    prev = idx;
  }
  const int n = sys.dim();
  IMat acc = IMat::Identity(n, n);
  for (const auto& [idx, exp] : w.letters) {
    const Rank1Unipotent& u = sys.generators[idx].u;
    // acc * (I + c v f^T) = acc + c (acc v) f^T.
    Int c = exp * u.m;
    acc += (acc * u.v) * (c * u.f).transpose();
  }
  GroupElement g;
  g.mat = acc;
  return g;
}

SchottkySystem add_generator(const SchottkySystem& sys, const ProjPoint& p,
                             const ProjHyperplane& L, const Rat& eps2, const Rat& del2) {
  if (!(eps2 > 0 && del2 >= eps2))
    throw InvalidRadii("need del2 >= eps2 > 0");
  Rank1Unipotent base = from_pair(p, L);
  if (!ball_disjoint_from_region(p, eps2, sys.repelling))
    throw PreconditionViolated("[p]_eps is not certified disjoint from R");
  if (!sys.attracting.tubes.empty())
    throw PreconditionViolated("[L]_del cannot avoid a region containing tubes");
  for (const Ball& b : sys.attracting.balls)
    if (!disjoint_ball_tube(b.center, b.radius2, L, del2))
      throw PreconditionViolated("[L]_del is not certified disjoint from A");
  Int m = contraction_power(base, eps2, del2);
  SchottkySystem out = sys;
  SchottkyGenerator g;
  g.u = *power(base, m);
  g.eps2 = eps2;
  g.del2 = del2;
  out.generators.push_back(g);
  out.attracting.add_ball(p, eps2);
  out.repelling.add_tube(L, del2);
  VerifyReport rep = verify_system(out);
  if (!rep.pass())
    throw PreconditionViolated("extended system fails verification: " +
                               rep.violations.front().detail);
  return out;
}

Z2PairCert z2_pair_cert(const Rank1Unipotent& u, const GroupElement& w) {
  Z2PairCert cert;
  cert.u = u;
  cert.w = w;
  const Eigen::Index n = w.mat.rows();
  IMat nil = w.mat - IMat::Identity(n, n);
  IMat pw = IMat::Identity(n, n);
  for (Eigen::Index k = 0; k < n; ++k) pw = pw * nil;
  cert.unipotence = true;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (pw(i, j) != 0) cert.unipotence = false;
  IMat um = u.matrix();
  cert.commutation = (um * w.mat == w.mat * um);
  // Independence: w - I is not a rational multiple of u - I.
  IMat m1 = um - IMat::Identity(n, n);
  IMat m2 = nil;
  Eigen::Index ri = 0, rj = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (m1(i, j) != 0) {
        ri = i;
        rj = j;
      }
  bool proportional = true;
  for (Eigen::Index i = 0; i < n && proportional; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (m2(i, j) * m1(ri, rj) != m1(i, j) * m2(ri, rj)) {
        proportional = false;
        break;
      }
  cert.independence = !proportional;
  return cert;
}

std::pair<SchottkySystem, FullGroupCert> throw_lemma(
    const SchottkySystem& sys, const GroupElement& g, const ProjPoint& p1,
    const ProjPoint& p2, const ProjHyperplane& L1, const ProjHyperplane& L2,
    const Rat& eps2, const Rat& del2) {
  if (!(eps2 > 0 && del2 >= eps2)) throw InvalidRadii("need del2 >= eps2 > 0");
  if (!sys.density)
    throw PreconditionViolated("system carries no density witness");
  Rank1Unipotent u1 = from_pair(p1, L1);
  Rank1Unipotent u2 = from_pair(p2, L2);
  if (g.apply(p2) != p1) throw PreconditionViolated("condition 3: p1 != g p2");
  if (g.apply(L2) == L1) throw PreconditionViolated("condition 3: L1 = g L2");
  if (!ball_disjoint_from_region(p1, eps2, sys.repelling) ||
      !ball_disjoint_from_region(p2, eps2, sys.repelling))
    throw PreconditionViolated("condition 1: new ball meets R");
  if (!sys.attracting.tubes.empty())
    throw PreconditionViolated("condition 1: A contains tubes");
  for (const Ball& b : sys.attracting.balls)
    if (!disjoint_ball_tube(b.center, b.radius2, L1, del2) ||
        !disjoint_ball_tube(b.center, b.radius2, L2, del2))
      throw PreconditionViolated("condition 1: new tube meets A");
  if (!disjoint_ball_tube(p1, eps2, L2, del2) ||
      !disjoint_ball_tube(p2, eps2, L1, del2))
    throw PreconditionViolated("condition 2: cross ball/tube overlap");
  Int m1 = contraction_power(u1, eps2, del2);
  Int m2 = contraction_power(u2, eps2, del2);
  Int m = m1 > m2 ? m1 : m2;
  Rank1Unipotent v1 = *power(u1, m);
  Rank1Unipotent v2 = *power(u2, m);
  SchottkySystem out = sys;
  out.generators.push_back({v1, eps2, del2});
  out.generators.push_back({v2, eps2, del2});
  out.attracting.add_ball(p1, eps2);
  out.attracting.add_ball(p2, eps2);
  out.repelling.add_tube(L1, del2);
  out.repelling.add_tube(L2, del2);
  VerifyReport rep = verify_system(out);
  if (!rep.pass())
    throw PreconditionViolated("thrown system fails verification: " +
                               rep.violations.front().detail);
  FullGroupCert cert;
  GroupElement ginv = g.inverse();
  GroupElement conj = ginv * v1.element() * g;
  cert.pair = z2_pair_cert(v2, conj);
  if (!cert.pair.ok()) throw PreconditionViolated("Z^2 pair certificate failed");
  cert.density = *sys.density;
  cert.adjoined = "g";
  return {out, cert};
}

IMat pair_frame(const ProjPoint& p, const ProjHyperplane& L) {
  if (!L.contains(p)) throw PointNotOnHyperplane("pair_frame");
  const Eigen::Index n = p.coords.size();
  IMat K = kernel_basis(L.covector);
  IVec a = solve_integer(K, p.coords);
  IMat U1 = complete_to_unimodular(a);
  IMat B = K * U1;
  IMat C(n, n);
  C.leftCols(n - 1) = B;
  C.col(n - 1) = dual_vector(L.covector);
  if (det(C) < 0) C.col(1) = -C.col(1);
  if (det(C) != 1) throw PreconditionViolated("pair frame is not unimodular");
  return C;
}

namespace {

bool pair_close(const GroupElement& g, const ProjPoint& p1, const ProjHyperplane& L1,
                const ProjPoint& p2, const ProjHyperplane& L2, const Rat& eps2,
                const Rat& del2) {
  return dist2_points(g.apply(p1), p2) < eps2 &&
         dist2_hyperplanes(g.apply(L1), L2) < del2;
}

}  // namespace

GroupElement conjugator_search(const std::pair<ProjPoint, ProjHyperplane>& src,
                               const std::pair<ProjPoint, ProjHyperplane>& dst,
                               const Rat& eps2, const Rat& del2,
                               std::optional<long> kernel_mod,
                               const SearchBudget& budget, std::uint64_t seed) {
  const ProjPoint& p1 = src.first;
  const ProjHyperplane& L1 = src.second;
  const ProjPoint& p2 = dst.first;
  const ProjHyperplane& L2 = dst.second;
  if (!L1.contains(p1) || !L2.contains(p2))
    throw PointNotOnHyperplane("conjugator_search endpoints");
  const int n = p1.dim();
  GroupElement id;
  id.mat = IMat::Identity(n, n);
  if (p1 == p2 && L1 == L2) return id;
  // Exact transporter between incident pairs.
  {
    GroupElement g;
    g.mat = pair_frame(p2, L2) * inverse_unimodular(pair_frame(p1, L1));
    if (!kernel_mod || in_kernel(g, *kernel_mod)) return g;
  }
  if (kernel_mod) {
    // Kernel shears aimed at the target pair: I + d N P2 F2^T moves any pair
    // in general position toward (p2, L2) as N grows. A kernel element k0
    // breaks degeneracy when the source pair is orthogonal to the target.
    long d = *kernel_mod;
    std::vector<IMat> k0s;
    k0s.push_back(IMat::Identity(n, n));
    for (int c = 1; c <= 2; ++c)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) k0s.push_back(elementary(n, i, j, Int(c) * d));
    for (const IMat& k0 : k0s) {
      IVec vp = k0 * p1.coords;
      IVec fp = inverse_unimodular(k0).transpose() * L1.covector;
      if (L2.covector.dot(vp) == 0 || fp.dot(p2.coords) == 0) continue;
      Int N = 1;
      for (int step = 0; step < budget.shear_doublings; ++step, N *= 2) {
        IMat shear = IMat::Identity(n, n);
        Int c = Int(d) * N;
        shear += (c * p2.coords) * L2.covector.transpose();
        GroupElement g;
        g.mat = shear * k0;
        if (pair_close(g, p1, L1, p2, L2, eps2, del2)) return g;
      }
      break;
    }
  }
  // Seeded bounded word search over elementary generators (d-th powers under
  // a kernel constraint).
  std::mt19937_64 rng(seed);
  Int step_size = kernel_mod ? Int(*kernel_mod) : Int(1);
  std::uniform_int_distribution<int> pick_row(0, n - 1);
  std::uniform_int_distribution<int> pick_sign(0, 1);
  std::uniform_int_distribution<int> pick_len(1, budget.depth > 0 ? budget.depth : 1);
  for (long it = 0; it < budget.samples && budget.depth > 0; ++it) {
    IMat acc = IMat::Identity(n, n);
    int len = pick_len(rng);
    for (int l = 0; l < len; ++l) {
      int i = pick_row(rng), j = pick_row(rng);
      if (i == j) j = (j + 1) % n;
      Int c = pick_sign(rng) ? step_size : Int(-step_size);
      acc = acc * elementary(n, i, j, c);
    }
    GroupElement g;
    g.mat = acc;
    if (kernel_mod && !in_kernel(g, *kernel_mod)) continue;
    if (pair_close(g, p1, L1, p2, L2, eps2, del2)) return g;
  }
  throw SearchExhausted("conjugator_search: depth " + std::to_string(budget.depth) +
                        ", samples " + std::to_string(budget.samples) +
                        ", shear doublings " + std::to_string(budget.shear_doublings));
}

}  // namespace schottky
