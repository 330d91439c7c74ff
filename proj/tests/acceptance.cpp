// Acceptance harness: one pass/fail line per criterion. argv[1] is the path
// to the command-line binary, used by the determinism criterion.
#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "schottky/serialize.hpp"

using namespace schottky;
using Clock = std::chrono::steady_clock;

namespace {

IVec vec3(long a, long b, long c) {
  IVec v(3);
  v << a, b, c;
  return v;
}

ProjPoint pt(long a, long b, long c) { return ProjPoint(vec3(a, b, c)); }
ProjHyperplane hp(long a, long b, long c) { return ProjHyperplane(vec3(a, b, c)); }

GroupElement random_element(std::mt19937_64& rng, int steps, int span) {
  std::uniform_int_distribution<int> idx(0, 2), coef(-span, span);
  GroupElement g;
  g.mat = IMat::Identity(3, 3);
  for (int s = 0; s < steps; ++s) {
    int i = idx(rng), j = idx(rng);
    if (i == j) continue;
    g.mat = g.mat * elementary(3, i, j, Int(coef(rng)));
  }
  return g;
}

Word random_word(std::mt19937_64& rng, int count, int maxlen) {
  std::uniform_int_distribution<int> len(1, maxlen), gen(0, count - 1), ex(1, 3);
  std::uniform_int_distribution<int> sign(0, 1);
  Word w;
  int prev = -1, l = len(rng);
  for (int i = 0; i < l; ++i) {
    int gi = gen(rng);
    while (gi == prev) gi = gen(rng);
    w.letters.emplace_back(gi, Int((sign(rng) ? 1 : -1) * ex(rng)));
    prev = gi;
  }
  return w;
}

bool words_free(const SchottkySystem& sys, std::mt19937_64& rng, int trials,
                std::string& why) {
  for (int t = 0; t < trials; ++t) {
    Word w = random_word(rng, static_cast<int>(sys.generators.size()), 8);
    if (is_identity(evaluate_word(sys, w).mat)) {
      why = "reduced word evaluated to the identity";
      return false;
    }
  }
  return true;
}

SchottkySystem single_e12_system() {
  Rank1Unipotent u = from_pair(pt(1, 0, 0), hp(0, 1, 0));
  SchottkySystem sys;
  sys.generators.push_back({*power(u, 22), rat(1, 100), rat(1, 4)});
  sys.attracting.add_ball(pt(1, 0, 0), rat(1, 100));
  sys.repelling.add_ball(pt(1, 0, 0), rat(1, 100));
  sys.repelling.add_tube(hp(0, 1, 0), rat(1, 4));
  return sys;
}

std::array<Anchor, 3> start_anchors() {
  return {Anchor{pt(1, 0, 0), hp(0, 1, 1)}, Anchor{pt(0, 1, 0), hp(1, 0, 1)},
          Anchor{pt(0, 0, 1), hp(1, -1, 0)}};
}

GroupElement three_cycle() {
  GroupElement k;
  k.mat = IMat(3, 3);
  k.mat << 0, 0, 1, 1, 0, 0, 0, 1, 0;
  return k;
}

bool criterion1(std::string& why) {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<long> de(16, 400), coord(-20, 20);
  Rank1Unipotent base = from_pair(pt(1, 0, 0), hp(0, 1, 0));
  for (int trial = 0; trial < 20; ++trial) {
    Rank1Unipotent u = conjugate(base, random_element(rng, 4, 3));
    long d_eps = de(rng);
    std::uniform_int_distribution<long> dd(2, d_eps);
    Rat eps2 = rat(1, d_eps), del2 = rat(1, dd(rng));
    Int m = contraction_power(u, eps2, del2);
    Rank1Unipotent v = *power(u, m);
    if (!certify_contraction(v, eps2, del2)) {
      why = "certified power fails its own certificate";
      return false;
    }
    int checked = 0;
    while (checked < 1000) {
      IVec x = vec3(coord(rng), coord(rng), coord(rng));
      if (is_zero(x)) continue;
      ProjPoint px(x);
      if (dist2_point_hyperplane(px, v.hyperplane()) < del2) continue;
      for (int k : {1, -1})
        if (!(dist2_points(ProjPoint(v.apply_power(Int(k), px.coords)), v.point()) <
              eps2)) {
          why = "sampled point escaped the attracting ball";
          return false;
        }
      ++checked;
    }
  }
  return true;
}

bool criterion2(std::string& why) {
  std::mt19937_64 rng(102);
  BuildConfig config;
  std::vector<std::pair<std::string, SchottkySystem>> systems;

  systems.emplace_back(
      "dense", build_profinitely_dense(pt(1, 0, 0), hp(0, 1, 0), rat(1, 100),
                                       rat(1, 50), config)
                   .sys);
  systems.emplace_back("added", add_generator(single_e12_system(), pt(1, 1, 1),
                                              hp(1, 0, -1), rat(1, 4000), rat(1, 4000)));

  DenseResult dense2 = build_profinitely_dense(pt(1, 1, 1), hp(1, -1, 0), rat(1, 400),
                                               rat(1, 400), config);
  GroupElement g;
  g.mat = IMat(3, 3);
  g.mat << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  auto [thrown, tcert] = throw_lemma(dense2.sys, g, pt(0, 1, 0), pt(1, 0, 0),
                                     hp(1, 0, 1), hp(0, 1, 1), rat(1, 400), rat(1, 400));
  (void)tcert;
  systems.emplace_back("thrown", thrown);

  auto [started, scert] =
      starting_system(three_cycle(), start_anchors(), rat(1, 16), rat(1, 16), config);
  (void)scert;
  systems.emplace_back("started", started);

  FamilySpec spec = default_family_spec(3, 3, config);
  systems.emplace_back("family member", family_member(spec, {1, 0, 1}));

  for (auto& [name, sys] : systems) {
    if (!verify_system(sys).pass()) {
      why = name + " system failed verification";
      return false;
    }
    std::string inner;
    if (!words_free(sys, rng, 1000, inner)) {
      why = name + " system: " + inner;
      return false;
    }
  }
  return true;
}

bool criterion3(std::string& why) {
  if (closure_order(elementary_gens_mod(3, 3)) != 5616) {
    why = "order mod 3 is not 5616";
    return false;
  }
  if (closure_order(elementary_gens_mod(3, 4)) != 43008) {
    why = "order mod 4 is not 43008";
    return false;
  }
  if (sl_order(3, 3) != 5616 || sl_order(3, 4) != 43008) {
    why = "formula disagrees with BFS";
    return false;
  }
  GroupElement e12;
  e12.mat = elementary(3, 0, 1);
  if (closure_order({reduce_mod(e12, 3)}) != 3) {
    why = "single elementary generator mod 3 has wrong order";
    return false;
  }
  return true;
}

bool criterion4(std::string& why) {
  BuildConfig config;
  DenseResult res;
  try {
    res = build_profinitely_dense(pt(1, 0, 0), hp(0, 1, 0), rat(1, 100), rat(1, 50),
                                  config);
  } catch (const SearchExhausted& e) {
    why = std::string("search exhausted: ") + e.what();
    return false;
  }
  if (res.sys.generators.size() != 12) {
    why = "expected 12 generators";
    return false;
  }
  if (!verify_system(res.sys).pass()) {
    why = "system failed verification";
    return false;
  }
  std::vector<GroupElement> gens;
  for (const SchottkyGenerator& g : res.sys.generators) gens.push_back(g.u.element());
  if (!is_surjective(gens, 3) || !is_surjective(gens, 4)) {
    why = "not surjective mod 3 and mod 4";
    return false;
  }
  Int t = exponent_of(3, 3);
  int first_batch = 0;
  for (std::size_t i = 0; i < res.recipe.size(); ++i) {
    const RecipeEntry& rec = res.recipe[i];
    if (rec.d != 3) continue;
    ++first_batch;
    if (!in_kernel(rec.g, 3)) {
      why = "first-batch conjugator is not in K_3";
      return false;
    }
    if (rec.s % t != 1) {
      why = "first-batch exponent is not 1 mod the group exponent";
      return false;
    }
    IMat expect =
        rec.g.mat * elementary(3, rec.source_i, rec.source_j, rec.s) *
        inverse_unimodular(rec.g.mat);
    if (res.sys.generators[i].u.matrix() != expect) {
      why = "generator is not structurally g e^s g^-1";
      return false;
    }
  }
  if (first_batch != 6) {
    why = "expected 6 first-batch generators";
    return false;
  }
  return true;
}

bool criterion5(std::string& why) {
  BuildConfig config;
  FamilySpec spec = default_family_spec(3, 8, config);
  for (int mask = 0; mask < 256; ++mask) {
    std::vector<int> bits(8);
    for (int i = 0; i < 8; ++i) bits[i] = (mask >> i) & 1;
    if (!verify_system(family_member(spec, bits)).pass()) {
      why = "member " + std::to_string(mask) + " failed verification";
      return false;
    }
  }
  std::mt19937_64 rng(105);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> f(8), g(8);
    do
      for (int i = 0; i < 8; ++i) {
        f[i] = bit(rng);
        g[i] = bit(rng);
      }
    while (f == g);
    FullGroupCert cert = family_union_cert(spec, f, g);
    Z2PairCert re = z2_pair_cert(cert.pair.u, cert.pair.w);
    if (!re.ok() || !cert.density.valid()) {
      why = "union certificate failed revalidation";
      return false;
    }
  }
  return true;
}

bool criterion6(std::string& why) {
  BuildConfig config;
  GroupElement k = three_cycle();
  auto [sys, cert] = starting_system(k, start_anchors(), rat(1, 16), rat(1, 16), config);
  if (!validate_start_cert(sys, cert)) {
    why = "certificate failed validation";
    return false;
  }
  GroupElement w = evaluate_word(sys, cert.word);
  if (w != sys.generators[cert.intersection_gen].u.element()) {
    why = "word does not evaluate to the witness generator";
    return false;
  }
  GroupElement u1pow = power(sys.generators[cert.base_gen].u, cert.conj_exponent)->element();
  if (w != k * u1pow * k.inverse()) {
    why = "witness is not k u1^e k^-1";
    return false;
  }
  return true;
}

bool criterion7(std::string& why) {
  std::mt19937_64 rng(107);
  std::uniform_int_distribution<long> d(-5, 5);
  int done = 0;
  while (done < 1000) {
    IVec f1 = vec3(d(rng), d(rng), d(rng)), f2 = vec3(d(rng), d(rng), d(rng));
    if (is_zero(f1) || is_zero(f2)) continue;
    ProjHyperplane L1(f1), L2(f2);
    Rat exact = dist2_hyperplanes(L1, L2);
    double sampled = 0;
    auto scan = [&](const ProjHyperplane& A, const ProjHyperplane& B) {
      IMat K = kernel_basis(A.covector);
      for (long a = -16; a <= 16; ++a)
        for (long b = -16; b <= 16; ++b) {
          if (a == 0 && b == 0) continue;
          IVec x = a * K.col(0) + b * K.col(1);
          Rat v = dist2_point_hyperplane(ProjPoint(x), B);
          if (v > exact) return false;
          sampled = std::max(sampled, v.get_d());
        }
      return true;
    };
    if (!scan(L1, L2) || !scan(L2, L1)) {
      why = "a sampled distance exceeded the exact dual value";
      return false;
    }
    if (exact.get_d() - sampled >= 5e-2) {
      why = "exact value is not approached by the sampled grid";
      return false;
    }
    ++done;
  }
  return true;
}

int run(const std::string& cmd) {
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool criterion8(const std::string& cli, std::string& why) {
  char tmpl[] = "/tmp/schottky-accept-XXXXXX";
  if (!mkdtemp(tmpl)) {
    why = "mkdtemp failed";
    return false;
  }
  std::string dir = tmpl;
  std::string build = cli +
                      " build-dense --p 1,0,0 --L 0,1,0 --eps 1/100 --delta 1/50"
                      " --seed 7 --out ";
  if (run(build + dir + "/a.json") != 0 || run(build + dir + "/b.json") != 0) {
    why = "build-dense failed";
    return false;
  }
  std::string a = slurp(dir + "/a.json");
  if (a.empty() || a != slurp(dir + "/b.json")) {
    why = "repeated runs are not byte-identical";
    return false;
  }
  std::string start = cli +
                      " start --k 0,0,1,1,0,0,0,1,0 --p1 1,0,0 --L1 0,1,1"
                      " --p3 0,0,1 --L3 1,-1,0 --eps 1/16 --delta 1/16 --out " +
                      dir + "/s.json";
  if (run(start) != 0) {
    why = "start failed";
    return false;
  }
  for (const char* f : {"/a.json", "/s.json"})
    if (run(cli + " verify --system " + dir + f + " > /dev/null") != 0) {
      why = std::string("verify rejected ") + f;
      return false;
    }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int budget_s;
    const char* name;
    std::function<bool(std::string&)> fn;
  };
  std::string cli = argc > 1 ? argv[1] : "";
  std::vector<Criterion> criteria = {
      {10, "contraction-bound soundness", criterion1},
      {150, "ping-pong freeness", criterion2},
      {5, "congruence oracles", criterion3},
      {600, "dense builder end-to-end", criterion4},
      {300, "selection family", criterion5},
      {60, "intersection start certificate", criterion6},
      {60, "hyperplane-distance duality", criterion7},
      {600, "determinism and round-trip",
       [&cli](std::string& why) { return criterion8(cli, why); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = Clock::now();
    std::string why;
    bool ok = false;
    try {
      ok = criteria[i].fn(why);
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (ok && secs > criteria[i].budget_s) {
      ok = false;
      why = "over time budget";
    }
    std::printf("criterion %zu (%s): %s (%.1fs)%s%s\n", i + 1, criteria[i].name,
                ok ? "pass" : "FAIL", secs, why.empty() ? "" : " - ", why.c_str());
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
