#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "schottky/serialize.hpp"

using namespace schottky;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw ParseError("cannot write " + out);
  f << text;
}

std::vector<long> parse_moduli(const std::string& s) {
  std::vector<long> moduli;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) moduli.push_back(std::stol(item));
  return moduli;
}

std::vector<int> parse_bits(const std::string& s) {
  std::vector<int> bits;
  for (char c : s) {
    if (c == ',') continue;
    if (c != '0' && c != '1') throw ParseError("bit strings use 0 and 1 only");
    bits.push_back(c - '0');
  }
  return bits;
}

GroupElement parse_element(const std::string& s, int n) {
  IMat m = parse_imat(s, n);
  if (det(m) != 1) throw ParseError("matrix determinant is not 1");
  GroupElement g;
  g.mat = m;
  return g;
}

// The document kinds verify understands: a bare system, or any result kind
// that carries one (re-validating the attached certificates).
int run_verify(const std::string& path, const std::string& out) {
  Json doc = parse_json(read_file(path));
  std::string kind = doc.contains("kind") ? doc.at("kind").get<std::string>() : "";
  const Json& payload = doc.contains("payload") ? doc.at("payload") : doc;
  SchottkySystem sys;
  bool certs_ok = true;
  auto check_full = [&](const Json& j) {
    FullGroupCert cert = full_from_json(j);
    Z2PairCert re = z2_pair_cert(cert.pair.u, cert.pair.w);
    if (!re.ok() || !cert.density.valid()) certs_ok = false;
  };
  if (kind == "system") {
    sys = system_from_json(payload);
  } else if (kind == "dense-result") {
    sys = dense_from_json(payload).sys;
  } else if (kind == "start-result") {
    sys = system_from_json(payload.at("system"));
    StartCert cert = start_from_json(payload.at("cert"));
    if (!validate_start_cert(sys, cert)) certs_ok = false;
  } else if (kind == "extend-result") {
    sys = system_from_json(payload.at("system"));
    check_full(payload.at("cert"));
  } else if (kind == "quad-start-result") {
    SchottkyQuadruple quad = quadruple_from_json(payload.at("quad"));
    sys = quad.base;
    StartCert cert = start_from_json(payload.at("cert"));
    if (!validate_start_cert(sys, cert)) certs_ok = false;
  } else if (kind == "quad-extend-result") {
    sys = quadruple_from_json(payload.at("quad")).base;
    check_full(payload.at("cert"));
  } else if (kind == "full-group-cert") {
    check_full(payload.at("cert"));
    sys = system_from_json(payload.at("system"));
  } else {
    throw ParseError("unrecognized document kind: " + kind);
  }
  VerifyReport rep = verify_system(sys);
  emit(out, dump_json(document("verify-report", to_json(rep))));
  if (!rep.pass() || !certs_ok) {
    for (const Violation& v : rep.violations)
      std::cerr << "condition " << v.condition << ": " << v.detail << "\n";
    if (!certs_ok) std::cerr << "attached certificate failed re-validation\n";
    return 1;
  }
  return 0;
}

int run_orbit_trace(const std::string& path, int length, long samples,
                    const std::string& start, std::uint64_t seed,
                    const std::string& out) {
  Json payload = open_document(read_file(path), "system");
  SchottkySystem sys = system_from_json(payload);
  VerifyReport rep = verify_system(sys);
  if (!rep.pass()) {
    std::cerr << "system fails verification\n";
    return 1;
  }
  ProjPoint x0(parse_ivec(start));
  // Outside the contraction guarantee when the start point meets some
  // generator's repelling tube.
  bool outside = false;
  for (const SchottkyGenerator& g : sys.generators)
    if (dist2_point_hyperplane(x0, g.u.hyperplane()) <= g.del2) outside = true;
  const int n = x0.dim();
  std::ostringstream csv;
  csv << "word_id";
  for (int i = 0; i < n; ++i) csv << ",x" << i;
  csv << ",min_dist_to_A,outside_guarantee\n";
  std::mt19937_64 rng(seed);
  const int count = static_cast<int>(sys.generators.size());
  char buf[64];
  for (long id = 1; id <= samples; ++id) {
    Word w;
    int len = count == 1 ? 1 : 1 + static_cast<int>(rng() % length);
    int prev = -1;
    for (int l = 0; l < len; ++l) {
      int gi = static_cast<int>(rng() % count);
      while (gi == prev) gi = static_cast<int>(rng() % count);
      Int e = count == 1 ? Int(id) : Int(1 + static_cast<int>(rng() % 3));
      w.letters.emplace_back(gi, e);
      prev = gi;
    }
    GroupElement g = evaluate_word(sys, w);
    ProjPoint y = g.apply(x0);
    Rat norm2 = 0;
    for (Eigen::Index i = 0; i < y.coords.size(); ++i)
      norm2 += Rat(y.coords[i] * y.coords[i]);
    csv << id;
    for (Eigen::Index i = 0; i < y.coords.size(); ++i) {
      double c = Rat(Rat(y.coords[i] * y.coords[i]) / norm2).get_d();
      double val = (y.coords[i] < 0 ? -1.0 : 1.0) * std::sqrt(c);
      std::snprintf(buf, sizeof buf, "%.17g", val);
      csv << "," << buf;
    }
    double best = 2.0;
    for (const Ball& b : sys.attracting.balls) {
      double d = std::sqrt(dist2_points(y, b.center).get_d());
      if (d < best) best = d;
    }
    std::snprintf(buf, sizeof buf, "%.17g", best);
    csv << "," << buf << "," << (outside ? 1 : 0) << "\n";
  }
  emit(out, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Schottky systems of rank-1 unipotents in SL(n,Z)"};
  app.require_subcommand(1);

  std::string out, system_path, quad_path, spec_path;
  int n = 3;
  std::uint64_t seed = 0;
  int depth = 6;
  std::uint64_t bfs_cap = kDefaultBfsCap;
  std::string moduli_str = "3,4";
  long q = 2;
  std::string p_str, L_str, eps_str = "1/100", del_str = "1/50";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out, "output path (default: stdout)");
    cmd->add_option("--n", n, "ambient dimension");
    cmd->add_option("--seed", seed, "deterministic seed");
    cmd->add_option("--depth", depth, "word search depth");
    cmd->add_option("--bfs-cap", bfs_cap, "BFS state cap");
  };

  auto* c_verify = app.add_subcommand("verify", "verify a system or certificate file");
  c_verify->add_option("--system", system_path, "input document")->required();
  add_common(c_verify);

  auto* c_dense = app.add_subcommand("build-dense", "profinitely dense system at (p, L)");
  c_dense->add_option("--p", p_str, "attraction point")->required();
  c_dense->add_option("--L", L_str, "fixed hyperplane covector")->required();
  c_dense->add_option("--eps", eps_str, "ball radius");
  c_dense->add_option("--delta", del_str, "tube radius");
  c_dense->add_option("--q", q, "second congruence batch runs mod q^2");
  c_dense->add_option("--moduli", moduli_str, "density witness moduli");
  add_common(c_dense);

  auto* c_add = app.add_subcommand("add", "adjoin a generator at (p, L)");
  c_add->add_option("--system", system_path)->required();
  c_add->add_option("--p", p_str)->required();
  c_add->add_option("--L", L_str)->required();
  c_add->add_option("--eps", eps_str);
  c_add->add_option("--delta", del_str);
  add_common(c_add);

  std::string g_str, p1_str, p2_str, L1_str, L2_str;
  auto* c_throw = app.add_subcommand("throw", "throwing extension certifying <S+, g>");
  c_throw->add_option("--system", system_path)->required();
  c_throw->add_option("--g", g_str, "group element, n*n entries")->required();
  c_throw->add_option("--p1", p1_str)->required();
  c_throw->add_option("--p2", p2_str)->required();
  c_throw->add_option("--L1", L1_str)->required();
  c_throw->add_option("--L2", L2_str)->required();
  c_throw->add_option("--eps", eps_str);
  c_throw->add_option("--delta", del_str);
  add_common(c_throw);

  std::string k_str, p3_str, L3_str;
  auto* c_start = app.add_subcommand("start", "starting system for <S, k>");
  c_start->add_option("--k", k_str, "group element, n*n entries")->required();
  c_start->add_option("--p1", p1_str)->required();
  c_start->add_option("--L1", L1_str)->required();
  c_start->add_option("--p3", p3_str)->required();
  c_start->add_option("--L3", L3_str)->required();
  c_start->add_option("--eps", eps_str);
  c_start->add_option("--delta", del_str);
  c_start->add_option("--q", q);
  add_common(c_start);

  std::string bits_str;
  int family_count = 8;
  auto* c_family = app.add_subcommand("family", "build a family spec or one member");
  c_family->add_option("--spec", spec_path, "existing spec document");
  c_family->add_option("--count", family_count, "number of binary indices");
  c_family->add_option("--bits", bits_str, "member selector; omit to emit the spec");
  c_family->add_option("--q", q);
  add_common(c_family);

  std::string f_str2, g_str2;
  auto* c_famcert = app.add_subcommand("family-cert", "union certificate for two members");
  c_famcert->add_option("--spec", spec_path)->required();
  c_famcert->add_option("--f", f_str2, "first bit string")->required();
  c_famcert->add_option("--g", g_str2, "second bit string")->required();
  add_common(c_famcert);

  std::string L0_str, p0_str, rho_str = "1/16", Lfree_str;
  auto* c_avoid = app.add_subcommand("avoid-step", "avoidance extension certifying <S+, g>");
  c_avoid->add_option("--system", system_path)->required();
  c_avoid->add_option("--g", g_str)->required();
  c_avoid->add_option("--L", Lfree_str, "hyperplane inside the rho-tube of L2")->required();
  c_avoid->add_option("--L0", L0_str)->required();
  c_avoid->add_option("--L1", L1_str)->required();
  c_avoid->add_option("--L2", L2_str)->required();
  c_avoid->add_option("--p0", p0_str)->required();
  c_avoid->add_option("--rho", rho_str);
  add_common(c_avoid);

  auto* c_qstart = app.add_subcommand("quad-start", "quadruple start around a fixed point of g");
  c_qstart->add_option("--g", g_str)->required();
  c_qstart->add_option("--p", p_str, "fixed point of g")->required();
  c_qstart->add_option("--k", k_str)->required();
  c_qstart->add_option("--q", q);
  add_common(c_qstart);

  std::string h_str;
  auto* c_qext = app.add_subcommand("quad-extend", "quadruple extension step");
  c_qext->add_option("--quad", quad_path)->required();
  c_qext->add_option("--g", g_str)->required();
  c_qext->add_option("--p", p_str)->required();
  c_qext->add_option("--elem", h_str, "element h to route through the quadruple")->required();
  add_common(c_qext);

  auto* c_cong = app.add_subcommand("congruence", "congruence surjectivity of a system");
  c_cong->add_option("--system", system_path)->required();
  c_cong->add_option("--moduli", moduli_str);
  add_common(c_cong);

  int trace_length = 4;
  long trace_samples = 0;
  std::string start_str;
  auto* c_trace = app.add_subcommand("orbit-trace", "CSV orbit trace for plotting");
  c_trace->add_option("--system", system_path)->required();
  c_trace->add_option("--length", trace_length, "maximum word length");
  c_trace->add_option("--samples", trace_samples, "number of sampled words");
  c_trace->add_option("--start", start_str, "start point")->required();
  add_common(c_trace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }

  try {
    BuildConfig config;
    config.q = q;
    config.seed = seed;
    config.bfs_cap = bfs_cap;
    config.word_search.depth = depth;

    if (*c_verify) return run_verify(system_path, out);

    if (*c_dense) {
      ProjPoint p(parse_ivec(p_str));
      ProjHyperplane L(parse_ivec(L_str));
      config.extra_moduli = parse_moduli(moduli_str);
      DenseResult res =
          build_profinitely_dense(p, L, parse_rat(eps_str), parse_rat(del_str), config);
      emit(out, dump_json(document("dense-result", to_json(res))));
      return 0;
    }

    if (*c_add) {
      SchottkySystem sys = system_from_json(open_document(read_file(system_path), "system"));
      SchottkySystem plus = add_generator(sys, ProjPoint(parse_ivec(p_str)),
                                          ProjHyperplane(parse_ivec(L_str)),
                                          parse_rat(eps_str), parse_rat(del_str));
      emit(out, dump_json(document("system", to_json(plus))));
      return 0;
    }

    if (*c_throw) {
      SchottkySystem sys = system_from_json(open_document(read_file(system_path), "system"));
      int dim = sys.dim();
      auto [plus, cert] = throw_lemma(sys, parse_element(g_str, dim),
                                      ProjPoint(parse_ivec(p1_str)),
                                      ProjPoint(parse_ivec(p2_str)),
                                      ProjHyperplane(parse_ivec(L1_str)),
                                      ProjHyperplane(parse_ivec(L2_str)),
                                      parse_rat(eps_str), parse_rat(del_str));
      Json payload;
      payload["system"] = to_json(plus);
      payload["cert"] = to_json(cert);
      emit(out, dump_json(document("extend-result", payload)));
      return 0;
    }

    if (*c_start) {
      ProjPoint p1(parse_ivec(p1_str));
      ProjHyperplane L1(parse_ivec(L1_str));
      GroupElement k = parse_element(k_str, p1.dim());
      std::array<Anchor, 3> anchors = {
          Anchor{p1, L1}, Anchor{k.apply(p1), k.apply(L1)},
          Anchor{ProjPoint(parse_ivec(p3_str)), ProjHyperplane(parse_ivec(L3_str))}};
      auto [sys, cert] =
          starting_system(k, anchors, parse_rat(eps_str), parse_rat(del_str), config);
      Json payload;
      payload["system"] = to_json(sys);
      payload["cert"] = to_json(cert);
      emit(out, dump_json(document("start-result", payload)));
      return 0;
    }

    if (*c_family) {
      FamilySpec spec = spec_path.empty()
                            ? default_family_spec(n, family_count, config)
                            : family_from_json(open_document(read_file(spec_path),
                                                             "family-spec"));
      if (bits_str.empty()) {
        emit(out, dump_json(document("family-spec", to_json(spec))));
      } else {
        SchottkySystem sys = family_member(spec, parse_bits(bits_str));
        emit(out, dump_json(document("system", to_json(sys))));
      }
      return 0;
    }

    if (*c_famcert) {
      FamilySpec spec =
          family_from_json(open_document(read_file(spec_path), "family-spec"));
      FullGroupCert cert =
          family_union_cert(spec, parse_bits(f_str2), parse_bits(g_str2));
      Json payload;
      payload["system"] = to_json(spec.base);
      payload["cert"] = to_json(cert);
      emit(out, dump_json(document("full-group-cert", payload)));
      return 0;
    }

    if (*c_avoid) {
      SchottkySystem sys = system_from_json(open_document(read_file(system_path), "system"));
      int dim = sys.dim();
      AvoidanceInstance inst;
      inst.L1 = ProjHyperplane(parse_ivec(L1_str));
      inst.L2 = ProjHyperplane(parse_ivec(L2_str));
      inst.rho2 = parse_rat(rho_str);
      inst.p0 = ProjPoint(parse_ivec(p0_str));
      inst.L0 = ProjHyperplane(parse_ivec(L0_str));
      auto [plus, cert] = avoid_step(sys, inst, parse_element(g_str, dim),
                                     ProjHyperplane(parse_ivec(Lfree_str)), config);
      Json payload;
      payload["system"] = to_json(plus);
      payload["cert"] = to_json(cert);
      emit(out, dump_json(document("extend-result", payload)));
      return 0;
    }

    if (*c_qstart) {
      ProjPoint p(parse_ivec(p_str));
      auto [quad, cert] = quad_start(parse_element(g_str, p.dim()), p,
                                     parse_element(k_str, p.dim()), config);
      Json payload;
      payload["quad"] = to_json(quad);
      payload["cert"] = to_json(cert);
      emit(out, dump_json(document("quad-start-result", payload)));
      return 0;
    }

    if (*c_qext) {
      Json doc = parse_json(read_file(quad_path));
      std::string kind = doc.contains("kind") ? doc.at("kind").get<std::string>() : "";
      Json payload_in = doc.contains("payload") ? doc.at("payload") : doc;
      SchottkyQuadruple quad =
          (kind == "quad-start-result" || kind == "quad-extend-result")
              ? quadruple_from_json(payload_in.at("quad"))
              : quadruple_from_json(payload_in);
      ProjPoint p(parse_ivec(p_str));
      QuadExtendResult res = quad_extend(quad, parse_element(g_str, p.dim()), p,
                                         parse_element(h_str, p.dim()), config);
      Json payload;
      payload["quad"] = to_json(res.quad);
      payload["cert"] = to_json(res.cert);
      payload["branch"] = res.branch;
      emit(out, dump_json(document("quad-extend-result", payload)));
      return 0;
    }

    if (*c_cong) {
      SchottkySystem sys = system_from_json(open_document(read_file(system_path), "system"));
      DensityWitness w = density_witness(sys.elements(), parse_moduli(moduli_str), bfs_cap);
      emit(out, dump_json(document("density-witness", to_json(w))));
      for (bool s : w.surjective)
        if (!s) return 1;
      return 0;
    }

    if (*c_trace)
      return run_orbit_trace(system_path, trace_length, trace_samples, start_str, seed,
                             out);
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const BadModulus& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const SearchExhausted& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const CapExceeded& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
  return 3;
}
