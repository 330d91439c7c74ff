#include "schottky/serialize.hpp"

#include <sstream>

namespace schottky {

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed JSON");
  return j;
}

Json to_json(const Int& x) { return x.get_str(); }

Json to_json(const Rat& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

Json to_json(const IVec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v[i]));
  return a;
}

Json to_json(const IMat& m) {
  Json j;
  j["rows"] = static_cast<int>(m.rows());
  j["cols"] = static_cast<int>(m.cols());
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(to_json(m(i, c)));
  j["entries"] = a;
  return j;
}

Json to_json(const ProjPoint& p) { return to_json(p.coords); }

Json to_json(const ProjHyperplane& L) { return to_json(L.covector); }

Json to_json(const Region& r) {
  Json j;
  Json balls = Json::array();
  for (const Ball& b : r.balls) {
    Json e;
    e["center"] = to_json(b.center);
    e["radius2"] = to_json(b.radius2);
    balls.push_back(e);
  }
  Json tubes = Json::array();
  for (const Tube& t : r.tubes) {
    Json e;
    e["hyperplane"] = to_json(t.hyperplane);
    e["radius2"] = to_json(t.radius2);
    tubes.push_back(e);
  }
  j["balls"] = balls;
  j["tubes"] = tubes;
  return j;
}

Json to_json(const GroupElement& g) { return to_json(g.mat); }

Json to_json(const Rank1Unipotent& u) {
  Json j;
  j["v"] = to_json(u.v);
  j["f"] = to_json(u.f);
  j["m"] = to_json(u.m);
  return j;
}

Json to_json(const DensityWitness& w) {
  Json j;
  j["moduli_checked"] = w.moduli_checked;
  std::vector<int> s;
  for (bool b : w.surjective) s.push_back(b ? 1 : 0);
  j["surjective"] = s;
  j["recipe_conformant"] = w.recipe_conformant;
  j["q"] = w.q;
  j["full_density_basis"] = w.full_density_basis;
  return j;
}

Json to_json(const SchottkySystem& sys) {
  Json j;
  Json gens = Json::array();
  for (const SchottkyGenerator& g : sys.generators) {
    Json e;
    e["u"] = to_json(g.u);
    e["eps2"] = to_json(g.eps2);
    e["del2"] = to_json(g.del2);
    gens.push_back(e);
  }
  j["generators"] = gens;
  j["attracting"] = to_json(sys.attracting);
  j["repelling"] = to_json(sys.repelling);
  if (sys.density)
    j["density"] = to_json(*sys.density);
  else
    j["density"] = nullptr;
  return j;
}

Json to_json(const SchottkyQuadruple& quad) {
  Json j;
  j["base"] = to_json(quad.base);
  j["open_nbhd"] = to_json(quad.open_nbhd);
  return j;
}

Json to_json(const Word& w) {
  Json a = Json::array();
  for (const auto& [i, e] : w.letters) {
    Json l;
    l["gen"] = i;
    l["exp"] = to_json(e);
    a.push_back(l);
  }
  return a;
}

Json to_json(const VerifyReport& rep) {
  Json j;
  j["pass"] = rep.pass();
  Json v = Json::array();
  for (const Violation& x : rep.violations) {
    Json e;
    e["condition"] = x.condition;
    e["i"] = x.i;
    e["j"] = x.j;
    e["detail"] = x.detail;
    v.push_back(e);
  }
  j["violations"] = v;
  return j;
}

Json to_json(const Z2PairCert& cert) {
  Json j;
  j["u"] = to_json(cert.u);
  j["w"] = to_json(cert.w);
  j["unipotence"] = cert.unipotence;
  j["commutation"] = cert.commutation;
  j["independence"] = cert.independence;
  return j;
}

Json to_json(const FullGroupCert& cert) {
  Json j;
  j["pair"] = to_json(cert.pair);
  j["density"] = to_json(cert.density);
  j["conclusion_basis"] = cert.conclusion_basis;
  j["adjoined"] = cert.adjoined;
  return j;
}

Json to_json(const StartCert& cert) {
  Json j;
  j["intersection_gen"] = cert.intersection_gen;
  j["word"] = to_json(cert.word);
  j["k"] = to_json(cert.k);
  j["base_gen"] = cert.base_gen;
  j["conj_exponent"] = to_json(cert.conj_exponent);
  j["full"] = to_json(cert.full);
  return j;
}

Json to_json(const RecipeEntry& rec) {
  Json j;
  j["source_i"] = rec.source_i;
  j["source_j"] = rec.source_j;
  j["g"] = to_json(rec.g);
  j["d"] = rec.d;
  j["s"] = to_json(rec.s);
  return j;
}

Json to_json(const DenseResult& res) {
  Json j;
  j["system"] = to_json(res.sys);
  j["witness"] = to_json(res.witness);
  Json r = Json::array();
  for (const RecipeEntry& e : res.recipe) r.push_back(to_json(e));
  j["recipe"] = r;
  j["exact_index"] = res.exact_index;
  return j;
}

Json to_json(const FamilySpec& spec) {
  Json j;
  Json anchors = Json::array();
  for (const FamilyAnchor& a : spec.anchors) {
    Json e;
    e["p"] = to_json(a.p);
    e["L"] = to_json(a.L);
    e["eps2"] = to_json(a.eps2);
    e["del2"] = to_json(a.del2);
    anchors.push_back(e);
  }
  j["anchors"] = anchors;
  j["base"] = to_json(spec.base);
  Json cands = Json::array();
  for (const auto& pair : spec.candidates) {
    Json e = Json::array();
    for (const SchottkyGenerator& g : pair) {
      Json c;
      c["u"] = to_json(g.u);
      c["eps2"] = to_json(g.eps2);
      c["del2"] = to_json(g.del2);
      e.push_back(c);
    }
    cands.push_back(e);
  }
  j["candidates"] = cands;
  return j;
}

namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name))
    throw ParseError(std::string("missing field: ") + name);
  return j.at(name);
}

}  // namespace

Int int_from_json(const Json& j) {
  if (!j.is_string()) throw ParseError("integer must be a decimal string");
  try {
    return Int(j.get<std::string>());
  } catch (const std::invalid_argument&) {
    throw ParseError("bad integer literal: " + j.get<std::string>());
  }
}

Rat rat_from_json(const Json& j) {
  if (!j.is_string()) throw ParseError("rational must be a decimal string");
  return parse_rat(j.get<std::string>());
}

IVec ivec_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("vector must be a nonempty array");
  IVec v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = int_from_json(j[i]);
  return v;
}

IMat imat_from_json(const Json& j) {
  int rows = field(j, "rows").get<int>();
  int cols = field(j, "cols").get<int>();
  const Json& e = field(j, "entries");
  if (rows <= 0 || cols <= 0 || !e.is_array() ||
      e.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols))
    throw ParseError("bad matrix shape");
  IMat m(rows, cols);
  size_t idx = 0;
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) m(i, c) = int_from_json(e[idx++]);
  return m;
}

ProjPoint point_from_json(const Json& j) { return ProjPoint(ivec_from_json(j)); }

ProjHyperplane hyperplane_from_json(const Json& j) {
  return ProjHyperplane(ivec_from_json(j));
}

Region region_from_json(const Json& j) {
  Region r;
  for (const Json& e : field(j, "balls"))
    r.add_ball(point_from_json(field(e, "center")), rat_from_json(field(e, "radius2")));
  for (const Json& e : field(j, "tubes"))
    r.add_tube(hyperplane_from_json(field(e, "hyperplane")),
               rat_from_json(field(e, "radius2")));
  return r;
}

GroupElement element_from_json(const Json& j) {
  IMat m = imat_from_json(j);
  if (det(m) != 1) throw ParseError("group element determinant is not 1");
  GroupElement g;
  g.mat = m;
  return g;
}

Rank1Unipotent unipotent_from_json(const Json& j) {
  Rank1Unipotent u;
  u.v = ivec_from_json(field(j, "v"));
  u.f = ivec_from_json(field(j, "f"));
  u.m = int_from_json(field(j, "m"));
  if (u.f.dot(u.v) != 0) throw ParseError("unipotent data with f.v != 0");
  if (u.m == 0) throw ParseError("unipotent multiplier is zero");
  return u;
}

DensityWitness witness_from_json(const Json& j) {
  DensityWitness w;
  w.moduli_checked = field(j, "moduli_checked").get<std::vector<long>>();
  for (int b : field(j, "surjective").get<std::vector<int>>())
    w.surjective.push_back(b != 0);
  w.recipe_conformant = field(j, "recipe_conformant").get<bool>();
  w.q = field(j, "q").get<long>();
  w.full_density_basis = field(j, "full_density_basis").get<std::string>();
  return w;
}

SchottkySystem system_from_json(const Json& j) {
  SchottkySystem sys;
  for (const Json& e : field(j, "generators")) {
    SchottkyGenerator g;
    g.u = unipotent_from_json(field(e, "u"));
    g.eps2 = rat_from_json(field(e, "eps2"));
    g.del2 = rat_from_json(field(e, "del2"));
    sys.generators.push_back(g);
  }
  sys.attracting = region_from_json(field(j, "attracting"));
  sys.repelling = region_from_json(field(j, "repelling"));
  const Json& d = field(j, "density");
  if (!d.is_null()) sys.density = witness_from_json(d);
  return sys;
}

SchottkyQuadruple quadruple_from_json(const Json& j) {
  SchottkyQuadruple quad;
  quad.base = system_from_json(field(j, "base"));
  quad.open_nbhd = region_from_json(field(j, "open_nbhd"));
  return quad;
}

Word word_from_json(const Json& j) {
  Word w;
  if (!j.is_array()) throw ParseError("word must be an array");
  for (const Json& l : j)
    w.letters.emplace_back(field(l, "gen").get<int>(), int_from_json(field(l, "exp")));
  return w;
}

Z2PairCert z2_from_json(const Json& j) {
  Z2PairCert cert;
  cert.u = unipotent_from_json(field(j, "u"));
  cert.w = element_from_json(field(j, "w"));
  cert.unipotence = field(j, "unipotence").get<bool>();
  cert.commutation = field(j, "commutation").get<bool>();
  cert.independence = field(j, "independence").get<bool>();
  return cert;
}

FullGroupCert full_from_json(const Json& j) {
  FullGroupCert cert;
  cert.pair = z2_from_json(field(j, "pair"));
  cert.density = witness_from_json(field(j, "density"));
  cert.conclusion_basis = field(j, "conclusion_basis").get<std::string>();
  cert.adjoined = field(j, "adjoined").get<std::string>();
  return cert;
}

StartCert start_from_json(const Json& j) {
  StartCert cert;
  cert.intersection_gen = field(j, "intersection_gen").get<int>();
  cert.word = word_from_json(field(j, "word"));
  cert.k = element_from_json(field(j, "k"));
  cert.base_gen = field(j, "base_gen").get<int>();
  cert.conj_exponent = int_from_json(field(j, "conj_exponent"));
  cert.full = full_from_json(field(j, "full"));
  return cert;
}

RecipeEntry recipe_from_json(const Json& j) {
  RecipeEntry rec;
  rec.source_i = field(j, "source_i").get<int>();
  rec.source_j = field(j, "source_j").get<int>();
  rec.g = element_from_json(field(j, "g"));
  rec.d = field(j, "d").get<long>();
  rec.s = int_from_json(field(j, "s"));
  return rec;
}

DenseResult dense_from_json(const Json& j) {
  DenseResult res;
  res.sys = system_from_json(field(j, "system"));
  res.witness = witness_from_json(field(j, "witness"));
  for (const Json& e : field(j, "recipe")) res.recipe.push_back(recipe_from_json(e));
  res.exact_index = field(j, "exact_index").get<int>();
  return res;
}

FamilySpec family_from_json(const Json& j) {
  FamilySpec spec;
  for (const Json& e : field(j, "anchors")) {
    FamilyAnchor a;
    a.p = point_from_json(field(e, "p"));
    a.L = hyperplane_from_json(field(e, "L"));
    a.eps2 = rat_from_json(field(e, "eps2"));
    a.del2 = rat_from_json(field(e, "del2"));
    spec.anchors.push_back(a);
  }
  spec.base = system_from_json(field(j, "base"));
  for (const Json& e : field(j, "candidates")) {
    if (!e.is_array() || e.size() != 2) throw ParseError("candidate pair expected");
    std::array<SchottkyGenerator, 2> pair;
    for (int c = 0; c < 2; ++c) {
      pair[c].u = unipotent_from_json(field(e[c], "u"));
      pair[c].eps2 = rat_from_json(field(e[c], "eps2"));
      pair[c].del2 = rat_from_json(field(e[c], "del2"));
    }
    spec.candidates.push_back(pair);
  }
  return spec;
}

Json document(const std::string& kind, Json payload) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = kind;
  j["payload"] = std::move(payload);
  return j;
}

Json open_document(const std::string& text, const std::string& kind) {
  Json j = parse_json(text);
  if (field(j, "schema").get<std::string>() != kSchemaVersion)
    throw ParseError("unsupported schema version");
  if (field(j, "kind").get<std::string>() != kind)
    throw ParseError("expected a document of kind " + kind);
  return field(j, "payload");
}

Rat parse_rat(const std::string& s) {
  if (s.empty()) throw ParseError("empty rational literal");
  std::string num = s, den = "1";
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    num = s.substr(0, slash);
    den = s.substr(slash + 1);
  }
  try {
    return rat(Int(num), Int(den));
  } catch (const std::invalid_argument&) {
    throw ParseError("bad rational literal: " + s);
  }
}

IVec parse_ivec(const std::string& s) {
  std::vector<Int> entries;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      entries.emplace_back(item);
    } catch (const std::invalid_argument&) {
      throw ParseError("bad vector entry: " + item);
    }
  }
  if (entries.empty()) throw ParseError("empty vector literal");
  IVec v(static_cast<Eigen::Index>(entries.size()));
  for (size_t i = 0; i < entries.size(); ++i) v[static_cast<Eigen::Index>(i)] = entries[i];
  return v;
}

IMat parse_imat(const std::string& s, int n) {
  IVec flat = parse_ivec(s);
  if (flat.size() != Eigen::Index(n) * Eigen::Index(n))
    throw ParseError("matrix literal needs n*n entries");
  IMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = flat[i * n + j];
  return m;
}

}  // namespace schottky
