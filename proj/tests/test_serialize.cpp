#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "schottky/serialize.hpp"

using namespace schottky;

namespace {

IVec vec3(long a, long b, long c) {
  IVec v(3);
  v << a, b, c;
  return v;
}

ProjPoint pt(long a, long b, long c) { return ProjPoint(vec3(a, b, c)); }
ProjHyperplane hp(long a, long b, long c) { return ProjHyperplane(vec3(a, b, c)); }

}  // namespace

TEST_CASE("scalar round trips") {
  CHECK(to_json(Int(-12345)).get<std::string>() == "-12345");
  CHECK(int_from_json(to_json(Int("123456789012345678901234567890"))) ==
        Int("123456789012345678901234567890"));
  CHECK(to_json(rat(3, 6)).get<std::string>() == "1/2");
  CHECK(to_json(Rat(7)).get<std::string>() == "7");
  CHECK(rat_from_json(to_json(rat(-22, 7))) == rat(-22, 7));
  CHECK_THROWS_AS(int_from_json(Json(5)), ParseError);
  CHECK_THROWS_AS(rat_from_json(Json("x/y")), ParseError);
}

TEST_CASE("command line literals") {
  CHECK(parse_rat("1/100") == rat(1, 100));
  CHECK(parse_rat("-3") == Rat(-3));
  CHECK(parse_ivec("1,-2,3") == vec3(1, -2, 3));
  CHECK_THROWS_AS(parse_rat(""), ParseError);
  CHECK_THROWS_AS(parse_rat("a/b"), ParseError);
  CHECK_THROWS_AS(parse_ivec("1,x,3"), ParseError);
  CHECK_THROWS_AS(parse_imat("1,2,3,4", 3), ParseError);
}

TEST_CASE("matrices serialize row major") {
  IMat m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  Json j = to_json(m);
  CHECK(j["rows"] == 2);
  CHECK(j["cols"] == 3);
  std::vector<std::string> flat = j["entries"].get<std::vector<std::string>>();
  CHECK(flat == std::vector<std::string>{"1", "2", "3", "4", "5", "6"});
  CHECK(imat_from_json(j) == m);
}

TEST_CASE("system documents round trip byte identically") {
  BuildConfig config;
  DenseResult res =
      build_profinitely_dense(pt(1, 0, 0), hp(0, 1, 0), rat(1, 100), rat(1, 50), config);
  std::string text = dump_json(document("system", to_json(res.sys)));
  SchottkySystem back = system_from_json(open_document(text, "system"));
  CHECK(dump_json(document("system", to_json(back))) == text);
  CHECK(verify_system(back).pass());
  CHECK(back.density.has_value());
  CHECK(back.density->valid());

  std::string dense_text = dump_json(document("dense-result", to_json(res)));
  DenseResult back_res = dense_from_json(open_document(dense_text, "dense-result"));
  CHECK(dump_json(document("dense-result", to_json(back_res))) == dense_text);
  CHECK(back_res.recipe.size() == res.recipe.size());
  CHECK(back_res.recipe[3].g == res.recipe[3].g);
}

TEST_CASE("certificate documents round trip") {
  BuildConfig config;
  GroupElement k;
  k.mat = IMat(3, 3);
  k.mat << 0, 0, 1, 1, 0, 0, 0, 1, 0;
  std::array<Anchor, 3> anchors = {Anchor{pt(1, 0, 0), hp(0, 1, 1)},
                                   Anchor{pt(0, 1, 0), hp(1, 0, 1)},
                                   Anchor{pt(0, 0, 1), hp(1, -1, 0)}};
  auto [sys, cert] = starting_system(k, anchors, rat(1, 16), rat(1, 16), config);
  Json payload;
  payload["system"] = to_json(sys);
  payload["cert"] = to_json(cert);
  std::string text = dump_json(document("start-result", payload));
  Json back = open_document(text, "start-result");
  SchottkySystem sys2 = system_from_json(back.at("system"));
  StartCert cert2 = start_from_json(back.at("cert"));
  CHECK(validate_start_cert(sys2, cert2));
  Json payload2;
  payload2["system"] = to_json(sys2);
  payload2["cert"] = to_json(cert2);
  CHECK(dump_json(document("start-result", payload2)) == text);
}

TEST_CASE("family specs round trip") {
  BuildConfig config;
  FamilySpec spec = default_family_spec(3, 3, config);
  std::string text = dump_json(document("family-spec", to_json(spec)));
  FamilySpec back = family_from_json(open_document(text, "family-spec"));
  CHECK(dump_json(document("family-spec", to_json(back))) == text);
  SchottkySystem member = family_member(back, {1, 0, 1});
  CHECK(verify_system(member).pass());
}

TEST_CASE("malformed documents are rejected") {
  CHECK_THROWS_AS(parse_json("{ not json"), ParseError);
  CHECK_THROWS_AS(open_document("{\"schema\":\"0\",\"kind\":\"system\",\"payload\":{}}",
                                "system"),
                  ParseError);
  CHECK_THROWS_AS(open_document("{\"schema\":\"1\",\"kind\":\"other\",\"payload\":{}}",
                                "system"),
                  ParseError);
  Json bad;
  bad["v"] = Json::array({"1", "0", "0"});
  bad["f"] = Json::array({"1", "0", "0"});
  bad["m"] = "1";
  CHECK_THROWS_AS(unipotent_from_json(bad), ParseError);  // f.v != 0
  IMat not_det1(3, 3);
  not_det1 << 2, 0, 0, 0, 1, 0, 0, 0, 1;
  CHECK_THROWS_AS(element_from_json(to_json(not_det1)), ParseError);
}
