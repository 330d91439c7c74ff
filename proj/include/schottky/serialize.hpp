#pragma once

#include <string>

#include "schottky/constructions.hpp"
#include "json.hpp"

namespace schottky {

inline constexpr const char* kSchemaVersion = "1";

using Json = nlohmann::ordered_json;

// All integers and rationals are serialized as decimal strings; matrices are
// row-major arrays of strings. Every top-level document carries a "schema"
// field. dump_json is the single formatting point, so parse + dump round-trips
// byte-identically.
std::string dump_json(const Json& j);
Json parse_json(const std::string& text);

Json to_json(const Int& x);
Json to_json(const Rat& x);
Json to_json(const IVec& v);
Json to_json(const IMat& m);
Json to_json(const ProjPoint& p);
Json to_json(const ProjHyperplane& L);
Json to_json(const Region& r);
Json to_json(const GroupElement& g);
Json to_json(const Rank1Unipotent& u);
Json to_json(const DensityWitness& w);
Json to_json(const SchottkySystem& sys);
Json to_json(const SchottkyQuadruple& quad);
Json to_json(const Word& w);
Json to_json(const VerifyReport& rep);
Json to_json(const Z2PairCert& cert);
Json to_json(const FullGroupCert& cert);
Json to_json(const StartCert& cert);
Json to_json(const RecipeEntry& rec);
Json to_json(const DenseResult& res);
Json to_json(const FamilySpec& spec);

Int int_from_json(const Json& j);
Rat rat_from_json(const Json& j);
IVec ivec_from_json(const Json& j);
IMat imat_from_json(const Json& j);
ProjPoint point_from_json(const Json& j);
ProjHyperplane hyperplane_from_json(const Json& j);
Region region_from_json(const Json& j);
GroupElement element_from_json(const Json& j);
Rank1Unipotent unipotent_from_json(const Json& j);
DensityWitness witness_from_json(const Json& j);
SchottkySystem system_from_json(const Json& j);
SchottkyQuadruple quadruple_from_json(const Json& j);
Word word_from_json(const Json& j);
Z2PairCert z2_from_json(const Json& j);
FullGroupCert full_from_json(const Json& j);
StartCert start_from_json(const Json& j);
RecipeEntry recipe_from_json(const Json& j);
DenseResult dense_from_json(const Json& j);
FamilySpec family_from_json(const Json& j);

// Wraps a payload with the schema version and a kind tag.
Json document(const std::string& kind, Json payload);
Json open_document(const std::string& text, const std::string& kind);

// Command-line scalar formats: rationals as "a/b" or "a", vectors as
// comma-separated integers.
Rat parse_rat(const std::string& s);
IVec parse_ivec(const std::string& s);
IMat parse_imat(const std::string& s, int n);  // n*n comma-separated entries

}  // namespace schottky
