#pragma once

// JSON forms of the library values. Every top-level document carries a
// "schema" tag "motint.<kind>/<version>"; docs/schemas has the definitions.

#include <json.hpp>

#include "motint/zeta.hpp"

namespace motint::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
std::string schema_tag(const std::string& kind);
/// FormatError unless doc["schema"] is the tag for `kind`.
void check_schema(const Json& doc, const std::string& kind);

Sort parse_sort(const std::string& text);

Json to_json(const ARat& a);
ARat arat_from_json(const Json& j);

Json to_json(const Affine& a);
Affine affine_from_json(const Json& j);

Json to_json(const PFun& f);
PFun pfun_from_json(const Json& j);

Json to_json(const ResClass& c);
ResClass resclass_from_json(const Json& j);

Json to_json(const MotFrame& f);
MotFrame frame_from_json(const Json& j);

Json to_json(const MotFun& f);
MotFun motfun_from_json(const Json& j);

Json to_json(const CellDecomposition& d);
Json to_json(const RatSeries& s);
RatSeries ratseries_from_json(const Json& j);
Json to_json(const CoeffList& c);
Json to_json(const MeuserReport& r);

/// Exact rationals print as "a/b" (or "a").
std::string rat_text(const Rational& q);
Rational parse_rat(const std::string& text);

}  // namespace motint::io
