#include "motint/io.hpp"

#include <algorithm>
#include <map>
#include <regex>

namespace motint::io {

namespace {

Integer int_of(const Json& j) {
  if (j.is_number_integer()) return Integer(std::to_string(j.get<long long>()));
  if (j.is_string()) return Integer(j.get<std::string>());
  throw FormatError("expected an integer, got " + j.dump());
}

std::vector<Integer> ints_of(const Json& j) {
  if (!j.is_array()) throw FormatError("expected an array of integers, got " + j.dump());
  std::vector<Integer> out;
  for (const auto& x : j) out.push_back(int_of(x));
  return out;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string str_of(const Json& j) {
  if (!j.is_string()) throw FormatError("expected a string, got " + j.dump());
  return j.get<std::string>();
}

Json vars_json(const std::vector<FreeVar>& vs) {
  Json a = Json::array();
  for (const auto& v : vs) a.push_back({{"name", v.name}, {"sort", v.sort.to_string()}});
  return a;
}

std::vector<FreeVar> vars_from(const Json& j) {
  std::vector<FreeVar> out;
  for (const auto& v : j) out.push_back({str_of(field(v, "name")), parse_sort(str_of(field(v, "sort")))});
  return out;
}

ParseOptions opts_for(const std::vector<FreeVar>& vs) {
  ParseOptions o;
  for (const auto& v : vs) o.declared[v.name] = v.sort;
  return o;
}

}  // namespace

std::string schema_tag(const std::string& kind) { return "motint." + kind + "/" + std::to_string(kSchemaVersion); }

void check_schema(const Json& doc, const std::string& kind) {
  if (!doc.is_object() || !doc.contains("schema")) throw FormatError("document has no schema tag; expected " + schema_tag(kind));
  if (doc.at("schema") != schema_tag(kind)) throw FormatError("schema " + doc.at("schema").dump() + " where " + schema_tag(kind) + " was expected");
}

Sort parse_sort(const std::string& t) {
  if (t == "vf") return Sort::vf();
  if (t == "vg") return Sort::vg();
  if (t.size() > 5 && t.rfind("res(", 0) == 0 && t.back() == ')') {
    const std::string body = t.substr(4, t.size() - 5);
    if (body.find_first_not_of("0123456789") == std::string::npos && body.size() < 6) {
      int n = std::stoi(body);
      if (n >= 1) return Sort::res(n);
    }
  }
  throw FormatError("unknown sort '" + t + "'");
}

std::string rat_text(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_str();
}

Rational parse_rat(const std::string& text) {
  try {
    Rational q(text);
    if (q.get_den() == 0) throw FormatError("zero denominator in '" + text + "'");
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw FormatError("not a rational number: '" + text + "'");
  }
}

Json to_json(const ARat& a) {
  Json n = Json::array(), d = Json::array();
  for (const auto& c : a.numer().coeffs()) n.push_back(c.get_str());
  for (const auto& c : a.denom().coeffs()) d.push_back(c.get_str());
  return {{"numer", n}, {"denom", d}, {"text", a.to_string()}};
}

ARat arat_from_json(const Json& j) {
  if (j.is_string()) return parse_arat(j.get<std::string>());
  if (j.is_number_integer()) return ARat(int_of(j));
  ZPoly n(ints_of(field(j, "numer"))), d(ints_of(field(j, "denom")));
  if (d.is_zero()) throw FormatError("zero denominator");
  return ARat::normalize(n, d);
}

Json to_json(const Affine& a) {
  Json c = Json::object();
  for (const auto& [v, k] : a.coef) c[v] = rat_text(k);
  return {{"c0", rat_text(a.c0)}, {"coef", c}};
}

Affine affine_from_json(const Json& j) {
  if (j.is_string()) return parse_affine(j.get<std::string>());
  if (j.is_number_integer()) return Affine(Rational(int_of(j)));
  Affine a;
  if (j.contains("c0")) a.c0 = j.at("c0").is_string() ? parse_rat(j.at("c0").get<std::string>()) : Rational(int_of(j.at("c0")));
  if (j.contains("coef")) {
    for (const auto& [v, k] : j.at("coef").items()) {
      Rational r = k.is_string() ? parse_rat(k.get<std::string>()) : Rational(int_of(k));
      if (r != 0) a.coef[v] = r;
    }
  }
  return a;
}

Json to_json(const PFun& f) {
  Json pieces = Json::array();
  for (const auto& pc : f.pieces) {
    Json bounds = Json::array(), congs = Json::array(), terms = Json::array();
    for (const auto& q : pc.cell.ineqs) bounds.push_back(to_json(q));
    for (const auto& c : pc.cell.congs) congs.push_back({{"form", to_json(c.form)}, {"mod", c.mod.get_str()}});
    for (const auto& t : pc.terms) {
      Json al = Json::array();
      for (const auto& a : t.alphas) al.push_back(to_json(a));
      terms.push_back({{"a", to_json(t.a)}, {"beta", to_json(t.beta)}, {"alphas", al}});
    }
    pieces.push_back({{"cell", {{"bounds", bounds}, {"congruences", congs}, {"text", pc.cell.to_string()}}}, {"terms", terms}});
  }
  return {{"schema", schema_tag("pfun")}, {"vars", f.vars}, {"pieces", pieces}};
}

PFun pfun_from_json(const Json& j) {
  PFun f;
  for (const auto& v : field(j, "vars")) f.vars.push_back(str_of(v));
  for (const auto& pj : field(j, "pieces")) {
    Piece pc;
    const Json& cj = field(pj, "cell");
    if (cj.contains("bounds")) {
      for (const auto& q : cj.at("bounds")) pc.cell.ineqs.push_back(affine_from_json(q));
    }
    if (cj.contains("congruences")) {
      for (const auto& c : cj.at("congruences")) {
        Integer m = int_of(field(c, "mod"));
        if (m < 1) throw FormatError("congruence modulus must be >= 1");
        pc.cell.congs.push_back({affine_from_json(field(c, "form")), m});
      }
    }
    for (const auto& tj : field(pj, "terms")) {
      PTerm t;
      t.a = arat_from_json(field(tj, "a"));
      if (tj.contains("beta")) t.beta = affine_from_json(tj.at("beta"));
      if (tj.contains("alphas")) {
        for (const auto& a : tj.at("alphas")) t.alphas.push_back(affine_from_json(a));
      }
      pc.terms.push_back(t);
    }
    for (const auto& v : pc.cell.vars()) {
      if (std::find(f.vars.begin(), f.vars.end(), v) == f.vars.end()) throw FormatError("cell mentions undeclared variable '" + v + "'");
    }
    f.pieces.push_back(std::move(pc));
  }
  return f;
}

Json to_json(const ResClass& c) {
  Json gens = Json::array();
  for (const auto& t : c.terms()) {
    Json names = Json::array();
    for (const auto& v : t.gen.vars) names.push_back(v.name);
    gens.push_back({{"mult", to_json(t.scalar)}, {"sig", t.gen.signature()}, {"vars", names}, {"formula", motint::to_string(t.gen.formula)}});
  }
  return {{"schema", schema_tag("resclass")}, {"base", vars_json(c.base())}, {"gens", gens}, {"text", c.to_string()}};
}

ResClass resclass_from_json(const Json& j) {
  std::vector<FreeVar> base = j.contains("base") ? vars_from(j.at("base")) : std::vector<FreeVar>{};
  // derived base coordinates are named by their printed term, e.g. "ac_1(x - 1)";
  // swap them for placeholders before parsing, longest name first
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < base.size(); ++k) {
    if (!std::regex_match(base[k].name, std::regex("[A-Za-z_][A-Za-z0-9_]*"))) order.push_back(k);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return base[x].name.size() > base[y].name.size(); });
  std::map<std::string, FreeVar> back;
  std::vector<FreeVar> pbase = base;
  for (std::size_t k : order) {
    std::string ph = "__b" + std::to_string(k);
    back[ph] = base[k];
    pbase[k].name = ph;
  }
  std::vector<ResClass::Term> terms;
  for (const auto& g : field(j, "gens")) {
    std::vector<int> sig = field(g, "sig").get<std::vector<int>>();
    ResGen gen;
    for (std::size_t k = 0; k < sig.size(); ++k) {
      std::string name = g.contains("vars") ? str_of(g.at("vars").at(k)) : "_r" + std::to_string(k + 1);
      if (sig[k] < 1) throw FormatError("generator depths must be >= 1");
      gen.vars.push_back({name, Sort::res(sig[k])});
    }
    std::vector<FreeVar> scope = pbase;
    scope.insert(scope.end(), gen.vars.begin(), gen.vars.end());
    std::string text = str_of(field(g, "formula"));
    for (std::size_t k : order) {
      const std::string& name = base[k].name;
      const std::string ph = "__b" + std::to_string(k);
      for (std::size_t at = text.find(name); at != std::string::npos; at = text.find(name, at + ph.size())) text.replace(at, name.size(), ph);
    }
    gen.formula = parse_formula(text, opts_for(scope));
    if (!back.empty()) {
      gen.formula = map_formula(gen.formula, [&](const motint::Term& t) -> std::optional<motint::Term> {
        if (t->kind != TermKind::Var) return std::nullopt;
        auto it = back.find(t->name);
        if (it == back.end()) return std::nullopt;
        return term::var(it->second.name, it->second.sort);
      });
    }
    terms.push_back({arat_from_json(field(g, "mult")), gen});
  }
  return rewrite(ResClass::raw(std::move(terms), base));
}

Json to_json(const MotFrame& f) {
  Json d = Json::array();
  for (const auto& [name, t] : f.derived) d.push_back({{"name", name}, {"sort", t->sort.to_string()}, {"term", motint::to_string(t)}});
  return {{"coords", vars_json(f.coords)}, {"derived", d}};
}

MotFrame frame_from_json(const Json& j) {
  MotFrame f;
  f.coords = vars_from(field(j, "coords"));
  if (j.contains("derived")) {
    for (const auto& d : j.at("derived")) {
      Sort s = parse_sort(str_of(field(d, "sort")));
      f.derived[str_of(field(d, "name"))] = parse_term(str_of(field(d, "term")), s, opts_for(f.coords));
    }
  }
  return f;
}

Json to_json(const MotFun& f) {
  Json terms = Json::array();
  for (const auto& t : f.terms) terms.push_back({{"pf", to_json(t.pf)}, {"rc", to_json(t.rc)}});
  return {{"schema", schema_tag("motfun")}, {"frame", to_json(f.frame)}, {"terms", terms}, {"text", f.to_string()}};
}

MotFun motfun_from_json(const Json& j) {
  MotFun f;
  f.frame = frame_from_json(field(j, "frame"));
  for (const auto& t : field(j, "terms")) f.terms.push_back({pfun_from_json(field(t, "pf")), resclass_from_json(field(t, "rc"))});
  return f.normalized();
}

Json to_json(const CellDecomposition& d) {
  Json cells = Json::array();
  for (std::size_t k = 0; k < d.cells.size(); ++k) {
    const VFCell& c = d.cells[k];
    Json z = Json::array();
    for (const auto& zc : c.z_cells) z.push_back(zc.to_string());
    Json cj = {{"kind", c.point ? "point" : "ball"}, {"center", rat_text(c.center)}, {"depth", c.depth}};
    if (c.point) {
      cj["point_cond"] = c.point_cond ? motint::to_string(c.point_cond) : "true";
    } else {
      cj["z_cells"] = z;
      cj["xi_cond"] = c.xi_cond ? motint::to_string(c.xi_cond) : "true";
    }
    cj["text"] = c.to_string(d.var);
    if (k < d.values.size()) cj["value"] = to_json(d.values[k]);
    cells.push_back(cj);
  }
  Json centers = Json::array();
  for (const auto& c : d.centers) centers.push_back(rat_text(c));
  return {{"schema", schema_tag("cells")}, {"var", d.var}, {"base", to_json(d.base)}, {"depth", d.depth},
          {"centers", centers}, {"cells", cells}, {"ledger", d.ledger}};
}

Json to_json(const RatSeries& s) {
  Json num = Json::array(), den = Json::array();
  for (const auto& [k, c] : s.numer) {
    Json e = {{"power", k}};
    if (auto a = c.as_constant()) {
      e["coeff"] = to_json(*a);
    } else {
      e["coeff"] = to_json(c);
    }
    num.push_back(e);
  }
  for (const auto& [a, b] : s.denom) den.push_back({{"a", a}, {"b", b}});
  return {{"schema", schema_tag("ratseries")}, {"numer", num}, {"denom", den}, {"text", s.to_string()}};
}

RatSeries ratseries_from_json(const Json& j) {
  RatSeries s;
  for (const auto& e : field(j, "numer")) {
    const int k = field(e, "power").get<int>();
    const Json& c = field(e, "coeff");
    MotFun f = c.is_object() && c.contains("frame") ? motfun_from_json(c) : MotFun::constant(arat_from_json(c), MotFrame{});
    if (!f.frame.coords.empty()) throw FormatError("series coefficients must not have coordinates");
    auto it = s.numer.find(k);
    if (it == s.numer.end()) {
      s.numer.emplace(k, f.normalized());
    } else {
      it->second = (it->second + f).normalized();
    }
  }
  for (const auto& e : field(j, "denom")) {
    const int a = field(e, "a").get<int>(), b = field(e, "b").get<int>();
    if (b < 1) throw FormatError("denominator factors need b >= 1");
    s.denom.emplace_back(a, b);
  }
  std::sort(s.denom.begin(), s.denom.end());
  return s;
}

Json to_json(const CoeffList& c) {
  Json v = Json::array();
  for (const auto& x : c.v) v.push_back(rat_text(x));
  return {{"schema", schema_tag("coefflist")}, {"i_max", c.i_max}, {"v", v}};
}

Json to_json(const MeuserReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"i", row.i}, {"motivic", rat_text(row.motivic)}, {"counted", rat_text(row.counted)}, {"match", row.match}});
  }
  return {{"p", r.p}, {"d", r.d}, {"i_max", r.i_max}, {"all_match", r.all_match()}, {"rows", rows}};
}

}  // namespace motint::io
