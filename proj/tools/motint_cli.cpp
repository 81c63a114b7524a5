// motint command-line front end. Exit status: 0 ok, 2 verification
// mismatch, 1 error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "motint/io.hpp"

using namespace motint;
using io::Json;

namespace {

struct Report {
  Json json = Json::object();
  std::string text;
  int status = 0;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& x : out) {
    x.erase(0, x.find_first_not_of(" \t"));
    x.erase(x.find_last_not_of(" \t") + 1);
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const std::string& x) { return x.empty(); }), out.end());
  return out;
}

std::pair<std::string, std::string> key_value(const std::string& item, const std::string& what) {
  auto eq = item.find('=');
  if (eq == std::string::npos) throw FormatError("expected name=value in " + what + ", got '" + item + "'");
  std::string k = item.substr(0, eq), v = item.substr(eq + 1);
  k.erase(k.find_last_not_of(" \t") + 1);
  v.erase(0, v.find_first_not_of(" \t"));
  return {k, v};
}

std::string slurp(std::istream& in) {
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string read_file(const std::string& path) {
  if (path == "-") return slurp(std::cin);
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read '" + path + "'");
  return slurp(in);
}

// Inline text, else a file, else stdin.
std::string input_text(const std::string& inline_text, const std::string& path) {
  if (!inline_text.empty()) return inline_text;
  return read_file(path.empty() ? "-" : path);
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

std::vector<FreeVar> parse_decls(const std::string& text) {
  std::vector<FreeVar> out;
  for (const auto& item : split(text, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw FormatError("declaration '" + item + "' is not name:sort");
    out.push_back({item.substr(0, colon), io::parse_sort(item.substr(colon + 1))});
  }
  return out;
}

MotFrame frame_of(const std::vector<FreeVar>& decls) {
  MotFrame f;
  f.coords = decls;
  return f;
}

ParseOptions opts_of(const std::vector<FreeVar>& decls, Sort fallback) {
  ParseOptions o;
  o.default_sort = fallback;
  for (const auto& v : decls) o.declared[v.name] = v.sort;
  return o;
}

Rational parse_q(const std::string& t) {
  Rational q = io::parse_rat(t);
  if (q <= 1) throw QOutOfRange("q = " + t + " must exceed 1");
  return q;
}

void check_pd(long p, int d) {
  if (p < 2 || mpz_probab_prime_p(Integer(p).get_mpz_t(), 30) == 0) {
    throw EvalError("p = " + std::to_string(p) + " is not a prime");
  }
  if (d < 1) throw EvalError("d must be >= 1");
}

Env parse_point(const std::string& text, const MotFrame& frame, long p, int d) {
  Env env;
  env.p = p;
  env.d = d;
  for (const auto& item : split(text, ',')) {
    auto [k, v] = key_value(item, "--point");
    const FreeVar* var = nullptr;
    for (const auto& c : frame.coords) {
      if (c.name == k) var = &c;
    }
    if (!var) throw FormatError("'" + k + "' is not a coordinate of " + frame.to_string());
    switch (var->sort.kind) {
      case Sort::VF: env.vf.insert_or_assign(k, PadicElem::exact(p, d, io::parse_rat(v))); break;
      case Sort::VG: env.vg[k] = Integer(v); break;
      case Sort::RES: env.res.insert_or_assign(k, GaloisRing::get(p, d, var->sort.depth).from_int(Integer(v))); break;
    }
  }
  return env;
}

std::map<std::string, std::pair<Integer, Integer>> parse_box(const std::string& text) {
  std::map<std::string, std::pair<Integer, Integer>> box;
  for (const auto& item : split(text, ',')) {
    auto [k, v] = key_value(item, "--box");
    auto dots = v.find("..");
    if (dots == std::string::npos) throw FormatError("box range '" + v + "' is not lo..hi");
    box[k] = {Integer(v.substr(0, dots)), Integer(v.substr(dots + 2))};
  }
  return box;
}

std::vector<std::pair<long, int>> parse_grid(const std::string& text) {
  std::vector<long> ps;
  std::vector<int> ds;
  for (const auto& part : split(text, ';')) {
    auto [k, v] = key_value(part, "--grid");
    for (const auto& x : split(v, ',')) {
      if (k == "p") {
        ps.push_back(std::stol(x));
      } else if (k == "d") {
        ds.push_back(std::stoi(x));
      } else {
        throw FormatError("grid key '" + k + "' is neither p nor d");
      }
    }
  }
  if (ps.empty() || ds.empty()) throw FormatError("grid needs p=... and d=...");
  std::vector<std::pair<long, int>> g;
  for (long p : ps) {
    for (int d : ds) {
      check_pd(p, d);
      g.push_back({p, d});
    }
  }
  return g;
}

std::string table_row(const std::vector<std::string>& cells, const std::vector<std::size_t>& widths) {
  std::string out;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    std::string c = cells[k];
    if (k + 1 < cells.size()) c.resize(std::max(c.size(), widths[k]), ' ');
    out += (k ? "  " : "") + c;
  }
  out.erase(out.find_last_not_of(' ') + 1);
  return out + "\n";
}

// ----------------------------------------------------------------- commands

struct Settings {
  std::string format = "text";
  std::int64_t cap = 0;
  int threads = 1;
  CountOptions count() const { return {cap, threads}; }
};

Report cmd_parse(const std::string& formula, const std::string& file, bool sexpr, const std::string& decl) {
  std::string text = input_text(formula, file);
  ParseOptions o = opts_of(parse_decls(decl), Sort::res(1));
  Formula f = sexpr ? parse_sexpr(text, o) : parse_formula(text, o);
  Report r;
  r.json = {{"schema", io::schema_tag("parse")}, {"formula", to_string(f)}, {"sexpr", to_sexpr(f)}, {"frame", frame(f).to_string()}};
  r.text = to_string(f) + "\nframe: " + frame(f).to_string() + "\n";
  return r;
}

Report cmd_theta(const std::string& arat, const std::vector<std::string>& qs) {
  ARat a = parse_arat(arat);
  Report r;
  Json th = Json::array();
  r.text = "A: " + a.to_string() + "\nnonneg: " + (a.is_nonneg() ? "true" : "false") + "\n";
  for (const auto& qt : qs) {
    Rational q = parse_q(qt);
    Rational v = a.theta(q);
    th.push_back({{"q", io::rat_text(q)}, {"value", io::rat_text(v)}});
    r.text += "theta_" + io::rat_text(q) + " = " + io::rat_text(v) + "\n";
  }
  r.json = {{"schema", io::schema_tag("theta")}, {"arat", io::to_json(a)}, {"nonneg", a.is_nonneg()}, {"theta", th}};
  return r;
}

Report cmd_sum(const std::string& file, std::vector<std::string> over, const std::vector<std::string>& qs) {
  Json doc = read_json(file);
  io::check_schema(doc, "pfun");
  PFun f = io::pfun_from_json(doc);
  if (over.empty()) over = f.vars;
  PFun s = simplify(sum_fibers(f, over));
  Report r;
  r.text = "sum over " + std::string(over.empty() ? "nothing" : "");
  for (std::size_t k = 0; k < over.size(); ++k) r.text += (k ? ", " : "") + over[k];
  r.text += "\n" + s.to_string() + "\n";
  Json th = Json::array();
  if (!qs.empty()) {
    if (!s.vars.empty()) throw EvalError("theta needs a constant; variables remain: " + s.to_string());
    ARat c = s.as_constant();
    for (const auto& qt : qs) {
      Rational q = parse_q(qt);
      Rational v = c.theta(q);
      th.push_back({{"q", io::rat_text(q)}, {"value", io::rat_text(v)}});
      r.text += "theta_" + io::rat_text(q) + " = " + io::rat_text(v) + "\n";
    }
  }
  r.json = {{"schema", io::schema_tag("sum")}, {"over", over}, {"result", io::to_json(s)}, {"theta", th}};
  return r;
}

Report cmd_count(const std::string& formula, const std::string& file, long p, int d, int level, const std::string& box,
                 const std::string& decl, const Settings& st) {
  check_pd(p, d);
  if (level < 1) throw EvalError("level must be >= 1");
  Formula f = parse_formula(input_text(formula, file), opts_of(parse_decls(decl), Sort::res(level)));
  Integer n = count_points(f, p, d, parse_box(box), st.count());
  Report r;
  r.text = n.get_str() + "\n";
  r.json = {{"schema", io::schema_tag("count")}, {"formula", to_string(f)}, {"p", p}, {"d", d}, {"level", level}, {"count", n.get_str()}};
  return r;
}

Report cmd_vol(const std::string& formula, const std::string& file, long p, int d, int level, const std::string& decl,
               const Settings& st) {
  check_pd(p, d);
  if (level < 1) throw EvalError("level must be >= 1");
  Formula f = parse_formula(input_text(formula, file), opts_of(parse_decls(decl), Sort::vf()));
  Rational v = vol_level(f, p, d, level, st.count());
  Report r;
  r.text = io::rat_text(v) + "\n";
  r.json = {{"schema", io::schema_tag("vol")}, {"formula", to_string(f)}, {"p", p}, {"d", d}, {"level", level}, {"volume", io::rat_text(v)}};
  return r;
}

MotFun integrand_of(const std::string& integrand, const std::string& file, const std::string& decl, long ctx_p) {
  if (!file.empty()) {
    Json doc = read_json(file);
    io::check_schema(doc, "motfun");
    return io::motfun_from_json(doc);
  }
  if (integrand.empty()) throw FormatError("give --integrand or --file");
  return parse_integrand(integrand, frame_of(parse_decls(decl)), PContext{ctx_p});
}

Report cmd_eval(const std::string& integrand, const std::string& file, const std::string& decl, const std::string& point, long p,
                int d, const Settings& st) {
  check_pd(p, d);
  MotFun f = integrand_of(integrand, file, decl, p);
  Rational v = specialize(f, p, d, parse_point(point, f.frame, p, d), st.count());
  Report r;
  r.text = io::rat_text(v) + "\n";
  r.json = {{"schema", io::schema_tag("eval")}, {"function", io::to_json(f)}, {"p", p}, {"d", d}, {"value", io::rat_text(v)}};
  return r;
}

Report cmd_integrate(const std::string& integrand, const std::string& file, const std::string& decl, const std::vector<std::string>& order,
                     const std::vector<std::string>& fiber, long ctx_p, const std::string& cells) {
  if (ctx_p != 0) check_pd(ctx_p, 1);
  MotFun f = integrand_of(integrand, file, decl, ctx_p);
  Report r;
  if (!cells.empty()) {
    CellDecomposition dec = decompose(f, cells, PContext{ctx_p});
    r.json = io::to_json(dec);
    for (std::size_t k = 0; k < dec.cells.size(); ++k) {
      r.text += "cell " + std::to_string(k) + ": " + dec.cells[k].to_string(cells) + "\n";
      if (k < dec.values.size()) r.text += "  value: " + dec.values[k].to_string() + "\n";
    }
    for (const auto& l : dec.ledger) r.text += "ledger: " + l + "\n";
    return r;
  }
  IntegralResult res = integrate_iterated(f, order, fiber, PContext{ctx_p});
  if (!res.integrable) throw NotIntegrable(res.reason);
  r.json = {{"schema", io::schema_tag("integral")}, {"order", order}, {"fiber", fiber}, {"value", io::to_json(res.value)}, {"ledger", res.ledger}};
  if (auto c = res.value.as_constant()) r.json["constant"] = io::to_json(*c);
  r.text = res.value.to_string() + "\n";
  for (const auto& l : res.ledger) r.text += "ledger: " + l + "\n";
  return r;
}

Report cmd_zeta_motivic(const std::string& H, long ctx_p, int expand) {
  if (ctx_p != 0) check_pd(ctx_p, 1);
  MPoly h = parse_mpoly(H);
  RatSeries z = zmot_monomial(h, PContext{ctx_p});
  Report r;
  r.json = {{"schema", io::schema_tag("zeta-motivic")}, {"H", h.to_string()}, {"series", io::to_json(z)}};
  r.text = "Z_mot(T) = " + z.to_string() + "\n";
  if (expand >= 0) {
    Json cs = Json::array();
    std::vector<MotFun> c = z.expand(expand);
    for (int i = 0; i <= expand; ++i) {
      const MotFun& ci = c[static_cast<std::size_t>(i)];
      auto a = ci.as_constant();
      std::string t = a ? a->to_string() : ci.to_string();
      cs.push_back({{"i", i}, {"text", t}});
      r.text += "  [T^" + std::to_string(i) + "] " + t + "\n";
    }
    r.json["expansion"] = cs;
  }
  return r;
}

int default_imax(const MPoly& h, long p, int d, const Settings& st) {
  return std::max(0, std::min(8, feasible_imax_brute(std::max(1, h.nvars()), p, d, st.cap)));
}

Report cmd_zeta_count(const std::string& H, long p, int d, int imax, const Settings& st) {
  check_pd(p, d);
  MPoly h = parse_mpoly(H);
  const int feasible = feasible_imax_brute(std::max(1, h.nvars()), p, d, st.cap);
  if (imax < 0) imax = default_imax(h, p, d, st);
  CoeffList c = zprime_count(h, p, d, imax, st.count());
  Report r;
  r.json = {{"schema", io::schema_tag("zeta-count")}, {"H", h.to_string()}, {"p", p}, {"d", d}, {"feasible_imax_enumeration", feasible},
            {"coefficients", io::to_json(c)}};
  r.text = "feasible i_max (flat enumeration within cap): " + std::to_string(feasible) + "\n";
  for (int i = 0; i <= imax; ++i) r.text += "v_" + std::to_string(i) + " = " + io::rat_text(c.v[static_cast<std::size_t>(i)]) + "\n";
  return r;
}

Report cmd_verify_meuser(const std::string& H, const std::string& grid, int imax, const std::string& series, const Settings& st) {
  MPoly h = parse_mpoly(H);
  auto g = parse_grid(grid);
  // one motivic series serves the whole grid unless the coefficient's order
  // depends on p; --series checks a given closed form instead
  std::optional<RatSeries> uniform;
  if (!series.empty()) {
    Json doc = read_json(series);
    io::check_schema(doc, "ratseries");
    uniform = io::ratseries_from_json(doc);
  } else {
    try {
      uniform = zmot_monomial(h);
    } catch (const UnsupportedH&) {
    }
  }
  Report r;
  Json runs = Json::array();
  bool ok = true;
  for (const auto& [p, d] : g) {
    RatSeries z = uniform ? *uniform : zmot_monomial(h, PContext{p});
    int im = imax >= 0 ? imax : (h.nvars() >= 2 && d >= 2 ? 4 : 6);
    MeuserReport rep = verify_meuser(z, h, p, d, im, st.count());
    ok = ok && rep.all_match();
    Json j = io::to_json(rep);
    j["series"] = z.to_string();
    runs.push_back(j);
    r.text += "p=" + std::to_string(p) + " d=" + std::to_string(d) + ": " + (rep.all_match() ? "all equal" : "MISMATCH") + "\n";
    std::vector<std::vector<std::string>> rows{{"i", "N_d(Z_mot)", "Z'_d", ""}};
    for (const auto& row : rep.rows) {
      rows.push_back({std::to_string(row.i), io::rat_text(row.motivic), io::rat_text(row.counted), row.match ? "=" : "!="});
    }
    std::vector<std::size_t> w(4, 0);
    for (const auto& row : rows) {
      for (std::size_t k = 0; k < row.size(); ++k) w[k] = std::max(w[k], row[k].size());
    }
    for (const auto& row : rows) r.text += "  " + table_row(row, w);
  }
  r.json = {{"schema", io::schema_tag("meuser")}, {"H", h.to_string()}, {"uniform_series", uniform.has_value()}, {"all_match", ok}, {"runs", runs}};
  if (uniform) r.text = "Z_mot(T) = " + uniform->to_string() + "\n" + r.text;
  r.status = ok ? 0 : 2;
  return r;
}

// key=value config: keys are long option names; flags given on the command
// line win.
std::vector<std::string> with_config(std::vector<std::string> args, CLI::App& app) {
  std::string path;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
  }
  if (path.empty()) return args;
  CLI::App* sub = nullptr;
  for (const auto& a : args) {
    if (a.rfind("-", 0) == 0) continue;
    try {
      sub = app.get_subcommand(a);
      break;
    } catch (const CLI::OptionNotFound&) {
    }
  }
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto [k, v] = key_value(line, "config file");
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    const std::string flag = "--" + k;
    bool known = app.get_option_no_throw(flag) != nullptr || (sub && sub->get_option_no_throw(flag) != nullptr);
    if (!known) throw FormatError("unknown config key '" + k + "'");
    bool given = false;
    for (const auto& a : args) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
    if (given) continue;
    args.push_back(flag);
    args.push_back(v);
  }
  return args;
}

void emit_error(const std::string& format, const std::string& code, const std::string& message) {
  if (format == "json") {
    std::cout << Json{{"schema", io::schema_tag("error")}, {"error", {{"code", code}, {"message", message}}}}.dump(2) << "\n";
  } else {
    std::cerr << "error [" << code << "]: " << message << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Motivic integration calculus and p-adic counting", "motint"};
  app.require_subcommand(1);
  app.fallthrough();
  Settings st;
  st.cap = default_cap();
  std::string config;
  app.add_option("--format", st.format, "output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--config", config, "key=value file; command-line flags override it");
  app.add_option("--cap", st.cap, "enumeration cap (default: MOTINT_CAP or 1e8)")->check(CLI::PositiveNumber);
  app.add_option("--threads", st.threads, "counting threads")->check(CLI::PositiveNumber);

  std::string formula, file, decl, box, point, integrand, H, grid = "p=2,3;d=1,2", arat, cells, series;
  bool sexpr = false;
  long p = 2, ctx_p = 0;
  int d = 1, level = 1, imax = -1, expand = -1;
  std::vector<std::string> qs, over, order, fiber;

  auto* parse = app.add_subcommand("parse", "parse a formula and print its canonical form");
  parse->add_option("--formula", formula, "formula text (else --file, else stdin)");
  parse->add_option("--file", file, "formula file ('-' for stdin)");
  parse->add_flag("--sexpr", sexpr, "input is an S-expression block");
  parse->add_option("--decl", decl, "sorts, e.g. x:vf,z:vg,r:res(2)");

  auto* theta = app.add_subcommand("theta", "theta_q and positivity of an element of A");
  theta->add_option("--arat", arat, "element of A, e.g. \"(L - 1)/L\"")->required();
  theta->add_option("--q", qs, "evaluation points q > 1")->delimiter(',');

  auto* sum = app.add_subcommand("sum", "sum a Presburger function (PFun JSON) over its variables");
  sum->add_option("--file", file, "PFun JSON ('-' for stdin)")->required();
  sum->add_option("--over", over, "summation variables, innermost first (default: all)")->delimiter(',');
  sum->add_option("--q", qs, "theta_q of a constant result")->delimiter(',');

  auto* count = app.add_subcommand("count", "count residue tuples satisfying a formula");
  count->add_option("--formula", formula, "formula over RES/VG variables");
  count->add_option("--file", file, "formula file");
  count->add_option("--p", p, "prime");
  count->add_option("--d", d, "degree of the unramified extension");
  count->add_option("--level", level, "depth of undeclared residue variables");
  count->add_option("--box", box, "value-group ranges, e.g. i=0..5");
  count->add_option("--decl", decl, "sorts of variables");

  auto* vol = app.add_subcommand("vol", "Haar volume of a level-determined subset of O^n");
  vol->add_option("--formula", formula, "formula over VF variables");
  vol->add_option("--file", file, "formula file");
  vol->add_option("--p", p, "prime");
  vol->add_option("--d", d, "degree");
  vol->add_option("--level", level, "determinacy level");
  vol->add_option("--decl", decl, "sorts of variables");

  auto* eval = app.add_subcommand("eval", "specialize a motivic function at a point");
  eval->add_option("--integrand", integrand, "factors: A-constants, L^(vg term), [condition]");
  eval->add_option("--file", file, "MotFun JSON");
  eval->add_option("--decl", decl, "coordinates, e.g. x:vf,z:vg");
  eval->add_option("--point", point, "values, e.g. x=1/2,z=3");
  eval->add_option("--p", p, "prime");
  eval->add_option("--d", d, "degree");

  auto* integ = app.add_subcommand("integrate", "iterated motivic integration");
  integ->add_option("--integrand", integrand, "factors: A-constants, L^(vg term), [condition]");
  integ->add_option("--file", file, "MotFun JSON");
  integ->add_option("--decl", decl, "coordinates, e.g. x:vf,y:vf");
  integ->add_option("--order", order, "VF variables, innermost first")->delimiter(',');
  integ->add_option("--fiber", fiber, "VG/RES coordinates summed afterwards")->delimiter(',');
  integ->add_option("--context-p", ctx_p, "residue characteristic for constants like ord(2)");
  integ->add_option("--cells", cells, "print the cell decomposition in this variable instead");

  auto* zm = app.add_subcommand("zeta-motivic", "Z_mot(T) of a monomial");
  zm->add_option("--H", H, "monomial, e.g. x^2*y^3")->required();
  zm->add_option("--context-p", ctx_p, "residue characteristic fixing the order of the coefficient");
  zm->add_option("--expand", expand, "print coefficients up to T^n");

  auto* zc = app.add_subcommand("zeta-count", "Z'_d(T) coefficients by exact counting");
  zc->add_option("--H", H, "integer polynomial")->required();
  zc->add_option("--p", p, "prime");
  zc->add_option("--d", d, "degree");
  zc->add_option("--imax", imax, "largest i (default: from the cap, at most 8)");

  auto* vm = app.add_subcommand("verify-meuser", "compare N_d(Z_mot) with Z'_d");
  vm->add_option("--H", H, "monomial")->required();
  vm->add_option("--grid", grid, "e.g. p=2,3;d=1,2");
  vm->add_option("--imax", imax, "largest i (default 6, or 4 for n >= 2 at d >= 2)");
  vm->add_option("--series", series, "RatSeries JSON to check in place of the computed Z_mot");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = with_config(args, app);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error [UsageError]: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const Error& e) {
    emit_error("text", e.code(), e.what());
    return 1;
  }

  try {
    Report r;
    if (*parse) r = cmd_parse(formula, file, sexpr, decl);
    if (*theta) r = cmd_theta(arat, qs);
    if (*sum) r = cmd_sum(file, over, qs);
    if (*count) r = cmd_count(formula, file, p, d, level, box, decl, st);
    if (*vol) r = cmd_vol(formula, file, p, d, level, decl, st);
    if (*eval) r = cmd_eval(integrand, file, decl, point, p, d, st);
    if (*integ) r = cmd_integrate(integrand, file, decl, order, fiber, ctx_p, cells);
    if (*zm) r = cmd_zeta_motivic(H, ctx_p, expand);
    if (*zc) r = cmd_zeta_count(H, p, d, imax, st);
    if (*vm) r = cmd_verify_meuser(H, grid, imax, series, st);
    if (st.format == "json") {
      std::cout << r.json.dump(2) << "\n";
    } else {
      std::cout << r.text;
    }
    return r.status;
  } catch (const Error& e) {
    emit_error(st.format, e.code(), e.what());
  } catch (const std::exception& e) {
    emit_error(st.format, "InternalError", e.what());
  }
  return 1;
}
