#include "motint/mpoly.hpp"

#include <sstream>

namespace motint {

namespace {

using Terms = std::map<std::vector<int>, Rational>;

Terms mul(const Terms& a, const Terms& b) {
  Terms r;
  for (const auto& [ea, ca] : a) {
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r[e] += ca * cb;
    }
  }
  for (auto it = r.begin(); it != r.end();) it = it->second == 0 ? r.erase(it) : std::next(it);
  return r;
}

Terms add(Terms a, const Terms& b, int sign) {
  for (const auto& [e, c] : b) a[e] += sign > 0 ? c : Rational(-c);
  for (auto it = a.begin(); it != a.end();) it = it->second == 0 ? a.erase(it) : std::next(it);
  return a;
}

Terms expand(const Term& t, const std::vector<std::string>& vars) {
  const std::size_t n = vars.size();
  switch (t->kind) {
    case TermKind::Var: {
      std::vector<int> e(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (vars[i] == t->name) e[i] = 1;
      }
      return {{e, Rational(1)}};
    }
    case TermKind::Int:
    case TermKind::Rat:
      if (t->value == 0) return {};
      return {{std::vector<int>(n, 0), t->value}};
    case TermKind::Add: return add(expand(t->args[0], vars), expand(t->args[1], vars), 1);
    case TermKind::Sub: return add(expand(t->args[0], vars), expand(t->args[1], vars), -1);
    case TermKind::Neg: return add({}, expand(t->args[0], vars), -1);
    case TermKind::Mul: return mul(expand(t->args[0], vars), expand(t->args[1], vars));
    case TermKind::Pow: {
      Terms r{{std::vector<int>(n, 0), Rational(1)}};
      Terms b = expand(t->args[0], vars);
      for (int i = 0; i < t->n; ++i) r = mul(r, b);
      return r;
    }
    default: throw ParseError("polynomial expected, found " + to_string(t), 0);
  }
}

}  // namespace

int MPoly::total_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms) {
    int s = 0;
    for (int k : e) s += k;
    d = std::max(d, s);
  }
  return d;
}

std::string MPoly::to_string() const { return motint::to_string(mpoly_to_term(*this)); }

MPoly mpoly_from_term(const Term& t) {
  if (t->sort.kind != Sort::VF) throw SortError("polynomial must be a valued-field term");
  MPoly h;
  for (const auto& v : free_vars(t)) h.vars.push_back(v.name);
  h.terms = expand(t, h.vars);
  return h;
}

MPoly parse_mpoly(const std::string& text) {
  ParseOptions o;
  o.default_sort = Sort::vf();
  Term t = parse_term(text, Sort::vf(), o);
  for (const auto& v : free_vars(t)) {
    if (v.sort.kind != Sort::VF) throw ParseError("variable '" + v.name + "' is not a valued-field variable", 0);
  }
  return mpoly_from_term(t);
}

Term mpoly_to_term(const MPoly& h) {
  Term sum;
  // Highest total degree first, then lexicographically.
  std::vector<std::pair<std::vector<int>, Rational>> ts(h.terms.rbegin(), h.terms.rend());
  std::stable_sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) {
    int da = 0, db = 0;
    for (int k : a.first) da += k;
    for (int k : b.first) db += k;
    return da > db;
  });
  for (const auto& [e, c] : ts) {
    Term mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      Term f = term::var(h.vars[i], Sort::vf());
      if (e[i] > 1) f = term::pow(f, e[i]);
      mono = mono ? term::mul(mono, f) : f;
    }
    Rational a = abs(c);
    bool negative = c < 0;
    if (!mono) {
      mono = term::rational(a);
    } else if (a != 1) {
      mono = term::mul(term::rational(a), mono);
    }
    if (!sum) {
      sum = negative ? term::neg(mono) : mono;
    } else {
      sum = negative ? term::sub(sum, mono) : term::add(sum, mono);
    }
  }
  return sum ? sum : term::integer(0, Sort::vf());
}

}  // namespace motint
