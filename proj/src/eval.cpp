#include <atomic>
#include <cstdlib>
#include <thread>

#include "motint/padic.hpp"

namespace motint {

namespace {

enum class Tri { False, True, Unknown };

Tri tri_not(Tri t) {
  if (t == Tri::Unknown) return t;
  return t == Tri::True ? Tri::False : Tri::True;
}

const GaloisRing& res_ring(const Env& env, int n) { return GaloisRing::with_modulus(env.p, env.d, n, env.modulus); }

std::optional<Integer> opt_add(const std::optional<Integer>& a, const std::optional<Integer>& b) {
  if (!a || !b) return std::nullopt;
  return *a + *b;
}

VGValue vg_neg(const VGValue& v) {
  VGValue r;
  r.undefined = v.undefined;
  if (v.hi) r.lo = -*v.hi;
  if (v.lo) r.hi = -*v.lo;
  return r;
}

VGValue vg_add(const VGValue& a, const VGValue& b) {
  VGValue r;
  r.undefined = a.undefined || b.undefined;
  r.lo = opt_add(a.lo, b.lo);
  r.hi = opt_add(a.hi, b.hi);
  return r;
}

VGValue vg_scale(const VGValue& v, const Integer& k) {
  if (k == 0) return VGValue::point(Integer(0));
  VGValue r;
  r.undefined = v.undefined;
  if (v.lo) r.lo = *v.lo * k;
  if (v.hi) r.hi = *v.hi * k;
  if (k < 0) std::swap(r.lo, r.hi);
  return r;
}

Integer literal_value(const Term& t) {
  if (t->kind == TermKind::Int) return t->value.get_num();
  throw EvalError("expected an integer literal in " + to_string(t));
}

struct Evaluator {
  Env& env;

  Tri atom_vg(FormKind k, const Term& a, const Term& b) {
    VGValue d = vg_add(eval_vg(a, env), vg_neg(eval_vg(b, env)));
    if (d.undefined) return Tri::False;
    // d = a - b in [lo, hi]
    auto ge0 = [&]() -> Tri {
      if (d.lo && *d.lo >= 0) return Tri::True;
      if (d.hi && *d.hi < 0) return Tri::False;
      return Tri::Unknown;
    };
    auto le0 = [&]() -> Tri {
      if (d.hi && *d.hi <= 0) return Tri::True;
      if (d.lo && *d.lo > 0) return Tri::False;
      return Tri::Unknown;
    };
    auto eq0 = [&]() -> Tri {
      if (d.is_point()) return *d.lo == 0 ? Tri::True : Tri::False;
      if ((d.lo && *d.lo > 0) || (d.hi && *d.hi < 0)) return Tri::False;
      return Tri::Unknown;
    };
    switch (k) {
      case FormKind::Eq: return eq0();
      case FormKind::Ne: return tri_not(eq0());
      case FormKind::Le: return le0();
      case FormKind::Ge: return ge0();
      case FormKind::Lt: return tri_not(ge0());
      case FormKind::Gt: return tri_not(le0());
      default: throw EvalError("bad value-group atom");
    }
  }

  Tri atom(const Formula& f) {
    const Term& a = f->terms[0];
    const Term& b = f->terms[1];
    try {
      if (f->kind == FormKind::Cong) {
        VGValue d = vg_add(eval_vg(a, env), vg_neg(eval_vg(b, env)));
        if (d.undefined) return Tri::False;
        if (!d.is_point()) return Tri::Unknown;
        Integer r;
        mpz_fdiv_r(r.get_mpz_t(), d.lo->get_mpz_t(), f->modulus.get_mpz_t());
        return r == 0 ? Tri::True : Tri::False;
      }
      switch (a->sort.kind) {
        case Sort::VG: return atom_vg(f->kind, a, b);
        case Sort::RES: {
          bool eq = eval_res(a, env) == eval_res(b, env);
          if (f->kind == FormKind::Eq) return eq ? Tri::True : Tri::False;
          if (f->kind == FormKind::Ne) return eq ? Tri::False : Tri::True;
          throw EvalError("order comparison of residue terms");
        }
        case Sort::VF: {
          bool z = (eval_vf(a, env) - eval_vf(b, env)).is_zero();
          if (f->kind == FormKind::Eq) return z ? Tri::True : Tri::False;
          if (f->kind == FormKind::Ne) return z ? Tri::False : Tri::True;
          throw EvalError("order comparison of valued-field terms");
        }
      }
    } catch (const InsufficientPrecision&) {
      return Tri::Unknown;
    }
    return Tri::Unknown;
  }

  template <class Body>
  Tri quantify(const Formula& f, bool exists, Body&& body) {
    bool unknown = false;
    Tri stop = exists ? Tri::True : Tri::False;
    auto step = [&](Tri t) {
      if (t == stop) return true;
      if (t == Tri::Unknown) unknown = true;
      return false;
    };
    const std::string& v = f->var;
    if (f->var_sort.kind == Sort::RES) {
      const GaloisRing& R = res_ring(env, f->var_sort.depth);
      auto saved = env.res.find(v) != env.res.end() ? std::optional<GRElem>(env.res.at(v)) : std::nullopt;
      std::int64_t n = R.size();
      bool hit = false;
      for (std::int64_t i = 0; i < n && !hit; ++i) {
        env.res[v] = R.element_at(i);
        hit = step(body());
      }
      if (saved) env.res[v] = *saved; else env.res.erase(v);
      if (hit) return stop;
      return unknown ? Tri::Unknown : tri_not(stop);
    }
    if (f->var_sort.kind == Sort::VG) {
      if (!f->lo || !f->hi) throw EvalError("value-group quantifier over '" + v + "' needs finite bounds for evaluation");
      auto saved = env.vg.find(v) != env.vg.end() ? std::optional<Integer>(env.vg.at(v)) : std::nullopt;
      bool hit = false;
      for (Integer z = *f->lo; z <= *f->hi && !hit; ++z) {
        env.vg[v] = z;
        hit = step(body());
      }
      if (saved) env.vg[v] = *saved; else env.vg.erase(v);
      if (hit) return stop;
      return unknown ? Tri::Unknown : tri_not(stop);
    }
    throw EvalError("quantifier over the valued field");
  }

  Tri eval(const Formula& f) {
    switch (f->kind) {
      case FormKind::True: return Tri::True;
      case FormKind::False: return Tri::False;
      case FormKind::Not: return tri_not(eval(f->subs[0]));
      case FormKind::And: {
        bool unknown = false;
        for (const auto& s : f->subs) {
          Tri t = eval(s);
          if (t == Tri::False) return t;
          if (t == Tri::Unknown) unknown = true;
        }
        return unknown ? Tri::Unknown : Tri::True;
      }
      case FormKind::Or: {
        bool unknown = false;
        for (const auto& s : f->subs) {
          Tri t = eval(s);
          if (t == Tri::True) return t;
          if (t == Tri::Unknown) unknown = true;
        }
        return unknown ? Tri::Unknown : Tri::False;
      }
      case FormKind::Exists: return quantify(f, true, [&] { return eval(f->subs[0]); });
      case FormKind::Forall: return quantify(f, false, [&] { return eval(f->subs[0]); });
      default: return atom(f);
    }
  }
};

bool decide(const Formula& f, Env& env) {
  Tri t = Evaluator{env}.eval(f);
  if (t == Tri::Unknown) throw InsufficientPrecision("truth value of " + to_string(f) + " not determined at the given precision");
  return t == Tri::True;
}

}  // namespace

PadicElem eval_vf(const Term& t, const Env& env) {
  switch (t->kind) {
    case TermKind::Var: {
      auto it = env.vf.find(t->name);
      if (it == env.vf.end()) throw EvalError("unbound valued-field variable '" + t->name + "'");
      return it->second;
    }
    case TermKind::Int:
    case TermKind::Rat: {
      std::vector<Rational> c(static_cast<std::size_t>(env.d), Rational(0));
      c[0] = t->value;
      return PadicElem::exact_coords(env.p, env.d, c, env.modulus);
    }
    case TermKind::Pi: {
      std::vector<Rational> c(static_cast<std::size_t>(env.d), Rational(0));
      c[0] = env.p;
      return PadicElem::exact_coords(env.p, env.d, c, env.modulus);
    }
    case TermKind::Add: return eval_vf(t->args[0], env) + eval_vf(t->args[1], env);
    case TermKind::Sub: return eval_vf(t->args[0], env) - eval_vf(t->args[1], env);
    case TermKind::Mul: return eval_vf(t->args[0], env) * eval_vf(t->args[1], env);
    case TermKind::Neg: return -eval_vf(t->args[0], env);
    case TermKind::Pow: return eval_vf(t->args[0], env).pow(static_cast<unsigned>(t->n));
    default: throw EvalError("not a valued-field term: " + to_string(t));
  }
}

GRElem eval_res(const Term& t, const Env& env) {
  const int n = t->sort.depth;
  const GaloisRing& R = res_ring(env, n);
  switch (t->kind) {
    case TermKind::Var: {
      auto it = env.res.find(t->name);
      if (it == env.res.end()) throw EvalError("unbound residue variable '" + t->name + "'");
      if (it->second.ring->level() != n) throw EvalError("residue variable '" + t->name + "' bound at the wrong depth");
      return it->second;
    }
    case TermKind::Int: return R.from_int(t->value.get_num());
    case TermKind::Pi: return R.from_int(Integer(env.p));
    case TermKind::Add: return eval_res(t->args[0], env) + eval_res(t->args[1], env);
    case TermKind::Sub: return eval_res(t->args[0], env) - eval_res(t->args[1], env);
    case TermKind::Mul: return eval_res(t->args[0], env) * eval_res(t->args[1], env);
    case TermKind::Neg: return -eval_res(t->args[0], env);
    case TermKind::Pow: {
      GRElem b = eval_res(t->args[0], env), r = R.one();
      for (int i = 0; i < t->n; ++i) r = r * b;
      return r;
    }
    case TermKind::Ac: {
      return R.convert(eval_vf(t->args[0], env).ac(t->n));
    }
    case TermKind::Proj: return R.convert(eval_res(t->args[0], env));
    default: throw EvalError("not a residue term: " + to_string(t));
  }
}

VGValue eval_vg(const Term& t, const Env& env) {
  switch (t->kind) {
    case TermKind::Var: {
      auto it = env.vg.find(t->name);
      if (it == env.vg.end()) throw EvalError("unbound value-group variable '" + t->name + "'");
      return VGValue::point(it->second);
    }
    case TermKind::Int: return VGValue::point(t->value.get_num());
    case TermKind::Add: return vg_add(eval_vg(t->args[0], env), eval_vg(t->args[1], env));
    case TermKind::Sub: return vg_add(eval_vg(t->args[0], env), vg_neg(eval_vg(t->args[1], env)));
    case TermKind::Neg: return vg_neg(eval_vg(t->args[0], env));
    case TermKind::Mul: {
      const Term& a = t->args[0];
      const Term& b = t->args[1];
      if (a->kind == TermKind::Int) return vg_scale(eval_vg(b, env), literal_value(a));
      return vg_scale(eval_vg(a, env), literal_value(b));
    }
    case TermKind::Ord: {
      PadicElem x = eval_vf(t->args[0], env);
      if (x.is_exact()) {
        auto v = x.ord();
        if (!v) return VGValue{true, std::nullopt, std::nullopt};
        return VGValue::point(Integer(*v));
      }
      if (x.ord_determined()) return VGValue::point(Integer(*x.ord()));
      VGValue r;
      r.lo = Integer(x.ord_lower_bound());
      return r;
    }
    default: throw EvalError("not a value-group term: " + to_string(t));
  }
}

bool evaluate(const Formula& f, const Env& env) {
  Env e = env;
  return decide(f, e);
}

std::int64_t default_cap() {
  const char* s = std::getenv("MOTINT_CAP");
  if (!s || !*s) return 100000000;
  char* end = nullptr;
  long long v = std::strtoll(s, &end, 10);
  if (*end != '\0' || v < 1) throw EvalError(std::string("MOTINT_CAP must be a positive integer, got '") + s + "'");
  return v;
}

namespace {

// Mixed-radix enumeration of tuples; calls `visit(env)` for each index.
template <class Visit>
Integer parallel_count(std::int64_t total, int threads, const Visit& visit) {
  threads = std::max(1, threads);
  if (total < 1024) threads = 1;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(threads), 0);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  auto work = [&](int tid) {
    try {
      std::int64_t lo = total * tid / threads, hi = total * (tid + 1) / threads;
      counts[static_cast<std::size_t>(tid)] = visit(lo, hi);
    } catch (...) {
      errors[static_cast<std::size_t>(tid)] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Integer sum = 0;
  for (auto c : counts) sum += Integer(static_cast<long>(c));
  return sum;
}

}  // namespace

Integer count_points(const Formula& f, long p, int d, const std::map<std::string, std::pair<Integer, Integer>>& box,
                     const CountOptions& opts, const Env& base) {
  Env env = base;
  env.p = p;
  env.d = d;
  struct Slot {
    std::string name;
    bool res;
    const GaloisRing* ring;
    Integer lo;
    std::int64_t size;
  };
  std::vector<Slot> slots;
  Integer total = 1;
  for (const auto& v : free_vars(f)) {
    if (v.sort.kind == Sort::VF) {
      if (!env.vf.count(v.name)) throw EvalError("valued-field variable '" + v.name + "' must be fixed before counting");
      continue;
    }
    if (v.sort.kind == Sort::RES) {
      if (env.res.count(v.name)) continue;
      const GaloisRing& R = res_ring(env, v.sort.depth);
      total *= R.size_exact();
      if (total > opts.cap) break;
      slots.push_back({v.name, true, &R, 0, R.size()});
    } else {
      if (env.vg.count(v.name)) continue;
      auto it = box.find(v.name);
      if (it == box.end()) throw EvalError("value-group variable '" + v.name + "' needs a box");
      Integer w = it->second.second - it->second.first + 1;
      if (w <= 0) return 0;
      total *= w;
      if (total > opts.cap) break;
      slots.push_back({v.name, false, nullptr, it->second.first, w.get_si()});
    }
  }
  if (total > opts.cap) {
    throw CapExceeded("counting needs " + total.get_str() + " evaluations, cap is " + std::to_string(opts.cap));
  }
  const std::int64_t n = total.get_si();
  return parallel_count(n, opts.threads, [&](std::int64_t lo, std::int64_t hi) {
    Env local = env;
    std::int64_t c = 0;
    for (std::int64_t idx = lo; idx < hi; ++idx) {
      std::int64_t x = idx;
      for (auto it = slots.rbegin(); it != slots.rend(); ++it) {
        std::int64_t k = x % it->size;
        x /= it->size;
        if (it->res) {
          local.res[it->name] = it->ring->element_at(k);
        } else {
          local.vg[it->name] = it->lo + Integer(static_cast<long>(k));
        }
      }
      if (decide(f, local)) ++c;
    }
    return c;
  });
}

Rational vol_level(const Formula& f, long p, int d, int level, const CountOptions& opts) {
  if (level < 1) throw EvalError("level must be >= 1");
  std::vector<std::string> vars;
  for (const auto& v : free_vars(f)) {
    if (v.sort.kind != Sort::VF) throw EvalError("vol_level expects only valued-field variables, found '" + v.name + "'");
    vars.push_back(v.name);
  }
  const GaloisRing& R = GaloisRing::get(p, d, level);
  Integer total = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) total *= R.size_exact();
  if (total > opts.cap) throw CapExceeded("volume at level " + std::to_string(level) + " needs " + total.get_str() + " evaluations, cap is " + std::to_string(opts.cap));
  const std::int64_t n = total.get_si(), rs = vars.empty() ? 1 : R.size();
  Env env;
  env.p = p;
  env.d = d;
  Integer hits = parallel_count(n, opts.threads, [&](std::int64_t lo, std::int64_t hi) {
    Env local = env;
    std::int64_t c = 0;
    for (std::int64_t idx = lo; idx < hi; ++idx) {
      std::int64_t x = idx;
      for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
        local.vf.insert_or_assign(*it, PadicElem::truncated(R.element_at(x % rs), 0));
        x /= rs;
      }
      try {
        if (decide(f, local)) ++c;
      } catch (const InsufficientPrecision&) {
        throw InsufficientPrecision("membership is not determined at level " + std::to_string(level));
      }
    }
    return c;
  });
  return Rational(hits) / Rational(total);
}

}  // namespace motint
