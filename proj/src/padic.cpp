#include "motint/padic.hpp"

#include <climits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <tuple>

namespace motint {

using i64 = std::int64_t;
using i128 = __int128;

bool is_prime(long p) {
  if (p < 2) return false;
  for (long k = 2; k * k <= p; ++k) {
    if (p % k == 0) return false;
  }
  return true;
}

long padic_valuation(const Rational& r, long p) {
  if (r == 0) throw EvalError("valuation of zero");
  long v = 0;
  Integer n = r.get_num(), d = r.get_den();
  while (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p))) {
    n /= p;
    ++v;
  }
  while (mpz_divisible_ui_p(d.get_mpz_t(), static_cast<unsigned long>(p))) {
    d /= p;
    --v;
  }
  return v;
}

namespace {

i64 mod_reduce(i128 v, i64 m) {
  i128 r = v % m;
  if (r < 0) r += m;
  return static_cast<i64>(r);
}

i64 int_mod(const Integer& v, i64 m) {
  Integer r;
  mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(m));
  return r.get_si();
}

i64 pow_i64(long p, int e) {
  i128 r = 1;
  for (int i = 0; i < e; ++i) {
    r *= p;
    if (r > (static_cast<i128>(1) << 62)) throw EvalError("p^" + std::to_string(e) + " exceeds the 62-bit coefficient range");
  }
  return static_cast<i64>(r);
}

int small_val(i64 c, long p, int cap) {
  if (c == 0) return cap;
  int v = 0;
  while (c % p == 0 && v < cap) {
    c /= p;
    ++v;
  }
  return v;
}

// Monic polynomials mod p, ascending coefficients.
using ModPoly = std::vector<long>;

ModPoly mp_trim(ModPoly a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

ModPoly mp_rem(ModPoly a, const ModPoly& b, long p) {
  a = mp_trim(a);
  long inv = 1;
  // b is monic in all uses.
  (void)inv;
  while (a.size() >= b.size() && !a.empty()) {
    long t = a.back();
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) {
      a[shift + i] = ((a[shift + i] - t * b[i]) % p + p) % p;
    }
    a = mp_trim(a);
  }
  return a;
}

bool irreducible_mod_p(const ModPoly& f, long p) {
  int d = static_cast<int>(f.size()) - 1;
  if (d <= 1) return true;
  // Trial division by every monic polynomial of degree 1..d/2.
  for (int k = 1; k <= d / 2; ++k) {
    i64 total = 1;
    for (int i = 0; i < k; ++i) total *= p;
    for (i64 idx = 0; idx < total; ++idx) {
      ModPoly g(static_cast<std::size_t>(k + 1), 0);
      g[static_cast<std::size_t>(k)] = 1;
      i64 x = idx;
      for (int i = 0; i < k; ++i) {
        g[static_cast<std::size_t>(i)] = static_cast<long>(x % p);
        x /= p;
      }
      if (mp_rem(f, g, p).empty()) return false;
    }
  }
  return true;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct GRImpl {
  static std::map<std::tuple<long, int, int, std::vector<long>>, std::unique_ptr<GaloisRing>>& registry() {
    static std::map<std::tuple<long, int, int, std::vector<long>>, std::unique_ptr<GaloisRing>> r;
    return r;
  }
  static const GaloisRing& make(long p, int d, int level, const std::vector<long>& mod) {
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto key = std::make_tuple(p, d, level, mod);
    auto& reg = registry();
    auto it = reg.find(key);
    if (it != reg.end()) return *it->second;
    auto ring = std::unique_ptr<GaloisRing>(new GaloisRing(p, d, level, mod));
    const GaloisRing& ref = *ring;
    reg.emplace(key, std::move(ring));
    return ref;
  }
};

std::vector<long> GaloisRing::default_modulus(long p, int d) {
  static std::mutex m;
  static std::map<std::pair<long, int>, std::vector<long>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find({p, d});
  if (it != cache.end()) return it->second;
  if (!is_prime(p)) throw EvalError("p = " + std::to_string(p) + " is not prime");
  if (d < 1 || d > kMaxDegree) throw EvalError("degree d must be in [1, " + std::to_string(kMaxDegree) + "]");
  // Candidates in lexicographic order of (a_{d-1}, ..., a_0).
  i64 total = 1;
  for (int i = 0; i < d; ++i) {
    total *= p;
    if (total > (i64(1) << 40)) throw EvalError("search space for the modulus too large");
  }
  for (i64 idx = 0; idx < total; ++idx) {
    ModPoly f(static_cast<std::size_t>(d + 1), 0);
    f[static_cast<std::size_t>(d)] = 1;
    i64 x = idx;
    for (int i = 0; i < d; ++i) {  // a_0 varies fastest
      f[static_cast<std::size_t>(i)] = static_cast<long>(x % p);
      x /= p;
    }
    if (d > 1 && f[0] == 0) continue;
    if (irreducible_mod_p(f, p)) {
      cache[{p, d}] = f;
      return f;
    }
  }
  throw EvalError("no irreducible polynomial found");
}

GaloisRing::GaloisRing(long p, int d, int level, std::vector<long> mod)
    : p_(p), d_(d), level_(level), pl_(pow_i64(p, level)), mod_(std::move(mod)) {}

const GaloisRing& GaloisRing::get(long p, int d, int level) {
  if (level < 0) throw EvalError("negative level");
  return GRImpl::make(p, d, level, default_modulus(p, d));
}

const GaloisRing& GaloisRing::with_modulus(long p, int d, int level, const std::vector<long>& modulus) {
  if (modulus.empty()) return get(p, d, level);
  if (!is_prime(p)) throw EvalError("p = " + std::to_string(p) + " is not prime");
  if (static_cast<int>(modulus.size()) != d + 1 || modulus.back() != 1) throw EvalError("modulus must be monic of degree d");
  ModPoly f;
  for (long c : modulus) f.push_back(((c % p) + p) % p);
  if (!irreducible_mod_p(f, p)) throw EvalError("modulus is reducible mod p");
  return GRImpl::make(p, d, level, modulus);
}

const GaloisRing& GaloisRing::at_level(int level) const { return GRImpl::make(p_, d_, level, mod_); }

i64 GaloisRing::size() const {
  i128 r = 1;
  for (int i = 0; i < d_; ++i) {
    r *= pl_;
    if (r > (static_cast<i128>(1) << 62)) throw CapExceeded("ring of size " + size_exact().get_str() + " is too large to enumerate");
  }
  return static_cast<i64>(r);
}

Integer GaloisRing::size_exact() const {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p_), static_cast<unsigned long>(d_ * level_));
  return r;
}

GRElem GaloisRing::zero() const {
  GRElem e;
  e.ring = this;
  return e;
}

GRElem GaloisRing::one() const { return from_int(Integer(1)); }

GRElem GaloisRing::from_int(const Integer& v) const {
  GRElem e = zero();
  e.c[0] = int_mod(v, pl_);
  return e;
}

GRElem GaloisRing::from_rational(const Rational& v) const {
  GRElem e = zero();
  if (pl_ == 1) return e;
  Integer den = v.get_den();
  if (mpz_divisible_ui_p(den.get_mpz_t(), static_cast<unsigned long>(p_))) {
    throw EvalError("rational " + v.get_str() + " is not p-integral");
  }
  Integer inv, m(static_cast<long>(pl_));
  mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t());
  e.c[0] = int_mod(v.get_num() * inv, pl_);
  return e;
}

GRElem GaloisRing::from_coeffs(const std::vector<Integer>& cs) const {
  GRElem e = zero();
  for (std::size_t i = 0; i < cs.size() && i < static_cast<std::size_t>(d_); ++i) e.c[i] = int_mod(cs[i], pl_);
  return e;
}

GRElem GaloisRing::from_rational_coords(const std::vector<Rational>& cs) const {
  GRElem e = zero();
  for (std::size_t i = 0; i < cs.size() && i < static_cast<std::size_t>(d_); ++i) e.c[i] = from_rational(cs[i]).c[0];
  return e;
}

GRElem GaloisRing::element_at(i64 idx) const {
  GRElem e = zero();
  for (int i = d_ - 1; i >= 0; --i) {
    e.c[static_cast<std::size_t>(i)] = idx % pl_;
    idx /= pl_;
  }
  return e;
}

GRElem GaloisRing::convert(const GRElem& x) const {
  if (x.ring->p_ != p_ || x.ring->d_ != d_ || x.ring->mod_ != mod_) throw EvalError("conversion between unrelated Galois rings");
  GRElem e = zero();
  for (int i = 0; i < d_; ++i) e.c[static_cast<std::size_t>(i)] = x.c[static_cast<std::size_t>(i)] % pl_;
  return e;
}

GRElem GaloisRing::divide_p(const GRElem& x, int k) const {
  i64 pk = pow_i64(p_, k);
  GRElem e = zero();
  for (int i = 0; i < d_; ++i) {
    i64 c = x.c[static_cast<std::size_t>(i)];
    if (c % pk != 0) throw EvalError("element not divisible by p^" + std::to_string(k));
    e.c[static_cast<std::size_t>(i)] = (c / pk) % pl_;
  }
  return e;
}

GRElem GaloisRing::inverse(const GRElem& x) const {
  if (level_ == 0) return zero();
  if (x.valuation() != 0) throw EvalError("inverse of a non-unit " + x.to_string());
  // Inverse mod p via x^(q-2) in the residue field, then Newton lifting.
  const GaloisRing& F = at_level(1);
  GRElem base = F.convert(x), r = F.one();
  Integer e;
  mpz_ui_pow_ui(e.get_mpz_t(), static_cast<unsigned long>(p_), static_cast<unsigned long>(d_));
  e -= 2;
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) r = r * base;
    base = base * base;
    e /= 2;
  }
  GRElem y = convert(r);
  GRElem xx = convert(x);
  GRElem two = from_int(Integer(2));
  for (int prec = 1; prec < level_; prec *= 2) y = y * (two - xx * y);
  return y;
}

bool GRElem::is_zero() const {
  for (int i = 0; i < ring->d(); ++i) {
    if (c[static_cast<std::size_t>(i)] != 0) return false;
  }
  return true;
}

int GRElem::valuation() const {
  int v = ring->level();
  for (int i = 0; i < ring->d(); ++i) v = std::min(v, small_val(c[static_cast<std::size_t>(i)], ring->p(), ring->level()));
  return v;
}

std::string GRElem::to_string() const {
  if (ring->d() == 1) return std::to_string(c[0]);
  std::string s = "[";
  for (int i = 0; i < ring->d(); ++i) {
    if (i) s += ",";
    s += std::to_string(c[static_cast<std::size_t>(i)]);
  }
  return s + "]";
}

namespace {
void same_ring(const GRElem& a, const GRElem& b) {
  if (a.ring != b.ring) throw EvalError("operands from different Galois rings");
}
}  // namespace

bool operator==(const GRElem& a, const GRElem& b) {
  same_ring(a, b);
  return a.c == b.c;
}

GRElem operator+(const GRElem& a, const GRElem& b) {
  same_ring(a, b);
  GRElem r = a;
  i64 m = a.ring->modulus_pl();
  for (int i = 0; i < a.ring->d(); ++i) {
    i64 s = a.c[static_cast<std::size_t>(i)] + b.c[static_cast<std::size_t>(i)];
    r.c[static_cast<std::size_t>(i)] = s >= m ? s - m : s;
  }
  return r;
}

GRElem operator-(const GRElem& a) {
  GRElem r = a;
  i64 m = a.ring->modulus_pl();
  for (int i = 0; i < a.ring->d(); ++i) {
    i64 s = a.c[static_cast<std::size_t>(i)];
    r.c[static_cast<std::size_t>(i)] = s == 0 ? 0 : m - s;
  }
  return r;
}

GRElem operator-(const GRElem& a, const GRElem& b) { return a + (-b); }

GRElem operator*(const GRElem& a, const GRElem& b) {
  same_ring(a, b);
  const GaloisRing& R = *a.ring;
  const int d = R.d();
  const i64 m = R.modulus_pl();
  if (d == 1) {
    GRElem r = a;
    r.c[0] = mod_reduce(static_cast<i128>(a.c[0]) * b.c[0], m);
    return r;
  }
  std::array<i128, 2 * kMaxDegree> t{};
  for (int i = 0; i < d; ++i) {
    if (a.c[static_cast<std::size_t>(i)] == 0) continue;
    for (int j = 0; j < d; ++j) {
      t[static_cast<std::size_t>(i + j)] =
          mod_reduce(t[static_cast<std::size_t>(i + j)] + static_cast<i128>(a.c[static_cast<std::size_t>(i)]) * b.c[static_cast<std::size_t>(j)], m);
    }
  }
  const auto& f = R.modulus();
  for (int k = 2 * d - 2; k >= d; --k) {
    i128 top = t[static_cast<std::size_t>(k)];
    if (top == 0) continue;
    t[static_cast<std::size_t>(k)] = 0;
    for (int i = 0; i < d; ++i) {
      t[static_cast<std::size_t>(k - d + i)] = mod_reduce(t[static_cast<std::size_t>(k - d + i)] - top * f[static_cast<std::size_t>(i)], m);
    }
  }
  GRElem r = R.zero();
  for (int i = 0; i < d; ++i) r.c[static_cast<std::size_t>(i)] = static_cast<i64>(t[static_cast<std::size_t>(i)]);
  return r;
}

std::vector<GRElem> enumerate(const GaloisRing& R, i64 cap) {
  Integer n = R.size_exact();
  if (n > cap) throw CapExceeded("enumeration of " + n.get_str() + " elements exceeds the cap " + std::to_string(cap));
  i64 size = R.size();
  std::vector<GRElem> out;
  out.reserve(static_cast<std::size_t>(size));
  for (i64 i = 0; i < size; ++i) out.push_back(R.element_at(i));
  return out;
}

// ----------------------------------------------------------------- PadicElem

namespace {

const std::vector<long>& effective_modulus(long p, int d, const std::vector<long>& m) {
  static thread_local std::vector<long> tmp;
  if (!m.empty()) return m;
  tmp = GaloisRing::default_modulus(p, d);
  return tmp;
}

// Multiplication in Q[w]/(f).
std::vector<Rational> poly_mulmod(const std::vector<Rational>& a, const std::vector<Rational>& b, const std::vector<long>& f) {
  const std::size_t d = a.size();
  std::vector<Rational> t(2 * d - 1, Rational(0));
  for (std::size_t i = 0; i < d; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < d; ++j) t[i + j] += a[i] * b[j];
  }
  for (std::size_t k = 2 * d - 2; k >= d && k < t.size(); --k) {
    Rational top = t[k];
    if (top == 0) continue;
    t[k] = 0;
    for (std::size_t i = 0; i < d; ++i) t[k - d + i] -= top * f[i];
  }
  t.resize(d);
  return t;
}

}  // namespace

PadicElem PadicElem::exact(long p, int d, const Rational& v) {
  std::vector<Rational> c(static_cast<std::size_t>(d), Rational(0));
  c[0] = v;
  return exact_coords(p, d, std::move(c));
}

PadicElem PadicElem::exact_coords(long p, int d, std::vector<Rational> coords, const std::vector<long>& modulus) {
  if (!is_prime(p)) throw EvalError("p = " + std::to_string(p) + " is not prime");
  if (d < 1 || d > kMaxDegree) throw EvalError("bad degree");
  PadicElem e;
  e.p_ = p;
  e.d_ = d;
  e.exact_ = true;
  e.modulus_ = modulus;
  coords.resize(static_cast<std::size_t>(d), Rational(0));
  for (auto& c : coords) c.canonicalize();
  e.coords_ = std::move(coords);
  return e;
}

PadicElem PadicElem::truncated(const GRElem& digits, long shift) {
  PadicElem e;
  e.p_ = digits.ring->p();
  e.d_ = digits.ring->d();
  e.exact_ = false;
  e.modulus_ = digits.ring->modulus();
  if (e.modulus_ == GaloisRing::default_modulus(e.p_, e.d_)) e.modulus_.clear();
  e.shift_ = shift;
  e.digits_ = digits;
  return e;
}

long PadicElem::abs_precision() const { return exact_ ? LONG_MAX : shift_ + digits_.ring->level(); }

std::optional<long> PadicElem::ord() const {
  if (exact_) {
    std::optional<long> v;
    for (const auto& c : coords_) {
      if (c == 0) continue;
      long w = padic_valuation(c, p_);
      if (!v || w < *v) v = w;
    }
    return v;
  }
  int v = digits_.valuation();
  if (v >= digits_.ring->level()) {
    throw InsufficientPrecision("ord undetermined: element is 0 mod p^" + std::to_string(abs_precision()));
  }
  return shift_ + v;
}

bool PadicElem::ord_determined() const { return exact_ || digits_.valuation() < digits_.ring->level(); }

long PadicElem::ord_lower_bound() const {
  if (exact_) {
    auto v = ord();
    return v ? *v : LONG_MAX;
  }
  return shift_ + digits_.valuation();
}

GRElem PadicElem::ac(int n) const {
  const GaloisRing& R = GaloisRing::with_modulus(p_, d_, n, modulus_);
  if (exact_) {
    auto v = ord();
    if (!v) return R.zero();
    std::vector<Rational> u = coords_;
    Rational scale = 1;
    if (*v > 0) {
      Integer pk;
      mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p_), static_cast<unsigned long>(*v));
      scale = Rational(1) / Rational(pk);
    } else if (*v < 0) {
      Integer pk;
      mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p_), static_cast<unsigned long>(-*v));
      scale = Rational(pk);
    }
    for (auto& c : u) c *= scale;
    return R.from_rational_coords(u);
  }
  int v = digits_.valuation();
  int rel = digits_.ring->level();
  if (v + n > rel) {
    throw InsufficientPrecision("ac_" + std::to_string(n) + " needs absolute precision " + std::to_string(shift_ + v + n) +
                                ", have " + std::to_string(abs_precision()));
  }
  return R.divide_p(digits_, v);
}

GRElem PadicElem::residue(int n) const {
  const GaloisRing& R = GaloisRing::with_modulus(p_, d_, n, modulus_);
  if (exact_) {
    for (const auto& c : coords_) {
      if (c != 0 && padic_valuation(c, p_) < 0) throw EvalError("residue of an element outside O");
    }
    return R.from_rational_coords(coords_);
  }
  if (abs_precision() < n) {
    throw InsufficientPrecision("residue mod p^" + std::to_string(n) + " needs precision " + std::to_string(n));
  }
  if (shift_ >= 0) {
    GRElem r = R.convert(digits_);
    GRElem pk = R.from_int(Integer(1));
    for (long i = 0; i < shift_ && i < n; ++i) pk = pk * R.from_int(Integer(p_));
    if (shift_ >= n) return R.zero();
    return r * pk;
  }
  if (digits_.valuation() < -shift_) throw EvalError("residue of an element outside O");
  return R.divide_p(digits_, static_cast<int>(-shift_));
}

bool PadicElem::is_zero() const {
  if (exact_) {
    for (const auto& c : coords_) {
      if (c != 0) return false;
    }
    return true;
  }
  if (digits_.valuation() < digits_.ring->level()) return false;
  throw InsufficientPrecision("cannot decide whether an element known mod p^" + std::to_string(abs_precision()) + " is zero");
}

namespace {

void check_compatible(const PadicElem& a, const PadicElem& b) {
  if (a.p() != b.p() || a.d() != b.d()) throw EvalError("p-adic operands from different fields");
}

// Exact -> truncated at absolute precision `abs` (relative precision
// derived from the valuation).
PadicElem to_trunc(const PadicElem& x, long abs, const std::vector<long>& modulus) {
  auto v = x.ord();
  const GaloisRing& R0 = GaloisRing::with_modulus(x.p(), x.d(), 0, modulus);
  if (!v || *v >= abs) return PadicElem::truncated(R0.zero(), abs);
  int rel = static_cast<int>(abs - *v);
  return PadicElem::truncated(x.ac(rel), *v);
}

PadicElem to_trunc_rel(const PadicElem& x, int rel, const std::vector<long>& modulus) {
  auto v = x.ord();
  if (!v) return PadicElem::truncated(GaloisRing::with_modulus(x.p(), x.d(), rel, modulus).zero(), 0);
  return PadicElem::truncated(x.ac(rel), *v);
}

}  // namespace

PadicElem PadicElem::operator-() const {
  PadicElem r = *this;
  if (exact_) {
    for (auto& c : r.coords_) c = -c;
  } else {
    r.digits_ = -digits_;
  }
  return r;
}

PadicElem operator+(const PadicElem& a, const PadicElem& b) {
  check_compatible(a, b);
  if (a.exact_ && b.exact_) {
    PadicElem r = a;
    for (std::size_t i = 0; i < r.coords_.size(); ++i) r.coords_[i] += b.coords_[i];
    return r;
  }
  if (a.exact_ && a.is_zero()) return b;
  if (b.exact_ && b.is_zero()) return a;
  const std::vector<long>& mod = a.exact_ ? b.modulus_ : a.modulus_;
  PadicElem x = a.exact_ ? to_trunc(a, b.abs_precision(), mod) : a;
  PadicElem y = b.exact_ ? to_trunc(b, a.abs_precision(), mod) : b;
  long s = std::min(x.shift_, y.shift_);
  long A = std::min(x.abs_precision(), y.abs_precision());
  long rel = A - s;
  if (rel <= 0) return PadicElem::truncated(GaloisRing::with_modulus(a.p(), a.d(), 0, mod).zero(), A);
  const GaloisRing& R = GaloisRing::with_modulus(a.p(), a.d(), static_cast<int>(rel), mod);
  auto lift = [&](const PadicElem& z) {
    GRElem g = R.convert(z.digits_);
    GRElem pk = R.one();
    for (long i = 0; i < z.shift_ - s && i < rel; ++i) pk = pk * R.from_int(Integer(a.p()));
    if (z.shift_ - s >= rel) return R.zero();
    return g * pk;
  };
  return PadicElem::truncated(lift(x) + lift(y), s);
}

PadicElem operator-(const PadicElem& a, const PadicElem& b) { return a + (-b); }

PadicElem operator*(const PadicElem& a, const PadicElem& b) {
  check_compatible(a, b);
  if (a.exact_ && b.exact_) {
    PadicElem r = a;
    if (a.d_ == 1) {
      r.coords_[0] = a.coords_[0] * b.coords_[0];
    } else {
      r.coords_ = poly_mulmod(a.coords_, b.coords_, effective_modulus(a.p_, a.d_, a.modulus_));
    }
    return r;
  }
  if (a.exact_ && a.is_zero()) return a;
  if (b.exact_ && b.is_zero()) return b;
  const std::vector<long>& mod = a.exact_ ? b.modulus_ : a.modulus_;
  int rb = b.exact_ ? 0 : b.digits_.ring->level();
  int ra = a.exact_ ? 0 : a.digits_.ring->level();
  PadicElem x = a.exact_ ? to_trunc_rel(a, std::max(rb, 1), mod) : a;
  PadicElem y = b.exact_ ? to_trunc_rel(b, std::max(ra, 1), mod) : b;
  int r1 = x.digits_.ring->level(), r2 = y.digits_.ring->level();
  int v1 = x.digits_.valuation(), v2 = y.digits_.valuation();
  int rel = std::min(r1 + v2, r2 + v1);
  const GaloisRing& R = GaloisRing::with_modulus(a.p(), a.d(), rel, mod);
  return PadicElem::truncated(R.convert(x.digits_) * R.convert(y.digits_), x.shift_ + y.shift_);
}

PadicElem PadicElem::pow(unsigned e) const {
  PadicElem r = exact_ ? exact_coords(p_, d_, [&] {
    std::vector<Rational> one(static_cast<std::size_t>(d_), Rational(0));
    one[0] = 1;
    return one;
  }(), modulus_)
                       : *this;
  if (!exact_) {
    if (e == 0) return exact_coords(p_, d_, {Rational(1)}, modulus_);
    PadicElem acc = *this;
    for (unsigned i = 1; i < e; ++i) acc = acc * *this;
    return acc;
  }
  PadicElem base = *this;
  while (e) {
    if (e & 1u) r = r * base;
    base = base * base;
    e >>= 1u;
  }
  return r;
}

PadicElem PadicElem::truncate(long prec) const {
  if (exact_) return to_trunc(*this, prec, modulus_);
  if (prec >= abs_precision()) return *this;
  long rel = prec - shift_;
  if (rel <= 0) return truncated(GaloisRing::with_modulus(p_, d_, 0, modulus_).zero(), prec);
  return truncated(GaloisRing::with_modulus(p_, d_, static_cast<int>(rel), modulus_).convert(digits_), shift_);
}

std::string PadicElem::to_string() const {
  std::ostringstream os;
  if (exact_) {
    if (d_ == 1) return coords_[0].get_str();
    os << "(";
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (i) os << ", ";
      os << coords_[i];
    }
    os << ")";
    return os.str();
  }
  os << p_ << "^" << shift_ << "*" << digits_.to_string() << " + O(" << p_ << "^" << abs_precision() << ")";
  return os.str();
}

Rational counting_value(const ARat& a, long p, int d) {
  Integer q;
  mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(d));
  return a.theta(Rational(q));
}

}  // namespace motint
