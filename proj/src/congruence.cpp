#include "schottky/congruence.hpp"

#include <deque>
#include <map>
#include <unordered_set>

namespace schottky {

std::string ModMatrix::key() const {
  std::string s;
  s.reserve(static_cast<size_t>(e.size()) * 2);
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) {
      auto x = static_cast<std::uint16_t>(e(i, j));
      s.push_back(static_cast<char>(x & 0xff));
      s.push_back(static_cast<char>(x >> 8));
    }
  return s;
}

bool ModMatrix::is_identity() const {
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j)
      if (e(i, j) != ((i == j) ? 1 : 0)) return false;
  return true;
}

ModMatrix operator*(const ModMatrix& a, const ModMatrix& b) {
  if (a.d != b.d) throw BadModulus("modulus mismatch");
  ModMatrix c;
  c.d = a.d;
  c.e = a.e * b.e;
  for (Eigen::Index i = 0; i < c.e.rows(); ++i)
    for (Eigen::Index j = 0; j < c.e.cols(); ++j) c.e(i, j) %= a.d;
  return c;
}

ModMatrix reduce_mod(const GroupElement& g, long d) {
  if (d < 2) throw BadModulus("d < 2");
  ModMatrix m;
  m.d = d;
  m.e.resize(g.mat.rows(), g.mat.cols());
  Int dd(d);
  for (Eigen::Index i = 0; i < g.mat.rows(); ++i)
    for (Eigen::Index j = 0; j < g.mat.cols(); ++j) {
      Int r;
      mpz_mod(r.get_mpz_t(), g.mat(i, j).get_mpz_t(), dd.get_mpz_t());
      m.e(i, j) = r.get_si();
    }
  return m;
}

ModMatrix mod_identity(int n, long d) {
  if (d < 2) throw BadModulus("d < 2");
  ModMatrix m;
  m.d = d;
  m.e = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n);
  return m;
}

std::vector<ModMatrix> elementary_gens_mod(int n, long d) {
  std::vector<ModMatrix> gens;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      ModMatrix m = mod_identity(n, d);
      m.e(i, j) = 1 % d;
      gens.push_back(m);
    }
  return gens;
}

std::uint64_t closure_order(const std::vector<ModMatrix>& gens, std::uint64_t cap) {
  if (gens.empty()) throw PreconditionViolated("no generators");
  long d = gens[0].d;
  for (const ModMatrix& g : gens)
    if (g.d != d) throw BadModulus("generators with mixed moduli");
  std::unordered_set<std::string> seen;
  std::deque<ModMatrix> queue;
  ModMatrix id = mod_identity(gens[0].dim(), d);
  seen.insert(id.key());
  queue.push_back(id);
  while (!queue.empty()) {
    ModMatrix cur = queue.front();
    queue.pop_front();
    for (const ModMatrix& g : gens) {
      ModMatrix nxt = cur * g;
      if (seen.insert(nxt.key()).second) {
        if (seen.size() > cap) throw CapExceeded("BFS closure beyond cap");
        queue.push_back(nxt);
      }
    }
  }
  return seen.size();
}

Int sl_order_prime(int n, long p) {
  // |GL(n,p)| / (p - 1) = p^{n(n-1)/2} * prod_{k=2..n} (p^k - 1).
  Int q(p);
  Int order = 1;
  for (int k = 2; k <= n; ++k) {
    Int pk;
    mpz_pow_ui(pk.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned>(k));
    order *= pk - 1;
  }
  Int half;
  mpz_pow_ui(half.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned>(n * (n - 1) / 2));
  return order * half;
}

std::uint64_t sl_order(int n, long d, std::uint64_t cap) {
  static std::map<std::pair<int, long>, std::uint64_t> cache;
  auto it = cache.find({n, d});
  if (it != cache.end()) return it->second;
  std::uint64_t order = closure_order(elementary_gens_mod(n, d), cap);
  cache[{n, d}] = order;
  return order;
}

bool is_surjective(const std::vector<GroupElement>& gens, long d, std::uint64_t cap) {
  if (gens.empty()) throw PreconditionViolated("no generators");
  std::vector<ModMatrix> reduced;
  reduced.reserve(gens.size());
  for (const GroupElement& g : gens) reduced.push_back(reduce_mod(g, d));
  int n = gens[0].dim();
  return closure_order(reduced, cap) == sl_order(n, d, cap);
}

namespace {

std::uint64_t element_order(const ModMatrix& g) {
  ModMatrix p = g;
  std::uint64_t k = 1;
  while (!p.is_identity()) {
    p = p * g;
    ++k;
  }
  return k;
}

}  // namespace

Int exponent_of(int n, long d, std::uint64_t cap) {
  static std::map<std::pair<int, long>, Int> cache;
  auto it = cache.find({n, d});
  if (it != cache.end()) return it->second;
  std::vector<ModMatrix> gens = elementary_gens_mod(n, d);
  std::unordered_set<std::string> seen;
  std::deque<ModMatrix> queue;
  ModMatrix id = mod_identity(n, d);
  seen.insert(id.key());
  queue.push_back(id);
  Int exp = 1;
  while (!queue.empty()) {
    ModMatrix cur = queue.front();
    queue.pop_front();
    Int ord(static_cast<unsigned long>(element_order(cur)));
    mpz_lcm(exp.get_mpz_t(), exp.get_mpz_t(), ord.get_mpz_t());
    for (const ModMatrix& g : gens) {
      ModMatrix nxt = cur * g;
      if (seen.insert(nxt.key()).second) {
        if (seen.size() > cap) throw CapExceeded("BFS closure beyond cap");
        queue.push_back(nxt);
      }
    }
  }
  return exp;
}

bool in_kernel(const GroupElement& g, long d) {
  return reduce_mod(g, d).is_identity();
}

bool DensityWitness::valid() const {
  bool has4 = false, has_odd_prime = false;
  for (size_t i = 0; i < moduli_checked.size(); ++i) {
    if (!surjective[i]) return false;
    long d = moduli_checked[i];
    if (d == 4) has4 = true;
    if (d % 2 == 1) {
      bool prime = d > 1;
      for (long k = 2; k * k <= d; ++k)
        if (d % k == 0) prime = false;
      if (prime) has_odd_prime = true;
    }
  }
  return has4 && has_odd_prime;
}

DensityWitness density_witness(const std::vector<GroupElement>& gens,
                               const std::vector<long>& moduli, std::uint64_t cap) {
  if (moduli.empty()) throw PreconditionViolated("no moduli");
  DensityWitness w;
  for (long d : moduli) {
    w.moduli_checked.push_back(d);
    w.surjective.push_back(is_surjective(gens, d, cap));
  }
  return w;
}

}  // namespace schottky
