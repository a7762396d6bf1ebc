#include "bt4/stabilizer.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <thread>
#include <cmath>
#include <vector>

namespace bt4 {

namespace {

void check_q(int q) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
}

mpz_class zpow(int q, int e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(e));
  return r;
}

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

}  // namespace

mpz_class class_factor(VertexClass c, int q) {
  check_q(q);
  const mpz_class Q = q;
  const mpz_class p2 = Q * Q + Q + 1, p1 = Q + 1;
  switch (c) {
    case VertexClass::Origin: return (Q * Q * Q + Q * Q + Q + 1) * p2 * p1;
    case VertexClass::RayL00:
    case VertexClass::RayLLL: return p2 * p1;
    case VertexClass::FaceLL0: return p1 * p1;
    case VertexClass::FaceLM0:
    case VertexClass::FaceLMM:
    case VertexClass::FaceLLM: return p1;
    case VertexClass::Interior: return 1;
  }
  return 1;
}

mpz_class stabilizer_order(const VertexId& v, int q) {
  check_q(q);
  const mpz_class unit = mpz_class(q - 1) * (q - 1) * (q - 1);
  return unit * class_factor(classify(v), q) * zpow(q, v.shift() + 6);
}

mpq_class vertex_weight(const VertexId& v, int q) {
  const mpz_class unit = mpz_class(q - 1) * (q - 1) * (q - 1) * zpow(q, 6);
  mpq_class w(unit, stabilizer_order(v, q));
  w.canonicalize();
  return w;
}

double weight_to_double(const mpq_class& w) { return w.get_d(); }

mpq_class total_volume(int L, int q) {
  mpq_class s = 0;
  for (const auto& v : enumerate_ball(L)) s += vertex_weight(v, q);
  return s;
}

namespace {

constexpr int kMaxDeg = 15;

struct Poly {
  std::array<int, kMaxDeg + 1> c{};
  int deg = -1;  // -1 is the zero polynomial
};

Poly mul(const Poly& a, const Poly& b, int p) {
  Poly r;
  if (a.deg < 0 || b.deg < 0) return r;
  r.deg = a.deg + b.deg;
  for (int i = 0; i <= a.deg; ++i)
    if (a.c[i])
      for (int j = 0; j <= b.deg; ++j) r.c[i + j] = (r.c[i + j] + a.c[i] * b.c[j]) % p;
  while (r.deg >= 0 && r.c[r.deg] == 0) --r.deg;
  return r;
}

void add_to(Poly& acc, const Poly& t, int sign, int p) {
  for (int i = 0; i <= t.deg; ++i) acc.c[i] = ((acc.c[i] + sign * t.c[i]) % p + p) % p;
  acc.deg = std::max(acc.deg, t.deg);
  while (acc.deg >= 0 && acc.c[acc.deg] == 0) --acc.deg;
}

struct Perm {
  std::array<int, 4> s;
  int sign;
};

std::vector<Perm> all_perms() {
  std::vector<Perm> out;
  std::array<int, 4> s{0, 1, 2, 3};
  do {
    int inv = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (s[i] > s[j]) ++inv;
    out.push_back({s, inv % 2 ? -1 : 1});
  } while (std::next_permutation(s.begin(), s.end()));
  return out;
}

}  // namespace

BruteForceResult brute_force_order(const VertexId& v, int p, double budget) {
  if (!is_prime(p)) throw std::invalid_argument("brute force needs a prime field");
  const std::array<int, 4> d{v.ell, v.m, v.n, 0};
  if (d[0] > kMaxDeg / 4) throw BudgetExceeded("vertex too deep for brute-force enumeration");

  // one slot per free coefficient: (row, col, power of t)
  struct Slot { int i, j, k; };
  std::vector<Slot> slots;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (d[i] >= d[j])
        for (int k = 0; k <= d[i] - d[j]; ++k) slots.push_back({i, j, k});

  const double size = std::pow(static_cast<double>(p), static_cast<double>(slots.size()));
  if (size > budget)
    throw BudgetExceeded("enumeration of " + std::to_string(size) + " matrices exceeds budget");

  const auto perms = all_perms();

  // the top `fixed` slots are pinned per task; tasks run on separate threads
  std::size_t fixed = 0;
  double tasks = 1;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  while (fixed < slots.size() && tasks < 4.0 * hw) {
    ++fixed;
    tasks *= p;
  }
  const std::size_t free_slots = slots.size() - fixed;
  const std::uint64_t ntasks = static_cast<std::uint64_t>(tasks);

  auto run_task = [&](std::uint64_t task) {
    std::array<std::array<Poly, 4>, 4> a{};
    auto refresh_deg = [](Poly& e) {
      e.deg = kMaxDeg;
      while (e.deg >= 0 && e.c[e.deg] == 0) --e.deg;
    };
    for (std::size_t s = free_slots; s < slots.size(); ++s) {
      auto& e = a[slots[s].i][slots[s].j];
      e.c[slots[s].k] = static_cast<int>(task % p);
      task /= p;
      refresh_deg(e);
    }
    std::vector<int> digit(free_slots, 0);
    std::uint64_t local = 0;
    while (true) {
      Poly det;
      for (const auto& pm : perms) {
        bool zero = false;
        for (int r = 0; r < 4 && !zero; ++r) zero = a[r][pm.s[r]].deg < 0;
        if (zero) continue;
        Poly t = a[0][pm.s[0]];
        for (int r = 1; r < 4; ++r) t = mul(t, a[r][pm.s[r]], p);
        add_to(det, t, pm.sign, p);
      }
      if (det.deg == 0) ++local;

      std::size_t s = 0;
      for (; s < free_slots; ++s) {
        auto& e = a[slots[s].i][slots[s].j];
        if (++digit[s] < p) {
          e.c[slots[s].k] = digit[s];
          refresh_deg(e);
          break;
        }
        digit[s] = 0;
        e.c[slots[s].k] = 0;
        refresh_deg(e);
      }
      if (s == free_slots) break;
    }
    return local;
  };

  std::atomic<std::uint64_t> next{0}, total{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < hw; ++w)
    pool.emplace_back([&] {
      for (std::uint64_t t; (t = next++) < ntasks;) total += run_task(t);
    });
  for (auto& th : pool) th.join();
  const std::uint64_t local = total;
  mpz_class count;
  count = mpz_class(std::to_string(local));
  if (count % (p - 1) != 0) throw std::logic_error("count not divisible by q-1");
  return {count / (p - 1), size};
}

}  // namespace bt4
