#pragma once

// Shared test oracles: finite differences, seeded random expressions and
// rotations, principal-value reference integrals, and a brute-force signed
// tree isomorphism checker that stays independent of the canonical codes.

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "nambu/expr.hpp"

namespace testutil {

constexpr double kPi = 3.14159265358979323846;

// Reference value for the regularized integral of 1/(z + c) over the unit
// sphere, by the cylindrical projection: 2*pi * PV int_{-1}^{1} dz/(z+c).
inline double sphere_latitude_volume(double c) {
  return 2.0 * kPi * std::log((1.0 + c) / (1.0 - c));
}

inline std::array<double, 3> central_difference(const nambu::Expression& e,
                                                std::array<double, 3> p, int dim,
                                                double step = 1e-5) {
  std::array<double, 3> g{0, 0, 0};
  for (int i = 0; i < dim; ++i) {
    std::array<double, 3> hi = p, lo = p;
    hi[i] += step;
    lo[i] -= step;
    double fhi = nambu::eval_value(e, std::span<const double>(hi.data(), dim));
    double flo = nambu::eval_value(e, std::span<const double>(lo.data(), dim));
    g[i] = (fhi - flo) / (2.0 * step);
  }
  return g;
}

// Small random expression source over smooth primitives (no division or log,
// so every sample point is well-conditioned).
inline std::string random_expression(std::mt19937_64& rng,
                                     const std::vector<std::string>& vars, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  if (depth <= 0 || pick(rng) < 2) {
    if (pick(rng) < 5) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.3f", coef(rng));
      return buf;
    }
    return vars[static_cast<std::size_t>(pick(rng)) % vars.size()];
  }
  int k = pick(rng);
  auto sub = [&]() { return random_expression(rng, vars, depth - 1); };
  switch (k) {
    case 0: return "(" + sub() + " + " + sub() + ")";
    case 1: return "(" + sub() + " - " + sub() + ")";
    case 2:
    case 3: return "(" + sub() + ")*(" + sub() + ")";
    case 4: return "sin(" + sub() + ")";
    case 5: return "cos(" + sub() + ")";
    case 6: return "exp(0.3*(" + sub() + "))";
    case 7: return "(" + sub() + ")^2";
    case 8: return "-(" + sub() + ")";
    default: return "(" + sub() + " + " + sub() + ")";
  }
}

using Mat3 = std::array<std::array<double, 3>, 3>;

// Uniform random rotation from a quaternion, rejecting rotations that put
// the image of the z-axis too close to the chart poles (scenarios must keep
// |f| large at the poles).
inline Mat3 random_rotation(std::mt19937_64& rng, double pole_margin = 0.2) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    double q0 = u(rng), q1 = u(rng), q2 = u(rng), q3 = u(rng);
    double n = std::sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3);
    if (n < 1e-3 || n > 1.0) continue;
    q0 /= n; q1 /= n; q2 /= n; q3 /= n;
    Mat3 R;
    R[0] = {1 - 2 * (q2 * q2 + q3 * q3), 2 * (q1 * q2 - q0 * q3), 2 * (q1 * q3 + q0 * q2)};
    R[1] = {2 * (q1 * q2 + q0 * q3), 1 - 2 * (q1 * q1 + q3 * q3), 2 * (q2 * q3 - q0 * q1)};
    R[2] = {2 * (q1 * q3 - q0 * q2), 2 * (q2 * q3 + q0 * q1), 1 - 2 * (q1 * q1 + q2 * q2)};
    if (std::abs(R[2][2]) >= pole_margin) return R;
  }
}

// The field z composed with a rotation, as an expression string.
inline std::string rotated_z(const Mat3& R) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "(%.17g)*x + (%.17g)*y + (%.17g)*z", R[2][0], R[2][1],
                R[2][2]);
  return buf;
}

// ---------------------------------------------------------------------------
// Brute-force signed tree isomorphism (all vertex bijections), used as the
// independent oracle against canonical-code deduplication.

struct SignedTree {
  int n = 0;
  std::vector<std::array<int, 2>> edges;
  std::vector<int> signs;
};

inline bool signed_isomorphic(const SignedTree& a, const SignedTree& b) {
  if (a.n != b.n || a.edges.size() != b.edges.size()) return false;
  std::vector<std::vector<char>> adj_a(a.n, std::vector<char>(a.n, 0));
  std::vector<std::vector<char>> adj_b(b.n, std::vector<char>(b.n, 0));
  for (const auto& e : a.edges) adj_a[e[0]][e[1]] = adj_a[e[1]][e[0]] = 1;
  for (const auto& e : b.edges) adj_b[e[0]][e[1]] = adj_b[e[1]][e[0]] = 1;
  std::vector<int> perm(a.n);
  for (int i = 0; i < a.n; ++i) perm[i] = i;
  do {
    bool ok = true;
    for (int v = 0; v < a.n && ok; ++v)
      if (a.signs[v] != b.signs[perm[v]]) ok = false;
    for (int v = 0; v < a.n && ok; ++v)
      for (int w = v + 1; w < a.n && ok; ++w)
        if (adj_a[v][w] != adj_b[perm[v]][perm[w]]) ok = false;
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// Exhaustive class count over all labeled trees (Prufer) and both proper
// colorings, grouped by pairwise isomorphism tests.
inline long signed_tree_classes_bruteforce(int k) {
  const int n = k + 1;
  std::vector<SignedTree> reps;
  auto consider = [&](const SignedTree& t) {
    for (const auto& r : reps)
      if (signed_isomorphic(t, r)) return;
    reps.push_back(t);
  };
  auto color_and_consider = [&](const std::vector<std::array<int, 2>>& edges) {
    std::vector<std::vector<int>> adj(n);
    for (const auto& e : edges) {
      adj[e[0]].push_back(e[1]);
      adj[e[1]].push_back(e[0]);
    }
    std::vector<int> parity(n, -1);
    std::vector<int> stack{0};
    parity[0] = 0;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (parity[w] < 0) {
          parity[w] = parity[v] ^ 1;
          stack.push_back(w);
        }
    }
    for (int flip = 0; flip < 2; ++flip) {
      SignedTree t;
      t.n = n;
      t.edges = edges;
      t.signs.resize(n);
      for (int v = 0; v < n; ++v) t.signs[v] = (parity[v] ^ flip) ? -1 : 1;
      consider(t);
    }
  };

  if (n == 2) {
    color_and_consider({{{0, 1}}});
    return static_cast<long>(reps.size());
  }
  std::vector<int> prufer(n - 2, 0);
  bool done = false;
  while (!done) {
    std::vector<int> deg(n, 1);
    for (int p : prufer) ++deg[p];
    std::vector<std::array<int, 2>> edges;
    for (int p : prufer) {
      int leaf = 0;
      while (deg[leaf] != 1) ++leaf;
      edges.push_back({p, leaf});
      --deg[leaf];
      --deg[p];
    }
    int u = 0;
    while (deg[u] != 1) ++u;
    int v = u + 1;
    while (deg[v] != 1) ++v;
    edges.push_back({u, v});
    color_and_consider(edges);
    int pos = n - 3;
    while (pos >= 0) {
      if (++prufer[pos] < n) break;
      prufer[pos] = 0;
      --pos;
    }
    done = pos < 0;
  }
  return static_cast<long>(reps.size());
}

}  // namespace testutil
