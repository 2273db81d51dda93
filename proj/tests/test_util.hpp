// shared helpers for the unit test suites
#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "stokesrec/mesh.hpp"

namespace testutil {

inline std::mt19937_64 seeded_rng(unsigned seed) {
  std::mt19937_64 rng(seed);
  rng.discard(20);
  return rng;
}

inline double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }
inline double uniform_pm1(std::mt19937_64& rng) { return 2.0 * uniform01(rng) - 1.0; }

inline std::vector<stokesrec::Vec2> random_ref_points(int n, unsigned seed) {
  auto rng = seeded_rng(seed);
  std::vector<stokesrec::Vec2> pts;
  while (static_cast<int>(pts.size()) < n) {
    const double x = uniform01(rng), y = uniform01(rng);
    if (x + y <= 1.0) pts.push_back(stokesrec::Vec2(x, y));
  }
  return pts;
}

inline std::vector<stokesrec::Vec2> random_domain_points(int n, unsigned seed) {
  auto rng = seeded_rng(seed);
  std::vector<stokesrec::Vec2> pts;
  for (int i = 0; i < n; ++i) pts.push_back(stokesrec::Vec2(uniform01(rng), uniform01(rng)));
  return pts;
}

inline Eigen::VectorXd random_vector(int n, unsigned seed) {
  auto rng = seeded_rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform_pm1(rng);
  return v;
}

}  // namespace testutil
