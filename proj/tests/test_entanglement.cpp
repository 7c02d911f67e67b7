#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "cdnet/entanglement.hpp"

using namespace cdnet;

TEST_CASE("cutoff values for the reference parameter sets") {
  // F_new = 0.9, F_min = 0.5, M = 3
  CHECK(max_cutoff(10, 0.9, 0.5, 3) == 2);
  CHECK(max_cutoff(50, 0.9, 0.5, 3) == 11);
  CHECK(max_cutoff(100, 0.9, 0.5, 3) == 22);
  CHECK(max_cutoff(45, 0.9, 0.5, 3) == 10);
  // F_new = 0.99, F_min = 0.8, M = 2
  CHECK(max_cutoff(25, 0.99, 0.8, 2) == 3);
  CHECK(max_cutoff(100, 0.99, 0.8, 2) == 14);
  CHECK(max_cutoff(300, 0.99, 0.8, 2) == 42);
}

TEST_CASE("largest swap distance at a fixed cutoff") {
  CHECK(max_swap_distance(50, 11, 0.6, 0.5) == 1);
  CHECK(max_swap_distance(50, 11, 0.8, 0.5) == 2);
  CHECK(max_swap_distance(50, 11, 0.9, 0.5) == 3);
  CHECK(max_swap_distance(50, 11, 1.0, 0.5) == 4);
  CHECK_THROWS_AS(max_swap_distance(50, 40, 0.6, 0.5), std::domain_error);
}

TEST_CASE("cutoff relation edges") {
  CHECK(satisfies_cutoff_relation(50, 11, 0.9, 0.5, 3));
  CHECK_FALSE(satisfies_cutoff_relation(50, 12, 0.9, 0.5, 3));
  CHECK_FALSE(feasible(0.6, 0.5, 2));
  CHECK(feasible(0.6, 0.5, 1));
  CHECK_THROWS_AS(max_cutoff(50, 0.6, 0.5, 2), std::domain_error);
  // bound below one step
  CHECK_THROWS_AS(max_cutoff(1, 0.9, 0.5, 3), std::domain_error);
  CHECK(cutoff_bound(50, 0.9, 0.5, 3) == doctest::Approx(11.155163).epsilon(1e-6));
}

TEST_CASE("werner parameter is a homomorphism for swaps") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.25, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double f1 = u(gen);
    const double f2 = u(gen);
    const auto x1 = WernerFidelity::from_fidelity(f1).parameter();
    const auto x2 = WernerFidelity::from_fidelity(f2).parameter();
    CHECK(WernerFidelity::from_fidelity(swap_fidelity(f1, f2)).parameter() ==
          doctest::Approx(x1 * x2).epsilon(1e-12));
    CHECK(swap_fidelity(f1, f2) == doctest::Approx(swap_fidelity(f2, f1)));
    CHECK(swap_fidelity(f1, f2) <= std::min(f1, f2) + 1e-15);
  }
  CHECK(swap_fidelity(1.0, 1.0) == 1.0);
  CHECK(swap_fidelity(0.25, 0.9) == doctest::Approx(0.25));
}

TEST_CASE("decay composes and approaches one quarter") {
  CHECK(decay(0.9, 0, 50) == 0.9);
  CHECK(decay(decay(0.9, 3, 50), 4, 50) == doctest::Approx(decay(0.9, 7, 50)).epsilon(1e-14));
  CHECK(decay(0.9, 1e6, 50) == doctest::Approx(0.25));
  CHECK(decay(0.25, 10, 50) == doctest::Approx(0.25));
  double prev = 1.0;
  for (int t = 0; t < 50; ++t) {
    const double f = decay(1.0, t, 10);
    CHECK(f <= prev);
    prev = f;
  }
}

TEST_CASE("cutoff grows with T and F_new, shrinks with F_min and M") {
  for (double T : {20.0, 50.0, 100.0}) {
    for (int m = 1; m <= 3; ++m) {
      CHECK(cutoff_bound(T, 0.95, 0.5, m) > cutoff_bound(T, 0.9, 0.5, m));
      CHECK(cutoff_bound(T, 0.9, 0.6, m) < cutoff_bound(T, 0.9, 0.5, m));
      CHECK(cutoff_bound(2 * T, 0.9, 0.5, m) > cutoff_bound(T, 0.9, 0.5, m));
      if (m > 1) CHECK(cutoff_bound(T, 0.9, 0.5, m) < cutoff_bound(T, 0.9, 0.5, m - 1));
    }
  }
}

TEST_CASE("closed-form fidelity matches step-by-step swap and decay") {
  // Decoherence acts on every constituent segment's memories, so the
  // reference keeps one fidelity per segment, decays each one step at a time
  // and folds them with swap_fidelity at observation.
  std::mt19937_64 gen(11);
  const double T = 37.0;
  const double f_new = 0.93;
  for (int trial = 0; trial < 500; ++trial) {
    const int segments = std::uniform_int_distribution<int>(1, 5)(gen);
    const int now = std::uniform_int_distribution<int>(0, 12)(gen);
    std::vector<double> f(segments, f_new);
    std::vector<int> birth(segments);
    double birth_sum = 0;
    for (int s = 0; s < segments; ++s) {
      birth[s] = std::uniform_int_distribution<int>(0, now)(gen);
      birth_sum += birth[s];
    }
    for (int t = 0; t < now; ++t) {
      for (int s = 0; s < segments; ++s) {
        if (birth[s] <= t) f[s] = decay(f[s], 1, T);
      }
    }
    double joined = f[0];
    for (int s = 1; s < segments; ++s) joined = swap_fidelity(joined, f[s]);
    CHECK(link_fidelity(f_new, segments, birth_sum, now, T) ==
          doctest::Approx(joined).epsilon(1e-12));
  }
}

TEST_CASE("parameter validation") {
  HardwareParams hw;
  CHECK_NOTHROW(validate(hw));
  hw.p_gen = 1.5;
  CHECK_THROWS_AS(validate(hw), std::invalid_argument);
  hw = {};
  hw.f_new = 0.2;
  CHECK_THROWS_AS(validate(hw), std::invalid_argument);
  PolicyParams p;
  p.q = -0.1;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
  p = {};
  p.f_min = 0.4;
  CHECK_THROWS_AS(validate(p), std::invalid_argument);
}
