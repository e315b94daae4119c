#include <doctest.h>

#include <cmath>
#include <vector>

#include "sitesim/rng.hpp"

using namespace sitesim;

TEST_CASE("streams are deterministic and label-separated") {
  RngStream a = RngStream::derive(42, {7, RngStream::hash_label("scenario")});
  RngStream b = RngStream::derive(42, {7, RngStream::hash_label("scenario")});
  RngStream c = RngStream::derive(42, {7, RngStream::hash_label("obsnoise")});

  bool differs_from_c = false;
  for (int i = 0; i < 64; ++i) {
    const uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
    if (va != c.next_u64()) differs_from_c = true;
  }
  CHECK(differs_from_c);
}

TEST_CASE("uniform stays in range") {
  RngStream rng(123);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const int64_t v = rng.uniform_int(-3, 5);
    CHECK(v >= -3);
    CHECK(v <= 5);
  }
}

TEST_CASE("normal moments") {
  RngStream rng(99);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}
