#include "doctest.h"
#include "satnet/rng.hpp"

using namespace satnet;

TEST_CASE("identical seeds give identical streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derive_seed separates labels and indices") {
  const uint64_t master = 7;
  CHECK(derive_seed(master, "topology") != derive_seed(master, "traffic"));
  CHECK(derive_seed(master, "topology", 0) != derive_seed(master, "topology", 1));
  CHECK(derive_seed(master, "topology", 3) == derive_seed(master, "topology", 3));
  CHECK(derive_seed(1, "topology") != derive_seed(2, "topology"));
}

TEST_CASE("uniform01 stays in [0,1)") {
  Rng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double v = r.uniform01();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("uniform_int covers the inclusive range") {
  Rng r(3);
  bool saw_lo = false, saw_hi = false;
  for (int i = 0; i < 10000; ++i) {
    const int64_t v = r.uniform_int(0, 4);
    CHECK(v >= 0);
    CHECK(v <= 4);
    saw_lo |= v == 0;
    saw_hi |= v == 4;
  }
  CHECK(saw_lo);
  CHECK(saw_hi);
}

TEST_CASE("bernoulli extremes") {
  Rng r(9);
  for (int i = 0; i < 100; ++i) CHECK_FALSE(r.bernoulli(0.0));
  for (int i = 0; i < 100; ++i) CHECK(r.bernoulli(1.0));
}
