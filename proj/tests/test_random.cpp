#include <doctest.h>

#include <set>

#include "stats.hpp"
#include "uvlink/random.hpp"

using namespace uvlink;

TEST_CASE("substream keys depend only on the path") {
  CHECK(substream_key(7, {1, 2, 3}) == substream_key(7, {1, 2, 3}));
  CHECK(substream_key(7, {1, 2, 3}) != substream_key(8, {1, 2, 3}));
  CHECK(substream_key(7, {1, 2, 3}) != substream_key(7, {1, 3, 2}));
  CHECK(substream_key(7, {1, 2}) != substream_key(7, {1, 2, 0}));

  std::set<std::uint64_t> keys;
  for (std::uint64_t a = 0; a < 50; ++a) {
    for (std::uint64_t b = 0; b < 50; ++b) keys.insert(substream_key(1, {a, b}));
  }
  CHECK(keys.size() == 2500);
}

TEST_CASE("xoshiro uniforms") {
  Xoshiro256pp a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());

  Xoshiro256pp rng(99);
  std::vector<double> u;
  for (int i = 0; i < 100000; ++i) {
    const double x = rng.uniform();
    const double y = rng.uniform_open();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    REQUIRE(y > 0.0);
    REQUIRE(y < 1.0);
    u.push_back(x);
  }
  const auto ks = testing::ks_test(u, [](double x) { return x; });
  CHECK(ks.p_value > 0.001);
  const auto chi = testing::chi_square_test(u, [](double x) { return x; }, 0.0, 1.0, 50);
  CHECK(chi.p_value > 0.001);
}
