#include <annuity/random.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <doctest.h>
#include <limits>

using namespace annuity;

TEST_SUITE("random") {

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using A = std::array<std::uint32_t, 4>;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("AS241 against the Boost normal quantile") {
  const boost::math::normal_distribution<double> n01;
  for (double p : {1e-300, 1e-100, 1e-20, 1e-10, 1e-5, 0.001, 0.02425, 0.1, 0.3, 0.425, 0.5, 0.575,
                   0.7, 0.9, 0.975, 0.999, 1 - 1e-10}) {
    const double want = boost::math::quantile(n01, p);
    CHECK(inverse_normal_cdf(p) == doctest::Approx(want).epsilon(1e-14));
  }
  CHECK(inverse_normal_cdf(0.5) == 0.0);
}

TEST_CASE("uniform draws use 53 bits of one Philox block") {
  const NormalStream s(0x0123456789abcdefULL);
  const auto block = philox4x32_10({7, 0, 3, 0}, {0x89abcdef, 0x01234567});
  const double want = ((block[0] >> 5) * 67108864.0 + (block[1] >> 6) + 0.5) / 9007199254740992.0;
  CHECK(s.uniform(3, 7) == want);
  CHECK(s.normal(3, 7) == inverse_normal_cdf(want));
}

TEST_CASE("draws are addressable and open-interval") {
  const NormalStream a(42), b(42), c(43);
  CHECK(a.uniform(5, 9) == b.uniform(5, 9));
  CHECK(a.uniform(5, 9) != c.uniform(5, 9));
  CHECK(a.uniform(5, 9) != a.uniform(9, 5));
  CHECK(a.uniform(1ULL << 33, 0) != a.uniform(0, 0));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = a.uniform(i, i * 7);
    CHECK(u > 0);
    CHECK(u < 1);
  }
}

TEST_CASE("normal moments") {
  const NormalStream s(2024);
  double m = 0, v = 0, k = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal(static_cast<std::uint64_t>(i), 1);
    m += z;
    v += z * z;
    k += z * z * z * z;
  }
  m /= n;
  v /= n;
  k /= n;
  CHECK(std::abs(m) < 4 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(v - 1) < 4 * std::sqrt(2.0 / n));
  CHECK(std::abs(k - 3) < 4 * std::sqrt(96.0 / n));
}

}
