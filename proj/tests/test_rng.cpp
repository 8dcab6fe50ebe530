#include <cmath>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "wishlab/errors.hpp"
#include "wishlab/rng.hpp"

using wishlab::RngStream;
using wishlab::derive_substream;

TEST_CASE("substream determinism and statelessness") {
  // Same (seed, id) twice -> identical outputs.
  RngStream a = derive_substream(42, 0);
  RngStream b = derive_substream(42, 0);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  // Replay after "restart": a freshly constructed stream repeats itself.
  std::vector<std::uint64_t> first;
  {
    RngStream s = derive_substream(42, 7);
    for (int i = 0; i < 50; ++i) first.push_back(s.next_u64());
  }
  RngStream s2 = derive_substream(42, 7);
  for (int i = 0; i < 50; ++i) CHECK(s2.next_u64() == first[i]);
}

TEST_CASE("distinct substreams are decorrelated") {
  RngStream a = derive_substream(42, 0);
  RngStream b = derive_substream(42, 1);
  const int n = 10000;
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.next_double();
    const double y = b.next_double();
    sa += x;
    sb += y;
    saa += x * x;
    sbb += y * y;
    sab += x * y;
  }
  const double ma = sa / n, mb = sb / n;
  const double va = saa / n - ma * ma, vb = sbb / n - mb * mb;
  const double cov = sab / n - ma * mb;
  const double rho = cov / std::sqrt(va * vb);
  CHECK(std::abs(rho) < 0.05);

  // The two streams differ at all.
  RngStream c = derive_substream(42, 0);
  RngStream d = derive_substream(42, 1);
  CHECK(c.next_u64() != d.next_u64());
}

TEST_CASE("uniform doubles look uniform") {
  RngStream s(1234, 6);
  std::vector<double> u(10000);
  for (double& x : u) {
    x = s.next_double();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  const double p = testutil::ks_pvalue(u, [](double x) { return x; });
  CHECK(p > 0.01);
}

TEST_CASE("positive uniform variant stays inside (0,1]") {
  RngStream s(9, 9);
  for (int i = 0; i < 10000; ++i) {
    const double x = s.next_double_pos();
    CHECK(x > 0.0);
    CHECK(x <= 1.0);
  }
}

TEST_CASE("normal deviates: moments and shape") {
  RngStream s(77, 0);
  const int n = 40000;
  std::vector<double> x(n);
  for (double& v : x) v = s.next_normal();
  const double m = testutil::mean(x);
  const double v = testutil::variance(x);
  CHECK(std::abs(m) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(v == doctest::Approx(1.0).epsilon(0.05));
  CHECK(testutil::ks_pvalue(x, testutil::normal_cdf) > 0.01);
}

TEST_CASE("complex Gaussian has unit expected squared modulus") {
  RngStream s(5150, 3);
  const int n = 100000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += std::norm(s.next_complex_gaussian());
  CHECK(acc / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("exponential deviates: mean and KS shape") {
  RngStream s(31, 4);
  const int n = 30000;
  std::vector<double> x(n);
  for (double& v : x) v = s.next_exponential();
  CHECK(testutil::mean(x) == doctest::Approx(1.0).epsilon(0.03));
  const double p =
      testutil::ks_pvalue(x, [](double t) { return 1.0 - std::exp(-t); });
  CHECK(p > 0.01);
}

TEST_CASE("gamma sampler: mean and variance equal the shape") {
  RngStream s(8, 1);
  const int n = 40000;
  const double shape = 3.5;
  std::vector<double> x(n);
  for (double& v : x) v = s.next_gamma(shape);
  CHECK(testutil::mean(x) == doctest::Approx(shape).epsilon(0.02));
  CHECK(testutil::variance(x) == doctest::Approx(shape).epsilon(0.05));

  // shape = 1 is Exp(1)
  std::vector<double> e(20000);
  for (double& v : e) v = s.next_gamma(1.0);
  const double p =
      testutil::ks_pvalue(e, [](double t) { return 1.0 - std::exp(-t); });
  CHECK(p > 0.01);

  CHECK_THROWS_AS(s.next_gamma(0.5), wishlab::ValidationError);
}
