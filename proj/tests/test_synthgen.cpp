#include <doctest.h>

#include <cmath>
#include <vector>

#include "t2c/core.hpp"
#include "t2c/profile.hpp"
#include "t2c/synthgen.hpp"

using namespace t2c;

TEST_CASE("pure sinusoid segment is exactly A*sin(2*pi*t/p + phase0)") {
  std::vector<SegmentSpec> segs{{SegmentKind::sinusoid, 200, 50.0, 2.0, 0.0, 0.0, 0.0, 0}};
  auto [ts, truth] = generate(segs, 42);
  // phase0 is seeded; fit it from the first point pair instead of assuming 0
  Rng rng(42);
  const double phase0 = rng.uniform() * 2.0 * 3.14159265358979323846;
  for (std::size_t t = 0; t < ts.size(); ++t) {
    const double expected =
        2.0 * std::sin(phase0 + 2.0 * 3.14159265358979323846 * static_cast<double>(t) / 50.0);
    CHECK(ts.values[t] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("labels align one to one with points") {
  std::vector<SegmentSpec> segs{
      {SegmentKind::sinusoid, 2000, 40.0, 1.0, 0.0, 0.1, 0.0, 0},
      {SegmentKind::white_noise, 2000, 0.0, 1.0, 0.0, 0.0, 0.0, 1},
  };
  auto [ts, truth] = generate(segs, 1);
  REQUIRE(truth.labels.size() == ts.size());
  std::size_t zeros = 0, ones = 0;
  for (int l : truth.labels) (l == 0 ? zeros : ones) += 1;
  CHECK(zeros == 2000);
  CHECK(ones == 2000);
  CHECK(truth.num_classes == 2);
}

TEST_CASE("generation is deterministic under the seed") {
  std::vector<SegmentSpec> segs{
      {SegmentKind::random_walk, 500, 0.0, 1.0, 0.0, 0.0, 0.1, 0},
      {SegmentKind::sinusoid, 500, 30.0, 1.0, 0.0, 0.4, 0.05, 1},
  };
  auto [a, la] = generate(segs, 77);
  auto [b, lb] = generate(segs, 77);
  CHECK(a.values == b.values);
  auto [c, lc] = generate(segs, 78);
  CHECK(a.values != c.values);
}

TEST_CASE("invalid segment specs are rejected") {
  CHECK_THROWS_AS(generate({}, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate({{SegmentKind::sinusoid, 100, 0.0, 1.0, 0.0, 0.0, 0.0, 0}}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate({{SegmentKind::constant, 0, 0.0, 1.0, 0.0, 0.0, 0.0, 0}}, 1),
                  std::invalid_argument);
}

TEST_CASE("phase jitter reproduces the low-correlation pathology at stride p") {
  // with drifting phase, subsequences one period apart stop being near
  // copies of each other
  const double p = 64.0;
  std::vector<SegmentSpec> segs{
      {SegmentKind::sinusoid, 2048, p, 1.0, 0.0, 0.6, 0.0, 0}};
  auto [ts, truth] = generate(segs, 11);
  const std::size_t m = 64;
  double acc = 0.0;
  int cnt = 0;
  for (std::size_t i = 0; i + 64 + m <= ts.size(); i += 160) {
    acc += detail::pearson_pair(std::span<const double>(ts.values), i, i + 64, m);
    ++cnt;
  }
  CHECK(acc / cnt < 0.9);
}

TEST_CASE("named scenarios are well-formed and unknown names rejected") {
  for (const char* name : {"walkrun", "walkrunplay", "stairs", "tilt", "noisetail"}) {
    auto sc = scenario(name, 3);
    CHECK(sc.series.size() == sc.truth.labels.size());
    CHECK(sc.m >= 2);
    CHECK(sc.ks >= 1);
    CHECK(sc.k >= 1);
    CHECK(static_cast<int>(sc.k) == sc.truth.num_classes);
  }
  CHECK_THROWS_AS(scenario("nope", 1), std::invalid_argument);
}
