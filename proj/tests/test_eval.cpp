#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "t2c/core.hpp"
#include "t2c/eval.hpp"

using namespace t2c;

namespace {

LabelVector lv(std::vector<int> raw) { return LabelVector::from_raw(raw); }

// exhaustive matching oracle: best total F1 over all injective maps of true
// classes into clusters, trying every permutation of the larger side
double brute_force_macro_f1(const LabelVector& truth, const LabelVector& pred) {
  const int kt = truth.num_classes;
  const int kp = pred.num_classes;
  std::vector<std::vector<int>> table(kt, std::vector<int>(kp, 0));
  std::vector<int> row(kt, 0), col(kp, 0);
  for (std::size_t i = 0; i < truth.labels.size(); ++i) {
    ++table[truth.labels[i]][pred.labels[i]];
    ++row[truth.labels[i]];
    ++col[pred.labels[i]];
  }
  auto f1 = [&](int i, int j) {
    if (table[i][j] == 0) return 0.0;
    const double p = static_cast<double>(table[i][j]) / col[j];
    const double r = static_cast<double>(table[i][j]) / row[i];
    return 2.0 * p * r / (p + r);
  };
  // permute the larger side, map positionally onto the smaller
  double best = 0.0;
  if (kp >= kt) {
    std::vector<int> perm(kp);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      double s = 0.0;
      for (int i = 0; i < kt; ++i) s += f1(i, perm[i]);
      best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    std::vector<int> perm(kt);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      double s = 0.0;
      for (int j = 0; j < kp; ++j) s += f1(perm[j], j);
      best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return best / kt;
}

}  // namespace

TEST_CASE("macro_f1 basics") {
  SUBCASE("perfect prediction") {
    auto t = lv({0, 0, 1, 1, 2});
    CHECK(macro_f1(t, t).macro_f1 == doctest::Approx(1.0));
  }
  SUBCASE("cluster ids swapped still perfect") {
    auto t = lv({0, 0, 1, 1});
    auto p = lv({1, 1, 0, 0});
    CHECK(macro_f1(t, p).macro_f1 == doctest::Approx(1.0));
  }
  SUBCASE("hand-computed asymmetric case") {
    auto t = lv({0, 0, 1, 1});
    auto p = lv({0, 1, 1, 1});
    auto rep = macro_f1(t, p);
    CHECK(rep.per_class_f1[0] == doctest::Approx(2.0 / 3.0));
    CHECK(rep.per_class_f1[1] == doctest::Approx(0.8));
    CHECK(rep.macro_f1 == doctest::Approx((2.0 / 3.0 + 0.8) / 2.0));
    // macro equals the mean of per-class F1
    const double mean = (rep.per_class_f1[0] + rep.per_class_f1[1]) / 2.0;
    CHECK(rep.macro_f1 == doctest::Approx(mean).epsilon(1e-9));
  }
  SUBCASE("length mismatch rejected") {
    CHECK_THROWS_AS(macro_f1(lv({0, 1}), lv({0, 1, 1})), std::invalid_argument);
  }
}

TEST_CASE("macro_f1 equals the exhaustive-matching brute force") {
  Rng rng(404);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 6 + rng.below(40);
    const int kt = 1 + static_cast<int>(rng.below(5));
    const int kp = 1 + static_cast<int>(rng.below(5));
    std::vector<int> t(n), p(n);
    for (auto& v : t) v = static_cast<int>(rng.below(kt));
    for (auto& v : p) v = static_cast<int>(rng.below(kp));
    auto truth = lv(t);
    auto pred = lv(p);
    const double got = macro_f1(truth, pred).macro_f1;
    const double want = brute_force_macro_f1(truth, pred);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("adjusted_rand_index") {
  SUBCASE("identical partitions") {
    auto t = lv({0, 0, 1, 1, 2, 2});
    CHECK(adjusted_rand_index(t, t) == doctest::Approx(1.0));
  }
  SUBCASE("permuted cluster ids") {
    auto t = lv({0, 0, 1, 1, 2, 2});
    auto p = lv({2, 2, 0, 0, 1, 1});
    CHECK(adjusted_rand_index(t, p) == doctest::Approx(1.0));
  }
  SUBCASE("hand contingency: [0,0,1,1] vs [0,0,0,1] is exactly 0") {
    // sum_ij C(nij,2) = 1; E = 2*3/6 = 1; max = 2.5 -> (1-1)/(2.5-1) = 0
    CHECK(adjusted_rand_index(lv({0, 0, 1, 1}), lv({0, 0, 0, 1})) ==
          doctest::Approx(0.0));
  }
  SUBCASE("both trivial partitions count as agreement") {
    CHECK(adjusted_rand_index(lv({0, 0, 0}), lv({1, 1, 1})) == doctest::Approx(1.0));
  }
  SUBCASE("random shuffles are corrected for chance") {
    Rng rng(808);
    std::vector<int> base(500);
    for (auto& v : base) v = static_cast<int>(rng.below(3));
    auto truth = lv(base);
    double mean = 0.0;
    const int reps = 1000;
    for (int rep = 0; rep < reps; ++rep) {
      auto shuffled = base;
      for (std::size_t i = shuffled.size(); i > 1; --i) {
        std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
      }
      mean += adjusted_rand_index(truth, lv(shuffled));
    }
    mean /= reps;
    CHECK(std::abs(mean) < 0.05);
  }
}

TEST_CASE("metrics invariant under any permutation of predicted ids") {
  Rng rng(55);
  std::vector<int> t(120), p(120);
  for (auto& v : t) v = static_cast<int>(rng.below(4));
  for (auto& v : p) v = static_cast<int>(rng.below(4));
  auto truth = lv(t);
  auto pred = lv(p);
  const double f1 = macro_f1(truth, pred).macro_f1;
  const double ari = adjusted_rand_index(truth, pred);
  std::vector<std::vector<int>> perms{{1, 0, 3, 2}, {3, 2, 1, 0}, {2, 3, 0, 1}};
  for (const auto& perm : perms) {
    std::vector<int> remapped(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) remapped[i] = perm[p[i]];
    auto pred2 = lv(remapped);
    CHECK(macro_f1(truth, pred2).macro_f1 == doctest::Approx(f1).epsilon(1e-12));
    CHECK(adjusted_rand_index(truth, pred2) == doctest::Approx(ari).epsilon(1e-12));
  }
}

TEST_CASE("purity") {
  auto t = lv({0, 0, 1, 1});
  CHECK(purity(t, t) == doctest::Approx(1.0));
  CHECK(purity(t, lv({0, 0, 0, 0})) == doctest::Approx(0.5));
  // one cluster per point: trivially pure (the caveat purity carries)
  CHECK(purity(t, lv({0, 1, 2, 3})) == doctest::Approx(1.0));
}

TEST_CASE("inject_spikes") {
  Rng rng(9);
  std::vector<double> x(10000);
  for (auto& v : x) v = rng.normal();
  TimeSeries ts(std::move(x));
  SUBCASE("fraction 0 leaves the series untouched") {
    auto out = inject_spikes(ts, 0.0, 5.0, 1);
    CHECK(out.values == ts.values);
  }
  SUBCASE("1% of 10000 points replaces exactly 100") {
    auto out = inject_spikes(ts, 0.01, 5.0, 1);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) changed += out.values[i] != ts.values[i];
    CHECK(changed == 100);
  }
  SUBCASE("same seed, same spikes") {
    auto a = inject_spikes(ts, 0.02, 5.0, 77);
    auto b = inject_spikes(ts, 0.02, 5.0, 77);
    CHECK(a.values == b.values);
  }
  SUBCASE("fraction out of range") {
    CHECK_THROWS_AS(inject_spikes(ts, 0.25, 5.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(inject_spikes(ts, -0.1, 5.0, 1), std::invalid_argument);
  }
}

TEST_CASE("baseline_euclidean_kmeans is deterministic and solves aligned data") {
  // no phase shift: every window of a straight ramp z-normalizes to the same
  // vector, so rising vs falling slopes give two point clusters
  Rng rng(2);
  std::vector<double> x;
  for (int t = 0; t < 500; ++t) x.push_back(t * 0.01 + 0.001 * rng.normal());
  for (int t = 0; t < 500; ++t) x.push_back(5.0 - t * 0.01 + 0.001 * rng.normal());
  TimeSeries ts(std::move(x));
  KMeansConfig cfg;
  cfg.seed = 31;
  auto a = baseline_euclidean_kmeans(ts, 8, 2, cfg);
  auto b = baseline_euclidean_kmeans(ts, 8, 2, cfg);
  CHECK(a.labels == b.labels);
  std::vector<int> truth_pts(ts.size(), 0);
  for (std::size_t i = 500; i < 1000; ++i) truth_pts[i] = 1;
  auto expanded = expand_labels(a.labels, a.confidence, ts.size(), 8);
  const double ari = adjusted_rand_index(LabelVector::from_raw(truth_pts),
                                         LabelVector::from_raw(expanded.labels));
  CHECK(ari >= 0.9);
}

TEST_CASE("sensitivity_sweep single window equals a standard run") {
  std::vector<double> x;
  for (int t = 0; t < 500; ++t) {
    x.push_back(std::sin(2.0 * 3.14159265358979323846 * t / 25.0));
  }
  for (int t = 0; t < 500; ++t) {
    x.push_back(std::sin(2.0 * 3.14159265358979323846 * t / 11.0));
  }
  TimeSeries ts(std::move(x));
  std::vector<int> truth_raw(1000, 0);
  for (std::size_t i = 500; i < 1000; ++i) truth_raw[i] = 1;
  auto truth = LabelVector::from_raw(truth_raw);

  KMeansConfig cfg;
  cfg.seed = 7;
  auto rows = sensitivity_sweep(ts, truth, {25}, nullptr, 2, 7, cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].m == 25);

  cfg.k = 2;
  auto res = time2cluster(ts, 25, 25, cfg);
  auto expanded = expand_labels(res.labels, res.confidence, ts.size(), 25);
  const double direct = macro_f1(truth, LabelVector::from_raw(expanded.labels)).macro_f1;
  CHECK(rows[0].macro_f1 == doctest::Approx(direct));
  CHECK(rows[0].macro_f1 >= 0.0);
  CHECK(rows[0].macro_f1 <= 1.0);
}

TEST_CASE("robustness_sweep: fraction 0 equals the clean run, std nonnegative") {
  std::vector<double> x;
  for (int t = 0; t < 400; ++t) {
    x.push_back(std::sin(2.0 * 3.14159265358979323846 * t / 20.0));
  }
  for (int t = 0; t < 400; ++t) {
    x.push_back(std::sin(2.0 * 3.14159265358979323846 * t / 9.0));
  }
  TimeSeries ts(std::move(x));
  std::vector<int> truth_raw(800, 0);
  for (std::size_t i = 400; i < 800; ++i) truth_raw[i] = 1;
  auto truth = LabelVector::from_raw(truth_raw);

  KMeansConfig cfg;
  cfg.n_restarts = 3;
  auto rows = robustness_sweep(ts, truth, 20, 20, 2, {0.0}, 3, 123, cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].std_f1 == doctest::Approx(0.0));  // no spikes -> identical repeats

  KMeansConfig direct_cfg = cfg;
  direct_cfg.k = 2;
  direct_cfg.seed = derive_seed(derive_seed(123, 0), 1);
  auto res = time2cluster(ts, 20, 20, direct_cfg);
  auto expanded = expand_labels(res.labels, res.confidence, ts.size(), 20);
  const double clean = macro_f1(truth, LabelVector::from_raw(expanded.labels)).macro_f1;
  CHECK(rows[0].mean_f1 == doctest::Approx(clean));
}
