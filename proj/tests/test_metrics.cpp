#include <cmath>

#include "doctest.h"

#include "aafv/metrics.hpp"
#include "aafv/rng.hpp"

using namespace aafv;

namespace {

metrics::SeedResult result(const std::string& scenario, const std::string& model,
                           double acc, std::uint64_t seed = 0) {
  metrics::SeedResult r;
  r.seed_index = seed;
  r.scenario = scenario;
  r.model_kind = model;
  r.final_accuracy = acc;
  return r;
}

// Reference (t, df, p) triples computed with 40-digit arithmetic via the
// regularized incomplete beta identity for the Student-t survival function.
struct WelchFixture {
  std::vector<double> a, b;
  double t, df, p;
};

const std::vector<WelchFixture> kFixtures = {
    {{1, 2, 3, 4, 5}, {2, 3, 4, 5, 6}, -1.0, 8.0, 0.34659350708733425},
    {{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.0,
     18.0, 1.0},
    {{0.1, 0.2, 0.3}, {0.2, 0.25, 0.45}, -1.0444659357341871,
     3.7230769230769229, 0.35928196243567529},
    {{10, 11, 9, 10.5, 9.5, 10.2, 9.8, 10.1, 9.9, 10.3},
     {0.1, -0.2, 0.3, 0.0, -0.1, 0.2, -0.3, 0.1, 0.0, 0.05},
     55.119162608514495, 10.926137626896402, 1.0290293343311421e-14},
    {{1.0, 1.1}, {0.9, 1.3}, -0.24253562503633289, 1.124513618677043,
     0.84502838739367101},
    {{5, 5, 5, 5, 6}, {5, 5, 5, 5, 5.5}, 0.44721359549995794,
     5.8823529411764706, 0.67071572578676229},
    {{0.62, 0.71, 0.66, 0.69, 0.73, 0.60}, {0.64, 0.68, 0.65, 0.70, 0.61},
     0.47222927554201592, 8.7511142267612262, 0.64831643517021642},
    {{2.5, 3.1, 2.8, 3.3, 2.9, 3.0, 2.7}, {3.6, 3.2, 3.9, 3.4, 3.8},
     -4.1851106932973142, 8.3063721595423498, 0.0028142661971598123},
    {{-1, -2, -3, -4}, {1, 2, 3, 4}, -5.4772255750516611, 6.0,
     0.001547421214540939},
    {{0.0, 0.5, 1.0, 1.5, 2.0, 2.5}, {0.1, 0.4, 1.1, 1.4, 2.1, 2.4}, 0.0,
     9.9920527279425258, 1.0},
};

}  // namespace

TEST_CASE("summarize groups and computes sample statistics") {
  std::vector<metrics::SeedResult> rs = {
      result("aafv", "logistic", 0.7, 0), result("aafv", "logistic", 0.8, 1),
      result("fedavg", "logistic", 0.6, 0), result("aafv", "svm", 0.9, 0)};
  auto sums = metrics::summarize(rs);
  REQUIRE(sums.size() == 3);
  // Lexicographic group order: (aafv, logistic), (aafv, svm), (fedavg, logistic).
  CHECK(sums[0].scenario == "aafv");
  CHECK(sums[0].model_kind == "logistic");
  CHECK(sums[0].count == 2);
  CHECK(sums[0].mean == doctest::Approx(0.75));
  CHECK(sums[0].stddev == doctest::Approx(std::sqrt(0.005)).epsilon(1e-9));
  CHECK(sums[1].model_kind == "svm");
  CHECK(sums[1].count == 1);
  CHECK(sums[1].stddev == 0.0);
  CHECK(sums[2].scenario == "fedavg");

  CHECK_THROWS_AS(metrics::summarize({}), std::invalid_argument);
}

TEST_CASE("summary of a constant group is that constant with zero spread") {
  std::vector<metrics::SeedResult> rs = {result("local", "mlp", 0.42, 0),
                                         result("local", "mlp", 0.42, 1),
                                         result("local", "mlp", 0.42, 2)};
  auto sums = metrics::summarize(rs);
  CHECK(sums[0].mean == doctest::Approx(0.42));
  CHECK(sums[0].stddev == 0.0);
  CHECK(sums[0].ci95_halfwidth == 0.0);
}

TEST_CASE("welch_t_test matches high-precision references") {
  for (const auto& f : kFixtures) {
    auto w = metrics::welch_t_test(f.a, f.b);
    CHECK(w.t == doctest::Approx(f.t).epsilon(1e-10));
    CHECK(w.df == doctest::Approx(f.df).epsilon(1e-10));
    CHECK(std::abs(w.p - f.p) < 1e-8);
  }
}

TEST_CASE("welch_t_test symmetry and degenerate conventions") {
  std::vector<double> a = {0.6, 0.7, 0.65, 0.72};
  std::vector<double> b = {0.5, 0.55, 0.6};
  auto ab = metrics::welch_t_test(a, b);
  auto ba = metrics::welch_t_test(b, a);
  CHECK(ab.t == doctest::Approx(-ba.t));
  CHECK(ab.p == doctest::Approx(ba.p));
  CHECK(ab.p >= 0.0);
  CHECK(ab.p <= 1.0);

  // Both samples constant.
  CHECK(metrics::welch_t_test({1.0, 1.0}, {1.0, 1.0}).p == 1.0);
  CHECK(metrics::welch_t_test({1.0, 1.0}, {2.0, 2.0}).p == 0.0);

  CHECK_THROWS_AS(metrics::welch_t_test({1.0}, {1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("p-value decreases in |t| at fixed df") {
  double prev = 1.0;
  for (double t = 0.0; t < 6.0; t += 0.25) {
    double p = metrics::student_t_two_sided_p(t, 7.0);
    CHECK(p <= prev + 1e-15);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    prev = p;
  }
}

TEST_CASE("well-separated samples give a vanishing p-value") {
  std::vector<double> a(10), b(10);
  Rng rng(3);
  for (auto& x : a) x = 0.0 + rng.gaussian();
  for (auto& x : b) x = 10.0 + rng.gaussian();
  CHECK(metrics::welch_t_test(a, b).p < 1e-6);
}

TEST_CASE("report JSON round-trips and contains every group") {
  std::vector<metrics::SeedResult> rs = {result("aafv", "svm", 0.8, 0),
                                         result("local", "svm", 0.7, 0)};
  auto sums = metrics::summarize(rs);
  auto j = metrics::report_json(sums, rs, nlohmann::ordered_json::array(),
                                {{"tau", 0.3}});
  auto reparsed = nlohmann::ordered_json::parse(j.dump(2));
  CHECK(reparsed == j);
  CHECK(j["groups"].size() == 2);
  CHECK(j["per_seed"].size() == 2);
  CHECK(j["config"]["tau"] == 0.3);

  auto table = metrics::report_table(sums);
  CHECK(table.find("aafv") != std::string::npos);
  CHECK(table.find("svm") != std::string::npos);
}
