#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "gemd/metrics.hpp"
#include "gemd/rng.hpp"

using namespace gemd;
using namespace gemd::metrics;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Reference values computed independently at 40-digit precision.
constexpr double kKlU28W55 = 0.1927447570217574298840441825650714374707;
constexpr double kBregTsQ025 = 0.1081356208376756760534473558123476140464;
constexpr double kBregK1K04 = 0.1918956265506948160931544295890469463478;

SimplexVector random_simplex(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform01();
  return SimplexVector(std::move(v));
}

IterationTrace trace_from_ious(const std::vector<double>& ious) {
  IterationTrace tr;
  for (std::size_t t = 0; t < ious.size(); ++t) {
    TraceRow r;
    r.t = static_cast<int>(t);
    r.iou = ious[t];
    tr.rows.push_back(r);
  }
  return tr;
}

}  // namespace

TEST_CASE("rel_primal_gap matches its definition") {
  CHECK(rel_primal_gap(0.5, 0.5) == 0.0);
  CHECK(rel_primal_gap(1.5, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rel_primal_gap(-0.9, -1.0) == doctest::Approx(0.1).epsilon(1e-12));
  // Large |L_star| switches the denominator away from 1.
  CHECK(rel_primal_gap(-3.0, -4.0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("fw_gap on simple vectors") {
  CHECK(fw_gap({0.5, 0.5}, {0.0, 2.0}) == doctest::Approx(1.0).epsilon(1e-15));
  // Constant gradients certify optimality for any simplex point.
  CHECK(std::abs(fw_gap({0.3, 0.2, 0.5}, {4.0, 4.0, 4.0})) <= 1e-12);
  CHECK_THROWS_AS(fw_gap({0.5, 0.5}, {1.0}), LengthMismatch);
  CHECK_THROWS_AS(fw_gap({}, {}), ArgumentError);
}

TEST_CASE("fw_gap is nonnegative for random simplex points") {
  Rng rng(20240818);
  for (int rep = 0; rep < 50; ++rep) {
    SimplexVector w = random_simplex(rng, 12);
    std::vector<double> g(12);
    for (double& x : g) x = 3.0 * rng.normal();
    CHECK(fw_gap(w.values(), g) >= -1e-12);
  }
}

TEST_CASE("rel_fw_gap divides by max(1, |L|)") {
  CHECK(rel_fw_gap(0.0, 123.0) == 0.0);
  CHECK(rel_fw_gap(2.0, 0.1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(rel_fw_gap(2.0, -4.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("stopping_delta ratio and degenerate start") {
  CHECK(stopping_delta(5.0, 5.0) == 1.0);
  CHECK(stopping_delta(1e-4 * 5.0, 5.0) <= 1e-4);  // threshold boundary fires
  CHECK_THROWS_AS(stopping_delta(1.0, 0.0), DegenerateStart);
  CHECK_THROWS_AS(stopping_delta(1.0, -2.0), DegenerateStart);
  // Scale invariance up to rounding.
  CHECK(stopping_delta(7.3 * 0.2, 7.3 * 1.7) ==
        doctest::Approx(stopping_delta(0.2, 1.7)).epsilon(1e-15));
}

TEST_CASE("iou_topk set arithmetic") {
  SUBCASE("exact recovery") {
    std::vector<double> w = {0.0, 0.5, 0.0, 0.5};
    CHECK(iou_topk(w, {1, 3}, 2) == 1.0);
  }
  SUBCASE("disjoint supports") {
    std::vector<double> w = {0.5, 0.5, 0.0, 0.0};
    CHECK(iou_topk(w, {2, 3}, 2) == 0.0);
  }
  SUBCASE("intersection 50 of union 150") {
    const std::size_t n = 200;
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 50; i < 150; ++i) w[i] = 0.01;
    std::vector<std::size_t> support(100);
    std::iota(support.begin(), support.end(), std::size_t{0});
    CHECK(iou_topk(w, support, 100) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("ties broken by lowest index") {
    std::vector<double> w = {0.25, 0.25, 0.25, 0.25};
    CHECK(iou_topk(w, {0, 1}, 2) == 1.0);  // top-2 resolves to {0, 1}
    CHECK(iou_topk(w, {2, 3}, 2) == 0.0);
  }
  SUBCASE("argument validation") {
    std::vector<double> w = {1.0, 0.0};
    CHECK_THROWS_AS(iou_topk(w, {0, 1, 0}, 3), ArgumentError);  // K > n
    CHECK_THROWS_AS(iou_topk(w, {0, 1}, 1), ArgumentError);  // K != |support|
    CHECK_THROWS_AS(iou_topk(w, {5}, 1), ArgumentError);  // index out of range
  }
}

TEST_CASE("recovery_delay requires permanence") {
  CHECK(recovery_delay(trace_from_ious({1.0, 1.0, 1.0})) == 0);
  CHECK(recovery_delay(trace_from_ious({0.0, 0.5, 1.0, 1.0, 1.0})) == 2);
  // An early transient hit does not count.
  CHECK(recovery_delay(trace_from_ious({1.0, 0.9, 1.0, 1.0})) == 2);
  CHECK(!recovery_delay(trace_from_ious({0.0, 0.5})).has_value());
  CHECK(!recovery_delay(IterationTrace{}).has_value());
  CHECK(recovery_delay_censored(trace_from_ious({0.0, 0.5}), 100) == 100);
  CHECK(recovery_delay_censored(trace_from_ious({0.0, 1.0}), 100) == 1);
}

TEST_CASE("first_iter_at_iou scans forward") {
  auto tr = trace_from_ious({0.2, 0.95, 1.0});
  CHECK(first_iter_at_iou(tr, 0.9) == 1);
  CHECK(first_iter_at_iou(tr, 0.0) == 0);
  CHECK(!first_iter_at_iou(tr, 1.1).has_value());
  CHECK(first_iter_at_iou_censored(tr, 1.1, 100) == 100);
  CHECK(first_iter_at_iou_censored(tr, 1.0, 100) == 2);
}

TEST_CASE("recovery_delay >= first hit of 1.0 when both exist") {
  auto tr = trace_from_ious({0.0, 1.0, 0.8, 1.0, 1.0});
  auto first = first_iter_at_iou(tr, 1.0);
  auto delay = recovery_delay(tr);
  REQUIRE(first.has_value());
  REQUIRE(delay.has_value());
  CHECK(*delay >= *first);
  CHECK(*first == 1);
  CHECK(*delay == 3);
}

TEST_CASE("bregman_divergence closed forms and quadrature") {
  SimplexVector u({0.2, 0.8});
  SimplexVector w({0.5, 0.5});

  SUBCASE("u = w gives exactly zero") {
    auto link = links::LinkFunction::tsallis(0.25);
    CHECK(bregman_divergence(link, w, w) == 0.0);
  }
  SUBCASE("natural link is the KL-style divergence") {
    auto link = links::LinkFunction::natural();
    CHECK(bregman_divergence(link, u, w) ==
          doctest::Approx(kKlU28W55).epsilon(1e-14));
    // Mass where the base has none makes the divergence infinite.
    SimplexVector w0({1.0, 0.0});
    CHECK(bregman_divergence(link, u, w0) == kInf);
  }
  SUBCASE("tsallis closed form") {
    auto link = links::LinkFunction::tsallis(0.25);
    CHECK(bregman_divergence(link, u, w) ==
          doctest::Approx(kBregTsQ025).epsilon(1e-14));
  }
  SUBCASE("kaniadakis via quadrature") {
    auto link = links::LinkFunction::kaniadakis(0.4);
    SimplexVector uk({0.3, 0.7});
    SimplexVector wk({0.6, 0.4});
    CHECK(bregman_divergence(link, uk, wk) ==
          doctest::Approx(kBregK1K04).epsilon(1e-13));
  }
  SUBCASE("nonnegativity on random pairs") {
    auto link = links::LinkFunction::tsallis(0.25);
    Rng rng(777);
    for (int rep = 0; rep < 100; ++rep) {
      SimplexVector a = random_simplex(rng, 8);
      SimplexVector b = random_simplex(rng, 8);
      CHECK(bregman_divergence(link, a, b) >= -1e-10);
    }
  }
  SUBCASE("length mismatch") {
    auto link = links::LinkFunction::natural();
    SimplexVector v3({0.4, 0.3, 0.3});
    CHECK_THROWS_AS(bregman_divergence(link, u, v3), LengthMismatch);
  }
}

TEST_CASE("csv round trip is byte identical") {
  IterationTrace tr;
  tr.header.emplace_back("config", "{\"algorithm\":\"dmd\"}");
  tr.header.emplace_back("seed", "42");
  TraceRow a;
  a.t = 0;
  a.loss = -1.0 / 3.0;
  a.rel_primal = 1e-17;
  a.fw_gap = 0.123456789012345678;
  a.rel_fw = 0.0;
  a.delta_t = 1.0;
  a.iou = 0.25;
  a.nnz = 1000;
  TraceRow b = a;
  b.t = 3;
  b.loss = -0.50000000000000011;
  b.iou = std::numeric_limits<double>::quiet_NaN();  // survives the round trip
  b.n_dual = 990;
  b.n_fallback = 10;
  b.n_clipped = 7;
  tr.rows = {a, b};

  const std::string text = to_csv(tr);
  std::istringstream in(text);
  IterationTrace back = read_csv(in, "trace.csv");
  CHECK(back.header == tr.header);
  REQUIRE(back.rows.size() == 2);
  CHECK(to_csv(back) == text);

  std::ostringstream out;
  write_csv(tr, out);
  CHECK(out.str() == text);
}

TEST_CASE("read_csv rejects malformed input") {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return read_csv(in, "bad.csv");
  };
  const std::string cols =
      "t,loss,rel_primal,fw_gap,rel_fw,delta_t,iou,nnz,n_dual,n_fallback,"
      "n_clipped\n";

  SUBCASE("wrong column header") {
    CHECK_THROWS_WITH_AS(parse("t,loss\n0,1\n"),
                         doctest::Contains("bad.csv:1"), ParseError);
  }
  SUBCASE("missing column header entirely") {
    CHECK_THROWS_AS(parse("# only: header\n"), ParseError);
  }
  SUBCASE("bad numeric field") {
    CHECK_THROWS_WITH_AS(parse(cols + "0,xyz,0,0,0,1,0,1,0,0,0\n"),
                         doctest::Contains("bad.csv:2"), ParseError);
  }
  SUBCASE("non-increasing iteration counter") {
    const std::string row = "5,0,0,0,0,1,0,1,0,0,0\n";
    CHECK_THROWS_WITH_AS(parse(cols + row + row),
                         doctest::Contains("strictly increase"), ParseError);
  }
  SUBCASE("trailing characters") {
    CHECK_THROWS_AS(parse(cols + "0,0,0,0,0,1,0,1,0,0,0,9\n"), ParseError);
  }
}
