#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ecsqkd/optimize.hpp"
#include "ecsqkd/rates.hpp"

using namespace ecsqkd;

namespace {

ProtocolParams reference_params() {
  ProtocolParams p;
  p.beta_db_per_km = 0.2;
  p.eta_d = 0.8;
  p.p_d = 1e-7;
  p.e_d = 0.0;
  return p;
}

SweepConfig reference_sweep(double lo, double hi, double step) {
  SweepConfig c;
  c.base = reference_params();
  c.l_min_km = lo;
  c.l_max_km = hi;
  c.l_step_km = step;
  return c;
}

}  // namespace

TEST_CASE("golden-section maximizer") {
  auto [x, fx] = golden_section_maximize([](double v) { return -(v - 0.3) * (v - 0.3) + 2; }, 0.0, 1.0, 1e-10);
  CHECK(x == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(fx == doctest::Approx(2.0));
  auto [edge, fe] = golden_section_maximize([](double v) { return v; }, 0.0, 1.0, 1e-9);
  CHECK(edge == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(fe == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("log grid") {
  const auto g = log_grid(1e-4, 1.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 1e-4);
  CHECK(g.back() == 1.0);
  CHECK(g[2] == doctest::Approx(1e-2));
  CHECK_THROWS(log_grid(0.0, 1.0, 3));
}

TEST_CASE("optimize_mu beats a brute-force audit") {
  const auto params = reference_params();
  for (double L : {0.0, 50.0, 100.0, 200.0, 300.0, 400.0, 450.0}) {
    CAPTURE(L);
    const auto opt = optimize_mu(L, params);
    REQUIRE_FALSE(opt.zero_rate);
    CHECK(opt.rate >= audit_max_rate(L, params) - 1e-12);
    CHECK(opt.rate == doctest::Approx(ecs_rate(opt.mu, L, params)).epsilon(1e-15));
    CHECK(opt.mu <= 0.4407);
  }
}

TEST_CASE("optimized mu never sits beyond the ideal violation threshold") {
  for (double e_d : {0.0, 0.01, 0.07}) {
    auto params = reference_params();
    params.e_d = e_d;
    for (double L = 0; L <= 500; L += 25) {
      const auto opt = optimize_mu(L, params);
      if (opt.rate > 0) CHECK(opt.mu <= 0.4407);
    }
  }
}

TEST_CASE("zero rate is flagged, not thrown") {
  const auto opt = optimize_mu(800.0, reference_params());
  CHECK(opt.zero_rate);
  CHECK(opt.rate == 0.0);
  CHECK(opt.mu == doctest::Approx((1e-4 + 1.0) / 2));

  const auto rows = sweep(reference_sweep(700, 800, 50));
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.zero_rate);
    CHECK(*r.rate_ecs == 0.0);
  }
}

TEST_CASE("sweep grid and determinism") {
  const auto single = sweep(reference_sweep(120, 120, 5));
  REQUIRE(single.size() == 1);
  CHECK(single[0].distance_km == 120.0);

  const auto grid = reference_sweep(0, 600, 5).distances();
  CHECK(grid.size() == 121);
  CHECK(grid.back() == 600.0);

  auto config = reference_sweep(0, 300, 25);
  const auto first = sweep(config);
  const auto second = sweep(config);
  CHECK(first == second);
  config.jobs = 4;
  CHECK(sweep(config) == first);

  for (const auto& row : first) {
    CHECK(*row.rate_ecs >= 0);
    CHECK(*row.rate_bell >= 0);
    CHECK(*row.rate_plob > 0);
    CHECK(*row.mu >= config.search.lo);
    CHECK(*row.mu <= config.search.hi);
  }
}

TEST_CASE("protocol subsets leave other columns empty") {
  auto config = reference_sweep(100, 100, 1);
  config.protocols = {};
  config.protocols.insert(Protocol::Plob);
  const auto rows = sweep(config);
  REQUIRE(rows.size() == 1);
  CHECK_FALSE(rows[0].mu);
  CHECK_FALSE(rows[0].ecs_stats);
  CHECK_FALSE(rows[0].rate_ecs);
  CHECK_FALSE(rows[0].rate_bell);
  CHECK(*rows[0].rate_plob == doctest::Approx(0.011587974275211846));

  config.fixed_mu = 0.1;
  config.protocols.insert(Protocol::Ecs);
  const auto fixed = sweep(config);
  CHECK(*fixed[0].mu == 0.1);
}

TEST_CASE("sweep config validation") {
  auto c = reference_sweep(10, 5, 1);
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = reference_sweep(0, 5, 0);
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = reference_sweep(0, 5, 1);
  c.protocols = {};
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = reference_sweep(0, 5, 1);
  c.base.p_d = 1.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("ECS beats the Bell-state baseline at intercity distances") {
  const auto rows = sweep(reference_sweep(150, 400, 10));
  for (const auto& row : rows) {
    CAPTURE(row.distance_km);
    CHECK(*row.rate_ecs > *row.rate_bell);
  }
}

TEST_CASE("seven percent misalignment still beats PLOB somewhere") {
  auto config = reference_sweep(0, 500, 10);
  config.base.e_d = 0.07;
  bool beats = false;
  for (const auto& row : sweep(config)) beats = beats || *row.rate_ecs > *row.rate_plob;
  CHECK(beats);
}

TEST_CASE("crossovers") {
  const auto config = reference_sweep(0, 0, 1);
  CHECK_FALSE(find_crossover(Protocol::Ecs, Protocol::Ecs, config, 50, 200));
  CHECK_FALSE(find_crossover(Protocol::Bell, Protocol::Bell, config, 50, 200));

  const auto plob = find_crossover(Protocol::Ecs, Protocol::Plob, config, 100, 250);
  REQUIRE(plob);
  // Independent check: the sign flips within the +/-0.5 km window.
  CHECK(optimize_mu(*plob - 0.5, config.base).rate < plob_bound(*plob - 0.5, 0.2, 0.8));
  CHECK(optimize_mu(*plob + 0.5, config.base).rate > plob_bound(*plob + 0.5, 0.2, 0.8));

  const auto reversed = find_crossover(Protocol::Plob, Protocol::Ecs, config, 100, 250);
  REQUIRE(reversed);
  CHECK(std::abs(*reversed - *plob) <= 1.0);

  CHECK_FALSE(find_crossover(Protocol::Ecs, Protocol::Plob, config, 200, 250));
}
