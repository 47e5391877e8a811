#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <sstream>

#include "netcpd/harness.hpp"
#include "oracles.hpp"

using namespace netcpd;

namespace {

ReplicateRecord record(std::optional<int> t_raw, int horizon) {
  ReplicateRecord r;
  r.fired = t_raw.has_value();
  r.t_raw = t_raw;
  r.t_tilde = t_raw ? std::min(*t_raw, horizon) : horizon;
  return r;
}

}  // namespace

TEST_CASE("metrics examples") {
  std::vector<ReplicateRecord> at_delta(5, record(150, 300));
  const Metrics m = metrics(at_delta, 150, 300);
  CHECK(*m.delay == 0.0);
  CHECK(m.pfa == 0.0);

  std::vector<ReplicateRecord> mixed(9, record(std::nullopt, 300));
  mixed.push_back(record(100, 300));
  const Metrics m2 = metrics(mixed, 150, 300);
  CHECK(m2.pfa == doctest::Approx(0.1));
  CHECK(*m2.delay == doctest::Approx(150.0));

  std::vector<ReplicateRecord> early(3, record(20, 300));
  CHECK_FALSE(metrics(early, 150, 300).delay.has_value());
  CHECK_THROWS(metrics(std::vector<ReplicateRecord>{}, 150, 300));
}

TEST_CASE("metrics match the oracle and ignore order") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> t(1, 400);
  std::bernoulli_distribution fired(0.7);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<ReplicateRecord> recs;
    for (int k = 0; k < 40; ++k) recs.push_back(record(fired(rng) ? std::optional<int>(t(rng)) : std::nullopt, 300));
    const Metrics m = metrics(recs, 150, 300);
    const auto o = oracle::metrics(recs, 150, 300);
    CHECK(m.pfa == doctest::Approx(o.pfa).epsilon(1e-15));
    REQUIRE(m.delay.has_value() == o.delay.has_value());
    if (m.delay) CHECK(*m.delay == doctest::Approx(*o.delay).epsilon(1e-12));
    std::shuffle(recs.begin(), recs.end(), rng);
    const Metrics p = metrics(recs, 150, 300);
    CHECK(p.pfa == m.pfa);
    if (m.delay) CHECK(*p.delay == doctest::Approx(*m.delay).epsilon(1e-14));
  }
}

TEST_CASE("csv round trip") {
  std::vector<ReplicateRecord> recs;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int k = 0; k < 20; ++k) {
    ReplicateRecord r = record(k % 3 ? std::optional<int>(2 * k + 1) : std::nullopt, 30);
    r.seed = rng();
    r.s_hit = r.fired ? std::optional<int>(k) : std::nullopt;
    r.gate_value = u(rng);
    r.score = u(rng) * 1e-7;
    recs.push_back(r);
  }
  std::stringstream ss;
  write_csv(ss, recs);
  const auto back = read_csv(ss);
  REQUIRE(back.size() == recs.size());
  for (std::size_t k = 0; k < recs.size(); ++k) {
    CHECK(back[k].seed == recs[k].seed);
    CHECK(back[k].fired == recs[k].fired);
    CHECK(back[k].t_raw == recs[k].t_raw);
    CHECK(back[k].t_tilde == recs[k].t_tilde);
    CHECK(back[k].s_hit == recs[k].s_hit);
    CHECK(std::abs(back[k].gate_value - recs[k].gate_value) <= 1e-12);
    CHECK(std::abs(back[k].score - recs[k].score) <= 1e-12);
  }
  std::istringstream bad("seed,fired\n1,0\n");
  CHECK_THROWS(read_csv(bad));
}

TEST_CASE("experiment runs") {
  ScenarioSpec spec;
  spec.n = 30;
  spec.delta = 40;
  spec.horizon = 80;
  DetectorConfig cfg;
  cfg.rho_hat = 0.03;
  cfg.c1 = INFINITY;
  const auto never = run_experiment(spec, cfg, {}, 3, 9);
  CHECK(never.records.size() == 3);
  CHECK(never.aggregate.pfa == 0.0);
  CHECK(*never.aggregate.delay == 40.0);

  cfg.c1 = 0.5;
  const auto a = run_experiment(spec, cfg, {}, 4, 21, 2);
  const auto b = run_experiment(spec, cfg, {}, 4, 21, 1);
  CHECK(a.records == b.records);
  CHECK(a.config.dump() == b.config.dump());
  CHECK(aggregate_json(a).dump() == aggregate_json(b).dump());

  const auto dir = std::filesystem::temp_directory_path() / "netcpd_harness_test";
  write_experiment(dir.string(), a);
  CHECK(std::filesystem::exists(dir / "results.csv"));
  CHECK(std::filesystem::exists(dir / "aggregate.json"));
  CHECK(std::filesystem::exists(dir / "config.json"));
  std::filesystem::remove_all(dir);

  DetectorChoice np;
  np.kind = DetectorKind::np;
  np.strategy = NpStrategy::alternating(2, 5);
  ScenarioSpec small = spec;
  small.n = 9;
  CHECK_NOTHROW(run_experiment(small, cfg, np, 2, 1));
  CHECK_THROWS(run_experiment(spec, cfg, {}, 0, 1));
}
