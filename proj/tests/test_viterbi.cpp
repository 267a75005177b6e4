#include <catch2/catch_amalgamated.hpp>

#include "support/instances.hpp"
#include "tav/tavhmm.hpp"

using namespace tav;

namespace {

LogModel two_state_log() {
  HmmModel m;
  m.num_states = 2;
  m.num_symbols = 2;
  m.transition = {0.9, 0.1, 0.2, 0.8};
  m.emission = {0.7, 0.3, 0.4, 0.6};
  m.initial = {0.5, 0.5};
  return validate_model(m);
}

}  // namespace

TEST_CASE("single-state model decodes to the only path") {
  HmmModel m;
  m.num_states = 1;
  m.num_symbols = 2;
  m.transition = {1.0};
  m.emission = {0.25, 0.75};
  m.initial = {1.0};
  LogModel lm = validate_model(m);
  ObservationSequence obs{{0, 1, 1, 0}};
  DecodeResult res = viterbi_decode(lm, obs);
  REQUIRE(res.status == DecodeStatus::ok);
  CHECK(res.path == std::vector<std::int32_t>{0, 0, 0, 0});
  double expected = std::log(0.25) * 2 + std::log(0.75) * 2;
  CHECK_THAT(res.log_likelihood, Catch::Matchers::WithinAbs(expected, 1e-12));
  CHECK(res.stats.cells_explored == 4);
}

TEST_CASE("two-state example matches the enumerated optimum") {
  LogModel lm = two_state_log();
  ObservationSequence obs{{0, 1, 1}};
  DecodeResult vit = viterbi_decode(lm, obs);
  DecodeResult bf = brute_force_decode(lm, obs);
  REQUIRE(vit.status == DecodeStatus::ok);
  CHECK(vit.path == std::vector<std::int32_t>{1, 1, 1});
  CHECK(bf.path == std::vector<std::int32_t>{1, 1, 1});
  CHECK_THAT(std::exp(vit.log_likelihood), Catch::Matchers::WithinRel(0.04608, 1e-12));
  CHECK_THAT(vit.log_likelihood, Catch::Matchers::WithinAbs(bf.log_likelihood, 1e-12));
}

TEST_CASE("viterbi equals brute force over 50 seeded instances") {
  Rng pick(99);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + static_cast<int>(pick.bits() % 4);   // 2..5
    int t = 2 + static_cast<int>(pick.bits() % 7);   // 2..8
    int m = 2 + static_cast<int>(pick.bits() % 3);
    HmmModel model = test::random_model(1000 + trial, n, m);
    LogModel lm = validate_model(model);
    ObservationSequence obs = test::random_obs(2000 + trial, t, m);
    DecodeResult vit = viterbi_decode(lm, obs);
    DecodeResult bf = brute_force_decode(lm, obs);
    REQUIRE(vit.status == DecodeStatus::ok);
    INFO("trial " << trial << " n=" << n << " t=" << t);
    CHECK_THAT(vit.log_likelihood, Catch::Matchers::WithinAbs(bf.log_likelihood, 1e-9));
    // Recomputing the returned path's probability reproduces the reported value.
    CHECK_THAT(score_path(lm, vit.path, obs),
               Catch::Matchers::WithinAbs(vit.log_likelihood, 1e-9));
  }
}

TEST_CASE("empty observations are rejected") {
  LogModel lm = two_state_log();
  ObservationSequence obs;
  CHECK_THROWS_MATCHES(viterbi_decode(lm, obs), ValidationError,
                       Catch::Matchers::Predicate<ValidationError>([](const ValidationError& e) {
                         return e.code() == Err::EmptyObservations;
                       }));
}

TEST_CASE("impossible observations yield a status, not a crash") {
  HmmModel m;
  m.num_states = 2;
  m.num_symbols = 2;
  m.transition = {1.0, 0.0, 0.0, 1.0};
  m.emission = {1.0, 0.0, 1.0, 0.0};  // symbol 1 cannot be emitted
  m.initial = {0.5, 0.5};
  LogModel lm = validate_model(m);
  ObservationSequence obs{{0, 1}};
  DecodeResult res = viterbi_decode(lm, obs);
  CHECK(res.status == DecodeStatus::all_paths_impossible);
  CHECK(res.log_likelihood == kNegInf);
  CHECK(res.path.empty());
}

TEST_CASE("brute force guards against oversized instances") {
  HmmModel m = test::random_model(5, 10, 2);
  LogModel lm = validate_model(m);
  ObservationSequence obs = test::random_obs(6, 8, 2);  // 10^8 sequences
  CHECK_THROWS_MATCHES(brute_force_decode(lm, obs), ValidationError,
                       Catch::Matchers::Predicate<ValidationError>(
                           [](const ValidationError& e) { return e.code() == Err::TooLarge; }));
}

TEST_CASE("brute force breaks ties lexicographically") {
  HmmModel m;
  m.num_states = 2;
  m.num_symbols = 1;
  m.transition = {0.5, 0.5, 0.5, 0.5};
  m.emission = {1.0, 1.0};
  m.initial = {0.5, 0.5};
  LogModel lm = validate_model(m);
  ObservationSequence obs{{0, 0}};
  DecodeResult res = brute_force_decode(lm, obs);  // every path ties
  CHECK(res.path == std::vector<std::int32_t>{0, 0});
}

TEST_CASE("deterministic model scores zero on the consistent path") {
  HmmModel m;
  m.num_states = 2;
  m.num_symbols = 2;
  m.transition = {0.0, 1.0, 1.0, 0.0};
  m.emission = {1.0, 0.0, 0.0, 1.0};
  m.initial = {1.0, 0.0};
  LogModel lm = validate_model(m);
  ObservationSequence obs{{0, 1, 0}};
  DecodeResult res = brute_force_decode(lm, obs);
  REQUIRE(res.status == DecodeStatus::ok);
  CHECK(res.path == std::vector<std::int32_t>{0, 1, 0});
  CHECK(res.log_likelihood == 0.0);
}

TEST_CASE("sample_sequence is deterministic in the seed") {
  HmmModel m = test::random_model(7, 3, 4);
  auto [s1, o1] = sample_sequence(m, 200, 42);
  auto [s2, o2] = sample_sequence(m, 200, 42);
  auto [s3, o3] = sample_sequence(m, 200, 43);
  CHECK(s1 == s2);
  CHECK(o1.symbols == o2.symbols);
  CHECK(o1.symbols != o3.symbols);
}

TEST_CASE("deterministic chain yields the unique trajectory for any seed") {
  HmmModel m;
  m.num_states = 2;
  m.num_symbols = 2;
  m.transition = {0.0, 1.0, 1.0, 0.0};
  m.emission = {1.0, 0.0, 0.0, 1.0};
  m.initial = {1.0, 0.0};
  for (std::uint64_t seed : {1ULL, 9ULL, 77ULL}) {
    auto [states, obs] = sample_sequence(m, 6, seed);
    CHECK(states == std::vector<std::int32_t>{0, 1, 0, 1, 0, 1});
    CHECK(obs.symbols == std::vector<std::int32_t>{0, 1, 0, 1, 0, 1});
  }
}

TEST_CASE("sampled frequencies approach the stationary distribution") {
  HmmModel m;
  m.num_states = 2;
  m.num_symbols = 2;
  m.transition = {0.9, 0.1, 0.1, 0.9};
  m.emission = {0.5, 0.5, 0.5, 0.5};
  m.initial = {0.5, 0.5};

  // Oracle: stationary vector by power iteration on A^T.
  double p0 = 0.3, p1 = 0.7;
  for (int it = 0; it < 10000; ++it) {
    double q0 = p0 * m.a(0, 0) + p1 * m.a(1, 0);
    double q1 = p0 * m.a(0, 1) + p1 * m.a(1, 1);
    p0 = q0;
    p1 = q1;
  }

  const int t_max = 100000;
  auto [states, obs] = sample_sequence(m, t_max, 4242);
  long count0 = std::count(states.begin(), states.end(), 0);
  double freq0 = static_cast<double>(count0) / t_max;
  CHECK_THAT(freq0, Catch::Matchers::WithinAbs(p0, 0.01));
}

TEST_CASE("doubling T roughly doubles viterbi work (smoke)") {
  HmmModel m = test::random_model(21, 16, 8);
  LogModel lm = validate_model(m);
  ObservationSequence obs1 = test::random_obs(1, 20000, 8);
  ObservationSequence obs2 = test::random_obs(1, 40000, 8);
  // Warm-up to stabilize caches.
  viterbi_decode(lm, obs1);
  auto r1 = viterbi_decode(lm, obs1);
  auto r2 = viterbi_decode(lm, obs2);
  CHECK(r2.stats.wall_time_ms < 6.0 * std::max(r1.stats.wall_time_ms, 0.1));
}
