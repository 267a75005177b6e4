#include <catch2/catch_amalgamated.hpp>

#include "support/instances.hpp"
#include "tav/tavhmm.hpp"

using namespace tav;

namespace {

HmmModel two_state_model() {
  HmmModel m;
  m.num_states = 2;
  m.num_symbols = 2;
  m.transition = {0.9, 0.1, 0.2, 0.8};
  m.emission = {0.7, 0.3, 0.4, 0.6};
  m.initial = {0.5, 0.5};
  return m;
}

}  // namespace

TEST_CASE("identity model maps to an all-zero log model") {
  HmmModel m;
  m.num_states = 1;
  m.num_symbols = 1;
  m.transition = {1.0};
  m.emission = {1.0};
  m.initial = {1.0};
  LogModel lm = validate_model(m);
  CHECK(lm.a(0, 0) == 0.0);
  CHECK(lm.b(0, 0) == 0.0);
  CHECK(lm.pi(0) == 0.0);
}

TEST_CASE("row summing to 0.95 is rejected as not stochastic") {
  HmmModel m = two_state_model();
  m.transition = {0.9, 0.05, 0.2, 0.8};
  CHECK_THROWS_MATCHES(validate_model(m), ValidationError,
                       Catch::Matchers::Predicate<ValidationError>(
                           [](const ValidationError& e) { return e.code() == Err::NotStochastic; }));
}

TEST_CASE("log conversion is ln of each entry") {
  LogModel lm = validate_model(two_state_model());
  CHECK_THAT(lm.a(0, 0), Catch::Matchers::WithinAbs(std::log(0.9), 1e-12));
  CHECK_THAT(lm.a(0, 0), Catch::Matchers::WithinAbs(-0.10536, 1e-5));
}

TEST_CASE("dimension and range violations are rejected") {
  HmmModel m = two_state_model();
  SECTION("transition truncated") {
    m.transition.pop_back();
    CHECK_THROWS_AS(validate_model(m), ValidationError);
  }
  SECTION("negative entry") {
    m.transition = {1.1, -0.1, 0.2, 0.8};
    CHECK_THROWS_MATCHES(validate_model(m), ValidationError,
                         Catch::Matchers::Predicate<ValidationError>(
                             [](const ValidationError& e) { return e.code() == Err::OutOfRange; }));
  }
  SECTION("initial wrong length") {
    m.initial = {1.0};
    CHECK_THROWS_AS(validate_model(m), ValidationError);
  }
}

TEST_CASE("exp of finite log entries reproduces probabilities to 1e-12 relative") {
  HmmModel m = test::random_model(11, 5, 4);
  LogModel lm = validate_model(m);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK_THAT(std::exp(lm.a(i, j)), Catch::Matchers::WithinRel(m.a(i, j), 1e-12));
}

TEST_CASE("zero probabilities map to the -inf sentinel") {
  HmmModel m = two_state_model();
  m.emission = {1.0, 0.0, 0.4, 0.6};
  LogModel lm = validate_model(m);
  CHECK(lm.b(0, 1) == kNegInf);
}

TEST_CASE("score_path recomputes the exact product") {
  LogModel lm = validate_model(two_state_model());
  ObservationSequence obs{{0, 1, 1}};
  double s = score_path(lm, {1, 1, 1}, obs);
  CHECK_THAT(std::exp(s), Catch::Matchers::WithinRel(0.04608, 1e-12));
}
