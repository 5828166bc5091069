#include <doctest.h>

#include <cmath>

#include "gelfand/bubble.hpp"

using namespace gelfand;

TEST_SUITE("bubble") {

TEST_CASE("profile shape") {
  CHECK(bubble_profile(0.0) == doctest::Approx(0.0));
  double prev = 0.0;
  for (double r = 0.5; r < 30.0; r += 0.5) {
    const double u = bubble_profile(r);
    CHECK(u < prev);
    prev = u;
  }
}

TEST_CASE("integral constants") {
  const BubbleConstants bc = bubble_constants();
  CHECK(bc.mass == doctest::Approx(8.0 * M_PI).epsilon(1e-8));
  CHECK(bc.mass_u == doctest::Approx(-16.0 * M_PI).epsilon(1e-6));
  CHECK(bc.log_moment == doctest::Approx(-6.0 * std::log(2.0)).epsilon(1e-6));
}

} // TEST_SUITE
