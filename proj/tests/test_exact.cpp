#include <catch2/catch_amalgamated.hpp>

#include "tsfp/exact.hpp"

using namespace tsfp;

TEST_CASE("rational parsing: integers, fractions, decimals") {
  CHECK(rational_from_string("-3") == Rational(-3));
  CHECK(rational_from_string("2/7") == Rational(2, 7));
  CHECK(rational_from_string("1.25") == Rational(5, 4));
  CHECK(rational_from_string("1.25e-3") == Rational(1, 800));
  CHECK(rational_from_string("-0.5") == Rational(-1, 2));
  CHECK_THROWS(rational_from_string("abc"));
  CHECK_THROWS(rational_from_string(""));
}

TEST_CASE("rational from double is exact") {
  CHECK(rational_from_double(0.5) == Rational(1, 2));
  CHECK(rational_from_double(0.1).get_d() == 0.1);  // dyadic round trip
}

TEST_CASE("rational printing round-trips") {
  for (const char* s : {"1/3", "-2/7", "0.5", "3", "1.0625"}) {
    Rational q = rational_from_string(s);
    CHECK(rational_from_string(rational_to_string(q)) == q);
  }
}

TEST_CASE("exact complex arithmetic") {
  ExactComplex a(Rational(1, 2), Rational(-1, 3));
  ExactComplex b(Rational(2), Rational(1));
  CHECK((a + b) - b == a);
  CHECK(a * ExactComplex(1) == a);
  CHECK((ExactComplex::i() * ExactComplex::i()) == ExactComplex(-1));
  CHECK(a.conj().conj() == a);
  CHECK((a * a.conj()).is_real());
  CHECK(ExactComplex().is_zero());
}
