#include <cstdio>
#include <fstream>
#include <string>

#include <doctest.h>

#include "eiv/dataset.hpp"
#include "eiv/error.hpp"

using eiv::parse_dataset;

TEST_CASE("comma and whitespace input") {
  auto d = parse_dataset("1,2\n3,4\n5,5\n");
  REQUIRE(d.size() == 3);
  CHECK(d.y1 == std::vector<double>{1, 3, 5});
  CHECK(d.y2 == std::vector<double>{2, 4, 5});

  d = parse_dataset("1 2\n3\t4\n\n5   5\r\n");
  CHECK(d.size() == 3);
  CHECK(d.y2.back() == 5.0);
}

TEST_CASE("header line is skipped and comments ignored") {
  const auto d = parse_dataset("y1,y2\n# note\n1,2\n3,4\n5,6.5e-1\n");
  REQUIRE(d.size() == 3);
  CHECK(d.y1.front() == 1.0);
  CHECK(d.y2.back() == 0.65);
}

TEST_CASE("non-numeric cell names its line") {
  try {
    parse_dataset("y1,y2\n1,2\n3,abc\n5,6\n");
    FAIL("expected ParseError");
  } catch (const eiv::ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("wrong column count and non-finite values are parse errors") {
  CHECK_THROWS_AS(parse_dataset("1,2\n3,4,5\n6,7\n"), eiv::ParseError);
  CHECK_THROWS_AS(parse_dataset("1,2\n3\n6,7\n"), eiv::ParseError);
  CHECK_THROWS_AS(parse_dataset("1,2\n3,nan\n6,7\n"), eiv::ParseError);
  CHECK_THROWS_AS(parse_dataset("1,2\ny1,y2\n6,7\n"), eiv::ParseError);
}

TEST_CASE("too few points") {
  try {
    parse_dataset("1,2\n3,4\n");
    FAIL("expected TooFewPoints");
  } catch (const eiv::Error& e) {
    CHECK(e.code() == eiv::ErrorCode::TooFewPoints);
  }
}

TEST_CASE("file round trip and missing file") {
  const std::string path = "test_dataset_tmp.csv";
  {
    std::ofstream out(path);
    out << "a b\n1 1\n2 3\n4 4\n";
  }
  const auto d = eiv::read_dataset(path);
  CHECK(d.size() == 3);
  std::remove(path.c_str());
  try {
    eiv::read_dataset("does/not/exist.csv");
    FAIL("expected Io");
  } catch (const eiv::Error& e) {
    CHECK(e.code() == eiv::ErrorCode::Io);
  }
}

TEST_CASE("swapped exchanges the columns") {
  const auto d = parse_dataset("1,2\n3,4\n5,5\n").swapped();
  CHECK(d.y1 == std::vector<double>{2, 4, 5});
}
