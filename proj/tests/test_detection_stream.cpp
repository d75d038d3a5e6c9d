#include <doctest.h>

#include <clocale>

#include "support/oracle.hpp"
#include "vservo/detection_stream.hpp"
#include "vservo/error.hpp"

using namespace vservo;

TEST_CASE("detection lines") {
  const auto f = parse_detection_line(" 0.5 ,1000,\t700, 400,200, 0.25\r");
  REQUIRE(f);
  CHECK(f->timestamp == 0.5);
  REQUIRE(f->detection);
  CHECK(f->detection->center == ImagePoint{1000, 700});
  CHECK(f->detection->width == 400);
  CHECK(f->detection->phi == 0.25);
  CHECK(f->detection->timestamp == 0.5);

  const auto lost = parse_detection_line("1.25,lost");
  REQUIRE(lost);
  CHECK(lost->timestamp == 1.25);
  CHECK_FALSE(lost->detection);

  CHECK_FALSE(parse_detection_line(""));
  CHECK_FALSE(parse_detection_line("   "));
  CHECK_FALSE(parse_detection_line("# t,cx,cy,w,h,phi"));

  // Angles are wrapped on the way in.
  CHECK(parse_detection_line("0,1,1,1,1,7")->detection->phi == doctest::Approx(7 - 2 * kPi));
  CHECK(parse_detection_line("0,1e3,7.2e2,1,1,0")->detection->center.x == 1000.0);
}

TEST_CASE("malformed detection lines are rejected") {
  for (const char* bad : {"0,1,2,3,4", "0,1,2,3,4,5,6", "x,1,2,3,4,5", "0,1,2,0,4,5",
                          "0,1,2,3,-4,5", "0,nan,2,3,4,5", "0,1,2,3,4,inf", "0,1,,3,4,5",
                          "0,1.5.2,2,3,4,5", "0,lost,1"}) {
    CHECK_THROWS_AS(parse_detection_line(bad), ParseError);
  }
}

TEST_CASE("formatting round-trips exactly") {
  oracle::Gen g(61);
  for (int i = 0; i < 5000; ++i) {
    StreamFrame f;
    f.timestamp = g.uniform(0, 100);
    if (g.coin(0.9)) {
      ObbDetection d;
      d.center = {g.uniform(0, 1920), g.uniform(0, 1440)};
      d.width = g.uniform(1, 500);
      d.height = g.uniform(1, 500);
      d.phi = g.uniform(-3.1, 3.1);
      d.timestamp = f.timestamp;
      f.detection = d;
    }
    const auto back = parse_detection_line(format_detection_line(f));
    REQUIRE(back);
    REQUIRE(back->timestamp == f.timestamp);
    REQUIRE(back->detection.has_value() == f.detection.has_value());
    if (f.detection) {
      REQUIRE(back->detection->center == f.detection->center);
      REQUIRE(back->detection->phi == f.detection->phi);
    }
  }
}

TEST_CASE("parsing ignores the process locale") {
  const char* de = std::setlocale(LC_NUMERIC, "de_DE.UTF-8");
  const auto f = parse_detection_line("0.5,1000.25,700,400,200,0.1");
  CHECK(f->detection->center.x == 1000.25);
  if (de) std::setlocale(LC_NUMERIC, "C");
}
