#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "unifilar/channel.hpp"
#include "unifilar/common.hpp"

using namespace unifilar;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(UNIFILAR_TEST_DATA) + "/" + name);
  REQUIRE(in.good());
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Q(0|x,s) in the order (x,s) = (0,0), (1,0), (0,1), (1,1).
void check_first_outputs(const ChannelSpec& c, double a, double b, double d, double e) {
  CHECK(c.Q(0, 0, 0) == doctest::Approx(a).epsilon(1e-15));
  CHECK(c.Q(0, 1, 0) == doctest::Approx(b).epsilon(1e-15));
  CHECK(c.Q(0, 0, 1) == doctest::Approx(d).epsilon(1e-15));
  CHECK(c.Q(0, 1, 1) == doctest::Approx(e).epsilon(1e-15));
}

}  // namespace

TEST_CASE("preset kernels") {
  check_first_outputs(build_preset(PresetId::parse("A")), 1.0, 0.5, 0.5, 0.0);
  check_first_outputs(build_preset(PresetId::parse("B,0.9")), 1.0, 0.9, 0.1, 0.0);
  check_first_outputs(build_preset(PresetId::parse("C,0.5,0.1")), 0.9, 0.5, 0.5, 0.1);
  check_first_outputs(build_preset(PresetId::parse("D,0.5,0.1,0.2,0.3")), 0.9, 0.5, 0.8, 0.3);
}

TEST_CASE("preset rows complement and xor update") {
  for (const char* name : {"A", "B,0.9", "C,0.5,0.1", "C,0.9,0.1", "D,0.5,0.1,0.1,0.1", "D,0.9,0.1,0.1,0.1"}) {
    const ChannelSpec c = build_preset(PresetId::parse(name));
    CHECK(validate(c).empty());
    for (int s = 0; s < 2; ++s)
      for (int x = 0; x < 2; ++x) {
        CHECK(c.Q(0, x, s) + c.Q(1, x, s) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(c.g(s, x, 0) == (s ^ x));
        CHECK(c.g(s, x, 1) == (s ^ x ^ 1));
        CHECK(c.g(s, x, 0) != c.g(s, x, 1));
      }
  }
}

TEST_CASE("symmetric family with p equal to q") {
  const ChannelSpec c = build_preset(PresetId::parse("C,0.3,0.3"));
  CHECK(c.Q(0, 0, 0) == doctest::Approx(1.0 - c.Q(0, 1, 1)));
}

TEST_CASE("chemical channel at p0 = 1 is deterministic") {
  const ChannelSpec c = build_preset(PresetId::parse("B,1.0"));
  check_first_outputs(c, 1.0, 1.0, 0.0, 0.0);
  CHECK_FALSE(c.strictly_positive());
  CHECK(build_preset(PresetId::parse("C,0.5,0.1")).strictly_positive());
  CHECK_FALSE(build_preset(PresetId::parse("A")).strictly_positive());
}

TEST_CASE("preset parameter errors") {
  CHECK_THROWS_AS(build_preset(PresetId::parse("B,1.5")), InvalidParameter);
  CHECK_THROWS_AS(build_preset(PresetId::parse("C,0.5")), InvalidParameter);
  CHECK_THROWS_AS(build_preset(PresetId::parse("D,0.5,0.1,-0.1,0.1")), InvalidParameter);
  CHECK_THROWS(PresetId::parse("E"));
  CHECK(PresetId::parse("D,0.5,0.1,0.1,0.1").name() == "D(0.5,0.1,0.1,0.1)");
}

TEST_CASE("validate names offending indices") {
  ChannelSpec c = build_preset(PresetId::parse("C,0.5,0.1"));
  c.Q(0, 1, 0) = 0.5;
  c.Q(1, 1, 0) = 0.6;
  auto v = validate(c);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::RowSum);
  CHECK(v[0].message.find("[1][0]") != std::string::npos);

  ChannelSpec d = build_preset(PresetId::parse("C,0.5,0.1"));
  d.g(1, 0, 1) = 2;
  v = validate(d);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::StateRange);
  CHECK(v[0].message.find("[1][0][1]") != std::string::npos);

  ChannelSpec e = build_preset(PresetId::parse("A"));
  e.initial_state = 5;
  v = validate(e);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::InitialState);
}

TEST_CASE("channel files") {
  CHECK(load_channel(read_fixture("trapdoor_explicit.chan")) == build_preset(PresetId::parse("A")));
  CHECK(load_channel(read_fixture("symmetric_preset.chan")) == build_preset(PresetId::parse("C,0.9,0.1")));
  CHECK_THROWS_AS(load_channel(read_fixture("missing_g.chan")), ParseError);
  CHECK_THROWS_AS(load_channel(read_fixture("bad_row_sum.chan")), InvalidParameter);

  const ChannelSpec bsc = load_channel(read_fixture("bsc.chan"));
  CHECK(bsc.num_states == 1);
  CHECK(bsc.Q(1, 0, 0) == doctest::Approx(0.1));
}

TEST_CASE("parse errors carry line and field") {
  try {
    load_channel(read_fixture("bad_number.chan"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
    CHECK(e.field() == "Q[0][0]");
  }
  try {
    load_channel("alphabet_x=2\nalphabet_x=2\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.field() == "alphabet_x");
  }
  CHECK_THROWS_AS(load_channel("alphabet_x=2\nalphabet_y=2\nalphabet_s=2\n"), ParseError);
  CHECK_THROWS_AS(load_channel("garbage line\n"), ParseError);
  CHECK_THROWS_AS(load_channel("alphabet_x=2\nalphabet_y=2\nalphabet_s=3\ninitial_state=0\npreset=A\n"), ParseError);
}

TEST_CASE("serialize round trip") {
  for (const char* name : {"A", "B,0.9", "C,0.5,0.1", "D,0.3,0.1,0.7,0.2"}) {
    const ChannelSpec c = build_preset(PresetId::parse(name));
    CHECK(load_channel(serialize_channel(c)) == c);
  }
  const ChannelSpec bsc = load_channel(read_fixture("bsc.chan"));
  CHECK(load_channel(serialize_channel(bsc)) == bsc);
}

TEST_CASE("describe reports positivity") {
  CHECK(describe_channel(build_preset(PresetId::parse("A"))).find("strictly_positive=false") != std::string::npos);
  CHECK(describe_channel(build_preset(PresetId::parse("C,0.9,0.1"))).find("strictly_positive=true") !=
        std::string::npos);
}
