#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "spsmux/topology.hpp"

using namespace spsmux;

namespace {

std::vector<std::string> tokens(const std::vector<ArmExponents>& arms) {
  std::vector<std::string> out;
  out.reserve(arms.size());
  for (const auto& a : arms) out.push_back(a.token());
  return out;
}

}  // namespace

TEST_CASE("hamming weight") {
  CHECK(hamming_weight(0) == 0);
  CHECK(hamming_weight(1) == 1);
  CHECK(hamming_weight(2) == 1);
  CHECK(hamming_weight(3) == 2);
  CHECK(hamming_weight(255) == 8);
  CHECK(hamming_weight((std::uint64_t{1} << 40) - 1) == 40);
}

TEST_CASE("complete tree exponents, two levels") {
  const auto arms = arm_exponents_cbtm(2);
  REQUIRE(arms.size() == 4);
  CHECK(arms[0] == ArmExponents{2, 0});
  CHECK(arms[1] == ArmExponents{1, 1});
  CHECK(arms[2] == ArmExponents{1, 1});
  CHECK(arms[3] == ArmExponents{0, 2});
}

TEST_CASE("input-extended tree with 11 units") {
  const auto got = tokens(arm_exponents_iibtm(11));
  const std::vector<std::string> expected = {
      "Vr^4",      "Vr^3*Vt",   "Vr^3*Vt", "Vr^2*Vt^2", "Vr^3*Vt",
      "Vr^2*Vt^2", "Vr*Vt^2",   "Vr^2*Vt", "Vr*Vt^2",   "Vr*Vt^2",
      "Vt^3"};
  CHECK(got == expected);
}

TEST_CASE("output-extended tree with 11 units") {
  const auto got = tokens(arm_exponents_oibtm(11));
  const std::vector<std::string> expected = {
      "Vr^4",      "Vr^3*Vt",   "Vr^3*Vt", "Vr^2*Vt^2", "Vr^3*Vt",
      "Vr^2*Vt^2", "Vr^2*Vt^2", "Vr*Vt^3", "Vr^2*Vt",   "Vr*Vt^2",
      "Vt^2"};
  CHECK(got == expected);
}

TEST_CASE("small incomplete trees by hand") {
  CHECK(tokens(arm_exponents_oibtm(2)) ==
        std::vector<std::string>{"Vr", "Vt"});
  CHECK(tokens(arm_exponents_oibtm(3)) ==
        std::vector<std::string>{"Vr^2", "Vr*Vt", "Vt"});
  CHECK(tokens(arm_exponents_iibtm(3)) ==
        std::vector<std::string>{"Vr^2", "Vr*Vt", "Vt"});
  CHECK(tokens(arm_exponents_iibtm(2)) ==
        std::vector<std::string>{"Vr", "Vt"});
}

TEST_CASE("both incomplete trees collapse to the complete tree at powers of two") {
  for (int m = 1; m <= 6; ++m) {
    const int n = 1 << m;
    const auto complete = arm_exponents_cbtm(m);
    CHECK(arm_exponents_iibtm(n) == complete);
    CHECK(arm_exponents_oibtm(n) == complete);
  }
}

TEST_CASE("exponent pairs always sum to the router depth of the arm") {
  // Every arm of a tree with N units passes ceil(log2 N) or fewer routers;
  // each router contributes exactly one factor, so r + t = arm depth >= 1.
  for (int n = 2; n <= 40; ++n) {
    for (const auto& a : arm_exponents_oibtm(n)) {
      CHECK(a.r >= 0);
      CHECK(a.t >= 0);
      CHECK(a.routers() >= 1);
    }
    for (const auto& a : arm_exponents_iibtm(n)) CHECK(a.routers() >= 1);
  }
}

TEST_CASE("single unit passes straight through") {
  CHECK(arm_exponents_iibtm(1) == std::vector<ArmExponents>{{0, 0}});
  CHECK(arm_exponents_oibtm(1) == std::vector<ArmExponents>{{0, 0}});
  CHECK(arm_exponents_cbtm(0) == std::vector<ArmExponents>{{0, 0}});
  CHECK(ArmExponents{0, 0}.token() == "1");
  CHECK(ArmExponents{0, 0}.value(0.5, 0.5) == 1.0);
}

TEST_CASE("symbolic tokens") {
  CHECK(ArmExponents{3, 1}.token() == "Vr^3*Vt");
  CHECK(ArmExponents{1, 0}.token() == "Vr");
  CHECK(ArmExponents{0, 2}.token() == "Vt^2");
  CHECK(ArmExponents{2, 2}.token() == "Vr^2*Vt^2");
}

TEST_CASE("numeric arm values") {
  const ArmExponents a{3, 2};
  CHECK(a.value(0.9, 0.8) == doctest::Approx(0.9 * 0.9 * 0.9 * 0.8 * 0.8)
                                 .epsilon(1e-15));
  const LossModel loss{0.9, 0.8, 1.0, 1.0};
  const auto arms = arms_oibtm(11, loss);
  const auto exps = arm_exponents_oibtm(11);
  REQUIRE(arms.size() == exps.size());
  for (std::size_t k = 0; k < arms.size(); ++k)
    CHECK(arms[k] == exps[k].value(loss.v_r, loss.v_t));
}

TEST_CASE("prioritized arms are a descending permutation of positional") {
  const LossModel loss{0.95, 0.87, 0.9, 0.98};
  for (TopologyKind kind :
       {TopologyKind::Iibtm, TopologyKind::Oibtm, TopologyKind::Cbtm}) {
    for (int n : {1, 2, 4, 8, 16}) {
      const TopologySpec spec{kind, n};
      const auto arms = build_arm_transmissions(spec, loss);
      REQUIRE(arms.size() == static_cast<std::size_t>(n));
      REQUIRE(arms.prioritized.size() == arms.positional.size());
      REQUIRE(arms.priority_to_position.size() == arms.positional.size());

      for (std::size_t k = 1; k < arms.prioritized.size(); ++k)
        CHECK(arms.prioritized[k - 1] >= arms.prioritized[k]);

      auto sorted_pos = arms.positional;
      auto sorted_pri = arms.prioritized;
      std::sort(sorted_pos.begin(), sorted_pos.end());
      std::sort(sorted_pri.begin(), sorted_pri.end());
      CHECK(sorted_pos == sorted_pri);

      auto perm = arms.priority_to_position;
      std::sort(perm.begin(), perm.end());
      for (int k = 0; k < n; ++k) CHECK(perm[k] == k + 1);

      for (std::size_t k = 0; k < arms.prioritized.size(); ++k) {
        CHECK(arms.prioritized[k] ==
              arms.positional[arms.priority_to_position[k] - 1]);
        CHECK(arms.prioritized[k] > 0.0);
        CHECK(arms.prioritized[k] <= 1.0);
      }
    }
  }

  // Incomplete trees with n not a power of two as well.
  for (int n : {3, 5, 11, 23}) {
    const auto arms = build_arm_transmissions({TopologyKind::Oibtm, n}, loss);
    for (std::size_t k = 1; k < arms.prioritized.size(); ++k)
      CHECK(arms.prioritized[k - 1] >= arms.prioritized[k]);
  }
}

TEST_CASE("equal router efficiencies keep positional order under priority sort") {
  const LossModel loss{0.9, 0.9, 1.0, 1.0};
  const auto arms = build_arm_transmissions({TopologyKind::Cbtm, 4}, loss);
  CHECK(arms.priority_to_position == std::vector<int>{1, 2, 3, 4});
}

TEST_CASE("topology kind names") {
  CHECK(to_string(TopologyKind::Cbtm) == "cbtm");
  CHECK(to_string(TopologyKind::Iibtm) == "iibtm");
  CHECK(to_string(TopologyKind::Oibtm) == "oibtm");
  CHECK(parse_topology_kind("cbtm") == TopologyKind::Cbtm);
  CHECK(parse_topology_kind("sym") == TopologyKind::Cbtm);
  CHECK(parse_topology_kind("in") == TopologyKind::Iibtm);
  CHECK(parse_topology_kind("out") == TopologyKind::Oibtm);
  CHECK_THROWS_AS((void)parse_topology_kind("ring"), std::invalid_argument);
}

TEST_CASE("validation rejects bad specs and loss models") {
  CHECK_THROWS_AS(TopologySpec(TopologyKind::Cbtm, 6).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(TopologySpec(TopologyKind::Oibtm, 0).validate(),
                  std::invalid_argument);
  CHECK_NOTHROW(TopologySpec(TopologyKind::Cbtm, 8).validate());
  CHECK_NOTHROW(TopologySpec(TopologyKind::Iibtm, 7).validate());

  LossModel loss{0.9, 0.9, 0.9, 0.9};
  CHECK_NOTHROW(loss.validate());
  loss.v_r = 1.5;
  CHECK_THROWS_AS(loss.validate(), std::invalid_argument);
  loss.v_r = -0.1;
  CHECK_THROWS_AS(loss.validate(), std::invalid_argument);
  loss.v_r = std::nan("");
  CHECK_THROWS_AS(loss.validate(), std::invalid_argument);

  CHECK_THROWS_AS((void)build_arm_transmissions({TopologyKind::Cbtm, 6},
                                                {0.9, 0.9, 0.9, 0.9}),
                  std::invalid_argument);
}

TEST_CASE("exponent dispatch matches the per-kind builders") {
  CHECK(arm_exponents({TopologyKind::Cbtm, 8}) == arm_exponents_cbtm(3));
  CHECK(arm_exponents({TopologyKind::Iibtm, 11}) == arm_exponents_iibtm(11));
  CHECK(arm_exponents({TopologyKind::Oibtm, 11}) == arm_exponents_oibtm(11));
}
