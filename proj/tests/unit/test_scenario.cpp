#include <gtest/gtest.h>

#include <sstream>

#include "crflow/errors.hpp"
#include "crflow/scenario.hpp"

using namespace crflow;

namespace {

std::string error_message(const std::string& text) {
  try {
    parse_scenario(text, "cfg.json");
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Scenario, ParsesFullConfig) {
  const ScenarioConfig c = parse_scenario(R"({
    "n": 1, "J": 6,
    "f": {"constant": 1.0, "terms": [{"a": [1, 0], "b": [0, 0], "re": 0.1}]},
    "u0": {"type": "bubble", "p": [[0, 0], [1, 0]], "eps": 0.7},
    "dt_init": 0.002, "t_max": 3, "tol_converge": 1e-9, "blowup_factor": 20,
    "record_every": 5, "enforce_beta": true, "seed": 12
  })");
  EXPECT_EQ(c.n, 1);
  EXPECT_EQ(c.J, 6);
  EXPECT_EQ(c.f_label, "polynomial");
  EXPECT_NEAR(c.f(SpherePoint::north(1)).real(), 1.0, 1e-15);
  EXPECT_EQ(c.u0.kind, InitialDataSpec::Kind::Bubble);
  EXPECT_DOUBLE_EQ(c.u0.bubble_eps, 0.7);
  EXPECT_DOUBLE_EQ(c.run.dt_init, 0.002);
  EXPECT_DOUBLE_EQ(c.run.tol_converge, 1e-9);
  EXPECT_EQ(c.run.record_every, 5);
  EXPECT_TRUE(c.run.enforce_beta);
  EXPECT_EQ(c.seed, 12u);
}

TEST(Scenario, PresetsAndDefaults) {
  const ScenarioConfig c = parse_scenario(R"({"n": 2, "f": "dipole"})");
  EXPECT_EQ(c.J, 4);
  EXPECT_EQ(c.f_label, "dipole");
  EXPECT_EQ(c.u0.kind, InitialDataSpec::Kind::Constant);
}

TEST(Scenario, ErrorsCarryLineNumbers) {
  EXPECT_NE(error_message("{\n  \"n\": 1,\n  \"f\": \"constant\",\n  \"t_max\": -1\n}").find("cfg.json:4:"), std::string::npos);
  EXPECT_NE(error_message("{\n  \"n\": 1,\n  \"f\": \"nope\"\n}").find("cfg.json:3:"), std::string::npos);
  EXPECT_NE(error_message("{\n  \"n\": 1,\n  \"colour\": 2,\n  \"f\": \"constant\"\n}").find("cfg.json:3:"),
            std::string::npos);
  EXPECT_NE(error_message("{\n  \"n\": 1,\n  \"f\": \"constant\",\n  oops\n}").find("cfg.json:4:"), std::string::npos);
  EXPECT_NE(error_message("{\"n\": 9, \"f\": \"constant\"}").find("cfg.json:1:"), std::string::npos);
  EXPECT_FALSE(error_message(R"({"n": 1, "f": {"terms": [{"a": [5, 0], "b": [0, 0], "re": 1}]}})").empty());
  EXPECT_FALSE(error_message(R"({"n": 1, "f": "constant", "u0": {"type": "bubble", "p": [1, 0, 0, 0], "eps": 2}})").empty());
}

TEST(Scenario, RejectsNonPositiveF) {
  const ScenarioConfig c = parse_scenario(R"({"n": 1, "J": 4, "f": {"constant": 0.1, "terms": [{"a": [1, 0], "b": [0, 0], "re": 1}]}})");
  try {
    prepare_scenario(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
  }
}

TEST(Scenario, TrajectoryColumns) {
  std::ostringstream os;
  write_trajectory_header(os, 2);
  EXPECT_EQ(os.str(),
            "t,E,E_f,alpha,F2,G2,kw_residual,abs_P,eps,theta_1_re,theta_1_im,theta_2_re,theta_2_im,theta_3_re,"
            "theta_3_im,max_u,mass_concentration\n");
}

TEST(Scenario, RowsUseSeventeenDigits) {
  TrajectoryRecord rec;
  rec.t = 1.0 / 3.0;
  rec.theta = CVec::Zero(2);
  std::ostringstream os;
  write_trajectory_row(os, rec);
  EXPECT_EQ(os.str().substr(0, 19), "0.33333333333333331");
}

TEST(Scenario, ExitCodes) {
  EXPECT_EQ(exit_code(TerminationStatus::Converged), 0);
  EXPECT_EQ(exit_code(TerminationStatus::Concentrated), 2);
  EXPECT_EQ(exit_code(TerminationStatus::TimeLimit), 3);
  EXPECT_EQ(exit_code(TerminationStatus::StepFailure), 4);
}

TEST(Scenario, RandomPerturbationIsSeeded) {
  const BasisPtr b = build_basis(1, 4);
  const Field a = random_perturbation(b, 0.1, 2, 5);
  const Field c = random_perturbation(b, 0.1, 2, 5);
  EXPECT_EQ(a.coefficients(), c.coefficients());
  EXPECT_NEAR((a.values().array() - 1.0).abs().maxCoeff(), 0.1, 1e-12);
}
