#include <gtest/gtest.h>

#include <algorithm>

#include "crflow/selftest.hpp"

using namespace crflow;

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

}  // namespace

TEST(Selftest, FreshBuildPasses) {
  const SelftestReport r = run_selftest();
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.checks.size(), 8u);
}

TEST(Selftest, CorruptedEigenvaluesAreCaught) {
  SelftestOptions opts;
  opts.eigenvalue_transform = [](const Eigen::VectorXd& ev) {
    Eigen::VectorXd out = ev;
    out[out.size() - 1] *= 1.01;
    return out;
  };
  const SelftestReport r = run_selftest(opts);
  EXPECT_TRUE(contains(r.failures(), "eigen-anchor"));
}

TEST(Selftest, StrictGateWithLargeStepIsCaught) {
  SelftestOptions opts;
  opts.monotonicity_step.monotonicity_slack = 0.0;
  opts.monotonicity_step.retry = false;
  opts.monotonicity_dt = 2.0;
  const SelftestReport r = run_selftest(opts);
  EXPECT_EQ(r.failures(), std::vector<std::string>{"Ef-monotonicity"});
}
