#include <gtest/gtest.h>

#include "support.hpp"

using namespace csdplan;
using csdplan::testing::reference_calibration;
using csdplan::testing::Random;

namespace {

HostProfile ref_host(const std::string& w) { return reference_calibration().host_profile(w, "host0"); }
CsdProfile ref_csd(const std::string& w, const std::string& c) { return reference_calibration().csd_profile(w, c); }

Count closed(const std::string& w, const std::string& c, Count cores, SlowdownFactors sd = {}) {
  const auto r = bep_closed_form(ref_host(w), ref_csd(w, c), cores, sd);
  EXPECT_FALSE(r.infeasible);
  return r.bep;
}

}  // namespace

TEST(StrictCeiling, SmallestIntegerAbove) {
  EXPECT_EQ(strict_ceiling(0.2), 1);
  EXPECT_EQ(strict_ceiling(1.0), 2);
  EXPECT_EQ(strict_ceiling(1.0 + 1e-12), 2);
  EXPECT_EQ(strict_ceiling(2.0 - 1e-12), 3);
  EXPECT_EQ(strict_ceiling(2.5), 3);
  EXPECT_EQ(strict_ceiling(-7.0), 1);
  EXPECT_EQ(strict_ceiling(0.0), 1);
  EXPECT_FALSE(strict_ceiling(std::nan("")).has_value());
  EXPECT_FALSE(strict_ceiling(1e300).has_value());
}

TEST(ClosedForm, UnsaturatedHandExample) {
  // q = (4 + 2 - 3) / 1 = 3, strictly above -> 4; k_limit 8 keeps it unsaturated.
  const HostProfile h{3.0, 1.0, 1, 8};
  const CsdProfile c{"c", 4.0, 2.0, {}, {}};
  const auto r = bep_closed_form(h, c, 1, {});
  EXPECT_EQ(r.bep, 4);
  EXPECT_EQ(r.method, BepMethod::closed_form);
  EXPECT_FALSE(r.saturated);
  ASSERT_TRUE(r.intermediates);
  EXPECT_DOUBLE_EQ(r.intermediates->numerator, 3.0);
  EXPECT_DOUBLE_EQ(r.intermediates->denominator, 1.0);
  EXPECT_DOUBLE_EQ(r.intermediates->real_value, 3.0);
  EXPECT_EQ(bep_bruteforce(h, c, 1, {}).bep, 4);
}

TEST(ClosedForm, IdenticalDevicesNeedTwo) {
  // Same transfer, CSD compute equal to host compute: tie at m = 1, strictly faster from 2.
  const HostProfile h{5.0, 7.0, 1, 8};
  const CsdProfile c{"c", 5.0, 7.0, {}, {}};
  EXPECT_EQ(bep_closed_form(h, c, 1, {}).bep, 2);
  EXPECT_EQ(bep_bruteforce(h, c, 1, {}).bep, 2);
}

TEST(ClosedForm, SaturatedBranch) {
  // Unsaturated q = (10 + 10 - 1) / 1 = 19 > k = 4; floor = 1/4 + 1 = 1.25; 20 / 1.25 = 16 -> 17.
  const HostProfile h{1.0, 1.0, 1, 4};
  const CsdProfile c{"c", 10.0, 10.0, {}, {}};
  const auto r = bep_closed_form(h, c, 1, {});
  EXPECT_EQ(r.bep, 17);
  EXPECT_TRUE(r.saturated);
  EXPECT_EQ(r.method, BepMethod::closed_form_saturated);
  EXPECT_DOUBLE_EQ(r.intermediates->numerator, 20.0);
  EXPECT_DOUBLE_EQ(r.intermediates->denominator, 1.25);
  const auto o = bep_bruteforce(h, c, 1, {});
  EXPECT_EQ(o.bep, 17);
  EXPECT_TRUE(o.saturated);
}

TEST(ClosedForm, FastCsdGivesOne) {
  const HostProfile h{10.0, 10.0, 1, 8};
  const CsdProfile c{"c", 1.0, 1.0, {}, {}};
  EXPECT_EQ(bep_closed_form(h, c, 1, {}).bep, 1);
}

TEST(ClosedForm, Preconditions) {
  const HostProfile h{1.0, 1.0, 4, 8};
  const CsdProfile c{"c", 1.0, 1.0, {}, {}};
  EXPECT_THROW(bep_closed_form(h, c, 5, {}), DomainError);
  EXPECT_THROW(bep_closed_form(h, c, 1, {0.9, 1.0}), DomainError);
  EXPECT_THROW(bep_closed_form({1.0, 1.0, 4, 0}, c, 1, {}), DomainError);
  EXPECT_THROW(bep_bruteforce(h, c, 1, {}, 0), DomainError);
}

TEST(Bruteforce, ReportsInfeasibleAtBound) {
  const HostProfile h{1.0, 1.0, 1, 2};
  const CsdProfile c{"c", 1000.0, 1000.0, {}, {}};
  const auto o = bep_bruteforce(h, c, 1, {}, 50);
  EXPECT_TRUE(o.infeasible);
  EXPECT_EQ(o.searched_bound, 50);
  EXPECT_GT(bep_closed_form(h, c, 1, {}).bep, 50);
}

TEST(Bruteforce, DefaultBound) {
  EXPECT_EQ(default_search_bound(8), 96);
  EXPECT_EQ(bep_bruteforce({1, 1, 1, 8}, {"c", 1e6, 1e6, {}, {}}, 1, {}).searched_bound, 96);
}

TEST(OracleEquivalence, RandomScenarios) {
  Random r(20240601);
  int feasible = 0;
  for (int i = 0; i < 3000; ++i) {
    const auto s = csdplan::testing::random_scenario(r, i % 2 == 0);
    const auto c = bep_closed_form(s.host, s.csd, s.cores, s.sd);
    const auto o = bep_bruteforce(s.host, s.csd, s.cores, s.sd, 4096);
    if (o.infeasible) {
      EXPECT_GT(c.bep, 4096);
      continue;
    }
    ++feasible;
    ASSERT_EQ(c.bep, o.bep) << "case " << i;
    EXPECT_EQ(c.saturated, o.saturated) << "case " << i;
  }
  EXPECT_GT(feasible, 2000);
}

// Counts for the reference fixture, frozen from an independent enumeration of the
// same model.
TEST(ReferenceFixture, TimeFormCounts) {
  const std::vector<Count> cores{1, 4, 16, 64};
  const auto row = [&](const std::string& w, const std::string& c) {
    std::vector<Count> out;
    for (Count n : cores) out.push_back(closed(w, c, n));
    return out;
  };
  EXPECT_EQ(row("count", "smartssd"), (std::vector<Count>{2, 8, 13, 15}));
  EXPECT_EQ(row("count", "newport"), (std::vector<Count>{12, 28, 44, 51}));
  EXPECT_EQ(row("vector_addition", "smartssd"), (std::vector<Count>{5, 11, 12, 13}));
  EXPECT_EQ(row("vector_addition", "newport"), (std::vector<Count>{19, 31, 36, 38}));
  EXPECT_EQ(row("array_merge", "newport"), (std::vector<Count>{12, 28, 45, 53}));
}

TEST(ReferenceFixture, CountMeetingPointMovesWithKLimit) {
  std::vector<Count> got;
  for (Count k : {8, 12, 16}) {
    HostProfile h = ref_host("count");
    h.k_limit = k;
    got.push_back(bep_closed_form(h, ref_csd("count", "smartssd"), 16, {}).bep);
  }
  EXPECT_EQ(got, (std::vector<Count>{13, 17, 21}));
}

TEST(RatioForm, FixtureValues) {
  const auto& cal = reference_calibration();
  EXPECT_EQ(s_normal(derive_ratios(cal, "vector_addition", "host0", "smartssd", 1)), 5);
  EXPECT_NEAR(s_normal_value(derive_ratios(cal, "vector_addition", "host0", "smartssd", 1)), 4.4993, 1e-4);
  auto faster = derive_ratios(cal, "vector_addition", "host0", "smartssd", 1);
  faster.r_comp *= 5.0;
  EXPECT_EQ(s_normal(faster), 1);
  const auto am = derive_ratios(cal, "array_merge", "host0", "newport", 1);
  EXPECT_NEAR(s_normal_value(am), 11.8558, 1e-4);
  EXPECT_EQ(s_normal(am), 12);
}

TEST(RatioForm, HandExamples) {
  // r_tx = 1, r_comp = 1: value 1, strictly above -> 2.
  EXPECT_EQ(s_normal({1.0, 1.0, 3.0, 1}), 2);
  // (1/0.5 - 1) * 1 + 1/0.25 = 5 -> 6.
  EXPECT_EQ(s_normal({0.5, 0.25, 1.0, 1}), 6);
  EXPECT_DOUBLE_EQ(s_normal_value({0.5, 0.25, 1.0, 1}), 5.0);
  // Large r_tx drives the value negative; clamp at 1.
  EXPECT_EQ(s_normal({100.0, 10.0, 10.0, 1}), 1);
}

TEST(RatioForm, OverloadReducesToNormal) {
  Random r(3);
  for (int i = 0; i < 500; ++i) {
    const auto ratios = csdplan::testing::random_ratios(r);
    EXPECT_EQ(s_overload_value(ratios, {1.0, 1.0}), s_normal_value(ratios));
    EXPECT_EQ(s_overload(ratios, {1.0, 1.0}), s_normal(ratios));
  }
}

TEST(RatioForm, PreCeilingValueScalesWithSdComp) {
  const auto am = derive_ratios(reference_calibration(), "array_merge", "host0", "newport", 1);
  const double base = s_overload_value(am, {1.0, 1.0});
  for (double sd : {2.0, 4.0}) EXPECT_DOUBLE_EQ(s_overload_value(am, {1.0, sd}), base / sd);
  EXPECT_NEAR(s_overload_value(am, {1.0, 2.0}), 5.9279, 1e-4);
}

TEST(RatioForm, ComputeIntensiveIgnoresSdTx) {
  const auto pr = derive_ratios(reference_calibration(), "page_rank", "host0", "newport", 1);
  for (int sd = 1; sd <= 16; ++sd) EXPECT_EQ(s_overload(pr, {static_cast<double>(sd), 1.0}), 13);
}

TEST(RatioForm, RejectsBadInputs) {
  EXPECT_THROW(s_normal({0.0, 1.0, 1.0, 1}), DomainError);
  EXPECT_THROW(s_normal({1.0, -1.0, 1.0, 1}), DomainError);
  EXPECT_THROW(s_overload({1.0, 1.0, 1.0, 1}, {0.5, 1.0}), DomainError);
}

TEST(RatioForm, MatchesTimeFormWhenUnsaturated) {
  Random r(99);
  int checked = 0;
  for (int i = 0; i < 3000; ++i) {
    const auto s = csdplan::testing::random_scenario(r, i % 2 == 1);
    const auto c = bep_closed_form(s.host, s.csd, s.cores, s.sd);
    if (c.saturated) continue;
    ++checked;
    const auto ratios = ratios_from_profiles(s.host, s.csd, s.cores);
    ASSERT_EQ(s_overload(ratios, s.sd), c.bep) << "case " << i;
  }
  EXPECT_GT(checked, 500);
}

TEST(RatioForm, Monotone) {
  Random r(8);
  for (int i = 0; i < 500; ++i) {
    const auto base = csdplan::testing::random_ratios(r);
    const double f = r.uniform(1.0, 4.0);
    auto tx = base;
    tx.r_tx *= f;
    auto comp = base;
    comp.r_comp *= f;
    EXPECT_LE(s_normal(tx), s_normal(base));
    EXPECT_LE(s_normal(comp), s_normal(base));
    const SlowdownFactors sd{r.uniform(1, 8), r.uniform(1, 8)};
    EXPECT_LE(s_overload(base, {sd.sd_tx * f, sd.sd_comp}), s_overload(base, sd));
    EXPECT_LE(s_overload(base, {sd.sd_tx, sd.sd_comp * f}), s_overload(base, sd));
    EXPECT_GE(s_overload(base, sd), 1);
  }
}
