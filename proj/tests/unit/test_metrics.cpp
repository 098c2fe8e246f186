#include <gtest/gtest.h>

#include <cmath>

#include "robustbench/error.hpp"
#include "robustbench/metrics/metrics.hpp"

using namespace robustbench;

namespace {

SampleOutcome sample(std::string id, std::optional<std::size_t> truth, std::size_t clean,
                     std::map<CellKey, std::size_t> cells) {
  return SampleOutcome{std::move(id), truth, clean, std::move(cells)};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::NoSamples;
}

}  // namespace

TEST(BalancedAccuracy, Examples) {
  const std::vector<std::size_t> t{0, 1, 2, 0, 1};
  EXPECT_DOUBLE_EQ(balanced_accuracy(t, t, 3), 1.0);
  const std::vector<std::size_t> t2{0, 0, 1, 1};
  const std::vector<std::size_t> p2{0, 0, 1, 0};
  EXPECT_DOUBLE_EQ(balanced_accuracy(t2, p2, 2), 0.75);
  const std::vector<std::size_t> t4{0, 1, 2, 3, 0, 1, 2, 3};
  const std::vector<std::size_t> c4(8, 2);
  EXPECT_DOUBLE_EQ(balanced_accuracy(t4, c4, 4), 0.25);
  // Classes without samples are left out of the average.
  const std::vector<std::size_t> t5{0, 0, 2};
  const std::vector<std::size_t> p5{0, 1, 2};
  EXPECT_DOUBLE_EQ(balanced_accuracy(t5, p5, 4), 0.75);
  EXPECT_EQ(code_of([] { balanced_accuracy({}, {}, 3); }), ErrorCode::NoSamples);
}

TEST(CorruptionError, CountsWrongCells) {
  LabeledOutcomes o{2, {}};
  // 10 cells over 2 samples x 5 severities; 3 wrong.
  std::map<CellKey, std::size_t> a, b;
  for (int s = 0; s < 5; ++s) {
    a[{"Rain", s, 0}] = s < 2 ? 1 : 0;
    b[{"Rain", s, 0}] = s == 4 ? 0 : 1;
  }
  o.samples.push_back(sample("a", 0, 0, a));
  o.samples.push_back(sample("b", 1, 1, b));
  EXPECT_DOUBLE_EQ(corruption_error(o, "Rain"), 0.3);
  EXPECT_DOUBLE_EQ(clean_error(o), 0.0);
  o.samples[0].truth.reset();
  EXPECT_EQ(code_of([&] { clean_error(o); }), ErrorCode::MissingLabels);
}

TEST(Mce, Examples) {
  ErrorTable f{0.1, {{"A", 0.3}}};
  ErrorTable b{0.05, {{"A", 0.15}}};
  const std::vector<std::string> one{"A"};
  EXPECT_DOUBLE_EQ(mce(f, b, one).value, 2.0);
  EXPECT_DOUBLE_EQ(mce(f, f, one).value, 1.0);
  ErrorTable f2{0.1, {{"A", 0.1}, {"B", 0.3}}};
  ErrorTable b2{0.1, {{"A", 0.2}, {"B", 0.2}}};
  const std::vector<std::string> two{"A", "B"};
  EXPECT_DOUBLE_EQ(mce(f2, b2, two).value, 1.0);
  ErrorTable bz{0.1, {{"A", 0.0}, {"B", 0.2}}};
  EXPECT_EQ(code_of([&] { mce(f2, bz, two); }), ErrorCode::BaselineZeroError);
  const RatioResult ex = mce(f2, bz, two, DegeneratePolicy::Exclude);
  EXPECT_DOUBLE_EQ(ex.value, 1.5);
  EXPECT_EQ(ex.excluded, std::vector<std::string>{"A"});
  EXPECT_FALSE(ex.advisories.empty());
}

TEST(Rce, Examples) {
  const std::vector<std::string> one{"A"};
  ErrorTable f{0.1, {{"A", 0.2}}};
  ErrorTable b{0.1, {{"A", 0.15}}};
  EXPECT_DOUBLE_EQ(rce(f, b, one).value, 2.0);
  EXPECT_DOUBLE_EQ(rce(f, f, one).value, 1.0);
  ErrorTable flat{0.1, {{"A", 0.1}}};
  EXPECT_DOUBLE_EQ(rce(flat, b, one).value, 0.0);
  EXPECT_EQ(code_of([&] { rce(f, flat, one, DegeneratePolicy::Strict); }), ErrorCode::DegenerateBaselineDelta);
  EXPECT_EQ(code_of([&] { rce(f, flat, one); }), ErrorCode::DegenerateBaselineDelta);
  const std::vector<std::string> two{"A", "B"};
  ErrorTable f2{0.1, {{"A", 0.2}, {"B", 0.4}}};
  ErrorTable b2{0.1, {{"A", 0.1}, {"B", 0.2}}};
  const RatioResult r = rce(f2, b2, two);
  EXPECT_EQ(r.excluded, std::vector<std::string>{"A"});
  EXPECT_DOUBLE_EQ(r.value, 3.0);
}

TEST(FlipProbability, Examples) {
  std::map<CellKey, std::size_t> cells;
  for (int k = 0; k < 5; ++k) cells[{"Rain", 0, k}] = k < 2 ? 3 : 1;
  const SampleOutcome s = sample("s", std::nullopt, 1, cells);
  EXPECT_DOUBLE_EQ(flip_probability(s), 0.4);
  EXPECT_EQ(code_of([] { flip_probability(sample("e", 0, 0, {})); }), ErrorCode::NoCorruptedCells);

  LabeledOutcomes o{2, {}};
  o.samples.push_back(sample("x", std::nullopt, 0, {{{"Rain", 0, 0}, 0}}));
  o.samples.push_back(sample("y", std::nullopt, 0, {{{"Rain", 0, 0}, 1}}));
  EXPECT_DOUBLE_EQ(dataset_flip_rate(o), 0.5);
  EXPECT_DOUBLE_EQ(flip_probability(o, "y"), 1.0);
}

TEST(Mfr, Examples) {
  EXPECT_DOUBLE_EQ(mfr(0.3, 0.15), 2.0);
  EXPECT_DOUBLE_EQ(mfr(0.2, 0.2), 1.0);
  EXPECT_EQ(code_of([] { mfr(0.2, 0.0); }), ErrorCode::BaselineZeroFlips);
}

TEST(Pearson, Examples) {
  const std::vector<double> a{1, 2, 3}, b{2, 4, 5};
  EXPECT_NEAR(pearson_r(a, b), 0.981, 1e-3);
  const std::vector<double> neg{-1, -2, -3};
  EXPECT_DOUBLE_EQ(pearson_r(a, neg), -1.0);
  EXPECT_DOUBLE_EQ(pearson_r(a, a), 1.0);
  const std::vector<double> c{4, 4, 4};
  EXPECT_EQ(code_of([&] { pearson_r(a, c); }), ErrorCode::DegenerateVariance);
  const std::vector<double> one{1};
  EXPECT_EQ(code_of([&] { pearson_r(one, one); }), ErrorCode::DegenerateVariance);
}

TEST(CompensatedSum, RecoversCancelledTerms) {
  CompensatedSum s;
  s.add(1.0);
  s.add(1e100);
  s.add(1.0);
  s.add(-1e100);
  EXPECT_DOUBLE_EQ(s.value(), 2.0);
}

TEST(Summary, SelfBaselineGivesExactOnes) {
  LabeledOutcomes o{2, {}};
  o.samples.push_back(sample("a", 0, 0, {{{"Rain", 0, 0}, 1}, {{"Rain", 1, 0}, 0}, {{"Blur", 0, 0}, 1}}));
  o.samples.push_back(sample("b", 1, 0, {{{"Rain", 0, 0}, 1}, {{"Rain", 1, 0}, 1}, {{"Blur", 0, 0}, 0}}));
  const RobustnessSummary s = summarize_outcomes("m", o, "m", o);
  ASSERT_TRUE(s.mce && s.rce && s.mfr);
  EXPECT_EQ(*s.mce, 1.0);
  EXPECT_EQ(*s.rce, 1.0);
  EXPECT_EQ(*s.mfr, 1.0);
}

TEST(Summary, UnlabeledHasFlipsOnly) {
  LabeledOutcomes o{2, {}};
  o.samples.push_back(sample("a", std::nullopt, 0, {{{"Rain", 0, 0}, 1}}));
  o.samples.push_back(sample("b", std::nullopt, 1, {{{"Rain", 0, 0}, 1}}));
  const RobustnessSummary s = summarize_outcomes("m", o);
  EXPECT_FALSE(s.balanced_accuracy_clean);
  EXPECT_FALSE(s.mce);
  EXPECT_DOUBLE_EQ(s.flip_rate, 0.5);
  EXPECT_DOUBLE_EQ(s.flip_rate_per_kind.at("Rain"), 0.5);
  for (const auto& c : s.cells) EXPECT_FALSE(c.balanced_accuracy);
}

TEST(Summary, DifferentKindsAreIncompatible) {
  LabeledOutcomes a{2, {sample("a", 0, 0, {{{"Rain", 0, 0}, 1}})}};
  LabeledOutcomes b{2, {sample("a", 0, 0, {{{"Blur", 0, 0}, 1}})}};
  EXPECT_EQ(code_of([&] { summarize_outcomes("m", a, "b", b); }), ErrorCode::IncompatibleBaseline);
}

TEST(Summary, StrictMceOmittedWithAdvisory) {
  LabeledOutcomes f{2, {sample("a", 0, 0, {{{"Rain", 0, 0}, 1}})}};
  LabeledOutcomes b{2, {sample("a", 0, 0, {{{"Rain", 0, 0}, 0}})}};
  const RobustnessSummary s = summarize_outcomes("f", f, "b", b);
  EXPECT_FALSE(s.mce);
  EXPECT_FALSE(s.advisories.empty());
}
