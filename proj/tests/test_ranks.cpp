#include "avrank/ranks.hpp"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "avrank/errors.hpp"
#include "support/rank_oracle.hpp"
#include "support/stats_utils.hpp"

using avrank::NullCategorical;
using avrank::RankHistory;
using avrank::RankPair;
using avrank::Rng;

TEST(RankHistory, SlotWalkExample) {
  // T0 = 4 pre-treatment values with three post observations whose reduced
  // ranks are 3, 3, 4; the next observation lands between 2.5 and 2.7.
  RankHistory history({1.0, 2.0, 3.0, 4.0}, 1);
  EXPECT_EQ(history.push_observation(2.5).red_rank, 3);
  EXPECT_EQ(history.push_observation(2.7).red_rank, 3);
  EXPECT_EQ(history.push_observation(3.5).red_rank, 4);

  RankPair ranks = history.push_observation(2.6);
  EXPECT_EQ(ranks.seq_rank, 4);  // above 1, 2, 2.5; below 2.7, 3, 3.5, 4
  EXPECT_EQ(ranks.red_rank, 3);
}

TEST(RankHistory, SingleComparison) {
  RankHistory history({5.0}, 1);
  RankPair ranks = history.push_observation(10.0);
  EXPECT_EQ(ranks.seq_rank, 2);
  EXPECT_EQ(ranks.red_rank, 2);
}

TEST(RankHistory, TieBreaksUniformly) {
  // Exact tie with a pre-treatment value: the reduced rank must be 2 or 3
  // with probability 1/2 each over the tie stream.
  const int reps = 100000;
  int hits[2] = {0, 0};
  for (int i = 0; i < reps; ++i) {
    RankHistory history({1.0, 2.0, 3.0}, 1000 + i);
    int red = history.push_observation(2.0).red_rank;
    ASSERT_TRUE(red == 2 || red == 3);
    hits[red - 2] += 1;
  }
  double freq = static_cast<double>(hits[0]) / reps;
  EXPECT_NEAR(freq, 0.5, 0.01);
}

TEST(RankHistory, RejectsNonFinite) {
  RankHistory history({1.0, 2.0}, 1);
  EXPECT_THROW(history.push_observation(std::nan("")), avrank::DataError);
  EXPECT_THROW(history.push_observation(INFINITY), avrank::DataError);
}

TEST(NullCategoricalTest, UniformAtFirstStep) {
  RankHistory history({0.4, 0.2, 0.9, 0.6}, 3);
  NullCategorical q = history.null_category_probs(5);
  ASSERT_EQ(q.slots(), 5);
  for (double p : q.q) EXPECT_DOUBLE_EQ(p, 0.2);
}

TEST(NullCategoricalTest, SlotCountsExample) {
  // T0 = 4, prior reduced ranks {2, 2, 3}, t = 8.
  RankHistory history({1.0, 2.0, 3.0, 4.0}, 1);
  history.push_observation(1.5);
  history.push_observation(1.7);
  history.push_observation(2.5);
  NullCategorical q = history.null_category_probs(8);
  ASSERT_EQ(q.slots(), 5);
  EXPECT_DOUBLE_EQ(q.q[0], 1.0 / 8);
  EXPECT_DOUBLE_EQ(q.q[1], 3.0 / 8);
  EXPECT_DOUBLE_EQ(q.q[2], 2.0 / 8);
  EXPECT_DOUBLE_EQ(q.q[3], 1.0 / 8);
  EXPECT_DOUBLE_EQ(q.q[4], 1.0 / 8);
}

TEST(NullCategoricalTest, SumsToOne) {
  Rng rng(11);
  RankHistory history({rng.normal(), rng.normal(), rng.normal(), rng.normal(),
                       rng.normal(), rng.normal()},
                      5);
  for (int k = 0; k < 40; ++k) {
    NullCategorical q = history.null_category_probs(history.time() + 1);
    double total = 0.0;
    for (double p : q.q) total += p;
    EXPECT_NEAR(total, 1.0, 1e-12);
    history.push_observation(rng.normal());
  }
}

TEST(NullCategoricalTest, TimeMismatchThrows) {
  RankHistory history({1.0, 2.0}, 1);
  EXPECT_THROW(history.null_category_probs(5), avrank::StateError);
  EXPECT_THROW(history.null_category_probs(2), avrank::StateError);
  EXPECT_NO_THROW(history.null_category_probs(3));
}

TEST(SmoothedRank, Arithmetic) {
  EXPECT_DOUBLE_EQ(avrank::smoothed_rank(1, 10, 0.5), 0.05);
  // Top rank with vanishing noise approaches 1.
  EXPECT_NEAR(avrank::smoothed_rank(7, 7, 1e-12), 1.0, 1e-10);
  EXPECT_THROW(avrank::smoothed_rank(1, 10, 0.0), avrank::DataError);
  EXPECT_THROW(avrank::smoothed_rank(1, 10, 1.0), avrank::DataError);
  EXPECT_THROW(avrank::smoothed_rank(11, 10, 0.5), avrank::DataError);
}

TEST(SmoothedRank, UniformUnderNull) {
  // V_t over exchangeable inputs should be uniform on (0,1).
  Rng rng(42);
  std::vector<double> samples;
  const int sims = 10000;
  for (int i = 0; i < sims; ++i) {
    RankHistory history({rng.normal(), rng.normal(), rng.normal(),
                         rng.normal(), rng.normal()},
                        900 + i);
    history.push_observation(rng.normal());
    int t = history.time();
    samples.push_back(
        avrank::smoothed_rank(history.seq_ranks().back(), t, rng.uniform_open()));
  }
  double d = testing_support::ks_statistic_uniform(samples);
  EXPECT_GT(testing_support::ks_pvalue(d, samples.size()), 0.01);
}

TEST(RankHistory, ExhaustiveNullOracleSmall) {
  // Full enumeration for the small cases; the acceptance suite covers the
  // larger grid.
  for (int t0 = 2; t0 <= 3; ++t0) {
    for (int n_post = 1; n_post <= 3; ++n_post) {
      auto outcome = testing_support::exhaustive_rank_check(t0, n_post);
      EXPECT_TRUE(outcome.ok) << outcome.message << " (t0=" << t0
                              << ", post=" << n_post << ")";
    }
  }
}

TEST(RankHistory, InvariantUnderMonotoneTransform) {
  Rng rng(7);
  std::vector<double> pre(6);
  for (double& v : pre) v = rng.normal();
  std::vector<double> post(10);
  for (double& v : post) v = rng.normal();

  auto transform = [](double x) { return std::exp(0.7 * x) + 3.0; };
  std::vector<double> pre_mapped(pre.size());
  std::vector<double> post_mapped(post.size());
  std::transform(pre.begin(), pre.end(), pre_mapped.begin(), transform);
  std::transform(post.begin(), post.end(), post_mapped.begin(), transform);

  RankHistory a(pre, 99);
  RankHistory b(pre_mapped, 99);
  for (std::size_t i = 0; i < post.size(); ++i) {
    RankPair ra = a.push_observation(post[i]);
    RankPair rb = b.push_observation(post_mapped[i]);
    EXPECT_EQ(ra.seq_rank, rb.seq_rank);
    EXPECT_EQ(ra.red_rank, rb.red_rank);
  }
}

TEST(RankHistory, ReductionConsistency) {
  // The reduced rank equals the sequential rank minus the earlier post
  // observations that rank below the new one.
  Rng rng(13);
  std::vector<double> pre(8);
  for (double& v : pre) v = rng.normal();
  RankHistory history(pre, 3);
  for (int k = 0; k < 30; ++k) {
    RankPair ranks = history.push_observation(rng.normal());
    int below_posts = ranks.seq_rank - ranks.red_rank;
    EXPECT_GE(below_posts, 0);
    EXPECT_LE(below_posts, k);
    EXPECT_GE(ranks.red_rank, 1);
    EXPECT_LE(ranks.red_rank, history.t0() + 1);
  }
}

TEST(RankHistory, SaveLoadRoundTrip) {
  Rng rng(21);
  std::vector<double> pre(5);
  for (double& v : pre) v = rng.normal();
  RankHistory history(pre, 77);
  for (int k = 0; k < 12; ++k) history.push_observation(rng.normal());

  std::stringstream buffer;
  history.save(buffer);
  RankHistory restored = RankHistory::load(buffer);

  // Both copies must continue identically.
  for (int k = 0; k < 12; ++k) {
    double y = rng.normal();
    RankPair ra = history.push_observation(y);
    RankPair rb = restored.push_observation(y);
    EXPECT_EQ(ra.seq_rank, rb.seq_rank);
    EXPECT_EQ(ra.red_rank, rb.red_rank);
  }
}
