#include <gtest/gtest.h>

#include <random>

#include "bstar/artifact_io.hpp"
#include "bstar/baseline.hpp"
#include "bstar/benchgen.hpp"
#include "bstar/robot_io.hpp"
#include "oracles.hpp"

namespace bstar {
namespace {

TEST(BfsOptimal, SinglePathIsReturned) {
  IKDatabase db;
  db.gamma = 1;
  JointConfig a(2), b(2), c(2);
  a << 0, 0;
  b << 1, -2;
  c << 1, 0;
  db.per_waypoint = {{{BaseConfig(0, 0, 0), a}}, {{BaseConfig(0.005, 0, 0.01), b}}, {{BaseConfig(0, -0.005, 0), c}}};
  const BaselineResult r = bfs_optimal(db, BaselineOptions());
  ASSERT_TRUE(r.success());
  EXPECT_EQ(r.cost, 5.0);
  EXPECT_EQ(r.entries, (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(r.solution.base, BaseConfig(0, 0, 0));
  EXPECT_EQ(r.solution.diagnostics.path_length, 5.0);
  EXPECT_EQ(r.bases.size(), 3u);
  EXPECT_NEAR(r.ate, ate(r.bases), 1e-15);
  EXPECT_GT(r.ate, 0.0);
}

TEST(BfsOptimal, TwoByTwoMatchesEnumeration) {
  IKDatabase db;
  db.gamma = 2;
  const auto q = [](double x) { return JointConfig::Constant(1, x); };
  db.per_waypoint = {{{BaseConfig(0, 0, 0), q(0.0)}, {BaseConfig(0.001, 0, 0), q(1.0)}},
                     {{BaseConfig(0, 0.002, 0), q(2.0)}, {BaseConfig(0, 0, 0.03), q(0.8)}}};
  const BaselineResult r = bfs_optimal(db, BaselineOptions());
  ASSERT_TRUE(r.success());
  // Combinations: 2, 0.8, 1, 0.2.
  EXPECT_NEAR(r.cost, 0.2, 1e-15);
  EXPECT_EQ(r.entries, (std::vector<int>{1, 1}));
  EXPECT_EQ(testing::enumerate_paths(db).entries, r.entries);
}

TEST(BfsOptimal, MatchesEnumerationOnSmallInstances) {
  std::mt19937_64 rng(1);
  int solved = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int t = 2 + trial % 3;
    const int gamma = t == 2 ? 30 : (t == 3 ? 10 : 5);
    ASSERT_LE(t * gamma, 1000);
    const IKDatabase db = testing::random_database(rng, t, gamma, 3, trial % 2 == 0);
    const BaselineResult r = bfs_optimal(db, BaselineOptions());
    const testing::Enumerated e = testing::enumerate_paths(db);
    ASSERT_EQ(r.success(), std::isfinite(e.cost)) << "trial " << trial;
    if (!r.success()) {
      EXPECT_EQ(r.status, BaselineStatus::kNoConsistentBase);
      continue;
    }
    ++solved;
    EXPECT_NEAR(r.cost, e.cost, 1e-12) << "trial " << trial;
    EXPECT_NEAR(r.solution.diagnostics.path_length, e.cost, 1e-12);
    // Integer joints make ties common and exact; the lexicographic rule
    // then fixes the entries.
    if (trial % 2 == 0) EXPECT_EQ(r.entries, e.entries) << "trial " << trial;
  }
  EXPECT_GT(solved, 50);
}

TEST(BfsOptimal, InconsistentBasesFail) {
  IKDatabase db;
  db.gamma = 2;
  const JointConfig q = JointConfig::Zero(2);
  db.per_waypoint = {{{BaseConfig(0, 0, 0), q}, {BaseConfig(0.5, 0, 0), q}},
                     {{BaseConfig(0.02, 0, 0), q}, {BaseConfig(0.5, 0.011, 0), q}}};
  EXPECT_EQ(bfs_optimal(db, BaselineOptions()).status, BaselineStatus::kNoConsistentBase);
  // Heading alone out of tolerance.
  db.per_waypoint[1] = {{BaseConfig(0, 0, 0.06), q}};
  EXPECT_EQ(bfs_optimal(db, BaselineOptions()).status, BaselineStatus::kNoConsistentBase);
  // Across the heading seam the difference is small.
  db.per_waypoint = {{{BaseConfig(0, 0, kPi - 0.01), q}}, {{BaseConfig(0, 0, -kPi + 0.01), q}}};
  EXPECT_TRUE(bfs_optimal(db, BaselineOptions()).success());
}

TEST(BfsOptimal, EmptyLayerAndTimeout) {
  std::mt19937_64 rng(2);
  IKDatabase db = testing::random_database(rng, 3, 50, 2, false);
  BaselineOptions opt;
  opt.time_limit = 1e-12;
  EXPECT_EQ(bfs_optimal(db, opt).status, BaselineStatus::kTimeout);
  db.per_waypoint[1].clear();
  EXPECT_TRUE(db.has_empty_layer());
  EXPECT_EQ(bfs_optimal(db, BaselineOptions()).status, BaselineStatus::kEmptyLayer);
}

TEST(BfsOptimal, LargerDatabaseNeverCostsMore) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const IKDatabase db = testing::random_database(rng, 4, 40, 3, false);
    double prev = std::numeric_limits<double>::infinity();
    for (int g : {5, 10, 20, 40}) {
      const BaselineResult r = bfs_optimal(db.truncated(g), BaselineOptions());
      const double cost = r.success() ? r.cost : std::numeric_limits<double>::infinity();
      EXPECT_LE(cost, prev);
      prev = cost;
    }
  }
}

TEST(SampleIkDatabase, EntriesAreValid) {
  const RobotModel r = load_fixture("spatial6");
  std::mt19937_64 gen(4);
  GenParams gp;
  gp.level = 1;
  const TaskPath task = gen_random_task(r, gp, gen);
  BaselineOptions opt;
  opt.gamma = 10;
  std::mt19937_64 rng(5);
  const IKDatabase db = sample_ik_database(task, r, opt, rng);
  ASSERT_EQ(db.per_waypoint.size(), task.size());
  for (std::size_t i = 0; i < task.size(); ++i) {
    ASSERT_EQ(db.per_waypoint[i].size(), 10u);
    for (const auto& e : db.per_waypoint[i]) {
      const Vec6 err = pose_error(fk(r, e.base, e.q), task.poses[i]);
      EXPECT_LT(err.head<3>().norm(), opt.solve.ee_tol_pos);
      EXPECT_LT(err.tail<3>().norm(), opt.solve.ee_tol_rot);
      EXPECT_GE(min_signed_distance(r, e.base, e.q), 0.0);
      EXPECT_TRUE(e.base.x >= -1 && e.base.x <= 1 && e.base.y >= -1 && e.base.y <= 1);
    }
  }
}

TEST(SampleIkDatabase, UnreachableWaypointGivesEmptyLayer) {
  const RobotModel r = load_fixture("planar3");
  TaskPath task;
  task.poses.emplace_back(Vec3(0.5, 0, 0.2), Vec3(kPi, 0, 0));
  task.poses.emplace_back(Vec3(0.5, 0, 5.0), Vec3(kPi, 0, 0));
  BaselineOptions opt;
  opt.gamma = 5;
  std::mt19937_64 rng(6);
  const IKDatabase db = sample_ik_database(task, r, opt, rng);
  EXPECT_TRUE(db.per_waypoint[1].empty());
  EXPECT_TRUE(db.has_empty_layer());
  EXPECT_EQ(bfs_optimal(db, opt).status, BaselineStatus::kEmptyLayer);
}

TEST(SampleIkDatabase, DeterministicAcrossWorkersAndRuns) {
  const RobotModel r = load_fixture("planar3");
  std::mt19937_64 gen(7);
  GenParams gp;
  gp.level = 2;
  const TaskPath task = gen_random_task(r, gp, gen);
  BaselineOptions opt;
  opt.gamma = 20;
  std::mt19937_64 a(8), b(8);
  const std::string first = database_to_json(sample_ik_database(task, r, opt, a)).dump();
  opt.workers = 3;
  EXPECT_EQ(first, database_to_json(sample_ik_database(task, r, opt, b)).dump());
  // The JSON form round-trips exactly.
  EXPECT_EQ(database_to_json(database_from_json(Json::parse(first))).dump(), first);
}

TEST(SampleIkDatabase, SmallerGammaIsAPrefix) {
  const RobotModel r = load_fixture("planar3");
  std::mt19937_64 gen(9);
  GenParams gp;
  gp.level = 1;
  const TaskPath task = gen_random_task(r, gp, gen);
  BaselineOptions opt;
  opt.gamma = 40;
  std::mt19937_64 a(10), b(10);
  const IKDatabase big = sample_ik_database(task, r, opt, a);
  opt.gamma = 10;
  const IKDatabase small = sample_ik_database(task, r, opt, b);
  EXPECT_EQ(database_to_json(big.truncated(10)).dump(), database_to_json(small).dump());
}

}  // namespace
}  // namespace bstar
