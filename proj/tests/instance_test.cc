#include "pmedian/instance.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "gtest/gtest.h"
#include "pmedian/errors.hpp"
#include "test_support.hpp"

namespace pmedian {
namespace {

using testing::Rng;

std::vector<Distance> Row(const Instance& inst, int i) {
  auto r = inst.row(i);
  return {r.begin(), r.end()};
}

TEST(OrlibTest, ShortestPathThroughMiddleVertex) {
  const Instance inst = parse_orlib("3 2 1\n1 2 4\n2 3 3\n");
  EXPECT_EQ(inst.n_clients(), 3);
  EXPECT_EQ(inst.n_sites(), 3);
  EXPECT_EQ(inst.p(), 1);
  EXPECT_EQ(Row(inst, 0), (std::vector<Distance>{0, 4, 7}));
  EXPECT_EQ(Row(inst, 1), (std::vector<Distance>{4, 0, 3}));
  EXPECT_EQ(Row(inst, 2), (std::vector<Distance>{7, 3, 0}));
}

TEST(OrlibTest, SingleEdge) {
  const Instance inst = parse_orlib("2 1 1\n1 2 5\n");
  EXPECT_EQ(Row(inst, 0), (std::vector<Distance>{0, 5}));
  EXPECT_EQ(Row(inst, 1), (std::vector<Distance>{5, 0}));
}

TEST(OrlibTest, ToleratesBlankLinesAndCarriageReturns) {
  const Instance inst = parse_orlib("\n  3 2 2\r\n1 2 4\r\n\n2 3 3\r\n");
  EXPECT_EQ(inst.p(), 2);
  EXPECT_EQ(inst.dist(0, 2), 7);
}

TEST(OrlibTest, RepeatedEdgeKeepsLastCost) {
  const Instance inst = parse_orlib("2 2 1\n1 2 5\n2 1 9\n");
  EXPECT_EQ(inst.dist(0, 1), 9);
}

TEST(OrlibTest, ShorterDetourWins) {
  const Instance inst = parse_orlib("3 3 1\n1 3 100\n1 2 1\n2 3 1\n");
  EXPECT_EQ(inst.dist(0, 2), 2);
}

TEST(OrlibTest, POverride) {
  const Instance inst = parse_orlib("3 2 1\n1 2 4\n2 3 3\n", 3);
  EXPECT_EQ(inst.p(), 3);
}

TEST(OrlibTest, ErrorsCarryLineNumbers) {
  try {
    parse_orlib("3 2 1\n1 2 4\n2 x 3\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    parse_orlib("3 2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  EXPECT_THROW(parse_orlib("3 2 1\n1 2 4\n"), ParseError);       // missing edge
  EXPECT_THROW(parse_orlib("3 1 1\n1 4 4\n"), ParseError);       // vertex range
  EXPECT_THROW(parse_orlib("3 1 1\n1 2 -4\n"), ParseError);      // negative cost
  EXPECT_THROW(parse_orlib("3 1 1\n1 2 4 9\n"), ParseError);     // extra field
  EXPECT_THROW(parse_orlib("3 2 4\n1 2 4\n2 3 3\n"), ParseError);  // p > N
  EXPECT_THROW(parse_orlib(""), ParseError);
}

TEST(OrlibTest, DisconnectedGraphIsInfeasible) {
  EXPECT_THROW(parse_orlib("4 2 1\n1 2 4\n3 4 3\n"), InfeasibleInstanceError);
}

TEST(OrlibTest, ShortestPathsAreAMetric) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = testing::uniform_int(rng, 2, 15);
    std::string text;
    std::vector<std::string> edges;
    for (int v = 2; v <= n; ++v) {
      edges.push_back(std::to_string(testing::uniform_int(rng, 1, v - 1)) + " " +
                      std::to_string(v) + " " + std::to_string(testing::uniform_int(rng, 1, 50)));
    }
    const int extra = testing::uniform_int(rng, 0, 2 * n);
    for (int k = 0; k < extra; ++k) {
      edges.push_back(std::to_string(testing::uniform_int(rng, 1, n)) + " " +
                      std::to_string(testing::uniform_int(rng, 1, n)) + " " +
                      std::to_string(testing::uniform_int(rng, 1, 50)));
    }
    text = std::to_string(n) + " " + std::to_string(edges.size()) + " 1\n";
    for (const auto& e : edges) text += e + "\n";
    const Instance inst = parse_orlib(text);
    for (int a = 0; a < n; ++a) {
      EXPECT_EQ(inst.dist(a, a), 0);
      for (int b = 0; b < n; ++b) {
        EXPECT_EQ(inst.dist(a, b), inst.dist(b, a));
        for (int c = 0; c < n; ++c) {
          EXPECT_LE(inst.dist(a, c), inst.dist(a, b) + inst.dist(b, c));
        }
      }
    }
  }
}

std::string Tsp(const std::string& coords, const std::string& type = "EUC_2D") {
  return "NAME : t\nTYPE : TSP\nDIMENSION : 2\nEDGE_WEIGHT_TYPE : " + type +
         "\nNODE_COORD_SECTION\n" + coords + "EOF\n";
}

TEST(TsplibTest, FloorsEuclideanDistances) {
  EXPECT_EQ(parse_tsplib(Tsp("1 0 0\n2 3 4\n"), 1).dist(0, 1), 5);
  EXPECT_EQ(parse_tsplib(Tsp("1 0 0\n2 1 1\n"), 1).dist(0, 1), 1);
  EXPECT_EQ(parse_tsplib(Tsp("1 0 0\n2 2 3\n"), 1).dist(0, 1), 3);
  // Nearest-integer rounding would give 4 here.
  EXPECT_EQ(parse_tsplib(Tsp("1 0 0\n2 2.5 2.5\n"), 1).dist(0, 1), 3);
}

TEST(TsplibTest, ParsesHeaderVariants) {
  const Instance inst = parse_tsplib(
      "NAME: tiny\nCOMMENT : three points\nTYPE: TSP\nDIMENSION: 3\n"
      "EDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 0 10\n3 1e1 0\n",
      2);
  EXPECT_EQ(inst.n_clients(), 3);
  EXPECT_EQ(inst.p(), 2);
  EXPECT_EQ(inst.dist(1, 2), 14);
  EXPECT_EQ(inst.name(), "tiny");
}

TEST(TsplibTest, RejectsUnsupportedInput) {
  EXPECT_THROW(parse_tsplib(Tsp("1 0 0\n2 3 4\n", "GEO"), 1), ParseError);
  EXPECT_THROW(parse_tsplib(Tsp("1 0 0\n2 3 4\n", "ATT"), 1), ParseError);
  EXPECT_THROW(parse_tsplib(Tsp("1 0 0\n"), 1), ParseError);            // missing node
  EXPECT_THROW(parse_tsplib(Tsp("1 0 0\n2 a 4\n"), 1), ParseError);      // bad coordinate
  EXPECT_THROW(parse_tsplib("NAME : t\nDIMENSION : 2\n", 1), ParseError);  // no section
  EXPECT_THROW(parse_tsplib(Tsp("1 0 0\n2 3 4\n"), 3), ParseError);      // p > N
}

TEST(RwTest, GeneratesEntriesInRange) {
  const Instance inst = generate_rw(4, 42);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      EXPECT_GE(inst.dist(i, j), 1);
      EXPECT_LE(inst.dist(i, j), 4);
    }
  }
}

TEST(RwTest, DeterministicAndAsymmetric) {
  const Instance a = generate_rw(100, 7);
  const Instance b = generate_rw(100, 7);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, generate_rw(100, 8));
  int asymmetric = 0;
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      EXPECT_GE(a.dist(i, j), 1);
      EXPECT_LE(a.dist(i, j), 100);
      asymmetric += a.dist(i, j) != a.dist(j, i);
    }
  }
  EXPECT_GT(asymmetric, 5000);
  EXPECT_THROW(generate_rw(1, 0), std::invalid_argument);
}

TEST(RwTest, MatrixTextRoundTrip) {
  const Instance a = generate_rw(9, 3, 2);
  const Instance b = parse_rw_matrix(format_rw_matrix(a), 2, a.name());
  EXPECT_EQ(a, b);
  EXPECT_THROW(parse_rw_matrix("2\n1 2\n3\n", 1), ParseError);
  EXPECT_THROW(parse_rw_matrix("2\n1 2\n3 4 5\n", 1), ParseError);
  EXPECT_THROW(parse_rw_matrix("2\n1 -2\n3 4\n", 1), ParseError);
}

TEST(NativeTest, JsonRoundTrip) {
  Rng rng(3);
  const Instance a = testing::random_instance(rng, 4, 6, 2, 0, 9, false);
  const Instance b = parse_native(format_native(a));
  EXPECT_EQ(a, b);
  EXPECT_THROW(parse_native("{\"n_clients\": 2}"), ParseError);
  EXPECT_THROW(parse_native("not json"), ParseError);
}

TEST(LoadTest, OrlibPMustMatchUnlessOverridden) {
  const std::string path = ::testing::TempDir() + "load_test.txt";
  {
    std::ofstream out(path);
    out << "3 2 1\n1 2 4\n2 3 3\n";
  }
  EXPECT_EQ(load_instance(path, InstanceFormat::kOrlib, std::nullopt).p(), 1);
  EXPECT_EQ(load_instance(path, InstanceFormat::kOrlib, 1).p(), 1);
  EXPECT_THROW(load_instance(path, InstanceFormat::kOrlib, 2), ParseError);
  EXPECT_EQ(load_instance(path, InstanceFormat::kOrlib, 2, true).p(), 2);
  EXPECT_THROW(load_instance(path, InstanceFormat::kOrlib, 4, true), ParseError);
  EXPECT_EQ(load_instance(path, InstanceFormat::kOrlib, std::nullopt).name(), "load_test");
  EXPECT_THROW(load_instance(path + ".missing", InstanceFormat::kOrlib, std::nullopt),
               IoError);
  std::remove(path.c_str());
}

TEST(PreprocessTest, SortedDistinctRow) {
  const Instance inst(1, 3, 1, {0, 4, 7});
  const Preprocessed prep(inst);
  EXPECT_EQ(prep.num_levels(0), 3);
  EXPECT_EQ(std::vector<Distance>(prep.levels(0).begin(), prep.levels(0).end()),
            (std::vector<Distance>{0, 4, 7}));
  EXPECT_EQ(std::vector<int>(prep.order(0).begin(), prep.order(0).end()),
            (std::vector<int>{0, 1, 2}));
}

TEST(PreprocessTest, TiesBrokenByIndex) {
  const Instance inst(1, 3, 1, {5, 5, 2});
  const Preprocessed prep(inst);
  EXPECT_EQ(prep.num_levels(0), 2);
  EXPECT_EQ(std::vector<Distance>(prep.levels(0).begin(), prep.levels(0).end()),
            (std::vector<Distance>{2, 5}));
  EXPECT_EQ(std::vector<int>(prep.order(0).begin(), prep.order(0).end()),
            (std::vector<int>{2, 0, 1}));
  EXPECT_EQ(prep.rank(0, 0), 1);
  EXPECT_EQ(prep.rank(0, 2), 0);
}

TEST(PreprocessTest, ConstantRowsHaveOneLevel) {
  const Instance inst(3, 4, 2, std::vector<Distance>(12, 6));
  const Preprocessed prep(inst);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(prep.num_levels(i), 1);
    EXPECT_EQ(prep.levels(i)[0], 6);
  }
  EXPECT_EQ(prep.total_levels(), 3);
}

TEST(PreprocessTest, PropertiesOnRandomInstances) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = testing::uniform_int(rng, 1, 12);
    const int m = testing::uniform_int(rng, 1, 12);
    const Instance inst = testing::random_instance(rng, n, m, 1, 0, 8, false);
    const Preprocessed prep(inst);
    std::int64_t total = 0;
    for (int i = 0; i < n; ++i) {
      const auto levels = prep.levels(i);
      const auto order = prep.order(i);
      total += prep.num_levels(i);
      EXPECT_LE(prep.num_levels(i), m);
      const std::set<Distance> distinct(inst.row(i).begin(), inst.row(i).end());
      EXPECT_EQ(std::vector<Distance>(levels.begin(), levels.end()),
                std::vector<Distance>(distinct.begin(), distinct.end()));
      EXPECT_EQ(std::set<int>(order.begin(), order.end()).size(), static_cast<std::size_t>(m));
      EXPECT_EQ(prep.rank(i, order[0]), 0);
      std::vector<int> per_level(prep.num_levels(i), 0);
      for (int r = 0; r < m; ++r) {
        const int j = order[r];
        EXPECT_EQ(levels[prep.rank(i, j)], inst.dist(i, j));
        ++per_level[prep.rank(i, j)];
        if (r + 1 < m) {
          const int next = order[r + 1];
          EXPECT_LE(inst.dist(i, j), inst.dist(i, next));
          EXPECT_LE(prep.rank(i, j), prep.rank(i, next));
          if (inst.dist(i, j) == inst.dist(i, next)) EXPECT_LT(j, next);
        }
      }
      for (int c : per_level) EXPECT_GE(c, 1);
    }
    EXPECT_EQ(prep.total_levels(), total);
    // Pure: a second pass gives identical structures.
    const Preprocessed again(inst);
    for (int i = 0; i < n; ++i) {
      EXPECT_TRUE(std::ranges::equal(prep.order(i), again.order(i)));
      EXPECT_TRUE(std::ranges::equal(prep.levels(i), again.levels(i)));
    }
  }
}

}  // namespace
}  // namespace pmedian
