#include "trustsim/csv.h"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "test_util.h"
#include "trustsim/rng.h"

namespace trustsim {
namespace {

TEST(Csv, RoundTripWithQuoting) {
  CsvTable t;
  t.header = {"policy", "note", "value"};
  t.rows = {{"TP", "plain", "0.5"},
            {"Random", "has,comma", "1e-300"},
            {"GT", "has \"quotes\"", ""},
            {"ToPToM", "multi\nline", "-3"}};
  EXPECT_EQ(ParseCsv(EmitCsv(t)), t);
  testing::TempDir dir;
  WriteCsv(dir / "t.csv", t);
  EXPECT_EQ(ReadCsv(dir / "t.csv"), t);
}

TEST(Csv, RaggedRowsRejected) {
  EXPECT_THROW(ParseCsv("a,b\n1,2,3\n"), std::invalid_argument);
}

TEST(Csv, DoublesRoundTripExactly) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = (rng.Uniform() - 0.5) * std::pow(10.0, rng.UniformInt(-20, 20));
    EXPECT_EQ(ParseDouble(FormatDouble(v)), v);
  }
  EXPECT_TRUE(std::isnan(ParseDouble(FormatDouble(std::nan("")))));
  EXPECT_EQ(FormatDouble(0.1), "0.1");
}

}  // namespace
}  // namespace trustsim
