#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "dcl/errors.hpp"
#include "dcl/table.hpp"

using namespace dcl;

namespace {

Table sample_table() {
  Table t;
  t.columns = {"name", "value", "flag", "note"};
  t.add({{"name", std::string("a,b")}, {"value", 0.1}, {"flag", true}, {"note", std::string("say \"hi\"")}});
  t.add({{"name", std::string("inf row")}, {"value", std::numeric_limits<double>::infinity()}, {"flag", false}});
  t.add({{"name", std::string("neg")}, {"value", -std::numeric_limits<double>::infinity()}});
  t.add({{"name", std::string("small")}, {"value", 1.0 / 3.0}, {"note", std::string("line\nbreak")}});
  return t;
}

}  // namespace

TEST(Table, AddFillsMissingCells) {
  const auto t = sample_table();
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_TRUE(std::holds_alternative<std::monostate>(t.at(1, "note")));
  EXPECT_EQ(std::get<double>(t.at(0, "value")), 0.1);
  EXPECT_THROW(t.column("missing"), std::out_of_range);
}

TEST(Table, EmptyTableOutputs) {
  Table t;
  t.columns = {"x", "y"};
  EXPECT_EQ(to_string(t, Format::csv), "x,y\n");
  EXPECT_EQ(parse_json(to_string(t, Format::json)).rows.size(), 0u);
}

TEST(Table, CsvRoundTrip) {
  const auto t = sample_table();
  EXPECT_EQ(parse_csv(to_string(t, Format::csv)), t);
}

TEST(Table, JsonRoundTrip) {
  const auto t = sample_table();
  EXPECT_EQ(parse_json(to_string(t, Format::json)), t);
}

TEST(Table, NanSurvivesBothFormats) {
  Table t;
  t.columns = {"v"};
  t.add({{"v", std::nan("")}});
  for (auto f : {Format::csv, Format::json}) {
    const auto back = f == Format::csv ? parse_csv(to_string(t, f)) : parse_json(to_string(t, f));
    EXPECT_TRUE(std::isnan(std::get<double>(back.at(0, "v"))));
  }
}

TEST(Table, FormatsCarrySameValues) {
  const auto t = sample_table();
  EXPECT_EQ(parse_csv(to_string(t, Format::csv)), parse_json(to_string(t, Format::json)));
}

TEST(Table, DoublesKeepFullPrecision) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -2.5e17})
    EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Table, FileRoundTripAndErrors) {
  const auto path = (std::filesystem::temp_directory_path() / "dcl_table_test.json").string();
  const auto t = sample_table();
  emit(t, Format::json, path);
  EXPECT_EQ(read_table(path, Format::json), t);
  EXPECT_THROW(emit(t, Format::csv, "/nonexistent/dir/out.csv"), IoError);
  EXPECT_THROW(read_table("/nonexistent/in.csv", Format::csv), IoError);
  EXPECT_THROW(parse_format("xml"), ConfigError);
  EXPECT_EQ(parse_format("json"), Format::json);
}
