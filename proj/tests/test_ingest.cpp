#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "dri/ingest.hpp"

using namespace dri;

namespace {

const std::string kSviHeader = "FIPS,COUNTY,ST_ABBR,E_TOTPOP,RPL_THEMES\n";

SchemaMapping plain_income_mapping() {
    SchemaMapping m;
    m.income_columns = {"GeoFIPS", "income"};
    m.income_row_filter.reset();
    return m;
}

}  // namespace

TEST(ParseSvi, ConvertsFields) {
    const auto t = parse_svi_table(kSviHeader + "12086,Miami-Dade County,FL,\"2,673,837\",0.7368\n", SchemaMapping{});
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0].fips, "12086");
    EXPECT_EQ(t.rows[0].name, "Miami-Dade County");
    EXPECT_EQ(t.rows[0].state, "FL");
    EXPECT_EQ(t.rows[0].population, 2673837);
    EXPECT_EQ(t.rows[0].svi, 0.7368);
    EXPECT_TRUE(t.rejected.empty());
}

TEST(ParseSvi, SentinelRowsAreRejected) {
    const auto t = parse_svi_table(kSviHeader + "12001,Alachua County,FL,100,-999\n12003,Baker County,FL,200,0.2\n",
                                   SchemaMapping{});
    ASSERT_EQ(t.rows.size(), 1u);
    ASSERT_EQ(t.rejected.size(), 1u);
    EXPECT_EQ(t.rejected[0].fips, "12001");
    EXPECT_EQ(t.rejected[0].reason, "missing sentinel");
    EXPECT_EQ(t.rejected[0].line, 2u);
}

TEST(ParseSvi, MissingMappedColumn) {
    try {
        parse_svi_table(std::string("FIPS,COUNTY,ST_ABBR,E_TOTPOP\n12001,A,FL,1\n"), SchemaMapping{});
        FAIL();
    } catch (const MissingColumn& e) {
        EXPECT_EQ(e.column(), "RPL_THEMES");
    }
}

TEST(ParseSvi, Errors) {
    EXPECT_THROW(parse_svi_table(kSviHeader + "12001,A,FL,100,1.5\n", SchemaMapping{}), ParseError);
    EXPECT_THROW(parse_svi_table(kSviHeader + "12001,A,FL,-4,0.5\n", SchemaMapping{}), ParseError);
    EXPECT_THROW(parse_svi_table(kSviHeader + "1200x,A,FL,4,0.5\n", SchemaMapping{}), ParseError);
    EXPECT_THROW(parse_svi_table(kSviHeader + "12001,A,Florida,4,0.5\n", SchemaMapping{}), ParseError);
    EXPECT_THROW(parse_svi_table(kSviHeader + "12001,A,FL,4,0.5\n12001,B,FL,5,0.6\n", SchemaMapping{}), DuplicateFips);
    try {
        parse_svi_table(kSviHeader + "12001,A,FL,100,abc\n", SchemaMapping{});
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.column(), "RPL_THEMES");
        EXPECT_EQ(e.raw(), "abc");
    }
}

TEST(ParseSvi, PadsFips) {
    const auto t = parse_svi_table(kSviHeader + "1001,Autauga County,AL,58000,0.4\n", SchemaMapping{});
    EXPECT_EQ(t.rows[0].fips, "01001");
}

TEST(ParseIncome, StripsSeparatorsAndExcludesAggregates) {
    const auto t = parse_income_table(std::string("GeoFIPS,income\n12000,\"60,000\"\n12001,\"65,432\"\n00000,1\n"),
                                      plain_income_mapping());
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0].fips, "12001");
    EXPECT_EQ(t.rows[0].income, 65432.0);
    EXPECT_EQ(t.aggregate_rows_excluded, 2u);
}

TEST(ParseIncome, NonPositiveIncomeIsParseError) {
    EXPECT_THROW(parse_income_table(std::string("GeoFIPS,income\n12001,0\n"), plain_income_mapping()), ParseError);
    EXPECT_THROW(parse_income_table(std::string("GeoFIPS,income\n12001,-5\n"), plain_income_mapping()), ParseError);
}

TEST(ParseIncome, BeaLayoutWithRowFilterAndTrailer) {
    const std::string text =
        "\"GeoFIPS\",\"GeoName\",\"LineCode\",\"2022\"\n"
        "\" 1001\",\"Autauga, AL\",\"1\",\"2,900,000\"\n"
        "\" 1001\",\"Autauga, AL\",\"3\",\"49,000\"\n"
        "\" 1003\",\"Baldwin, AL\",\"3\",\"(NA)\"\n"
        "\"Note: See the included footnote file.\"\n";
    SchemaMapping m;
    const auto t = parse_income_table(text, m);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.rows[0].fips, "01001");
    EXPECT_EQ(t.rows[0].income, 49000.0);
    EXPECT_EQ(t.filtered_rows, 2u);
    ASSERT_EQ(t.rejected.size(), 1u);
    EXPECT_EQ(t.rejected[0].fips, "01003");
}

TEST(ParseNri, Records) {
    const std::string head = "STCOFIPS,RISK_SCORE,RISK_RATNG\n";
    const auto t = parse_nri_table(head + "12086,99.1,Very High\n", SchemaMapping{});
    ASSERT_EQ(t.records.size(), 1u);
    EXPECT_EQ(t.records[0].fips, "12086");
    EXPECT_EQ(t.records[0].risk_score, 99.1);
    EXPECT_EQ(t.records[0].risk_rating, "Very High");
    EXPECT_THROW(parse_nri_table(head + "12086,-1,Very Low\n", SchemaMapping{}), ParseError);
    EXPECT_TRUE(parse_nri_table(head, SchemaMapping{}).records.empty());
}

TEST(ParseGeometry, PolygonFeature) {
    const std::string doc = R"({"type":"FeatureCollection","features":[
        {"type":"Feature","properties":{"GEOID":"12086"},
         "geometry":{"type":"Polygon","coordinates":[[[-80.5,25.5],[-80.1,25.5],[-80.1,25.9],[-80.5,25.5]]]}}]})";
    const auto g = parse_geometry(doc, "GEOID");
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g[0].fips, "12086");
    EXPECT_EQ(g[0].geometry["coordinates"][0][1][0].get<double>(), -80.1);
}

TEST(ParseGeometry, NumericFipsIsPadded) {
    const std::string doc = R"({"type":"FeatureCollection","features":[
        {"type":"Feature","properties":{"fips":1001},"geometry":{"type":"MultiPolygon","coordinates":[]}}]})";
    EXPECT_EQ(parse_geometry(doc, "fips")[0].fips, "01001");
}

TEST(ParseGeometry, Errors) {
    const std::string point = R"({"type":"FeatureCollection","features":[
        {"type":"Feature","properties":{"GEOID":"12086"},"geometry":{"type":"Point","coordinates":[0,0]}}]})";
    EXPECT_THROW(parse_geometry(point, "GEOID"), GeometryError);
    const std::string dup = R"({"type":"FeatureCollection","features":[
        {"type":"Feature","properties":{"GEOID":"12086"},"geometry":{"type":"Polygon","coordinates":[]}},
        {"type":"Feature","properties":{"GEOID":"12086"},"geometry":{"type":"Polygon","coordinates":[]}}]})";
    EXPECT_THROW(parse_geometry(dup, "GEOID"), DuplicateFips);
    EXPECT_THROW(parse_geometry(std::string(R"({"type":"Feature"})"), "GEOID"), GeometryError);
    EXPECT_THROW(parse_geometry(std::string("not json"), "GEOID"), GeometryError);
}

TEST(Join, IntersectionWithDiagnostics) {
    const std::vector<SviRow> svi{{"12001", "A", "FL", 1, 0.1}, {"12003", "B", "FL", 2, 0.2}};
    const std::vector<IncomeRow> inc{{"12003", 100.0}, {"12005", 200.0}};
    const auto j = join_counties(svi, inc);
    ASSERT_EQ(j.records.size(), 1u);
    EXPECT_EQ(j.records[0], (CountyRecord{"12003", "B", "FL", 2, 100.0, 0.2}));
    EXPECT_EQ(j.diagnostics.svi_only, std::vector<std::string>{"12001"});
    EXPECT_EQ(j.diagnostics.income_only, std::vector<std::string>{"12005"});
}

TEST(Join, IdenticalSetsAndDisjointSets) {
    const std::vector<SviRow> svi{{"12003", "B", "FL", 2, 0.2}, {"12001", "A", "FL", 1, 0.1}};
    const std::vector<IncomeRow> inc{{"12001", 100.0}, {"12003", 200.0}};
    const auto j = join_counties(svi, inc);
    EXPECT_EQ(j.records.size(), 2u);
    EXPECT_EQ(j.records[0].fips, "12001");
    EXPECT_TRUE(j.diagnostics.empty());
    EXPECT_THROW(join_counties(svi, std::vector<IncomeRow>{{"13001", 1.0}}), EmptyJoin);
}

TEST(Join, Filter) {
    const std::vector<SviRow> svi{{"12001", "A", "FL", 1, 0.1}, {"12003", "B", "FL", 2, 0.2}};
    const std::vector<IncomeRow> inc{{"12001", 100.0}, {"12003", 200.0}};
    const auto j = join_counties(svi, inc, std::vector<std::string>{"12003"});
    ASSERT_EQ(j.records.size(), 1u);
    EXPECT_EQ(j.records[0].fips, "12003");
}

TEST(Join, OrderInsensitive) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<SviRow> svi;
        std::vector<IncomeRow> inc;
        for (int i = 0; i < 40; ++i) {
            char fips[6];
            std::snprintf(fips, sizeof fips, "12%03d", 2 * i + 1);
            if (rng() % 5) svi.push_back({fips, "n", "FL", static_cast<std::int64_t>(rng() % 1000), 0.5});
            if (rng() % 5) inc.push_back({fips, 1.0 + static_cast<double>(rng() % 1000)});
        }
        const auto ref = join_counties(svi, inc);
        std::shuffle(svi.begin(), svi.end(), rng);
        std::shuffle(inc.begin(), inc.end(), rng);
        const auto again = join_counties(svi, inc);
        EXPECT_EQ(ref.records, again.records);
        EXPECT_EQ(ref.diagnostics.svi_only, again.diagnostics.svi_only);
        EXPECT_EQ(ref.diagnostics.income_only, again.diagnostics.income_only);
        EXPECT_TRUE(std::is_sorted(ref.records.begin(), ref.records.end(),
                                   [](const auto& a, const auto& b) { return a.fips < b.fips; }));
    }
}

TEST(Schema, JsonOverlayAndUnknownFields) {
    auto m = apply_schema_json(SchemaMapping{}, nlohmann::json::parse(R"({"svi_columns":{"svi":"RPL_THEME1"}})"));
    EXPECT_EQ(m.svi_columns.svi, "RPL_THEME1");
    EXPECT_EQ(m.svi_columns.fips, "FIPS");
    EXPECT_THROW(apply_schema_json(SchemaMapping{}, nlohmann::json::parse(R"({"svi_columns":{"sv":"x"}})")), ConfigError);
    m = apply_schema_json(m, nlohmann::json::parse(R"({"income_row_filter":null,"missing_sentinels":["NA"]})"));
    EXPECT_FALSE(m.income_row_filter);
    EXPECT_TRUE(m.is_missing("NA"));
    EXPECT_FALSE(m.is_missing("-999"));
}

TEST(Schema, ShippedDefaultsMatchBuiltIn) {
    const auto shipped = load_schema(std::string(DRI_SOURCE_DIR) + "/config/default_schema.json");
    EXPECT_EQ(schema_to_json(shipped), schema_to_json(SchemaMapping{}));
}
