#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "dri/pipeline.hpp"

using namespace dri;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = DRI_FIXTURE_DIR;

class PipelineTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("dri_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    RunConfig fixture(const char* name = "fl34_run.json") {
        auto cfg = load_run_config(kFixtures / name);
        cfg.output_dir = dir_ / "out";
        return cfg;
    }

    std::vector<std::string> files_in(const fs::path& d) const {
        std::vector<std::string> out;
        if (!fs::exists(d)) return out;
        for (const auto& e : fs::directory_iterator(d)) out.push_back(e.path().filename().string());
        std::sort(out.begin(), out.end());
        return out;
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

}  // namespace

TEST_F(PipelineTest, ValidateCleanFixture) {
    EXPECT_EQ(run_validate(fixture(), out_, err_), kExitOk) << out_.str() << err_.str();
    EXPECT_NE(out_.str().find("0 rejected rows"), std::string::npos);
    EXPECT_NE(out_.str().find("34 counties joined"), std::string::npos);
    EXPECT_TRUE(files_in(dir_ / "out").empty());
}

TEST_F(PipelineTest, ValidateSentinelRows) {
    EXPECT_EQ(run_validate(fixture("sentinel_run.json"), out_, err_), kExitFindings);
    EXPECT_NE(out_.str().find("2 rejected rows"), std::string::npos);
    EXPECT_NE(out_.str().find("12011"), std::string::npos);
    EXPECT_NE(out_.str().find("missing sentinel"), std::string::npos);
}

TEST_F(PipelineTest, ValidateMissingFile) {
    auto cfg = fixture();
    cfg.svi_path = dir_ / "nope.csv";
    EXPECT_EQ(run_validate(cfg, out_, err_), kExitError);
    EXPECT_NE(err_.str().find("nope.csv"), std::string::npos);
}

TEST_F(PipelineTest, ValidateParseProblemIsFinding) {
    auto cfg = fixture();
    cfg.schema.svi_columns.svi = "NOT_A_COLUMN";
    EXPECT_EQ(run_validate(cfg, out_, err_), kExitFindings);
    EXPECT_NE(out_.str().find("NOT_A_COLUMN"), std::string::npos);
}

TEST_F(PipelineTest, ComputeWritesAllOutputs) {
    const auto cfg = fixture();
    ASSERT_EQ(run_compute(cfg, out_, err_), kExitOk) << err_.str();
    EXPECT_EQ(files_in(cfg.output_dir), (std::vector<std::string>{"manifest.json", "results.csv", "results.geojson"}));

    const auto rows = read_results_csv(read_file(cfg.output_dir / kResultsCsvName));
    EXPECT_EQ(rows.size(), 34u);
    const auto geo = nlohmann::json::parse(read_file(cfg.output_dir / kResultsGeoJsonName));
    EXPECT_EQ(geo["features"].size(), 34u);

    const auto manifest = nlohmann::json::parse(read_file(cfg.output_dir / kManifestName));
    EXPECT_EQ(manifest["counts"]["scored"], 34);
    EXPECT_EQ(manifest["counts"]["income_aggregate_rows_excluded"], 2);
    EXPECT_EQ(manifest["input_digests"]["svi"], sha256_hex(read_file(cfg.svi_path)));
    EXPECT_EQ(manifest["outputs"]["results.csv"], sha256_hex(read_file(cfg.output_dir / kResultsCsvName)));
    EXPECT_EQ(manifest["config"]["weight"], 1.0 / 3.0);
}

TEST_F(PipelineTest, ComputeIsDeterministic) {
    auto cfg = fixture();
    ASSERT_EQ(run_compute(cfg, out_, err_), kExitOk);
    const auto csv = read_file(cfg.output_dir / kResultsCsvName);
    const auto geo = read_file(cfg.output_dir / kResultsGeoJsonName);
    cfg.output_dir = dir_ / "again";
    ASSERT_EQ(run_compute(cfg, out_, err_), kExitOk);
    EXPECT_EQ(read_file(cfg.output_dir / kResultsCsvName), csv);
    EXPECT_EQ(read_file(cfg.output_dir / kResultsGeoJsonName), geo);
}

TEST_F(PipelineTest, PaperLiteralScalesEveryValue) {
    auto cfg = fixture();
    ASSERT_EQ(run_compute(cfg, out_, err_), kExitOk);
    const auto base = read_results_csv(read_file(cfg.output_dir / kResultsCsvName));
    RunOverrides o;
    o.paper_literal = true;
    o.output_dir = dir_ / "literal";
    apply_overrides(cfg, o);
    ASSERT_EQ(run_compute(cfg, out_, err_), kExitOk);
    const auto literal = read_results_csv(read_file(cfg.output_dir / kResultsCsvName));
    ASSERT_EQ(literal.size(), base.size());
    for (std::size_t i = 0; i < base.size(); ++i) EXPECT_NEAR(literal[i].index.dri, 0.99 * base[i].index.dri, 1e-12);
}

TEST_F(PipelineTest, SubsetAnalysis) {
    auto cfg = fixture();
    RunOverrides o;
    o.subset_fips = fs::path(DRI_SOURCE_DIR) / "config" / "storm_path_fips.txt";
    apply_overrides(cfg, o);
    ASSERT_EQ(run_compute(cfg, out_, err_), kExitOk) << err_.str();
    EXPECT_EQ(read_results_csv(read_file(cfg.output_dir / kResultsCsvName)).size(), 23u);
    o = {};
    o.domain = "subset";
    o.output_dir = dir_ / "subset";
    apply_overrides(cfg, o);
    ASSERT_EQ(run_compute(cfg, out_, err_), kExitOk) << err_.str();
    const auto manifest = nlohmann::json::parse(read_file(cfg.output_dir / kManifestName));
    EXPECT_EQ(manifest["normalization"]["domain_size"], 23);
}

TEST_F(PipelineTest, FailedRunLeavesNoOutputs) {
    auto cfg = fixture();
    cfg.index.class_count = 4;  // no built-in labels for four classes
    EXPECT_EQ(run_compute(cfg, out_, err_), kExitError);
    EXPECT_TRUE(files_in(cfg.output_dir).empty());
}

TEST_F(PipelineTest, OutputStageRemovesUncommittedFiles) {
    {
        OutputStage stage(dir_ / "staged");
        stage.stage("a.txt", "a");
        stage.stage("b.txt", "b");
        EXPECT_EQ(files_in(dir_ / "staged").size(), 2u);
    }
    EXPECT_TRUE(files_in(dir_ / "staged").empty());
    {
        OutputStage stage(dir_ / "staged");
        stage.stage("a.txt", "a");
        stage.commit();
    }
    EXPECT_EQ(files_in(dir_ / "staged"), std::vector<std::string>{"a.txt"});
}

TEST_F(PipelineTest, CompareAgainstFixtureNri) {
    const auto cfg = fixture();
    ASSERT_EQ(run_compare(cfg, out_, err_), kExitOk) << err_.str();
    const auto doc = nlohmann::json::parse(read_file(cfg.output_dir / kComparisonName));
    EXPECT_EQ(doc["n"], 34);
    EXPECT_EQ(doc["nri_class_source"], "published_rating");
    std::size_t total = 0;
    for (const auto& row : doc["cross_tab"])
        for (const auto& c : row) total += c.get<std::size_t>();
    EXPECT_EQ(total, 34u);
    EXPECT_TRUE(fs::exists(cfg.output_dir / kComparisonManifestName));
}

TEST_F(PipelineTest, CompareInverseRanking) {
    auto cfg = fixture();
    ASSERT_EQ(run_compute(cfg, out_, err_), kExitOk);
    const auto rows = read_results_csv(read_file(cfg.output_dir / kResultsCsvName));
    // Risk scores must be >= 0, so 1 - dri stands in for -dri (same ranking).
    std::ofstream(dir_ / "nri_inverse.csv") << "STCOFIPS,RISK_SCORE,RISK_RATNG\n";
    std::ofstream(dir_ / "nri_half.csv") << "STCOFIPS,RISK_SCORE,RISK_RATNG\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto line = rows[i].county.fips + "," + format_double(1.0 - rows[i].index.dri) + ",\n";
        std::ofstream(dir_ / "nri_inverse.csv", std::ios::app) << line;
        if (i % 2 == 0) std::ofstream(dir_ / "nri_half.csv", std::ios::app) << line;
    }

    cfg.nri_path = dir_ / "nri_inverse.csv";
    ASSERT_EQ(run_compare(cfg, out_, err_), kExitOk) << err_.str();
    auto doc = nlohmann::json::parse(read_file(cfg.output_dir / kComparisonName));
    EXPECT_EQ(doc["spearman_rho"].get<double>(), -1.0);
    EXPECT_EQ(doc["nri_class_source"], "risk_score_quantiles");

    cfg.nri_path = dir_ / "nri_half.csv";
    ASSERT_EQ(run_compare(cfg, out_, err_), kExitOk) << err_.str();
    doc = nlohmann::json::parse(read_file(cfg.output_dir / kComparisonName));
    EXPECT_EQ(doc["n"], 17);
    EXPECT_EQ(doc["diagnostics"]["dri_only"].size(), 17u);
}

TEST_F(PipelineTest, CompareWithoutNri) {
    auto cfg = fixture();
    cfg.nri_path.reset();
    EXPECT_EQ(run_compare(cfg, out_, err_), kExitError);
    EXPECT_NE(err_.str().find("NRI"), std::string::npos);
}

TEST(RunConfigTest, OverridesAndValidation) {
    auto cfg = load_run_config(kFixtures / "fl34_run.json");
    EXPECT_EQ(cfg.svi_path, kFixtures / "fl34_svi.csv");
    EXPECT_EQ(cfg.index.weight, kEqualWeight);
    RunOverrides o;
    o.weight = 0.5;
    o.paper_literal = true;
    EXPECT_THROW(apply_overrides(cfg, o), ConfigError);
    o.paper_literal = false;
    o.classes = 3;
    apply_overrides(cfg, o);
    EXPECT_EQ(cfg.index.weight, 0.5);
    EXPECT_THROW(cfg.labels(), ConfigError);
    cfg.class_labels = std::vector<std::string>{"low", "mid", "high"};
    EXPECT_EQ(cfg.labels().size(), 3u);
    o = {};
    o.domain = "sideways";
    EXPECT_THROW(apply_overrides(cfg, o), ConfigError);
    cfg.state_fips = "1";
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(RunConfigTest, ShippedStormPathConfig) {
    const auto cfg = load_run_config(fs::path(DRI_SOURCE_DIR) / "config" / "helene_storm_path.json");
    ASSERT_TRUE(cfg.index.analysis_fips);
    EXPECT_EQ(cfg.index.analysis_fips->size(), 23u);
    EXPECT_EQ(cfg.index.domain, NormalizationDomain::FullDataset);
    EXPECT_NO_THROW(cfg.validate());
}
