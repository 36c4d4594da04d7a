// dri: county Disaster Resilience Index pipeline.
//
//   dri validate --config run.json
//   dri compute  --config run.json [--weight W | --paper-literal] [--classes K]
//                [--domain full|subset] [--subset-fips FILE] [--output-dir DIR]
//   dri compare  --config run.json [same overrides]

#include <cstdlib>
#include <iostream>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "dri/pipeline.hpp"

namespace {

void setup_logging() {
    auto logger = spdlog::stderr_logger_mt("dri");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("DRI_LOG");
    const std::string level = env ? env : "warn";
    if (level == "off")
        spdlog::set_level(spdlog::level::off);
    else if (level == "debug")
        spdlog::set_level(spdlog::level::debug);
    else if (level == "info")
        spdlog::set_level(spdlog::level::info);
    else
        spdlog::set_level(spdlog::level::warn);
}

struct Options {
    std::string config;
    dri::RunOverrides overrides;
    std::string output_dir;
    std::string subset_fips;
};

void add_run_options(CLI::App* cmd, Options& opts, bool with_overrides) {
    cmd->add_option("-c,--config", opts.config, "JSON run config")->required()->check(CLI::ExistingFile);
    if (!with_overrides) return;
    auto* weight = cmd->add_option_function<double>("--weight", [&](double w) { opts.overrides.weight = w; },
                                                    "common coefficient on the three terms (default 1/3)");
    auto* literal = cmd->add_flag("--paper-literal", opts.overrides.paper_literal, "use the 0.33 coefficient");
    weight->excludes(literal);
    cmd->add_option_function<int>("--classes", [&](int k) { opts.overrides.classes = k; }, "number of quantile classes");
    cmd->add_option_function<std::string>("--domain", [&](const std::string& d) { opts.overrides.domain = d; },
                                          "normalization domain")
        ->check(CLI::IsMember({"full", "subset"}));
    cmd->add_option("--subset-fips", opts.subset_fips, "file of analysis FIPS codes, one per line");
    cmd->add_option("--output-dir", opts.output_dir, "directory for output files");
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"County Disaster Resilience Index: validate inputs, compute the index, compare with the FEMA NRI"};
    app.set_version_flag("--version", dri::kVersion);
    app.require_subcommand(1);

    Options validate_opts, compute_opts, compare_opts;
    auto* validate = app.add_subcommand("validate", "parse and join inputs, report findings, write nothing");
    add_run_options(validate, validate_opts, true);
    auto* compute = app.add_subcommand("compute", "write results CSV, GeoJSON and manifest");
    add_run_options(compute, compute_opts, true);
    auto* compare = app.add_subcommand("compare", "compare DRI classes and ranks with the FEMA NRI");
    add_run_options(compare, compare_opts, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? dri::kExitOk : dri::kExitError;
    }

    Options& opts = validate->parsed() ? validate_opts : compute->parsed() ? compute_opts : compare_opts;
    dri::RunConfig cfg;
    try {
        cfg = dri::load_run_config(opts.config);
        if (!opts.subset_fips.empty()) opts.overrides.subset_fips = opts.subset_fips;
        if (!opts.output_dir.empty()) opts.overrides.output_dir = opts.output_dir;
        dri::apply_overrides(cfg, opts.overrides);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return dri::kExitError;
    }

    if (validate->parsed()) return dri::run_validate(cfg, std::cout, std::cerr);
    if (compute->parsed()) return dri::run_compute(cfg, std::cout, std::cerr);
    return dri::run_compare(cfg, std::cout, std::cerr);
}
