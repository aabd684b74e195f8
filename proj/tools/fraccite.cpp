// fraccite: fractional citation counting for organizational units.

#include "fraccite/error.hpp"
#include "fraccite/pipeline.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace {

using fraccite::pipeline::RunConfig;
using fraccite::pipeline::Settings;

// One command-line option bound to a settings key. Values stay as text until
// apply_settings validates them, so flags and config entries share a parser.
struct Binding {
    std::string key;
    CLI::Option* option = nullptr;
    std::vector<std::string> values;
    bool is_flag = false;
};

struct Subcommand {
    CLI::App* app = nullptr;
    std::vector<std::unique_ptr<Binding>> bindings;
    std::string config_path;
    std::optional<std::string> ingest_out;

    void option(const std::string& flag, const std::string& key, const std::string& help, bool repeatable = false) {
        auto b = std::make_unique<Binding>();
        b->key = key;
        b->option = app->add_option(flag, b->values, help)->allow_extra_args(false);
        if (!repeatable) b->option->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        bindings.push_back(std::move(b));
    }

    void flag(const std::string& flag, const std::string& key, const std::string& help) {
        auto b = std::make_unique<Binding>();
        b->key = key;
        b->is_flag = true;
        b->option = app->add_flag(flag, help);
        bindings.push_back(std::move(b));
    }

    void config_option() {
        app->add_option("--config", config_path, "Run configuration file (key = value; flags take precedence)");
    }

    RunConfig resolve() const {
        RunConfig config;
        if (!config_path.empty()) fraccite::pipeline::apply_settings(config, fraccite::pipeline::load_config(config_path));
        Settings flags;
        for (const auto& b : bindings) {
            if (b->option->count() == 0) continue;
            flags[b->key] = b->is_flag ? std::vector<std::string>{"true"} : b->values;
        }
        fraccite::pipeline::apply_settings(config, flags);
        return config;
    }
};

void corpus_options(Subcommand& s) {
    s.option("--input", "input", "Cited-side input file (repeatable)", true);
    s.option("--citing", "citing", "Citing-side tagged file (repeatable)", true);
    s.option("--format", "format", "Input format: tagged, canonical or aggregate");
    s.flag("--strict", "strict", "Abort on the first rejected record");
}

void counting_options(Subcommand& s) {
    s.option("--units", "units", "Unit definitions file");
    s.option("--py", "py", "Publication year(s) of the evaluated set (repeatable)", true);
    s.option("--window", "window", "Citation window START:END (repeatable)", true);
    s.option("--doctypes", "doctypes", "Cited-side document types, comma separated, or 'all'");
    s.option("--citing-doctypes", "citing_doctypes", "Citing-side document types (default all)");
    s.option("--min-pubs", "min_pubs", "Smallest publication count for a unit to be reported");
    s.option("--threads", "threads", "Worker threads for counting");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional citation counting and impact evaluation of organizational units"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "fraccite 0.1.0");

    Subcommand ingest{app.add_subcommand("ingest", "Parse tagged exports into the canonical corpus format")};
    corpus_options(ingest);
    ingest.config_option();
    ingest.app->add_option("--out", ingest.ingest_out, "Canonical output file (default: standard output)");

    Subcommand assign{app.add_subcommand("assign", "Assign cited-side papers to units")};
    corpus_options(assign);
    assign.option("--units", "units", "Unit definitions file");
    assign.option("--out", "out", "Output directory");
    assign.config_option();

    Subcommand count{app.add_subcommand("count", "Integer and fractional counts per paper and unit")};
    corpus_options(count);
    counting_options(count);
    count.option("--out", "out", "Output directory");
    count.config_option();

    Subcommand stats{app.add_subcommand("stats", "Omnibus tests and Dunnett's C on per-paper samples")};
    stats.option("--input", "input", "Samples CSV (unit,value) or a scores export");
    stats.option("--alpha", "alpha", "Significance level for pairwise decisions");
    stats.option("--min-pubs", "min_pubs", "Smallest sample size for a unit to be tested");
    stats.option("--out", "out", "Output directory");
    stats.config_option();

    Subcommand report{app.add_subcommand("report", "Rankings, rank changes and correlations from an aggregate table")};
    report.option("--aggregate-table", "aggregate_table", "Aggregate table CSV (unit,P,IC<w>,FC<w>,...)");
    report.option("--input", "input", "Same as --aggregate-table together with --format aggregate");
    report.option("--format", "format", "Input format (aggregate)");
    report.option("--alpha", "alpha", "Recorded in the manifest");
    report.option("--out", "out", "Output directory");
    report.config_option();

    Subcommand evaluate{app.add_subcommand("evaluate", "Run assign, count, stats and report end to end")};
    corpus_options(evaluate);
    counting_options(evaluate);
    evaluate.option("--aggregate-table", "aggregate_table", "Start from an aggregate table and skip counting");
    evaluate.option("--stats-window", "stats_window", "Window whose per-paper counts feed the tests");
    evaluate.option("--alpha", "alpha", "Significance level for pairwise decisions");
    evaluate.option("--out", "out", "Output directory");
    evaluate.config_option();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ingest.app->parsed()) {
            std::optional<std::filesystem::path> dest;
            if (ingest.ingest_out) dest = *ingest.ingest_out;
            fraccite::pipeline::run_ingest(ingest.resolve(), dest, std::cout, std::cerr);
        } else if (assign.app->parsed()) {
            fraccite::pipeline::run_assign(assign.resolve(), std::cerr);
        } else if (count.app->parsed()) {
            fraccite::pipeline::run_count(count.resolve(), std::cerr);
        } else if (stats.app->parsed()) {
            fraccite::pipeline::run_stats(stats.resolve(), std::cerr);
        } else if (report.app->parsed()) {
            fraccite::pipeline::run_report(report.resolve(), std::cerr);
        } else if (evaluate.app->parsed()) {
            fraccite::pipeline::run_evaluate(evaluate.resolve(), std::cerr);
        }
    } catch (const fraccite::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return fraccite::pipeline::exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
