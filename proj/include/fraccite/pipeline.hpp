#pragma once

// Run configuration and the subcommand drivers behind the command-line tool.

#include "fraccite/corpus.hpp"
#include "fraccite/counting.hpp"
#include "fraccite/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fraccite::pipeline {

namespace fs = std::filesystem;

enum class InputFormat { Tagged, Canonical, Aggregate };

std::string_view to_string(InputFormat f) noexcept;
InputFormat input_format_from_string(std::string_view s);  // throws Error{InvalidArgument}

struct RunConfig {
    std::vector<fs::path> inputs;         // cited side (tagged) or whole corpora (canonical)
    std::vector<fs::path> citing_inputs;  // tagged citing-side files
    InputFormat format = InputFormat::Tagged;
    std::optional<fs::path> aggregate_table;
    std::optional<fs::path> units;
    counting::DocTypeSet cited_doctypes = counting::default_cited_doctypes();
    counting::DocTypeSet citing_doctypes;  // empty: all
    std::set<int> publication_years;
    std::vector<counting::Window> windows;
    std::optional<std::string> stats_window;  // window label; default is the last window
    std::int64_t min_pubs = 5;
    double alpha = 0.05;
    fs::path out = "out";
    bool strict = false;
    unsigned threads = 1;

    bool aggregate_mode() const noexcept { return aggregate_table || format == InputFormat::Aggregate; }
    fs::path aggregate_path() const;

    // At least one input, valid windows, 0 < alpha < 1, min_pubs >= 1.
    // Throws Error{InvalidArgument}.
    void validate() const;
};

// Settings keyed by config name; a key may carry several values (repeated
// keys in a file, repeated flags on the command line).
using Settings = std::map<std::string, std::vector<std::string>>;

// `key = value` lines, `#` comments, blank lines ignored. Repeated keys
// accumulate. Throws Error{InvalidArgument} naming the line.
Settings parse_config(std::istream& in);
Settings load_config(const fs::path& path);

// Every key present in `settings` replaces the corresponding field, so
// applying file settings and then flag settings lets flags win.
// Keys: input, citing, format, aggregate_table, units, doctypes,
// citing_doctypes, py, window, stats_window, min_pubs, alpha, out, strict,
// threads. Throws Error{InvalidArgument} on unknown keys or bad values.
void apply_settings(RunConfig& config, const Settings& settings);

// ---- data loading -----------------------------------------------------------

struct LoadedCorpus {
    Corpus corpus;
    std::size_t rejects = 0;
};

// Tagged inputs are parsed record by record. Rejected records are reported on
// `log`; with `strict` the first reject aborts with its error.
LoadedCorpus load_corpus(const RunConfig& config, std::ostream& log);

AggregateTable load_aggregate_file(const fs::path& path);

// Samples CSV: columns `unit,value`, or a scores export (uses fc_decimal).
// Groups come out sorted by unit name.
std::vector<stats::NamedSample> load_samples(std::istream& in);
std::vector<stats::NamedSample> load_samples_file(const fs::path& path);

// ---- stats battery ----------------------------------------------------------

struct OmnibusEntry {
    stats::Method method = stats::Method::KruskalWallis;
    std::optional<stats::TestResult> result;
    std::string reason;  // why the test could not run, when result is empty
};

struct BatteryResult {
    std::vector<OmnibusEntry> omnibus;  // Kruskal-Wallis, Levene, ANOVA
    std::vector<stats::PairwiseDecision> decisions;
    std::string dunnett_reason;  // non-empty when Dunnett's C could not run
};

// Kruskal-Wallis, Levene (mean-centered), ANOVA and Dunnett's C. A test whose
// preconditions fail is reported with its reason instead of aborting the run.
BatteryResult run_battery(const std::vector<stats::NamedSample>& samples, double alpha);

// groups.csv, omnibus.csv, dunnett_c.csv, homogeneity.dot, components.csv.
std::vector<std::string> emit_battery(const BatteryResult& result, const std::vector<stats::NamedSample>& samples,
                                      const fs::path& dir);

// ---- manifest ---------------------------------------------------------------

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const fs::path& path);

// manifest.txt: command, input basenames with hashes, thresholds, alpha,
// windows and a hash per output file. Worker count and output location are
// deliberately absent so that equal inputs give equal manifests.
void write_manifest(const RunConfig& config, std::string_view command, const fs::path& dir,
                    std::vector<std::string> outputs);

// ---- subcommands ------------------------------------------------------------
// Each throws fraccite::Error on bad input; `log` receives summaries and
// warnings.

// Writes the canonical corpus to `destination` (stdout when empty).
void run_ingest(const RunConfig& config, const std::optional<fs::path>& destination, std::ostream& stdout_stream,
                std::ostream& log);
void run_assign(const RunConfig& config, std::ostream& log);
void run_count(const RunConfig& config, std::ostream& log);
void run_stats(const RunConfig& config, std::ostream& log);
void run_report(const RunConfig& config, std::ostream& log);
void run_evaluate(const RunConfig& config, std::ostream& log);

// 0 success, 1 internal error, 2 usage or input error.
int exit_code_for(ErrorCode code) noexcept;

}  // namespace fraccite::pipeline
