#include "fraccite/pipeline.hpp"

#include "fraccite/error.hpp"
#include "fraccite/report.hpp"
#include "fraccite/text.hpp"
#include "fraccite/unitquery.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace fraccite::pipeline {

namespace {

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return in;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

std::string emit_to(const fs::path& dir, const std::string& name, const auto& writer) {
    std::ostringstream os;
    writer(os);
    report::write_file(dir / name, os.str());
    return name;
}

std::string last_value(const std::string& key, const std::vector<std::string>& values) {
    if (values.empty()) throw Error(ErrorCode::InvalidArgument, key + ": missing value");
    return values.back();
}

std::int64_t int_setting(const std::string& key, const std::vector<std::string>& values) {
    const auto v = last_value(key, values);
    const auto n = text::parse_int(text::trim(v));
    if (!n) throw Error(ErrorCode::InvalidArgument, key + ": expected an integer, got '" + v + "'");
    return *n;
}

bool bool_setting(const std::string& key, const std::vector<std::string>& values) {
    const auto v = text::to_lower(text::trim(last_value(key, values)));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error(ErrorCode::InvalidArgument, key + ": expected true or false, got '" + v + "'");
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string doctypes_text(const counting::DocTypeSet& set) {
    if (set.empty()) return "all";
    return join(std::vector<std::string>(set.begin(), set.end()), ",");
}

std::string normalize_window_label(std::string_view s) {
    std::string out(text::trim(s));
    std::replace(out.begin(), out.end(), ':', '-');
    return out;
}

}  // namespace

// ---- configuration ----------------------------------------------------------

std::string_view to_string(InputFormat f) noexcept {
    switch (f) {
    case InputFormat::Tagged: return "tagged";
    case InputFormat::Canonical: return "canonical";
    case InputFormat::Aggregate: return "aggregate";
    }
    return "tagged";
}

InputFormat input_format_from_string(std::string_view s) {
    const auto t = text::to_lower(text::trim(s));
    if (t == "tagged") return InputFormat::Tagged;
    if (t == "canonical") return InputFormat::Canonical;
    if (t == "aggregate") return InputFormat::Aggregate;
    throw Error(ErrorCode::InvalidArgument, "format: expected tagged, canonical or aggregate, got '" + t + "'");
}

fs::path RunConfig::aggregate_path() const {
    if (aggregate_table) return *aggregate_table;
    if (format == InputFormat::Aggregate && !inputs.empty()) return inputs.front();
    throw Error(ErrorCode::InvalidArgument, "no aggregate table given");
}

void RunConfig::validate() const {
    if (inputs.empty() && !aggregate_table)
        throw Error(ErrorCode::InvalidArgument, "at least one input is required (--input or --aggregate-table)");
    for (const auto& w : windows) {
        if (w.start <= 0 || w.end < w.start) throw Error(ErrorCode::InvalidArgument, "invalid window " + w.label());
    }
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(ErrorCode::InvalidArgument, "alpha must lie strictly between 0 and 1, got " +
                                                    text::format_exact(alpha));
    if (min_pubs < 1) throw Error(ErrorCode::InvalidArgument, "min_pubs must be at least 1");
    if (threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be at least 1");
}

Settings parse_config(std::istream& in) {
    Settings settings;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        const auto body = text::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::InvalidArgument, "config line " + std::to_string(lineno) + ": expected key = value");
        auto key = text::to_lower(text::trim(body.substr(0, eq)));
        std::replace(key.begin(), key.end(), '-', '_');
        if (key.empty()) throw Error(ErrorCode::InvalidArgument, "config line " + std::to_string(lineno) + ": empty key");
        settings[key].emplace_back(text::trim(body.substr(eq + 1)));
    }
    return settings;
}

Settings load_config(const fs::path& path) {
    auto in = open_input(path);
    auto settings = parse_config(in);
    // Relative paths in a config file are taken relative to the file itself.
    const auto base = path.parent_path();
    for (const char* key : {"input", "citing", "aggregate_table", "units", "out"}) {
        const auto it = settings.find(key);
        if (it == settings.end()) continue;
        for (auto& v : it->second) {
            if (!v.empty() && fs::path(v).is_relative()) v = (base / v).lexically_normal().string();
        }
    }
    return settings;
}

void apply_settings(RunConfig& config, const Settings& settings) {
    for (const auto& [key, values] : settings) {
        if (key == "input" || key == "citing") {
            std::vector<fs::path> paths(values.begin(), values.end());
            (key == "input" ? config.inputs : config.citing_inputs) = std::move(paths);
        } else if (key == "format") {
            config.format = input_format_from_string(last_value(key, values));
        } else if (key == "aggregate_table") {
            config.aggregate_table = fs::path(last_value(key, values));
        } else if (key == "units") {
            config.units = fs::path(last_value(key, values));
        } else if (key == "doctypes" || key == "citing_doctypes") {
            auto set = counting::parse_doctype_list(join(values, ","));
            (key == "doctypes" ? config.cited_doctypes : config.citing_doctypes) = std::move(set);
        } else if (key == "py") {
            std::set<int> years;
            for (const auto& v : values) {
                for (const auto& part : text::split(v, ',')) {
                    const auto y = text::parse_int(text::trim(part));
                    if (!y || *y <= 0) throw Error(ErrorCode::InvalidArgument, "py: invalid year '" + part + "'");
                    years.insert(static_cast<int>(*y));
                }
            }
            config.publication_years = std::move(years);
        } else if (key == "window") {
            std::vector<counting::Window> windows;
            for (const auto& v : values) {
                for (const auto& part : text::split(v, ',')) windows.push_back(counting::Window::parse(text::trim(part)));
            }
            config.windows = std::move(windows);
        } else if (key == "stats_window") {
            config.stats_window = normalize_window_label(last_value(key, values));
        } else if (key == "min_pubs") {
            config.min_pubs = int_setting(key, values);
        } else if (key == "alpha") {
            const auto v = last_value(key, values);
            const auto a = text::parse_double(text::trim(v));
            if (!a) throw Error(ErrorCode::InvalidArgument, "alpha: expected a number, got '" + v + "'");
            config.alpha = *a;
        } else if (key == "out") {
            config.out = fs::path(last_value(key, values));
        } else if (key == "strict") {
            config.strict = bool_setting(key, values);
        } else if (key == "threads") {
            const auto n = int_setting(key, values);
            if (n < 1 || n > 1024) throw Error(ErrorCode::InvalidArgument, "threads must be between 1 and 1024");
            config.threads = static_cast<unsigned>(n);
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown setting '" + key + "'");
        }
    }
}

// ---- loading ----------------------------------------------------------------

LoadedCorpus load_corpus(const RunConfig& config, std::ostream& log) {
    if (config.inputs.empty()) throw Error(ErrorCode::InvalidArgument, "a corpus input is required");
    LoadedCorpus loaded;
    std::vector<CorpusEntry> entries;

    if (config.format == InputFormat::Canonical) {
        for (const auto& paths : {config.inputs, config.citing_inputs}) {
            for (const auto& path : paths) {
                auto in = open_input(path);
                const auto part = load_canonical(in);
                entries.insert(entries.end(), part.entries().begin(), part.entries().end());
            }
        }
        loaded.corpus = Corpus(std::move(entries));
        return loaded;
    }
    if (config.format == InputFormat::Aggregate)
        throw Error(ErrorCode::InvalidArgument, "aggregate input carries no publication records");

    std::unordered_map<std::string, std::size_t> index;
    auto ingest = [&](const fs::path& path, Side side) {
        auto in = open_input(path);
        auto parsed = parse_tagged(in);
        for (const auto& issue : parsed.errors) {
            const auto where = path.filename().string() + ":" + std::to_string(issue.line);
            if (config.strict) throw Error(issue.code, where + ": " + issue.message);
            log << "warning: " << where << ": " << to_string(issue.code) << ": " << issue.message << '\n';
            ++loaded.rejects;
        }
        for (auto& rec : parsed.records) {
            const auto it = index.find(rec.id);
            if (it == index.end()) {
                index.emplace(rec.id, entries.size());
                entries.push_back({std::move(rec), side});
                continue;
            }
            auto& existing = entries[it->second];
            if (existing.side == Side::Cited && side == Side::Citing) {
                // The same document on both sides: keep the cited-side record,
                // take the reference list from whichever copy has one.
                if (existing.record.cited_ids.empty()) existing.record.cited_ids = rec.cited_ids;
                if (!existing.record.nrefs) existing.record.nrefs = rec.nrefs;
                existing.side = Side::Both;
                continue;
            }
            const auto message = path.filename().string() + ": duplicate record id " + rec.id;
            if (config.strict) throw Error(ErrorCode::DuplicateId, message);
            log << "warning: " << message << '\n';
            ++loaded.rejects;
        }
    };
    for (const auto& path : config.inputs) ingest(path, Side::Cited);
    for (const auto& path : config.citing_inputs) ingest(path, Side::Citing);
    loaded.corpus = Corpus(std::move(entries));
    return loaded;
}

AggregateTable load_aggregate_file(const fs::path& path) {
    auto in = open_input(path);
    return load_aggregate_table(in);
}

std::vector<stats::NamedSample> load_samples(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::MalformedField, "samples file is empty");
    if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = text::split_csv_line(line);
    auto column = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (text::iequals(text::trim(header[i]), name)) return i;
        }
        return std::nullopt;
    };
    const auto unit_col = column("unit");
    auto value_col = column("value");
    if (!value_col) value_col = column("fc_decimal");
    if (!unit_col || !value_col)
        throw Error(ErrorCode::MalformedField, "samples header needs 'unit' and 'value' (or 'fc_decimal') columns");

    std::map<std::string, std::vector<double>> groups;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        const auto cells = text::split_csv_line(line);
        const auto where = "line " + std::to_string(lineno);
        if (cells.size() <= std::max(*unit_col, *value_col))
            throw Error(ErrorCode::MalformedField, where + ": too few cells");
        const auto v = text::parse_double(text::trim(cells[*value_col]));
        if (!v || !std::isfinite(*v))
            throw Error(ErrorCode::NonNumericCell, where + ": '" + cells[*value_col] + "' is not a number");
        groups[std::string(text::trim(cells[*unit_col]))].push_back(*v);
    }
    std::vector<stats::NamedSample> out;
    for (auto& [name, values] : groups) out.push_back({name, std::move(values)});
    return out;
}

std::vector<stats::NamedSample> load_samples_file(const fs::path& path) {
    auto in = open_input(path);
    return load_samples(in);
}

// ---- stats battery ----------------------------------------------------------

BatteryResult run_battery(const std::vector<stats::NamedSample>& samples, double alpha) {
    stats::Groups groups;
    for (const auto& s : samples) groups.push_back(s.values);

    BatteryResult result;
    auto attempt = [&](stats::Method method, auto&& fn) {
        OmnibusEntry entry;
        entry.method = method;
        try {
            entry.result = fn();
        } catch (const Error& e) {
            entry.reason = e.what();
        }
        result.omnibus.push_back(std::move(entry));
    };
    attempt(stats::Method::KruskalWallis, [&] { return stats::kruskal_wallis(groups); });
    attempt(stats::Method::Levene, [&] { return stats::levene(groups); });
    attempt(stats::Method::Anova, [&] { return stats::one_way_anova(groups); });
    try {
        result.decisions = stats::dunnett_c(samples, alpha);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConvergenceFailure) throw;
        result.dunnett_reason = e.what();
    }
    return result;
}

std::vector<std::string> emit_battery(const BatteryResult& result, const std::vector<stats::NamedSample>& samples,
                                      const fs::path& dir) {
    ensure_dir(dir);
    std::vector<std::string> files;

    files.push_back(emit_to(dir, "groups.csv", [&](std::ostream& os) {
        os << "unit,n,mean,variance\n";
        for (const auto& s : samples) {
            const double n = static_cast<double>(s.values.size());
            const double mean = n > 0 ? std::accumulate(s.values.begin(), s.values.end(), 0.0) / n : 0.0;
            double ss = 0.0;
            for (double v : s.values) ss += (v - mean) * (v - mean);
            os << text::csv_escape(s.name) << ',' << s.values.size() << ',' << text::format_exact(mean) << ','
               << (n > 1 ? text::format_exact(ss / (n - 1)) : std::string()) << '\n';
        }
    }));

    files.push_back(emit_to(dir, "omnibus.csv", [&](std::ostream& os) {
        os << "method,statistic,df1,df2,p_value,note\n";
        for (const auto& e : result.omnibus) {
            os << stats::to_string(e.method) << ',';
            if (e.result) {
                const auto& r = *e.result;
                os << text::format_exact(r.statistic) << ',' << text::format_exact(r.df1) << ','
                   << (r.df2 ? text::format_exact(*r.df2) : std::string()) << ',' << text::format_exact(r.p_value)
                   << ',' << text::csv_escape(r.note) << '\n';
            } else {
                os << ",,,," << text::csv_escape("not computed: " + e.reason) << '\n';
            }
        }
    }));

    files.push_back(emit_to(dir, "dunnett_c.csv", [&](std::ostream& os) { report::write_decisions(result.decisions, os); }));

    report::HomogeneityGraph graph;
    if (result.dunnett_reason.empty()) {
        std::vector<std::string> units;
        for (const auto& s : samples) units.push_back(s.name);
        graph = report::build_homogeneity_graph(std::move(units), result.decisions);
    }
    files.push_back(emit_to(dir, "homogeneity.dot", [&](std::ostream& os) { os << report::emit_graph_dot(graph); }));
    files.push_back(emit_to(dir, "components.csv", [&](std::ostream& os) {
        os << "component,unit\n";
        for (std::size_t c = 0; c < graph.components.size(); ++c) {
            for (const auto& u : graph.components[c]) os << (c + 1) << ',' << text::csv_escape(u) << '\n';
        }
    }));
    return files;
}

// ---- manifest ---------------------------------------------------------------

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::IoError, "SHA-256 computation failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

std::string sha256_file(const fs::path& path) {
    auto in = open_input(path);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(bytes);
}

void write_manifest(const RunConfig& config, std::string_view command, const fs::path& dir,
                    std::vector<std::string> outputs) {
    std::ostringstream os;
    os << "# fraccite run manifest\n";
    os << "command: " << command << '\n';
    auto file_line = [&](std::string_view key, const fs::path& p) {
        os << key << ": " << p.filename().string() << " sha256:" << sha256_file(p) << '\n';
    };
    if (config.aggregate_mode()) {
        file_line("aggregate_table", config.aggregate_path());
    } else {
        os << "format: " << to_string(config.format) << '\n';
        for (const auto& p : config.inputs) file_line("input", p);
        for (const auto& p : config.citing_inputs) file_line("citing", p);
        if (config.units) file_line("units", *config.units);
        os << "cited_doctypes: " << doctypes_text(config.cited_doctypes) << '\n';
        os << "citing_doctypes: " << doctypes_text(config.citing_doctypes) << '\n';
        std::vector<std::string> years;
        for (int y : config.publication_years) years.push_back(std::to_string(y));
        os << "publication_years: " << (years.empty() ? "all" : join(years, ",")) << '\n';
        std::vector<std::string> windows;
        for (const auto& w : config.windows) windows.push_back(w.label());
        os << "windows: " << join(windows, ",") << '\n';
        if (config.stats_window) os << "stats_window: " << *config.stats_window << '\n';
        os << "min_pubs: " << config.min_pubs << '\n';
    }
    os << "alpha: " << text::format_exact(config.alpha) << '\n';
    os << "strict: " << (config.strict ? "true" : "false") << '\n';
    std::sort(outputs.begin(), outputs.end());
    for (const auto& name : outputs) os << "output: " << name << " sha256:" << sha256_file(dir / name) << '\n';
    report::write_file(dir / "manifest.txt", os.str());
}

// ---- subcommands ------------------------------------------------------------

namespace {

struct CountResult {
    query::UnitAssignment assignment;
    std::vector<counting::ScoreTable> scores;       // per window
    std::vector<counting::AggregateResult> aggregates;
    AggregateTable table;
};

std::vector<query::UnitDefinition> load_units(const RunConfig& config) {
    if (!config.units) throw Error(ErrorCode::InvalidArgument, "a unit-definitions file is required (--units)");
    auto in = open_input(*config.units);
    return query::load_unit_definitions(in);
}

LoadedCorpus load_and_report(const RunConfig& config, std::ostream& log) {
    auto loaded = load_corpus(config, log);
    log << "corpus: " << loaded.corpus.entries().size() << " records (" << loaded.corpus.cited_count() << " cited, "
        << loaded.corpus.citing_count() << " citing), " << loaded.corpus.links().size() << " links, "
        << loaded.rejects << " rejects\n";
    return loaded;
}

CountResult count_all(const RunConfig& config, const Corpus& corpus, std::ostream& log) {
    if (config.windows.empty()) throw Error(ErrorCode::InvalidArgument, "at least one --window is required");
    CountResult result;
    result.assignment = query::assign_units(corpus, load_units(config));

    counting::CountingOptions options;
    options.cited_doctypes = config.cited_doctypes;
    options.citing_doctypes = config.citing_doctypes;
    options.publication_years = config.publication_years;
    options.threads = config.threads;

    std::set<std::string> warned;
    for (const auto& w : config.windows) {
        auto scores = counting::paper_scores(corpus, w, options);
        for (const auto& msg : scores.warnings) {
            if (warned.insert(msg).second) log << "warning: " << msg << '\n';
        }
        result.aggregates.push_back(counting::aggregate_units(result.assignment, scores, config.min_pubs));
        result.scores.push_back(std::move(scores));
    }
    for (const auto& s : result.aggregates.front().skipped)
        log << "note: unit " << s.unit << " skipped (P = " << s.p << " < " << config.min_pubs << ")\n";
    result.table = counting::to_aggregate_table(config.windows, result.aggregates);
    return result;
}

std::string assignment_csv(const fs::path& dir, const query::UnitAssignment& assignment) {
    return emit_to(dir, "assignment.csv", [&](std::ostream& os) {
        os << "unit,paper_id\n";
        for (const auto& u : assignment.units) {
            for (const auto& id : u.paper_ids) os << text::csv_escape(u.name) << ',' << text::csv_escape(id) << '\n';
        }
    });
}

std::vector<std::string> emit_counts(const fs::path& dir, const RunConfig& config, const CountResult& counted) {
    std::vector<std::string> files;
    for (std::size_t w = 0; w < config.windows.size(); ++w) {
        files.push_back(emit_to(dir, "scores_" + config.windows[w].label() + ".csv", [&](std::ostream& os) {
            counting::write_scores_csv(counted.assignment, counted.scores[w], os);
        }));
    }
    // Same shape the report stage reads back with --aggregate-table.
    files.push_back(emit_to(dir, "aggregates.csv", [&](std::ostream& os) { write_aggregate_table(counted.table, os); }));
    files.push_back(emit_to(dir, "aggregates_exact.csv", [&](std::ostream& os) {
        os << "unit,window,P,IC,FC_num,FC_den,FC_decimal\n";
        for (std::size_t w = 0; w < config.windows.size(); ++w) {
            for (const auto& a : counted.aggregates[w].included) {
                os << text::csv_escape(a.unit) << ',' << config.windows[w].label() << ',' << a.p << ',' << a.ic << ','
                   << numerator(a.fc).str() << ',' << denominator(a.fc).str() << ','
                   << counting::to_decimal(a.fc, 12) << '\n';
            }
        }
    }));
    files.push_back(emit_to(dir, "skipped_units.csv", [&](std::ostream& os) {
        os << "unit,P\n";
        for (const auto& s : counted.aggregates.front().skipped) os << text::csv_escape(s.unit) << ',' << s.p << '\n';
    }));
    return files;
}

std::size_t stats_window_index(const RunConfig& config) {
    if (!config.stats_window) return config.windows.size() - 1;
    for (std::size_t w = 0; w < config.windows.size(); ++w) {
        if (config.windows[w].label() == *config.stats_window) return w;
    }
    throw Error(ErrorCode::InvalidArgument, "stats window " + *config.stats_window + " is not a configured window");
}

}  // namespace

void run_ingest(const RunConfig& config, const std::optional<fs::path>& destination, std::ostream& stdout_stream,
                std::ostream& log) {
    config.validate();
    const auto loaded = load_corpus(config, log);
    const auto text = write_canonical(loaded.corpus);
    if (destination) {
        if (destination->has_parent_path()) ensure_dir(destination->parent_path());
        report::write_file(*destination, text);
    } else {
        stdout_stream << text;
    }
    log << "ingest: " << loaded.corpus.entries().size() << " records, " << loaded.rejects << " rejects\n";
}

void run_assign(const RunConfig& config, std::ostream& log) {
    config.validate();
    const auto loaded = load_and_report(config, log);
    const auto assignment = query::assign_units(loaded.corpus, load_units(config));
    ensure_dir(config.out);
    std::vector<std::string> files{assignment_csv(config.out, assignment)};
    for (const auto& u : assignment.units) log << "unit " << u.name << ": " << u.paper_ids.size() << " papers\n";
    write_manifest(config, "assign", config.out, files);
}

void run_count(const RunConfig& config, std::ostream& log) {
    config.validate();
    const auto loaded = load_and_report(config, log);
    const auto counted = count_all(config, loaded.corpus, log);
    ensure_dir(config.out);
    auto files = emit_counts(config.out, config, counted);
    files.push_back(assignment_csv(config.out, counted.assignment));
    write_manifest(config, "count", config.out, files);
}

void run_stats(const RunConfig& config, std::ostream& log) {
    config.validate();
    if (config.inputs.empty()) throw Error(ErrorCode::InvalidArgument, "a samples file is required (--input)");
    const auto samples = load_samples_file(config.inputs.front());
    std::vector<stats::NamedSample> kept;
    for (const auto& s : samples) {
        if (static_cast<std::int64_t>(s.values.size()) >= config.min_pubs) {
            kept.push_back(s);
        } else {
            log << "note: unit " << s.name << " skipped (n = " << s.values.size() << " < " << config.min_pubs << ")\n";
        }
    }
    const auto battery = run_battery(kept, config.alpha);
    for (const auto& e : battery.omnibus) {
        if (!e.result) log << "warning: " << stats::to_string(e.method) << " not computed: " << e.reason << '\n';
    }
    if (!battery.dunnett_reason.empty()) log << "warning: Dunnett's C not computed: " << battery.dunnett_reason << '\n';
    const auto files = emit_battery(battery, kept, config.out);
    write_manifest(config, "stats", config.out, files);
}

void run_report(const RunConfig& config, std::ostream& log) {
    config.validate();
    const auto table = load_aggregate_file(config.aggregate_path());
    const auto bundle = report::build_tables(table);
    const auto files = report::emit_tables(bundle, table, config.out);
    log << "report: " << table.rows.size() << " units, " << files.size() << " tables\n";
    write_manifest(config, "report", config.out, files);
}

void run_evaluate(const RunConfig& config, std::ostream& log) {
    config.validate();
    if (config.aggregate_mode()) {
        run_report(config, log);
        return;
    }
    const auto loaded = load_and_report(config, log);
    const auto counted = count_all(config, loaded.corpus, log);
    ensure_dir(config.out);

    auto files = emit_counts(config.out, config, counted);
    files.push_back(assignment_csv(config.out, counted.assignment));

    const auto bundle = report::build_tables(counted.table);
    for (auto& f : report::emit_tables(bundle, counted.table, config.out)) files.push_back(std::move(f));

    const auto w = stats_window_index(config);
    std::vector<stats::NamedSample> samples;
    for (const auto& agg : counted.aggregates[w].included)
        samples.push_back({agg.unit, counting::per_paper_samples(counted.assignment, counted.scores[w], agg.unit)});
    std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    const auto battery = run_battery(samples, config.alpha);
    for (const auto& e : battery.omnibus) {
        if (!e.result) log << "warning: " << stats::to_string(e.method) << " not computed: " << e.reason << '\n';
    }
    if (!battery.dunnett_reason.empty()) log << "warning: Dunnett's C not computed: " << battery.dunnett_reason << '\n';
    for (auto& f : emit_battery(battery, samples, config.out)) files.push_back(std::move(f));

    write_manifest(config, "evaluate", config.out, files);
    log << "evaluate: " << counted.table.rows.size() << " units, " << files.size() << " files written to "
        << config.out.string() << '\n';
}

int exit_code_for(ErrorCode code) noexcept { return code == ErrorCode::ConvergenceFailure ? 1 : 2; }

}  // namespace fraccite::pipeline
