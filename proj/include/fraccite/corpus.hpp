#pragma once

// Publication records, the tagged flat-file reader, the canonical JSON-lines
// interchange format and the published-aggregate CSV reader.

#include "fraccite/error.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fraccite {

enum class DocKind { Article, Review, ProceedingsPaper, Other };

struct DocType {
    DocKind kind = DocKind::Other;
    std::string label;  // only meaningful for Other

    // Case-insensitive: "Article", "Review", "Proceedings Paper"; anything else
    // is kept verbatim as Other.
    static DocType from_string(std::string_view s);
    std::string name() const;

    bool operator==(const DocType&) const = default;
};

struct PublicationRecord {
    std::string id;
    int year = 0;
    DocType doctype;
    std::vector<std::string> addresses;
    std::optional<std::int64_t> nrefs;
    std::vector<std::string> cited_ids;
    std::optional<std::string> doi;

    bool operator==(const PublicationRecord&) const = default;
};

enum class Side { Cited, Citing, Both };

std::string_view to_string(Side side) noexcept;
std::optional<Side> side_from_string(std::string_view s) noexcept;

struct CorpusEntry {
    PublicationRecord record;
    Side side = Side::Cited;

    bool on_cited_side() const noexcept { return side != Side::Citing; }
    bool on_citing_side() const noexcept { return side != Side::Cited; }

    bool operator==(const CorpusEntry&) const = default;
};

struct Link {
    std::string citing_id;
    std::string cited_id;

    auto operator<=>(const Link&) const = default;
};

// Immutable after construction. Links are derived: every cited_id of a
// citing-side record that resolves (by id, then case-insensitive DOI) to a
// cited-side record becomes one link. Unresolved references are kept in the
// record and still count toward its reference-list length.
class Corpus {
public:
    Corpus() = default;
    // Throws Error{DuplicateId} on repeated ids and Error{MalformedField} on
    // records violating the record invariants.
    explicit Corpus(std::vector<CorpusEntry> entries);

    const std::vector<CorpusEntry>& entries() const noexcept { return entries_; }
    const std::vector<Link>& links() const noexcept { return links_; }

    const CorpusEntry* find(std::string_view id) const;
    std::size_t cited_count() const noexcept;
    std::size_t citing_count() const noexcept;

    bool operator==(const Corpus& other) const { return entries_ == other.entries_; }

private:
    std::vector<CorpusEntry> entries_;
    std::vector<Link> links_;
    std::unordered_map<std::string, std::size_t> index_;
};

// ---- tagged flat-file format -------------------------------------------------

struct ParseIssue {
    ErrorCode code;
    std::size_t line;  // 1-based line where the offending field or record starts
    std::string message;
};

struct TaggedParseResult {
    std::vector<PublicationRecord> records;
    std::vector<ParseIssue> errors;
};

// Bad records are rejected individually and reported in `errors`; parsing
// continues with the next record.
TaggedParseResult parse_tagged(std::istream& in);

// Strips "[authors]" groups and splits what remains on ';'.
std::vector<std::string> split_address_line(std::string_view line);
// The value following "DOI " in a cited-reference line, if any.
std::optional<std::string> extract_doi(std::string_view cr_line);

// ---- canonical format -------------------------------------------------------

inline constexpr std::string_view kCanonicalFormatName = "fraccite-canonical";

Corpus load_canonical(std::istream& in);
void write_canonical(const Corpus& corpus, std::ostream& out);
std::string write_canonical(const Corpus& corpus);

// ---- published aggregate table ----------------------------------------------

struct WindowCounts {
    double ic = 0.0;
    double fc = 0.0;
};

struct AggregateRow {
    std::string unit;
    std::int64_t p = 0;
    std::vector<WindowCounts> counts;  // parallel to AggregateTable::window_labels

    double ic(std::size_t w) const { return counts.at(w).ic; }
    double fc(std::size_t w) const { return counts.at(w).fc; }
    double icp(std::size_t w) const { return counts.at(w).ic / static_cast<double>(p); }
    double fcp(std::size_t w) const { return counts.at(w).fc / static_cast<double>(p); }
};

struct AggregateTable {
    std::vector<std::string> window_labels;
    std::vector<AggregateRow> rows;
};

// Header: unit,P then IC<label>,FC<label> pairs (e.g. unit,P,IC3,FC3,IC5,FC5).
// Ratio columns (ICP*, FCP*, IC/P*, FC/P*) and *_exact columns are ignored:
// ratios are always recomputed from the counts.
AggregateTable load_aggregate_table(std::istream& in);
void write_aggregate_table(const AggregateTable& table, std::ostream& out);

}  // namespace fraccite
