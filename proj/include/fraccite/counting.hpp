#pragma once

// Integer (IC) and fractional (FC) citation counts per paper and per unit.
//
// A citing document with a reference list of length k credits each cited
// document it links to with 1/k. Sums are kept as exact rationals so that the
// result does not depend on accumulation order or worker count; conversion to
// double happens only at the reporting and statistics boundary.

#include "fraccite/corpus.hpp"
#include "fraccite/unitquery.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fraccite::counting {

using Rational = boost::multiprecision::cpp_rational;

struct Window {
    int start = 0;
    int end = 0;

    bool contains(int year) const noexcept { return year >= start && year <= end; }
    bool within(const Window& other) const noexcept { return start >= other.start && end <= other.end; }
    std::string label() const;  // "2005-2009"

    // "2005:2009"; throws Error{InvalidArgument}.
    static Window parse(std::string_view s);

    bool operator==(const Window&) const = default;
};

// Reference-list length of a citing record: NR when present and positive,
// otherwise the number of extracted cited ids. Never smaller than the cited-id
// list. Returns 0 when neither source gives a length.
std::int64_t reference_count(const PublicationRecord& citing) noexcept;

// Exactly 1/k. Throws Error{ZeroReferences} when k is 0.
Rational fractional_weight(const PublicationRecord& citing);

struct PaperImpact {
    std::string paper_id;
    std::int64_t ic = 0;
    Rational fc = 0;

    bool operator==(const PaperImpact&) const = default;
};

// Doctype sets hold lowercase canonical names ("article", "proceedings paper",
// or an Other label). An empty set admits everything.
using DocTypeSet = std::set<std::string>;

DocTypeSet default_cited_doctypes();
DocTypeSet parse_doctype_list(std::string_view comma_separated);
bool admits(const DocTypeSet& set, const DocType& type);

struct CountingOptions {
    DocTypeSet cited_doctypes = default_cited_doctypes();
    DocTypeSet citing_doctypes;          // empty: citing side is not type-filtered
    std::set<int> publication_years;     // empty: every cited-side year
    unsigned threads = 1;
};

struct ScoreTable {
    std::map<std::string, PaperImpact> papers;  // every eligible cited paper, zeros included
    std::vector<std::string> warnings;
};

ScoreTable paper_scores(const Corpus& corpus, const Window& window, const CountingOptions& options = {});

struct UnitAggregate {
    std::string unit;
    std::int64_t p = 0;
    std::int64_t ic = 0;
    Rational fc = 0;
    double icp = 0.0;  // ic / p
    double fcp = 0.0;  // fc / p, converted once from the exact quotient

    Rational fcp_exact() const { return fc / p; }
};

struct SkippedUnit {
    std::string unit;
    std::int64_t p = 0;
};

struct AggregateResult {
    std::vector<UnitAggregate> included;  // assignment order
    std::vector<SkippedUnit> skipped;     // p < min_pubs
};

// Whole counting at the unit level: a paper in two units counts fully in both.
// Only papers present in `scores` (i.e. eligible) count toward p.
AggregateResult aggregate_units(const query::UnitAssignment& assignment, const ScoreTable& scores,
                                std::int64_t min_pubs = 5);

// Per-paper fractional counts of one unit, one value per paper in p, sorted by
// paper id. Throws Error{UnknownUnit}.
std::vector<double> per_paper_samples(const query::UnitAssignment& assignment, const ScoreTable& scores,
                                      std::string_view unit);

// Combines per-window aggregates (same unit set, same order) into the
// published-table shape used by ranking and correlation.
AggregateTable to_aggregate_table(const std::vector<Window>& windows,
                                  const std::vector<AggregateResult>& per_window);

// Rounded half-up decimal of an exact non-negative rational.
std::string to_decimal(const Rational& value, int places);
double to_double(const Rational& value);

// paper_id,unit,ic,fc_num,fc_den,fc_decimal (12 places); one row per
// (unit, assigned eligible paper), units in assignment order.
void write_scores_csv(const query::UnitAssignment& assignment, const ScoreTable& scores, std::ostream& out);

}  // namespace fraccite::counting
