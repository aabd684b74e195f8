#pragma once

// Rankings, rank changes, the homogeneity graph and table/graph emission.

#include "fraccite/corpus.hpp"
#include "fraccite/stats.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fraccite::report {

enum class Indicator { P, IC, FC, ICP, FCP };

std::string_view to_string(Indicator ind) noexcept;

struct RankKey {
    Indicator indicator = Indicator::FCP;
    std::size_t window = 0;  // index into AggregateTable::window_labels; ignored for P
};

double indicator_value(const AggregateRow& row, const RankKey& key);
// e.g. "FCP_2005-2009", "P"
std::string key_label(const AggregateTable& table, const RankKey& key);

struct RankEntry {
    std::size_t rank = 0;  // 1-based, no gaps
    std::string unit;
    double value = 0.0;
};

struct Ranking {
    std::string label;
    std::vector<RankEntry> entries;

    std::size_t rank_of(std::string_view unit) const;  // 0 when absent
};

// Descending by value at full precision; equal values ordered by unit name.
Ranking rank_units(const AggregateTable& table, const RankKey& key);

struct RankDelta {
    std::string unit;
    std::size_t rank_a = 0;
    std::size_t rank_b = 0;
    long delta = 0;  // rank_a - rank_b; positive means the unit rose in b
};

// Ordered as in `b`. Throws Error{UnitSetMismatch}.
std::vector<RankDelta> rank_change(const Ranking& a, const Ranking& b);

struct HomogeneityGraph {
    std::vector<std::string> vertices;                        // sorted
    std::vector<std::pair<std::string, std::string>> edges;   // (min, max), sorted
    double density = 0.0;
    std::vector<std::vector<std::string>> components;         // each sorted; ordered by first member
};

// Edge between every pair whose difference is not significant. Vertices are
// the units named in the decisions; every pair must be covered exactly once.
// Throws Error{IncompletePairCoverage}.
HomogeneityGraph build_homogeneity_graph(const std::vector<stats::PairwiseDecision>& decisions);
HomogeneityGraph build_homogeneity_graph(std::vector<std::string> units,
                                         const std::vector<stats::PairwiseDecision>& decisions);

std::string emit_graph_dot(const HomogeneityGraph& graph);

// ---- tabular output ---------------------------------------------------------

// Indicator table: counts shown as integers (IC) or 2 decimals (FC), ratios as
// 2 decimals, with full-precision `_exact` columns alongside.
void write_indicator_table(const AggregateTable& table, std::ostream& out);
void write_ranking(const Ranking& ranking, std::ostream& out);
void write_rank_change(const std::vector<RankDelta>& deltas, std::ostream& out);
// Long format: row,column,triangle,method,r,p_value,stars
void write_correlations(const stats::CorrelationMatrix& m, std::ostream& out);
// Square display matrix: Pearson below, Spearman above the diagonal.
void write_correlation_grid(const stats::CorrelationMatrix& m, std::ostream& out);
void write_decisions(const std::vector<stats::PairwiseDecision>& decisions, std::ostream& out);

// The parameter columns correlated against each other: P, then IC/P, FC/P,
// IC and FC for every window.
std::vector<stats::NamedColumn> indicator_columns(const AggregateTable& table);

struct TableBundle {
    std::vector<Ranking> rankings;
    std::vector<std::pair<std::string, std::vector<RankDelta>>> rank_changes;
    stats::CorrelationMatrix matrix;
    bool has_matrix = false;
};

// Rankings for every indicator/window, IC→FC and IC/P→FC/P rank changes per
// window, and the correlation matrix when at least 3 units are present.
TableBundle build_tables(const AggregateTable& table);

// Writes indicators.csv, ranking_<key>.csv, rank_change_<a>_vs_<b>.csv,
// correlations.csv and correlation_grid.csv into `dir`. Returns the relative
// file names written, sorted. Throws Error{IoError}.
std::vector<std::string> emit_tables(const TableBundle& bundle, const AggregateTable& table,
                                     const std::filesystem::path& dir);

// Writes `content` to `path`, throwing Error{IoError} on failure.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace fraccite::report
