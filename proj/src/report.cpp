#include "fraccite/report.hpp"

#include "fraccite/error.hpp"
#include "fraccite/text.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace fraccite::report {

std::string_view to_string(Indicator ind) noexcept {
    switch (ind) {
    case Indicator::P: return "P";
    case Indicator::IC: return "IC";
    case Indicator::FC: return "FC";
    case Indicator::ICP: return "ICP";
    case Indicator::FCP: return "FCP";
    }
    return "P";
}

double indicator_value(const AggregateRow& row, const RankKey& key) {
    switch (key.indicator) {
    case Indicator::P: return static_cast<double>(row.p);
    case Indicator::IC: return row.ic(key.window);
    case Indicator::FC: return row.fc(key.window);
    case Indicator::ICP: return row.icp(key.window);
    case Indicator::FCP: return row.fcp(key.window);
    }
    return 0.0;
}

std::string key_label(const AggregateTable& table, const RankKey& key) {
    if (key.indicator == Indicator::P) return "P";
    return std::string(to_string(key.indicator)) + "_" + table.window_labels.at(key.window);
}

std::size_t Ranking::rank_of(std::string_view unit) const {
    for (const auto& e : entries) {
        if (e.unit == unit) return e.rank;
    }
    return 0;
}

Ranking rank_units(const AggregateTable& table, const RankKey& key) {
    Ranking ranking;
    ranking.label = key_label(table, key);
    for (const auto& row : table.rows) ranking.entries.push_back({0, row.unit, indicator_value(row, key)});
    std::sort(ranking.entries.begin(), ranking.entries.end(), [](const auto& a, const auto& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.unit < b.unit;
    });
    for (std::size_t i = 0; i < ranking.entries.size(); ++i) ranking.entries[i].rank = i + 1;
    return ranking;
}

std::vector<RankDelta> rank_change(const Ranking& a, const Ranking& b) {
    std::map<std::string, std::size_t, std::less<>> ranks_a;
    for (const auto& e : a.entries) ranks_a.emplace(e.unit, e.rank);
    if (ranks_a.size() != b.entries.size())
        throw Error(ErrorCode::UnitSetMismatch, a.label + " and " + b.label + " rank different unit sets");
    std::vector<RankDelta> out;
    for (const auto& e : b.entries) {
        const auto it = ranks_a.find(e.unit);
        if (it == ranks_a.end()) throw Error(ErrorCode::UnitSetMismatch, e.unit + " missing from " + a.label);
        out.push_back({e.unit, it->second, e.rank,
                       static_cast<long>(it->second) - static_cast<long>(e.rank)});
    }
    return out;
}

// ---- homogeneity graph ------------------------------------------------------

HomogeneityGraph build_homogeneity_graph(const std::vector<stats::PairwiseDecision>& decisions) {
    std::set<std::string> names;
    for (const auto& d : decisions) {
        names.insert(d.unit_i);
        names.insert(d.unit_j);
    }
    return build_homogeneity_graph(std::vector<std::string>(names.begin(), names.end()), decisions);
}

HomogeneityGraph build_homogeneity_graph(std::vector<std::string> units,
                                         const std::vector<stats::PairwiseDecision>& decisions) {
    std::sort(units.begin(), units.end());
    units.erase(std::unique(units.begin(), units.end()), units.end());
    std::map<std::string, std::size_t, std::less<>> index;
    for (std::size_t i = 0; i < units.size(); ++i) index.emplace(units[i], i);

    const std::size_t n = units.size();
    std::set<std::pair<std::size_t, std::size_t>> covered;
    HomogeneityGraph g;
    g.vertices = units;

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    for (const auto& d : decisions) {
        const auto a = index.find(d.unit_i);
        const auto b = index.find(d.unit_j);
        if (a == index.end() || b == index.end())
            throw Error(ErrorCode::IncompletePairCoverage, "decision names unknown unit");
        if (a->second == b->second) throw Error(ErrorCode::IncompletePairCoverage, "self pair " + d.unit_i);
        const auto key = std::minmax(a->second, b->second);
        if (!covered.insert(key).second)
            throw Error(ErrorCode::IncompletePairCoverage, "pair covered twice: " + d.unit_i + ", " + d.unit_j);
        if (!d.significant) {
            g.edges.emplace_back(units[key.first], units[key.second]);
            parent[root(key.first)] = root(key.second);
        }
    }
    if (covered.size() != n * (n - 1) / 2 && n > 1)
        throw Error(ErrorCode::IncompletePairCoverage, std::to_string(covered.size()) + " of " +
                                                           std::to_string(n * (n - 1) / 2) + " pairs decided");

    std::sort(g.edges.begin(), g.edges.end());
    g.density = n < 2 ? 0.0 : static_cast<double>(g.edges.size()) / (static_cast<double>(n * (n - 1)) / 2.0);

    std::map<std::size_t, std::vector<std::string>> by_root;
    for (std::size_t i = 0; i < n; ++i) by_root[root(i)].push_back(units[i]);
    for (auto& [r, members] : by_root) g.components.push_back(std::move(members));
    std::sort(g.components.begin(), g.components.end());
    return g;
}

namespace {

std::string dot_id(std::string_view name) {
    std::string out = "\"";
    for (char c : name) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string emit_graph_dot(const HomogeneityGraph& graph) {
    std::ostringstream os;
    os << "graph homogeneity {\n";
    os << "  // density: " << text::format_exact(graph.density) << '\n';
    os << "  // components: " << graph.components.size() << '\n';
    for (const auto& v : graph.vertices) os << "  " << dot_id(v) << ";\n";
    for (const auto& [a, b] : graph.edges) os << "  " << dot_id(a) << " -- " << dot_id(b) << ";\n";
    os << "}\n";
    return os.str();
}

// ---- tables -----------------------------------------------------------------

void write_indicator_table(const AggregateTable& table, std::ostream& out) {
    out << "unit,P";
    for (const auto& l : table.window_labels) {
        out << ",IC_" << l << ",IC_" << l << "_exact"
            << ",ICP_" << l << ",ICP_" << l << "_exact"
            << ",FC_" << l << ",FC_" << l << "_exact"
            << ",FCP_" << l << ",FCP_" << l << "_exact";
    }
    out << '\n';
    for (const auto& row : table.rows) {
        out << text::csv_escape(row.unit) << ',' << row.p;
        for (std::size_t w = 0; w < table.window_labels.size(); ++w) {
            out << ',' << text::format_fixed(row.ic(w), 0) << ',' << text::format_exact(row.ic(w))
                << ',' << text::format_fixed(row.icp(w), 2) << ',' << text::format_exact(row.icp(w))
                << ',' << text::format_fixed(row.fc(w), 2) << ',' << text::format_exact(row.fc(w))
                << ',' << text::format_fixed(row.fcp(w), 2) << ',' << text::format_exact(row.fcp(w));
        }
        out << '\n';
    }
}

void write_ranking(const Ranking& ranking, std::ostream& out) {
    out << "rank,unit,value,value_exact\n";
    for (const auto& e : ranking.entries) {
        out << e.rank << ',' << text::csv_escape(e.unit) << ',' << text::format_fixed(e.value, 2) << ','
            << text::format_exact(e.value) << '\n';
    }
}

void write_rank_change(const std::vector<RankDelta>& deltas, std::ostream& out) {
    out << "unit,rank_a,rank_b,delta\n";
    for (const auto& d : deltas) {
        out << text::csv_escape(d.unit) << ',' << d.rank_a << ',' << d.rank_b << ',';
        if (d.delta > 0) out << '+';
        out << d.delta << '\n';
    }
}

void write_correlations(const stats::CorrelationMatrix& m, std::ostream& out) {
    out << "row,column,triangle,method,r,p_value,stars\n";
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
        for (std::size_t j = 0; j < m.labels.size(); ++j) {
            out << text::csv_escape(m.labels[i]) << ',' << text::csv_escape(m.labels[j]) << ',';
            if (i == j) {
                out << "diagonal,,1,,\n";
            } else if (i > j) {
                out << "lower,pearson," << text::format_exact(m.pearson[i][j]) << ','
                    << text::format_exact(m.pearson_p[i][j]) << ','
                    << stats::CorrelationMatrix::stars(m.pearson_p[i][j]) << '\n';
            } else {
                out << "upper,spearman," << text::format_exact(m.spearman[i][j]) << ','
                    << text::format_exact(m.spearman_p[i][j]) << ','
                    << stats::CorrelationMatrix::stars(m.spearman_p[i][j]) << '\n';
            }
        }
    }
}

void write_correlation_grid(const stats::CorrelationMatrix& m, std::ostream& out) {
    out << "parameter";
    for (const auto& l : m.labels) out << ',' << text::csv_escape(l);
    out << '\n';
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
        out << text::csv_escape(m.labels[i]);
        for (std::size_t j = 0; j < m.labels.size(); ++j) {
            out << ',';
            if (i == j) continue;
            const double r = i > j ? m.pearson[i][j] : m.spearman[i][j];
            const double p = i > j ? m.pearson_p[i][j] : m.spearman_p[i][j];
            out << text::format_fixed(r, 3);
            if (const auto s = stats::CorrelationMatrix::stars(p); !s.empty()) out << '(' << s << ')';
        }
        out << '\n';
    }
}

void write_decisions(const std::vector<stats::PairwiseDecision>& decisions, std::ostream& out) {
    out << "unit_i,unit_j,mean_diff,critical_diff,significant\n";
    for (const auto& d : decisions) {
        out << text::csv_escape(d.unit_i) << ',' << text::csv_escape(d.unit_j) << ','
            << text::format_exact(d.mean_diff) << ',' << text::format_exact(d.critical_diff) << ','
            << (d.significant ? "true" : "false") << '\n';
    }
}

std::vector<stats::NamedColumn> indicator_columns(const AggregateTable& table) {
    std::vector<RankKey> keys{{Indicator::P, 0}};
    for (auto ind : {Indicator::ICP, Indicator::FCP, Indicator::IC, Indicator::FC}) {
        for (std::size_t w = 0; w < table.window_labels.size(); ++w) keys.push_back({ind, w});
    }
    std::vector<stats::NamedColumn> cols;
    for (const auto& key : keys) {
        stats::NamedColumn col{key_label(table, key), {}};
        for (const auto& row : table.rows) col.values.push_back(indicator_value(row, key));
        cols.push_back(std::move(col));
    }
    return cols;
}

TableBundle build_tables(const AggregateTable& table) {
    TableBundle bundle;
    bundle.rankings.push_back(rank_units(table, {Indicator::P, 0}));
    for (std::size_t w = 0; w < table.window_labels.size(); ++w) {
        for (auto ind : {Indicator::IC, Indicator::FC, Indicator::ICP, Indicator::FCP})
            bundle.rankings.push_back(rank_units(table, {ind, w}));
        const auto ic = rank_units(table, {Indicator::IC, w});
        const auto fc = rank_units(table, {Indicator::FC, w});
        const auto icp = rank_units(table, {Indicator::ICP, w});
        const auto fcp = rank_units(table, {Indicator::FCP, w});
        bundle.rank_changes.emplace_back(ic.label + "_vs_" + fc.label, rank_change(ic, fc));
        bundle.rank_changes.emplace_back(icp.label + "_vs_" + fcp.label, rank_change(icp, fcp));
    }
    if (table.rows.size() >= 3) {
        bundle.matrix = stats::correlation_matrix(indicator_columns(table), table.rows.size());
        bundle.has_matrix = true;
    }
    return bundle;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

std::vector<std::string> emit_tables(const TableBundle& bundle, const AggregateTable& table,
                                     const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

    std::vector<std::string> written;
    auto emit = [&](const std::string& name, auto&& writer) {
        std::ostringstream os;
        writer(os);
        write_file(dir / name, os.str());
        written.push_back(name);
    };

    emit("indicators.csv", [&](std::ostream& os) { write_indicator_table(table, os); });
    for (const auto& r : bundle.rankings)
        emit("ranking_" + r.label + ".csv", [&](std::ostream& os) { write_ranking(r, os); });
    for (const auto& [label, deltas] : bundle.rank_changes)
        emit("rank_change_" + label + ".csv", [&](std::ostream& os) { write_rank_change(deltas, os); });
    emit("correlations.csv", [&](std::ostream& os) {
        if (bundle.has_matrix) {
            write_correlations(bundle.matrix, os);
        } else {
            write_correlations(stats::CorrelationMatrix{}, os);
        }
    });
    emit("correlation_grid.csv", [&](std::ostream& os) {
        write_correlation_grid(bundle.has_matrix ? bundle.matrix : stats::CorrelationMatrix{}, os);
    });
    std::sort(written.begin(), written.end());
    return written;
}

}  // namespace fraccite::report
