#include "fraccite/error.hpp"
#include "fraccite/report.hpp"

#include "support/test_support.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/graphviz.hpp>
#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace fraccite;
using namespace fraccite::report;

namespace {

AggregateTable table1() {
    std::ifstream in(testing::source_path("data/table1.csv"));
    return load_aggregate_table(in);
}

stats::PairwiseDecision decision(std::string a, std::string b, bool significant) {
    return {std::move(a), std::move(b), 0.0, 1.0, significant};
}

std::vector<stats::PairwiseDecision> all_pairs(const std::vector<std::string>& units, bool significant) {
    std::vector<stats::PairwiseDecision> out;
    for (std::size_t i = 0; i < units.size(); ++i) {
        for (std::size_t j = i + 1; j < units.size(); ++j) out.push_back(decision(units[i], units[j], significant));
    }
    return out;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an exception");
    return ErrorCode::IoError;
}

std::size_t reloaded_edge_count(const std::string& dot) {
    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS,
                                        boost::property<boost::vertex_name_t, std::string>>;
    Graph g;
    boost::dynamic_properties dp(boost::ignore_other_properties);
    dp.property("node_id", boost::get(boost::vertex_name, g));
    std::istringstream in(dot);
    REQUIRE(boost::read_graphviz(in, g, dp));
    return boost::num_edges(g);
}

AggregateTable random_table(testing::Rng& rng, std::size_t n) {
    AggregateTable t;
    t.window_labels = {"w1"};
    for (std::size_t i = 0; i < n; ++i) {
        AggregateRow r;
        r.unit = "u" + std::to_string(rng.integer(0, 999)) + "_" + std::to_string(i);
        r.p = rng.integer(5, 60);
        const double ic = static_cast<double>(rng.integer(0, 40));
        r.counts.push_back({ic, static_cast<double>(rng.integer(0, 40)) / 8.0});
        t.rows.push_back(r);
    }
    return t;
}

}  // namespace

TEST_CASE("rank units: Table 1 by FC/P over the long window") {
    const auto t = table1();
    const auto r = rank_units(t, {Indicator::FCP, 1});
    REQUIRE(r.entries.size() == 27);
    CHECK(r.label == "FCP_2005-2009");
    CHECK(r.entries[0].unit == "Dep Chem");
    CHECK(r.entries[0].value == doctest::Approx(0.41178).epsilon(1e-4));
    CHECK(r.entries[1].unit == "Dep Chinese Languages");
    CHECK(r.entries[2].unit == "Dep Phys");
    // Both round to 0.26 for display; full precision decides.
    CHECK(r.entries[1].value > r.entries[2].value);
    for (std::size_t i = 0; i < r.entries.size(); ++i) CHECK(r.entries[i].rank == i + 1);
}

TEST_CASE("rank units: Table 1 by FC over the long window") {
    const auto r = rank_units(table1(), {Indicator::FC, 1});
    CHECK(r.entries[0].unit == "Dep Chem");
    CHECK(r.entries[0].value == doctest::Approx(166.36));
}

TEST_CASE("rank units: ties go to the smaller name") {
    AggregateTable t;
    t.window_labels = {"3"};
    t.rows = {{"beta", 10, {{5, 1}}}, {"alpha", 10, {{5, 1}}}};
    const auto r = rank_units(t, {Indicator::FCP, 0});
    CHECK(r.entries[0].unit == "alpha");
    CHECK(r.entries[1].unit == "beta");
    CHECK(r.entries[1].rank == 2);
    CHECK(r.rank_of("beta") == 2);
    CHECK(r.rank_of("gamma") == 0);
    CHECK(rank_units(AggregateTable{{"3"}, {}}, {Indicator::P, 0}).entries.empty());
}

TEST_CASE("rank change: Table 1 IC/P to FC/P over the long window") {
    const auto t = table1();
    const auto deltas = rank_change(rank_units(t, {Indicator::ICP, 1}), rank_units(t, {Indicator::FCP, 1}));
    auto find = [&](const std::string& unit) {
        return *std::find_if(deltas.begin(), deltas.end(), [&](const RankDelta& d) { return d.unit == unit; });
    };
    const auto chinese = find("Dep Chinese Languages");
    CHECK(chinese.rank_a == 19);
    CHECK(chinese.rank_b == 2);
    CHECK(chinese.delta == 17);
    const auto life = find("Sch Life Sci");
    CHECK(life.rank_a == 7);
    CHECK(life.rank_b == 13);
    CHECK(life.delta == -6);
}

TEST_CASE("rank change: identity and mismatch") {
    const auto r = rank_units(table1(), {Indicator::IC, 0});
    for (const auto& d : rank_change(r, r)) CHECK(d.delta == 0);

    AggregateTable other;
    other.window_labels = {"x"};
    other.rows = {{"Dep Chem", 10, {{1, 1}}}};
    CHECK(code_of([&] { rank_change(r, rank_units(other, {Indicator::IC, 0})); }) == ErrorCode::UnitSetMismatch);
}

TEST_CASE("homogeneity graph: complete and empty") {
    const std::vector<std::string> units{"A", "B", "C"};
    const auto full = build_homogeneity_graph(all_pairs(units, false));
    CHECK(full.edges.size() == 3);
    CHECK(full.density == 1.0);
    CHECK(full.components.size() == 1);

    const auto none = build_homogeneity_graph(all_pairs(units, true));
    CHECK(none.edges.empty());
    CHECK(none.density == 0.0);
    CHECK(none.components == std::vector<std::vector<std::string>>{{"A"}, {"B"}, {"C"}});
}

TEST_CASE("homogeneity graph: four units with edges AB and BC") {
    auto d = all_pairs({"A", "B", "C", "D"}, true);
    for (auto& p : d) {
        if ((p.unit_i == "A" && p.unit_j == "B") || (p.unit_i == "B" && p.unit_j == "C")) p.significant = false;
    }
    const auto g = build_homogeneity_graph(d);
    CHECK(g.vertices == std::vector<std::string>{"A", "B", "C", "D"});
    CHECK(g.density == doctest::Approx(2.0 / 6.0));
    CHECK(g.components == std::vector<std::vector<std::string>>{{"A", "B", "C"}, {"D"}});

    const auto dot = emit_graph_dot(g);
    const auto ab = dot.find("\"A\" -- \"B\";");
    const auto bc = dot.find("\"B\" -- \"C\";");
    REQUIRE(ab != std::string::npos);
    REQUIRE(bc != std::string::npos);
    CHECK(ab < bc);
    CHECK(dot.find("// components: 2") != std::string::npos);
    CHECK(reloaded_edge_count(dot) == 2);
}

TEST_CASE("homogeneity graph: coverage errors") {
    auto d = all_pairs({"A", "B", "C"}, false);
    d.pop_back();
    CHECK(code_of([&] { build_homogeneity_graph(d); }) == ErrorCode::IncompletePairCoverage);

    auto dup = all_pairs({"A", "B"}, false);
    dup.push_back(decision("B", "A", true));
    CHECK(code_of([&] { build_homogeneity_graph(dup); }) == ErrorCode::IncompletePairCoverage);

    CHECK(code_of([&] { build_homogeneity_graph({"A", "B"}, {decision("A", "Z", false)}); }) ==
          ErrorCode::IncompletePairCoverage);
    CHECK(code_of([&] { build_homogeneity_graph({"A", "B"}, {decision("A", "A", false)}); }) ==
          ErrorCode::IncompletePairCoverage);
}

TEST_CASE("homogeneity graph: empty and single vertex") {
    const auto empty = build_homogeneity_graph({});
    CHECK(empty.vertices.empty());
    CHECK(empty.density == 0.0);
    const auto dot = emit_graph_dot(empty);
    CHECK(dot.rfind("graph homogeneity {", 0) == 0);
    CHECK(reloaded_edge_count(dot) == 0);

    const auto one = build_homogeneity_graph({"solo"}, {});
    CHECK(one.components.size() == 1);
    CHECK(one.density == 0.0);
}

TEST_CASE("dot output survives quoting of unit names") {
    const auto g = build_homogeneity_graph({decision("Dep \"X\" & Y", "Sch Z", false)});
    CHECK(reloaded_edge_count(emit_graph_dot(g)) == 1);
}

TEST_CASE("indicator table: display and exact columns") {
    const auto t = table1();
    std::ostringstream out;
    write_indicator_table(t, out);
    const auto csv = out.str();
    const auto header = csv.substr(0, csv.find('\n'));
    CHECK(header.rfind("unit,P,IC_2005-2007,IC_2005-2007_exact,ICP_2005-2007,ICP_2005-2007_exact,", 0) == 0);
    const auto line_start = csv.find("\nDep Chem,");
    REQUIRE(line_start != std::string::npos);
    const auto line = csv.substr(line_start + 1, csv.find('\n', line_start + 1) - line_start - 1);
    const auto cells = text::split_csv_line(line);
    const auto cols = text::split_csv_line(header);
    const auto at = [&](const std::string& name) {
        return cells.at(static_cast<std::size_t>(std::find(cols.begin(), cols.end(), name) - cols.begin()));
    };
    CHECK(at("FCP_2005-2009") == "0.41");
    CHECK(at("FCP_2005-2009_exact").rfind("0.411782", 0) == 0);

    std::ostringstream empty;
    write_indicator_table(AggregateTable{{"3"}, {}}, empty);
    const auto header_only = empty.str();
    CHECK(std::count(header_only.begin(), header_only.end(), '\n') == 1);
}

TEST_CASE("rank change and decision writers") {
    std::ostringstream rc;
    write_rank_change({{"a", 3, 1, 2}, {"b", 1, 2, -1}, {"c", 2, 3, -1}}, rc);
    CHECK(rc.str() == "unit,rank_a,rank_b,delta\na,3,1,+2\nb,1,2,-1\nc,2,3,-1\n");

    std::ostringstream dec;
    write_decisions({{"a", "b", 1.5, 2.0, false}}, dec);
    CHECK(dec.str() == "unit_i,unit_j,mean_diff,critical_diff,significant\na,b,1.5,2,false\n");
}

TEST_CASE("correlation outputs: lower triangle Pearson, upper Spearman") {
    const auto t = table1();
    const auto b = build_tables(t);
    REQUIRE(b.has_matrix);
    std::ostringstream longform, grid;
    write_correlations(b.matrix, longform);
    write_correlation_grid(b.matrix, grid);
    CHECK(longform.str().rfind("row,column,triangle,method,r,p_value,stars\n", 0) == 0);
    CHECK(longform.str().find(",lower,pearson,") != std::string::npos);
    CHECK(longform.str().find(",upper,spearman,") != std::string::npos);
    CHECK(grid.str().rfind("parameter,", 0) == 0);
    CHECK(b.matrix.labels.front() == "P");
    CHECK(b.matrix.labels.size() == 9);
}

TEST_CASE("emit tables: fixed file set and determinism") {
    const auto t = table1();
    const auto dir1 = std::filesystem::temp_directory_path() / "fraccite_report_a";
    const auto dir2 = std::filesystem::temp_directory_path() / "fraccite_report_b";
    for (const auto& d : {dir1, dir2}) {
        std::filesystem::remove_all(d);
        std::filesystem::create_directories(d);
    }
    const auto f1 = emit_tables(build_tables(t), t, dir1);
    const auto f2 = emit_tables(build_tables(t), t, dir2);
    CHECK(f1 == f2);
    CHECK(std::is_sorted(f1.begin(), f1.end()));
    CHECK(std::find(f1.begin(), f1.end(), "ranking_FCP_2005-2009.csv") != f1.end());
    CHECK(std::find(f1.begin(), f1.end(), "rank_change_ICP_2005-2009_vs_FCP_2005-2009.csv") != f1.end());
    for (const auto& name : f1) {
        std::ifstream a(dir1 / name), b(dir2 / name);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        CAPTURE(name);
        CHECK(sa.str() == sb.str());
    }
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);

    CHECK(code_of([&] { write_file("/nonexistent-dir/x.csv", "x"); }) == ErrorCode::IoError);
}

TEST_CASE("property: re-ranking the exact column reproduces the ranks") {
    testing::Rng rng(13);
    for (int iter = 0; iter < 100; ++iter) {
        const auto t = random_table(rng, static_cast<std::size_t>(rng.integer(1, 30)));
        const auto r = rank_units(t, {Indicator::FCP, 0});
        std::ostringstream out;
        write_ranking(r, out);
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        std::vector<std::pair<double, std::string>> rows;
        std::vector<std::size_t> ranks;
        while (std::getline(in, line)) {
            const auto cells = text::split_csv_line(line);
            ranks.push_back(static_cast<std::size_t>(*text::parse_int(cells[0])));
            rows.emplace_back(*text::parse_double(cells[3]), cells[1]);
        }
        auto sorted = rows;
        std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        CHECK(sorted == rows);
        for (std::size_t i = 0; i < ranks.size(); ++i) CHECK(ranks[i] == i + 1);
    }
}

TEST_CASE("property: rank change is antisymmetric") {
    testing::Rng rng(17);
    for (int iter = 0; iter < 100; ++iter) {
        auto t = random_table(rng, static_cast<std::size_t>(rng.integer(1, 25)));
        const auto a = rank_units(t, {Indicator::ICP, 0});
        const auto b = rank_units(t, {Indicator::FCP, 0});
        const auto ab = rank_change(a, b);
        const auto ba = rank_change(b, a);
        for (const auto& d : ab) {
            const auto it = std::find_if(ba.begin(), ba.end(), [&](const RankDelta& x) { return x.unit == d.unit; });
            REQUIRE(it != ba.end());
            CHECK(it->delta == -d.delta);
        }
        long sum = 0;
        for (const auto& d : ab) sum += d.delta;
        CHECK(sum == 0);
    }
}

TEST_CASE("property: components never increase as edges are added") {
    testing::Rng rng(19);
    for (int iter = 0; iter < 100; ++iter) {
        const auto n = static_cast<std::size_t>(rng.integer(2, 12));
        std::vector<std::string> units;
        for (std::size_t i = 0; i < n; ++i) units.push_back("v" + std::to_string(i + 10));
        auto d = all_pairs(units, true);
        std::vector<std::size_t> order(d.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(i) - 1))]);
        }
        std::size_t prev = n;
        std::size_t edges = 0;
        for (std::size_t idx : order) {
            d[idx].significant = false;
            ++edges;
            const auto g = build_homogeneity_graph(units, d);
            CHECK(g.components.size() <= prev);
            CHECK(g.edges.size() == edges);
            CHECK(g.density >= 0.0);
            CHECK(g.density <= 1.0);
            CHECK(g.density == doctest::Approx(static_cast<double>(edges) / static_cast<double>(n * (n - 1) / 2)));
            std::size_t members = 0;
            for (const auto& c : g.components) members += c.size();
            CHECK(members == n);
            prev = g.components.size();
        }
        CHECK(prev == 1);
    }
}
