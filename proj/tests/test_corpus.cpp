#include "fraccite/corpus.hpp"
#include "fraccite/error.hpp"

#include "support/test_support.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace fraccite;

namespace {

TaggedParseResult parse(const std::string& text) {
    std::istringstream in(text);
    return parse_tagged(in);
}

Corpus canonical(const std::string& text) {
    std::istringstream in(text);
    return load_canonical(in);
}

PublicationRecord make(std::string id, int year, std::vector<std::string> cites = {},
                       std::optional<std::int64_t> nrefs = std::nullopt) {
    PublicationRecord r;
    r.id = std::move(id);
    r.year = year;
    r.doctype = DocType::from_string("Article");
    r.cited_ids = std::move(cites);
    r.nrefs = nrefs;
    return r;
}

}  // namespace

TEST_CASE("tagged: direct field mapping") {
    const auto result = parse(
        "FN Thomson Reuters Web of Science\nVR 1.0\n"
        "PT J\nUT WOS:1\nPY 2005\nDT Article\nNR 6\nER\nEF\n");
    REQUIRE(result.errors.empty());
    REQUIRE(result.records.size() == 1);
    const auto& r = result.records[0];
    CHECK(r.id == "WOS:1");
    CHECK(r.year == 2005);
    CHECK(r.doctype.kind == DocKind::Article);
    CHECK(r.nrefs == 6);
}

TEST_CASE("tagged: DOI extraction from continuation lines") {
    const auto result = parse(
        "PT J\nUT WOS:2\nPY 2006\n"
        "CR Smith J, 2001, J A, V1, P1, DOI 10.1/a\n"
        "   Jones K, 2002, J B, V2, P2, DOI 10.1/b\n"
        "   Brown L, 1999, J C, V3, P3\n"
        "ER\nEF\n");
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].cited_ids == std::vector<std::string>{"10.1/a", "10.1/b"});
}

TEST_CASE("tagged: record without UT or DI is rejected, others survive") {
    const auto result = parse(
        "PT J\nUT A\nPY 2005\nER\n"
        "PT J\nPY 2005\nTI no identifier\nER\n"
        "PT J\nDI 10.1/c\nPY 2005\nER\nEF\n");
    REQUIRE(result.records.size() == 2);
    CHECK(result.records[0].id == "A");
    CHECK(result.records[1].id == "10.1/c");
    CHECK(result.records[1].doi == "10.1/c");
    REQUIRE(result.errors.size() == 1);
    CHECK(result.errors[0].code == ErrorCode::MissingId);
    CHECK(result.errors[0].line == 5);
}

TEST_CASE("tagged: malformed PY and NR carry the line number") {
    const auto result = parse("PT J\nUT A\nPY 20x5\nER\nPT J\nUT B\nPY 2005\nNR -3\nER\nEF\n");
    CHECK(result.records.empty());
    REQUIRE(result.errors.size() == 2);
    CHECK(result.errors[0].code == ErrorCode::MalformedField);
    CHECK(result.errors[0].line == 3);
    CHECK(result.errors[1].code == ErrorCode::MalformedField);
    CHECK(result.errors[1].line == 8);
}

TEST_CASE("tagged: missing PY is malformed") {
    const auto result = parse("PT J\nUT A\nER\nEF\n");
    CHECK(result.records.empty());
    REQUIRE(result.errors.size() == 1);
    CHECK(result.errors[0].code == ErrorCode::MalformedField);
}

TEST_CASE("tagged: end of input inside a record") {
    const auto result = parse("PT J\nUT A\nPY 2005\n");
    CHECK(result.records.empty());
    REQUIRE(result.errors.size() == 1);
    CHECK(result.errors[0].code == ErrorCode::UnterminatedRecord);

    const auto ef = parse("PT J\nUT A\nPY 2005\nEF\n");
    REQUIRE(ef.errors.size() == 1);
    CHECK(ef.errors[0].code == ErrorCode::UnterminatedRecord);
}

TEST_CASE("tagged: CRLF line endings and byte-order mark") {
    const auto result = parse("\xEF\xBB\xBFPT J\r\nUT A\r\nPY 2005\r\nDT Review\r\nER\r\nEF\r\n");
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].id == "A");
    CHECK(result.records[0].doctype.kind == DocKind::Review);
}

TEST_CASE("tagged: addresses drop author groups and split on semicolons") {
    const auto result = parse(
        "PT J\nUT A\nPY 2005\n"
        "C1 [Li, A; Wang, B] Tsinghua Univ, Dep Phys, Beijing 100084, Peoples R China.\n"
        "   Peking Univ, Sch Phys, Beijing 100871, Peoples R China; Univ Tokyo, Tokyo, Japan.\n"
        "ER\nEF\n");
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].addresses ==
          std::vector<std::string>{"Tsinghua Univ, Dep Phys, Beijing 100084, Peoples R China",
                                   "Peking Univ, Sch Phys, Beijing 100871, Peoples R China",
                                   "Univ Tokyo, Tokyo, Japan"});
}

TEST_CASE("tagged: document types") {
    CHECK(DocType::from_string("article").kind == DocKind::Article);
    CHECK(DocType::from_string("PROCEEDINGS PAPER").kind == DocKind::ProceedingsPaper);
    const auto other = DocType::from_string("Editorial Material");
    CHECK(other.kind == DocKind::Other);
    CHECK(other.name() == "Editorial Material");

    const auto combined = parse("PT J\nUT A\nPY 2005\nDT Article; Proceedings Paper\nER\nEF\n");
    REQUIRE(combined.records.size() == 1);
    CHECK(combined.records[0].doctype.kind == DocKind::Article);
}

TEST_CASE("DOI extraction variants") {
    CHECK(extract_doi("Smith J, 2001, J A, V1, P1, DOI 10.1/a") == "10.1/a");
    CHECK(extract_doi("DOI 10.2/x") == "10.2/x");
    CHECK(extract_doi("Smith J, 2001, J A, V1, P1, DOI [10.3/y, 10.3/z]") == "10.3/y");
    CHECK_FALSE(extract_doi("Smith J, 2001, J A, V1, P1").has_value());
}

TEST_CASE("corpus: links restricted to the cited side") {
    const auto c = canonical(
        R"({"id":"A","side":"cited","year":2005,"doctype":"Article","addresses":[],"nrefs":null,"cites":[],"doi":null})"
        "\n"
        R"({"id":"X","side":"citing","year":2006,"doctype":"Article","addresses":[],"nrefs":10,"cites":["A","B-external"],"doi":null})"
        "\n");
    REQUIRE(c.links().size() == 1);
    CHECK(c.links()[0] == Link{"X", "A"});
}

TEST_CASE("corpus: empty stream gives an empty corpus") {
    const auto c = canonical("");
    CHECK(c.entries().empty());
    CHECK(c.links().empty());
}

TEST_CASE("corpus: two links from one citing record") {
    Corpus c({{make("A", 2005), Side::Cited}, {make("B", 2005), Side::Cited}, {make("X", 2006, {"A", "B"}), Side::Citing}});
    CHECK(c.links() == std::vector<Link>{{"X", "A"}, {"X", "B"}});
}

TEST_CASE("corpus: DOI resolution is case-insensitive and deduplicated per citing record") {
    auto a = make("WOS:A", 2005);
    a.doi = "10.1000/ABC";
    Corpus c({{a, Side::Cited}, {make("X", 2006, {"10.1000/abc", "WOS:A"}), Side::Citing}});
    CHECK(c.links() == std::vector<Link>{{"X", "WOS:A"}});
}

TEST_CASE("corpus: invariants") {
    CHECK_THROWS_AS(Corpus({{make("A", 2005), Side::Cited}, {make("A", 2006), Side::Citing}}), Error);
    try {
        Corpus({{make("A", 2005), Side::Cited}, {make("A", 2006), Side::Citing}});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DuplicateId);
    }
    auto check_code = [](std::vector<CorpusEntry> entries, ErrorCode code) {
        try {
            Corpus c(std::move(entries));
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == code);
        }
    };
    check_code({{make("", 2005), Side::Cited}}, ErrorCode::MissingId);
    check_code({{make("A", 0), Side::Cited}}, ErrorCode::MalformedField);
    check_code({{make("A", 2005, {}, -1), Side::Cited}}, ErrorCode::MalformedField);
    check_code({{make("X", 2005, {"A", "A"}), Side::Citing}}, ErrorCode::MalformedField);
}

TEST_CASE("canonical: empty corpus writes only the header and reloads") {
    const auto text = write_canonical(Corpus{});
    CHECK(text == "{\"format\":\"fraccite-canonical\",\"version\":1}\n");
    CHECK(canonical(text) == Corpus{});
}

TEST_CASE("canonical: one cited and one citing record round-trip") {
    auto a = make("A", 2005);
    a.addresses = {"Tsinghua Univ, Dep Phys"};
    a.doi = "10.1/a";
    Corpus c({{a, Side::Cited}, {make("X", 2006, {"A"}, 12), Side::Citing}});
    const auto text = write_canonical(c);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(canonical(text) == c);
}

TEST_CASE("canonical: unicode addresses round-trip byte for byte") {
    auto a = make("A", 2005);
    a.addresses = {"\xC3\x9Cme\xC3\xA5 Univ, Dept Phys, S-90187 \xC3\x9Cme\xC3\xA5, Sweden"};
    Corpus c({{a, Side::Cited}});
    const auto text = write_canonical(c);
    CHECK(text.find("\xC3\x9Cme\xC3\xA5 Univ") != std::string::npos);
    const auto again = write_canonical(canonical(text));
    CHECK(again == text);
}

TEST_CASE("canonical: unknown fields are ignored and type errors reported") {
    const auto c = canonical(
        R"({"id":"A","side":"both","year":2005,"doctype":"Review","addresses":[],"nrefs":3,"cites":["Z"],"doi":null,"extra":42})"
        "\n");
    REQUIRE(c.entries().size() == 1);
    CHECK(c.entries()[0].side == Side::Both);
    CHECK(c.entries()[0].record.doctype.kind == DocKind::Review);

    CHECK_THROWS_AS(canonical(R"({"id":"A","side":"cited","year":"2005"})" "\n"), Error);
    CHECK_THROWS_AS(canonical("not json\n"), Error);
}

TEST_CASE("canonical: round-trip and link closure on random corpora") {
    testing::Rng rng(0xC0FFEE);
    for (int iter = 0; iter < 200; ++iter) {
        const auto c = testing::random_corpus(rng);
        const auto reloaded = canonical(write_canonical(c));
        REQUIRE(reloaded == c);
        CHECK(reloaded.links() == c.links());
        std::set<Link> seen;
        for (const auto& link : c.links()) {
            const auto* cited = c.find(link.cited_id);
            const auto* citing = c.find(link.citing_id);
            REQUIRE(cited != nullptr);
            REQUIRE(citing != nullptr);
            CHECK(cited->on_cited_side());
            CHECK(citing->on_citing_side());
            CHECK(seen.insert(link).second);
        }
    }
}

TEST_CASE("aggregate table: ratios recomputed from counts") {
    std::istringstream in(
        "unit,P,IC3,FC3,IC5,FC5\n"
        "Dep Chem,404,2080,73.91,4950,166.36\n"
        "Dep Automot,5,3,0.16,8,0.3\n");
    const auto t = load_aggregate_table(in);
    CHECK(t.window_labels == std::vector<std::string>{"3", "5"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].fcp(1) == doctest::Approx(166.36 / 404).epsilon(1e-15));
    CHECK(t.rows[0].fcp(1) == doctest::Approx(0.41178).epsilon(1e-5));
    CHECK(t.rows[1].icp(0) == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("aggregate table: errors") {
    auto code_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            load_aggregate_table(in);
        } catch (const Error& e) {
            return e.code();
        }
        FAIL("expected an error");
        return ErrorCode::IoError;
    };
    CHECK(code_of("unit,P,IC3,FC3\nA,0,1,1\n") == ErrorCode::NonPositiveP);
    CHECK(code_of("unit,P,IC3,FC3\nA,5,x,1\n") == ErrorCode::NonNumericCell);
    CHECK(code_of("unit,P,IC3,FC3\nA,5,1,-1\n") == ErrorCode::NonNumericCell);
    CHECK(code_of("unit,IC3,FC3\nA,1,1\n") == ErrorCode::MalformedField);
}

TEST_CASE("aggregate table: bundled Table 1 with rounded ratio columns ignored") {
    std::ifstream in(testing::source_path("data/table1.csv"));
    const auto t = load_aggregate_table(in);
    CHECK(t.window_labels == std::vector<std::string>{"2005-2007", "2005-2009"});
    REQUIRE(t.rows.size() == 27);
    for (const auto& row : t.rows) {
        for (std::size_t w = 0; w < 2; ++w) {
            CHECK(row.icp(w) == row.ic(w) / static_cast<double>(row.p));
            CHECK(row.fcp(w) == row.fc(w) / static_cast<double>(row.p));
        }
    }
}

TEST_CASE("aggregate table: write then load round-trips") {
    std::ifstream in(testing::source_path("data/table1.csv"));
    const auto t = load_aggregate_table(in);
    std::ostringstream out;
    write_aggregate_table(t, out);
    std::istringstream back(out.str());
    const auto t2 = load_aggregate_table(back);
    REQUIRE(t2.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(t2.rows[i].unit == t.rows[i].unit);
        CHECK(t2.rows[i].p == t.rows[i].p);
        CHECK(t2.rows[i].fc(1) == t.rows[i].fc(1));
    }
}
