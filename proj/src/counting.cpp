#include "fraccite/counting.hpp"

#include "fraccite/text.hpp"

#include <algorithm>
#include <ostream>
#include <thread>

namespace fraccite::counting {

std::string Window::label() const { return std::to_string(start) + "-" + std::to_string(end); }

Window Window::parse(std::string_view s) {
    const auto colon = s.find(':');
    if (colon == std::string_view::npos)
        throw Error(ErrorCode::InvalidArgument, "window must be START:END, got '" + std::string(s) + "'");
    const auto a = text::parse_int(s.substr(0, colon));
    const auto b = text::parse_int(s.substr(colon + 1));
    if (!a || !b || *a <= 0 || *b <= 0)
        throw Error(ErrorCode::InvalidArgument, "window years must be positive integers: '" + std::string(s) + "'");
    if (*a > *b) throw Error(ErrorCode::InvalidArgument, "window start after end: '" + std::string(s) + "'");
    return {static_cast<int>(*a), static_cast<int>(*b)};
}

std::int64_t reference_count(const PublicationRecord& citing) noexcept {
    const auto listed = static_cast<std::int64_t>(citing.cited_ids.size());
    if (citing.nrefs && *citing.nrefs > 0) return std::max(*citing.nrefs, listed);
    return listed;
}

Rational fractional_weight(const PublicationRecord& citing) {
    const auto k = reference_count(citing);
    if (k <= 0) throw Error(ErrorCode::ZeroReferences, citing.id);
    return Rational(1, k);
}

DocTypeSet default_cited_doctypes() { return {"article", "review", "proceedings paper"}; }

DocTypeSet parse_doctype_list(std::string_view comma_separated) {
    DocTypeSet out;
    for (const auto& part : text::split(comma_separated, ',')) {
        const auto t = text::trim(part);
        if (t.empty()) continue;
        if (text::iequals(t, "all")) return {};
        out.insert(text::to_lower(DocType::from_string(t).name()));
    }
    return out;
}

bool admits(const DocTypeSet& set, const DocType& type) {
    return set.empty() || set.contains(text::to_lower(type.name()));
}

namespace {

struct Contribution {
    std::int64_t ic = 0;
    Rational fc = 0;
};

using Partial = std::map<std::string, Contribution>;

}  // namespace

ScoreTable paper_scores(const Corpus& corpus, const Window& window, const CountingOptions& options) {
    ScoreTable table;
    for (const auto& entry : corpus.entries()) {
        if (!entry.on_cited_side()) continue;
        const auto& rec = entry.record;
        if (!admits(options.cited_doctypes, rec.doctype)) continue;
        if (!options.publication_years.empty() && !options.publication_years.contains(rec.year)) continue;
        table.papers.emplace(rec.id, PaperImpact{rec.id, 0, 0});
    }

    // Citing documents that pass the window/type filter, in corpus order.
    const auto& links = corpus.links();
    std::vector<const PublicationRecord*> citing_of(links.size(), nullptr);
    std::string last_warned;
    for (std::size_t i = 0; i < links.size(); ++i) {
        const auto& citing = corpus.find(links[i].citing_id)->record;
        if (!window.contains(citing.year) || !admits(options.citing_doctypes, citing.doctype)) continue;
        if (!table.papers.contains(links[i].cited_id)) continue;
        if (reference_count(citing) <= 0) {
            if (last_warned != citing.id) table.warnings.push_back("ZeroReferences: " + citing.id + " skipped");
            last_warned = citing.id;
            continue;
        }
        if (citing.nrefs && *citing.nrefs > 0 &&
            *citing.nrefs < static_cast<std::int64_t>(citing.cited_ids.size()) && last_warned != citing.id) {
            table.warnings.push_back("NR below extracted reference count: " + citing.id);
            last_warned = citing.id;
        }
        citing_of[i] = &citing;
    }

    const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(links.size())));
    std::vector<Partial> partials(workers);
    auto run = [&](unsigned w) {
        const std::size_t begin = links.size() * w / workers;
        const std::size_t end = links.size() * (w + 1) / workers;
        for (std::size_t i = begin; i < end; ++i) {
            if (!citing_of[i]) continue;
            auto& c = partials[w][links[i].cited_id];
            c.ic += 1;
            c.fc += fractional_weight(*citing_of[i]);
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }

    for (const auto& partial : partials) {
        for (const auto& [id, c] : partial) {
            auto& paper = table.papers.at(id);
            paper.ic += c.ic;
            paper.fc += c.fc;
        }
    }
    return table;
}

AggregateResult aggregate_units(const query::UnitAssignment& assignment, const ScoreTable& scores,
                                std::int64_t min_pubs) {
    AggregateResult result;
    for (const auto& unit : assignment.units) {
        UnitAggregate agg;
        agg.unit = unit.name;
        for (const auto& id : unit.paper_ids) {
            const auto it = scores.papers.find(id);
            if (it == scores.papers.end()) continue;
            agg.p += 1;
            agg.ic += it->second.ic;
            agg.fc += it->second.fc;
        }
        if (agg.p < min_pubs || agg.p == 0) {
            result.skipped.push_back({unit.name, agg.p});
            continue;
        }
        agg.icp = static_cast<double>(agg.ic) / static_cast<double>(agg.p);
        agg.fcp = to_double(agg.fcp_exact());
        result.included.push_back(std::move(agg));
    }
    return result;
}

std::vector<double> per_paper_samples(const query::UnitAssignment& assignment, const ScoreTable& scores,
                                      std::string_view unit) {
    const auto* members = assignment.find(unit);
    if (!members) throw Error(ErrorCode::UnknownUnit, std::string(unit));
    std::vector<double> out;
    for (const auto& id : members->paper_ids) {
        if (const auto it = scores.papers.find(id); it != scores.papers.end()) out.push_back(to_double(it->second.fc));
    }
    return out;
}

AggregateTable to_aggregate_table(const std::vector<Window>& windows,
                                  const std::vector<AggregateResult>& per_window) {
    if (windows.size() != per_window.size())
        throw Error(ErrorCode::InvalidArgument, "one aggregate result per window required");
    AggregateTable table;
    for (const auto& w : windows) table.window_labels.push_back(w.label());
    if (per_window.empty()) return table;
    for (std::size_t u = 0; u < per_window.front().included.size(); ++u) {
        AggregateRow row;
        row.unit = per_window.front().included[u].unit;
        row.p = per_window.front().included[u].p;
        for (const auto& result : per_window) {
            const auto& agg = result.included.at(u);
            if (agg.unit != row.unit || agg.p != row.p)
                throw Error(ErrorCode::UnitSetMismatch, "window aggregates disagree on " + row.unit);
            row.counts.push_back({static_cast<double>(agg.ic), to_double(agg.fc)});
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string to_decimal(const Rational& value, int places) {
    using boost::multiprecision::cpp_int;
    const cpp_int num = numerator(value);
    const cpp_int den = denominator(value);
    const bool negative = num < 0;
    cpp_int scale = 1;
    for (int i = 0; i < places; ++i) scale *= 10;
    const cpp_int abs_num = negative ? cpp_int(-num) : num;
    const cpp_int scaled = (abs_num * scale * 2 + den) / (den * 2);  // round half up
    const cpp_int whole = scaled / scale;
    std::string frac = cpp_int(scaled % scale).str();
    if (places > 0) frac.insert(0, static_cast<std::size_t>(places) - frac.size(), '0');
    std::string out = (negative && scaled != 0 ? "-" : "") + whole.str();
    if (places > 0) out += "." + frac;
    return out;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

void write_scores_csv(const query::UnitAssignment& assignment, const ScoreTable& scores, std::ostream& out) {
    out << "paper_id,unit,ic,fc_num,fc_den,fc_decimal\n";
    for (const auto& unit : assignment.units) {
        for (const auto& id : unit.paper_ids) {
            const auto it = scores.papers.find(id);
            if (it == scores.papers.end()) continue;
            const auto& paper = it->second;
            out << text::csv_escape(id) << ',' << text::csv_escape(unit.name) << ',' << paper.ic << ','
                << numerator(paper.fc).str() << ',' << denominator(paper.fc).str() << ','
                << to_decimal(paper.fc, 12) << '\n';
        }
    }
}

}  // namespace fraccite::counting
