#include "fraccite/corpus.hpp"

#include "fraccite/text.hpp"

#include <json.hpp>

#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace fraccite {

namespace {

constexpr std::string_view kUtf8Bom = "\xEF\xBB\xBF";

void strip_line(std::string& line, bool first) {
    if (first && line.starts_with(kUtf8Bom)) line.erase(0, kUtf8Bom.size());
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

DocType DocType::from_string(std::string_view s) {
    const auto t = text::trim(s);
    if (text::iequals(t, "Article")) return {DocKind::Article, {}};
    if (text::iequals(t, "Review")) return {DocKind::Review, {}};
    if (text::iequals(t, "Proceedings Paper")) return {DocKind::ProceedingsPaper, {}};
    return {DocKind::Other, std::string(t)};
}

std::string DocType::name() const {
    switch (kind) {
    case DocKind::Article: return "Article";
    case DocKind::Review: return "Review";
    case DocKind::ProceedingsPaper: return "Proceedings Paper";
    case DocKind::Other: return label;
    }
    return label;
}

std::string_view to_string(Side side) noexcept {
    switch (side) {
    case Side::Cited: return "cited";
    case Side::Citing: return "citing";
    case Side::Both: return "both";
    }
    return "cited";
}

std::optional<Side> side_from_string(std::string_view s) noexcept {
    if (s == "cited") return Side::Cited;
    if (s == "citing") return Side::Citing;
    if (s == "both") return Side::Both;
    return std::nullopt;
}

// ---- Corpus -----------------------------------------------------------------

Corpus::Corpus(std::vector<CorpusEntry> entries) : entries_(std::move(entries)) {
    std::unordered_map<std::string, std::string> doi_index;  // lowercased doi -> cited id
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& rec = entries_[i].record;
        if (rec.id.empty()) throw Error(ErrorCode::MissingId, "record #" + std::to_string(i + 1));
        if (rec.year <= 0) throw Error(ErrorCode::MalformedField, rec.id + ": year must be positive");
        if (rec.nrefs && *rec.nrefs < 0)
            throw Error(ErrorCode::MalformedField, rec.id + ": negative reference count");
        std::set<std::string_view> seen(rec.cited_ids.begin(), rec.cited_ids.end());
        if (seen.size() != rec.cited_ids.size())
            throw Error(ErrorCode::MalformedField, rec.id + ": duplicate cited ids");
        if (!index_.emplace(rec.id, i).second) throw Error(ErrorCode::DuplicateId, rec.id);
        if (entries_[i].on_cited_side() && rec.doi && !rec.doi->empty())
            doi_index.emplace(text::to_lower(*rec.doi), rec.id);
    }

    for (const auto& entry : entries_) {
        if (!entry.on_citing_side()) continue;
        std::set<std::string> resolved;
        for (const auto& ref : entry.record.cited_ids) {
            std::string target;
            if (const auto* hit = find(ref); hit && hit->on_cited_side()) {
                target = hit->record.id;
            } else if (auto it = doi_index.find(text::to_lower(ref)); it != doi_index.end()) {
                target = it->second;
            } else {
                continue;
            }
            if (resolved.insert(target).second) links_.push_back({entry.record.id, target});
        }
    }
}

const CorpusEntry* Corpus::find(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &entries_[it->second];
}

std::size_t Corpus::cited_count() const noexcept {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.on_cited_side() ? 1 : 0;
    return n;
}

std::size_t Corpus::citing_count() const noexcept {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.on_citing_side() ? 1 : 0;
    return n;
}

// ---- tagged format ----------------------------------------------------------

std::vector<std::string> split_address_line(std::string_view line) {
    std::string stripped;
    int depth = 0;
    for (char c : line) {
        if (c == '[') {
            ++depth;
        } else if (c == ']') {
            if (depth > 0) --depth;
        } else if (depth == 0) {
            stripped += c;
        }
    }
    std::vector<std::string> out;
    for (auto& part : text::split(stripped, ';')) {
        auto t = text::trim(part);
        if (!t.empty() && t.back() == '.') t.remove_suffix(1);
        t = text::trim(t);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

std::optional<std::string> extract_doi(std::string_view cr_line) {
    std::size_t pos = std::string_view::npos;
    if (cr_line.starts_with("DOI ")) {
        pos = 0;
    } else if (auto at = cr_line.find(", DOI "); at != std::string_view::npos) {
        pos = at + 2;
    }
    if (pos == std::string_view::npos) return std::nullopt;
    auto value = text::trim(cr_line.substr(pos + 4));
    if (value.starts_with('[')) {
        value.remove_prefix(1);
        value = value.substr(0, value.find_first_of(",]"));
    } else {
        value = value.substr(0, value.find(','));
    }
    value = text::trim(value);
    if (value.empty()) return std::nullopt;
    return std::string(value);
}

namespace {

struct FieldValue {
    std::size_t line;
    std::string value;
};

struct RecordBlock {
    std::size_t start_line = 0;
    std::map<std::string, std::vector<FieldValue>> fields;

    const FieldValue* first(const std::string& tag) const {
        const auto it = fields.find(tag);
        return it == fields.end() || it->second.empty() ? nullptr : &it->second.front();
    }
};

std::optional<PublicationRecord> finish_record(const RecordBlock& block,
                                               std::vector<ParseIssue>& errors) {
    PublicationRecord rec;

    const auto* ut = block.first("UT");
    const auto* di = block.first("DI");
    if (ut && !text::trim(ut->value).empty()) {
        rec.id = std::string(text::trim(ut->value));
    } else if (di && !text::trim(di->value).empty()) {
        rec.id = std::string(text::trim(di->value));
    } else {
        errors.push_back({ErrorCode::MissingId, block.start_line, "record has neither UT nor DI"});
        return std::nullopt;
    }
    if (di && !text::trim(di->value).empty()) rec.doi = std::string(text::trim(di->value));

    const auto* py = block.first("PY");
    if (!py) {
        errors.push_back({ErrorCode::MalformedField, block.start_line, rec.id + ": missing PY"});
        return std::nullopt;
    }
    const auto year = text::parse_int(py->value);
    if (!year || *year <= 0) {
        errors.push_back({ErrorCode::MalformedField, py->line,
                          rec.id + ": PY is not a year: '" + py->value + "'"});
        return std::nullopt;
    }
    rec.year = static_cast<int>(*year);

    if (const auto* nr = block.first("NR")) {
        const auto n = text::parse_int(nr->value);
        if (!n || *n < 0) {
            errors.push_back({ErrorCode::MalformedField, nr->line,
                              rec.id + ": NR is not a count: '" + nr->value + "'"});
            return std::nullopt;
        }
        rec.nrefs = *n;
    }

    if (const auto* dt = block.first("DT")) {
        // Combined types ("Article; Proceedings Paper") classify by the first.
        rec.doctype = DocType::from_string(text::split(dt->value, ';').front());
    }

    if (auto it = block.fields.find("C1"); it != block.fields.end()) {
        for (const auto& fv : it->second) {
            for (auto& addr : split_address_line(fv.value)) rec.addresses.push_back(std::move(addr));
        }
    }

    if (auto it = block.fields.find("CR"); it != block.fields.end()) {
        std::set<std::string> seen;
        for (const auto& fv : it->second) {
            if (auto doi = extract_doi(fv.value); doi && seen.insert(*doi).second)
                rec.cited_ids.push_back(std::move(*doi));
        }
    }
    return rec;
}

}  // namespace

TaggedParseResult parse_tagged(std::istream& in) {
    TaggedParseResult result;
    std::optional<RecordBlock> block;
    std::string current_tag;
    std::string line;
    std::size_t lineno = 0;

    auto close = [&] {
        if (auto rec = finish_record(*block, result.errors)) result.records.push_back(std::move(*rec));
        block.reset();
        current_tag.clear();
    };

    while (std::getline(in, line)) {
        ++lineno;
        strip_line(line, lineno == 1);
        if (text::trim(line).empty()) continue;

        if (line.front() == ' ' || line.front() == '\t') {
            if (block && !current_tag.empty())
                block->fields[current_tag].push_back({lineno, std::string(text::trim(line))});
            continue;
        }

        const std::string tag = line.substr(0, 2);
        const std::string value = line.size() > 3 ? std::string(text::trim(line.substr(3))) : "";

        if (tag == "EF") {
            if (block) {
                result.errors.push_back({ErrorCode::UnterminatedRecord, block->start_line,
                                         "record not closed by ER before EF"});
                block.reset();
            }
            return result;
        }
        if (tag == "ER") {
            if (block) close();
            continue;
        }
        if (!block) {
            if (tag == "FN" || tag == "VR") continue;
            block.emplace();
            block->start_line = lineno;
        }
        current_tag = tag;
        block->fields[tag].push_back({lineno, value});
    }

    if (block) {
        result.errors.push_back({ErrorCode::UnterminatedRecord, block->start_line,
                                 "end of input inside a record"});
    }
    return result;
}

// ---- canonical format -------------------------------------------------------

namespace {

using ordered_json = nlohmann::ordered_json;

CorpusEntry entry_from_json(const nlohmann::json& j, std::size_t lineno) {
    auto fail = [&](const std::string& what) {
        return Error(ErrorCode::MalformedField, "line " + std::to_string(lineno) + ": " + what);
    };
    CorpusEntry entry;
    auto& rec = entry.record;

    if (!j.contains("id") || !j["id"].is_string()) throw fail("'id' must be a string");
    rec.id = j["id"].get<std::string>();
    if (rec.id.empty()) throw Error(ErrorCode::MissingId, "line " + std::to_string(lineno));

    if (!j.contains("side") || !j["side"].is_string()) throw fail("'side' must be a string");
    const auto side = side_from_string(j["side"].get<std::string>());
    if (!side) throw fail("'side' must be cited, citing or both");
    entry.side = *side;

    if (!j.contains("year") || !j["year"].is_number_integer()) throw fail("'year' must be an integer");
    rec.year = j["year"].get<int>();

    if (j.contains("doctype")) {
        if (!j["doctype"].is_string()) throw fail("'doctype' must be a string");
        rec.doctype = DocType::from_string(j["doctype"].get<std::string>());
    }
    if (j.contains("addresses")) {
        if (!j["addresses"].is_array()) throw fail("'addresses' must be an array");
        for (const auto& a : j["addresses"]) {
            if (!a.is_string()) throw fail("'addresses' entries must be strings");
            rec.addresses.push_back(a.get<std::string>());
        }
    }
    if (j.contains("nrefs") && !j["nrefs"].is_null()) {
        if (!j["nrefs"].is_number_integer()) throw fail("'nrefs' must be an integer or null");
        rec.nrefs = j["nrefs"].get<std::int64_t>();
    }
    if (j.contains("cites")) {
        if (!j["cites"].is_array()) throw fail("'cites' must be an array");
        for (const auto& c : j["cites"]) {
            if (!c.is_string()) throw fail("'cites' entries must be strings");
            rec.cited_ids.push_back(c.get<std::string>());
        }
    }
    if (j.contains("doi") && !j["doi"].is_null()) {
        if (!j["doi"].is_string()) throw fail("'doi' must be a string or null");
        rec.doi = j["doi"].get<std::string>();
    }
    return entry;
}

ordered_json entry_to_json(const CorpusEntry& entry) {
    const auto& rec = entry.record;
    ordered_json j;
    j["id"] = rec.id;
    j["side"] = std::string(to_string(entry.side));
    j["year"] = rec.year;
    j["doctype"] = rec.doctype.name();
    j["addresses"] = rec.addresses;
    j["nrefs"] = rec.nrefs ? ordered_json(*rec.nrefs) : ordered_json(nullptr);
    j["cites"] = rec.cited_ids;
    j["doi"] = rec.doi ? ordered_json(*rec.doi) : ordered_json(nullptr);
    return j;
}

}  // namespace

Corpus load_canonical(std::istream& in) {
    std::vector<CorpusEntry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_line(line, lineno == 1);
        if (text::trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::MalformedField,
                        "line " + std::to_string(lineno) + ": invalid JSON (" + e.what() + ")");
        }
        if (!j.is_object())
            throw Error(ErrorCode::MalformedField, "line " + std::to_string(lineno) + ": not an object");
        if (!j.contains("id") && j.contains("format")) continue;  // header
        entries.push_back(entry_from_json(j, lineno));
    }
    return Corpus(std::move(entries));
}

void write_canonical(const Corpus& corpus, std::ostream& out) {
    ordered_json header;
    header["format"] = std::string(kCanonicalFormatName);
    header["version"] = 1;
    out << header.dump() << '\n';
    for (const auto& entry : corpus.entries()) out << entry_to_json(entry).dump() << '\n';
}

std::string write_canonical(const Corpus& corpus) {
    std::ostringstream os;
    write_canonical(corpus, os);
    return os.str();
}

// ---- aggregate table --------------------------------------------------------

namespace {

bool is_ratio_column(std::string_view name) {
    const auto upper_starts = [&](std::string_view prefix) {
        return name.size() >= prefix.size() && text::iequals(name.substr(0, prefix.size()), prefix);
    };
    return upper_starts("ICP") || upper_starts("FCP") || upper_starts("IC/P") ||
           upper_starts("FC/P") || name.ends_with("_exact");
}

}  // namespace

AggregateTable load_aggregate_table(std::istream& in) {
    AggregateTable table;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    std::size_t unit_col = 0, p_col = 0, ncols = 0;
    std::vector<std::pair<std::size_t, std::size_t>> window_cols;  // (ic, fc)

    while (std::getline(in, line)) {
        ++lineno;
        strip_line(line, lineno == 1);
        if (text::trim(line).empty()) continue;
        const auto cells = text::split_csv_line(line);

        if (!have_header) {
            have_header = true;
            ncols = cells.size();
            std::optional<std::size_t> unit, p;
            std::map<std::string, std::size_t> ic, fc;
            std::vector<std::string> order;
            for (std::size_t c = 0; c < cells.size(); ++c) {
                const std::string name(text::trim(cells[c]));
                if (text::iequals(name, "unit")) {
                    unit = c;
                } else if (name == "P" || name == "p") {
                    p = c;
                } else if (is_ratio_column(name)) {
                    continue;
                } else if (name.size() > 2 && text::iequals(name.substr(0, 2), "IC")) {
                    ic[name.substr(2)] = c;
                    order.push_back(name.substr(2));
                } else if (name.size() > 2 && text::iequals(name.substr(0, 2), "FC")) {
                    fc[name.substr(2)] = c;
                }
            }
            if (!unit || !p)
                throw Error(ErrorCode::MalformedField, "aggregate header needs 'unit' and 'P' columns");
            unit_col = *unit;
            p_col = *p;
            for (const auto& label : order) {
                if (!fc.contains(label))
                    throw Error(ErrorCode::MalformedField, "column IC" + label + " has no FC" + label);
                table.window_labels.push_back(label);
                window_cols.emplace_back(ic[label], fc[label]);
            }
            if (fc.size() != ic.size())
                throw Error(ErrorCode::MalformedField, "FC columns without matching IC columns");
            continue;
        }

        const auto where = [&](std::size_t col) {
            return "line " + std::to_string(lineno) + ", column " + std::to_string(col + 1);
        };
        if (cells.size() < ncols)
            throw Error(ErrorCode::NonNumericCell, "line " + std::to_string(lineno) + ": missing cells");

        AggregateRow row;
        row.unit = std::string(text::trim(cells[unit_col]));
        const auto p = text::parse_int(cells[p_col]);
        if (!p) throw Error(ErrorCode::NonNumericCell, where(p_col) + ": '" + cells[p_col] + "'");
        if (*p <= 0) throw Error(ErrorCode::NonPositiveP, where(p_col) + ": " + row.unit);
        row.p = *p;
        for (const auto& [ic_col, fc_col] : window_cols) {
            WindowCounts wc;
            for (auto [col, dst] : {std::pair{ic_col, &wc.ic}, std::pair{fc_col, &wc.fc}}) {
                const auto v = text::parse_double(cells[col]);
                if (!v || *v < 0.0)
                    throw Error(ErrorCode::NonNumericCell, where(col) + ": '" + cells[col] + "'");
                *dst = *v;
            }
            row.counts.push_back(wc);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_aggregate_table(const AggregateTable& table, std::ostream& out) {
    out << "unit,P";
    for (const auto& label : table.window_labels) out << ",IC" << label << ",FC" << label;
    out << '\n';
    for (const auto& row : table.rows) {
        out << text::csv_escape(row.unit) << ',' << row.p;
        for (const auto& wc : row.counts)
            out << ',' << text::format_exact(wc.ic) << ',' << text::format_exact(wc.fc);
        out << '\n';
    }
}

}  // namespace fraccite
