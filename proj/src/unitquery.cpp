#include "fraccite/unitquery.hpp"

#include "fraccite/error.hpp"
#include "fraccite/text.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>

namespace fraccite::query {

// ---- AST --------------------------------------------------------------------

NodePtr phrase(std::vector<std::string> tokens) {
    return std::make_shared<const Node>(Node{Phrase{std::move(tokens)}});
}

NodePtr year_equals(int year) { return std::make_shared<const Node>(Node{YearEquals{year}}); }

NodePtr scope(Field field, NodePtr expr) {
    return std::make_shared<const Node>(Node{FieldScope{field, std::move(expr)}});
}

NodePtr binary(BinaryOp op, NodePtr left, NodePtr right) {
    return std::make_shared<const Node>(Node{Binary{op, std::move(left), std::move(right)}});
}

bool equal(const Node& a, const Node& b) {
    if (a.value.index() != b.value.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.value);
            if constexpr (std::is_same_v<T, Phrase>) {
                return x.tokens == y.tokens;
            } else if constexpr (std::is_same_v<T, YearEquals>) {
                return x.year == y.year;
            } else if constexpr (std::is_same_v<T, FieldScope>) {
                return x.field == y.field && equal(*x.expr, *y.expr);
            } else {
                return x.op == y.op && equal(*x.left, *y.left) && equal(*x.right, *y.right);
            }
        },
        a.value);
}

namespace {

enum class Context { Top, Address, Year };

std::string_view op_keyword(BinaryOp op) {
    switch (op) {
    case BinaryOp::Same: return "SAME";
    case BinaryOp::And: return "AND";
    case BinaryOp::Or: return "OR";
    case BinaryOp::Not: return "NOT";
    }
    return "AND";
}

std::string print(const Node& node, Context ctx) {
    return std::visit(
        [&](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Phrase>) {
                std::string out;
                for (const auto& t : x.tokens) {
                    if (!out.empty()) out += ' ';
                    out += t;
                }
                return out;
            } else if constexpr (std::is_same_v<T, YearEquals>) {
                return ctx == Context::Year ? std::to_string(x.year) : "py=" + std::to_string(x.year);
            } else if constexpr (std::is_same_v<T, FieldScope>) {
                const bool ad = x.field == Field::Address;
                return std::string(ad ? "ad=(" : "py=(") +
                       print(*x.expr, ad ? Context::Address : Context::Year) + ")";
            } else {
                return "(" + print(*x.left, ctx) + " " + std::string(op_keyword(x.op)) + " " +
                       print(*x.right, ctx) + ")";
            }
        },
        node.value);
}

}  // namespace

std::string QueryAst::to_string() const { return print(*root_, Context::Top); }

// ---- normalization ----------------------------------------------------------

std::vector<std::string> normalize_tokens(std::string_view s) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) tokens.push_back(std::move(current));
        current.clear();
    };
    for (char c : s) {
        if (c == '.') continue;
        if (c == ',' || c == ';' || c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c))) {
            flush();
            continue;
        }
        current += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    }
    flush();
    return tokens;
}

// ---- lexer / parser ---------------------------------------------------------

namespace {

enum class TokKind { Word, LParen, RParen, Equals, End };

struct Token {
    TokKind kind;
    std::string text;
    std::size_t pos;
};

[[noreturn]] void syntax_error(std::size_t pos, const std::string& what) {
    throw Error(ErrorCode::SyntaxError, what + " at position " + std::to_string(pos));
}

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '(') {
            out.push_back({TokKind::LParen, "(", i++});
        } else if (c == ')') {
            out.push_back({TokKind::RParen, ")", i++});
        } else if (c == '=') {
            out.push_back({TokKind::Equals, "=", i++});
        } else {
            const std::size_t start = i;
            while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' &&
                   s[i] != ')' && s[i] != '=')
                ++i;
            out.push_back({TokKind::Word, std::string(s.substr(start, i - start)), start});
        }
    }
    out.push_back({TokKind::End, "", s.size()});
    return out;
}

std::optional<BinaryOp> keyword(const Token& t) {
    if (t.kind != TokKind::Word) return std::nullopt;
    if (text::iequals(t.text, "and")) return BinaryOp::And;
    if (text::iequals(t.text, "or")) return BinaryOp::Or;
    if (text::iequals(t.text, "not")) return BinaryOp::Not;
    if (text::iequals(t.text, "same")) return BinaryOp::Same;
    return std::nullopt;
}

class Parser {
public:
    explicit Parser(std::string_view s) : toks_(lex(s)) {}

    NodePtr parse() {
        if (peek().kind == TokKind::End) syntax_error(0, "empty query");
        auto node = parse_or(Context::Top);
        if (peek().kind == TokKind::RParen) syntax_error(peek().pos, "unbalanced ')'");
        if (peek().kind != TokKind::End) syntax_error(peek().pos, "unexpected '" + peek().text + "'");
        return node;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

    bool at_op(BinaryOp op) const {
        const auto k = keyword(peek());
        return k && *k == op;
    }

    NodePtr parse_or(Context ctx) {
        auto left = parse_and(ctx);
        while (at_op(BinaryOp::Or)) {
            next();
            left = binary(BinaryOp::Or, left, parse_and(ctx));
        }
        return left;
    }

    NodePtr parse_and(Context ctx) {
        auto left = parse_same(ctx);
        while (at_op(BinaryOp::And)) {
            next();
            left = binary(BinaryOp::And, left, parse_same(ctx));
        }
        return left;
    }

    NodePtr parse_same(Context ctx) {
        auto left = parse_not(ctx);
        while (at_op(BinaryOp::Same)) {
            const auto& kw = next();
            if (ctx != Context::Address) syntax_error(kw.pos, "SAME outside an ad=(...) scope");
            left = binary(BinaryOp::Same, left, parse_not(ctx));
        }
        return left;
    }

    NodePtr parse_not(Context ctx) {
        auto left = parse_primary(ctx);
        while (at_op(BinaryOp::Not)) {
            next();
            left = binary(BinaryOp::Not, left, parse_primary(ctx));
        }
        return left;
    }

    NodePtr parse_parenthesized(Context ctx) {
        const auto& open = next();  // '('
        if (peek().kind == TokKind::RParen) syntax_error(peek().pos, "empty parentheses");
        auto inner = parse_or(ctx);
        if (peek().kind != TokKind::RParen) syntax_error(open.pos, "unbalanced '('");
        next();
        return inner;
    }

    NodePtr parse_year(const Token& t) {
        const auto y = text::parse_int(t.text);
        if (!y || *y <= 0 || *y > 99999) syntax_error(t.pos, "expected a year, got '" + t.text + "'");
        return year_equals(static_cast<int>(*y));
    }

    NodePtr parse_field(Context ctx) {
        const auto& tag = next();
        next();  // '='
        if (ctx != Context::Top) syntax_error(tag.pos, "nested field tag '" + tag.text + "'");
        if (text::iequals(tag.text, "ad")) {
            if (peek().kind == TokKind::LParen) return scope(Field::Address, parse_parenthesized(Context::Address));
            return scope(Field::Address, parse_phrase());
        }
        if (text::iequals(tag.text, "py")) {
            if (peek().kind == TokKind::LParen) return scope(Field::Year, parse_parenthesized(Context::Year));
            const auto& t = next();
            if (t.kind != TokKind::Word) syntax_error(t.pos, "expected a year after py=");
            return parse_year(t);
        }
        syntax_error(tag.pos, "unknown field tag '" + tag.text + "'");
    }

    NodePtr parse_phrase() {
        const std::size_t start = peek().pos;
        std::vector<std::string> tokens;
        while (peek().kind == TokKind::Word && !keyword(peek()) && peek(1).kind != TokKind::Equals) {
            for (auto& t : normalize_tokens(next().text)) tokens.push_back(std::move(t));
        }
        if (tokens.empty()) {
            if (peek().kind == TokKind::End) syntax_error(peek().pos, "unexpected end of query");
            syntax_error(start, "expected a phrase");
        }
        return phrase(std::move(tokens));
    }

    NodePtr parse_primary(Context ctx) {
        const auto& t = peek();
        switch (t.kind) {
        case TokKind::LParen: return parse_parenthesized(ctx);
        case TokKind::RParen: syntax_error(t.pos, "unexpected ')'");
        case TokKind::Equals: syntax_error(t.pos, "unexpected '='");
        case TokKind::End: syntax_error(t.pos, "unexpected end of query (dangling operator?)");
        case TokKind::Word: break;
        }
        if (keyword(t)) syntax_error(t.pos, "dangling operator '" + t.text + "'");
        if (peek(1).kind == TokKind::Equals) return parse_field(ctx);
        switch (ctx) {
        case Context::Address: return parse_phrase();
        case Context::Year: return parse_year(next());
        case Context::Top: break;
        }
        syntax_error(t.pos, "term '" + t.text + "' outside a field scope");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

QueryAst parse_query(std::string_view text) { return QueryAst(Parser(text).parse()); }

// ---- matching ---------------------------------------------------------------

PreparedRecord PreparedRecord::from(const PublicationRecord& rec) {
    PreparedRecord out;
    out.year = rec.year;
    out.addresses.reserve(rec.addresses.size());
    for (const auto& a : rec.addresses) out.addresses.push_back(normalize_tokens(a));
    return out;
}

namespace {

bool contains_run(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > hay.size()) return false;
    return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

// Evaluation against one address string (operands of SAME).
bool eval_address(const Node& node, const std::vector<std::string>& addr, int year) {
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Phrase>) {
                return contains_run(addr, x.tokens);
            } else if constexpr (std::is_same_v<T, YearEquals>) {
                return year == x.year;
            } else if constexpr (std::is_same_v<T, FieldScope>) {
                return eval_address(*x.expr, addr, year);
            } else {
                const bool l = eval_address(*x.left, addr, year);
                switch (x.op) {
                case BinaryOp::Same:
                case BinaryOp::And: return l && eval_address(*x.right, addr, year);
                case BinaryOp::Or: return l || eval_address(*x.right, addr, year);
                case BinaryOp::Not: return l && !eval_address(*x.right, addr, year);
                }
                return false;
            }
        },
        node.value);
}

bool eval_record(const Node& node, const PreparedRecord& rec) {
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Phrase>) {
                return std::any_of(rec.addresses.begin(), rec.addresses.end(),
                                   [&](const auto& a) { return contains_run(a, x.tokens); });
            } else if constexpr (std::is_same_v<T, YearEquals>) {
                return rec.year == x.year;
            } else if constexpr (std::is_same_v<T, FieldScope>) {
                return eval_record(*x.expr, rec);
            } else {
                switch (x.op) {
                case BinaryOp::Same:
                    return std::any_of(rec.addresses.begin(), rec.addresses.end(), [&](const auto& a) {
                        return eval_address(*x.left, a, rec.year) && eval_address(*x.right, a, rec.year);
                    });
                case BinaryOp::And: return eval_record(*x.left, rec) && eval_record(*x.right, rec);
                case BinaryOp::Or: return eval_record(*x.left, rec) || eval_record(*x.right, rec);
                case BinaryOp::Not: return eval_record(*x.left, rec) && !eval_record(*x.right, rec);
                }
                return false;
            }
        },
        node.value);
}

}  // namespace

bool match_record(const QueryAst& ast, const PreparedRecord& rec) { return eval_record(ast.root(), rec); }

bool match_record(const QueryAst& ast, const PublicationRecord& rec) {
    return match_record(ast, PreparedRecord::from(rec));
}

// ---- unit definitions -------------------------------------------------------

std::vector<UnitDefinition> load_unit_definitions(std::istream& in) {
    std::vector<UnitDefinition> defs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        const auto body = text::trim(line);
        if (body.empty() || body.front() == '#') continue;

        const auto where = "line " + std::to_string(lineno) + ": ";
        const auto assign = body.find(":=");
        if (assign == std::string_view::npos) throw Error(ErrorCode::SyntaxError, where + "expected '<name> := <query>'");
        const std::string name(text::trim(body.substr(0, assign)));
        if (name.empty()) throw Error(ErrorCode::SyntaxError, where + "empty unit name");

        auto rest = body.substr(assign + 2);
        std::vector<std::string> minus;
        if (const auto slash = rest.find('\\'); slash != std::string_view::npos) {
            auto suffix = text::trim(rest.substr(slash + 1));
            if (suffix.size() < 5 || !text::iequals(suffix.substr(0, 5), "minus"))
                throw Error(ErrorCode::SyntaxError, where + "expected 'minus' after '\\'");
            for (const auto& m : text::split(suffix.substr(5), ',')) {
                const auto t = text::trim(m);
                if (t.empty()) throw Error(ErrorCode::SyntaxError, where + "empty name in minus list");
                minus.emplace_back(t);
            }
            rest = rest.substr(0, slash);
        }
        try {
            defs.push_back({name, parse_query(rest), std::move(minus)});
        } catch (const Error& e) {
            throw Error(ErrorCode::SyntaxError, where + name + ": " + e.what());
        }
    }
    return defs;
}

const UnitMembers* UnitAssignment::find(std::string_view name) const {
    for (const auto& u : units) {
        if (u.name == name) return &u;
    }
    return nullptr;
}

UnitAssignment assign_units(const Corpus& corpus, const std::vector<UnitDefinition>& defs) {
    std::map<std::string, std::size_t, std::less<>> by_name;
    for (std::size_t i = 0; i < defs.size(); ++i) {
        if (!by_name.emplace(defs[i].name, i).second) throw Error(ErrorCode::DuplicateUnit, defs[i].name);
    }
    for (const auto& d : defs) {
        for (const auto& m : d.minus) {
            if (!by_name.contains(m)) throw Error(ErrorCode::UnknownUnitInMinus, d.name + " minus " + m);
        }
    }

    // 0 = unvisited, 1 = on stack, 2 = done
    std::vector<int> state(defs.size(), 0);
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
        state[i] = 1;
        for (const auto& m : defs[i].minus) {
            const auto j = by_name.find(m)->second;
            if (state[j] == 1) throw Error(ErrorCode::CyclicMinus, defs[i].name + " -> " + m);
            if (state[j] == 0) visit(j);
        }
        state[i] = 2;
    };
    for (std::size_t i = 0; i < defs.size(); ++i) {
        if (state[i] == 0) visit(i);
    }

    std::vector<std::set<std::string>> base(defs.size());
    for (const auto& entry : corpus.entries()) {
        if (!entry.on_cited_side()) continue;
        const auto prepared = PreparedRecord::from(entry.record);
        for (std::size_t i = 0; i < defs.size(); ++i) {
            if (match_record(defs[i].query, prepared)) base[i].insert(entry.record.id);
        }
    }

    UnitAssignment out;
    for (std::size_t i = 0; i < defs.size(); ++i) {
        UnitMembers members{defs[i].name, {}};
        for (const auto& id : base[i]) {
            const bool removed = std::any_of(defs[i].minus.begin(), defs[i].minus.end(), [&](const auto& m) {
                return base[by_name.find(m)->second].contains(id);
            });
            if (!removed) members.paper_ids.push_back(id);
        }
        out.units.push_back(std::move(members));
    }
    return out;
}

}  // namespace fraccite::query
