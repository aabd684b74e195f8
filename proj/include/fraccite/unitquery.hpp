#pragma once

// Address-query language used to assign publications to organizational units.
//
//   query   := or
//   or      := and  ( OR and )*
//   and     := same ( AND same )*
//   same    := not  ( SAME not )*       -- only inside ad=(...)
//   not     := primary ( NOT primary )* -- binary: left and not right
//   primary := '(' query ')'
//            | 'ad' '=' ( '(' query ')' | phrase )
//            | 'py' '=' ( '(' query ')' | YEAR )
//            | phrase                   -- inside ad scope
//            | YEAR                     -- inside py scope
//
// Precedence is NOT > SAME > AND > OR, all left-associative. Keywords and
// field tags are case-insensitive. A phrase is a run of consecutive words; it
// matches an address containing the same tokens consecutively after
// normalization (lowercase, ",;()" as separators, "." dropped).

#include "fraccite/corpus.hpp"

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fraccite::query {

enum class Field { Address, Year };
enum class BinaryOp { Same, And, Or, Not };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Phrase {
    std::vector<std::string> tokens;
};

struct YearEquals {
    int year = 0;
};

struct FieldScope {
    Field field = Field::Address;
    NodePtr expr;
};

struct Binary {
    BinaryOp op = BinaryOp::And;
    NodePtr left;
    NodePtr right;
};

struct Node {
    std::variant<Phrase, YearEquals, FieldScope, Binary> value;
};

bool equal(const Node& a, const Node& b);

// Builders; mostly for tests and programmatic construction.
NodePtr phrase(std::vector<std::string> tokens);
NodePtr year_equals(int year);
NodePtr scope(Field field, NodePtr expr);
NodePtr binary(BinaryOp op, NodePtr left, NodePtr right);
inline NodePtr same(NodePtr l, NodePtr r) { return binary(BinaryOp::Same, std::move(l), std::move(r)); }
inline NodePtr and_(NodePtr l, NodePtr r) { return binary(BinaryOp::And, std::move(l), std::move(r)); }
inline NodePtr or_(NodePtr l, NodePtr r) { return binary(BinaryOp::Or, std::move(l), std::move(r)); }
inline NodePtr not_(NodePtr l, NodePtr r) { return binary(BinaryOp::Not, std::move(l), std::move(r)); }

class QueryAst {
public:
    explicit QueryAst(NodePtr root) : root_(std::move(root)) {}

    const Node& root() const noexcept { return *root_; }
    const NodePtr& root_ptr() const noexcept { return root_; }

    // Fully parenthesized form; parse(to_string()) yields an equal AST.
    std::string to_string() const;

    bool operator==(const QueryAst& other) const { return equal(*root_, *other.root_); }

private:
    NodePtr root_;
};

// Throws Error{SyntaxError}; the message carries the 0-based offset.
QueryAst parse_query(std::string_view text);

// Normalized token sequence of an address string or query word.
std::vector<std::string> normalize_tokens(std::string_view s);

// A record with its addresses already tokenized; match many queries cheaply.
struct PreparedRecord {
    int year = 0;
    std::vector<std::vector<std::string>> addresses;

    static PreparedRecord from(const PublicationRecord& rec);
};

bool match_record(const QueryAst& ast, const PreparedRecord& rec);
bool match_record(const QueryAst& ast, const PublicationRecord& rec);

// ---- unit definitions -------------------------------------------------------

struct UnitDefinition {
    std::string name;
    QueryAst query;
    std::vector<std::string> minus;  // units whose base results are subtracted
};

// `<name> := <query>` with an optional `\ minus <name>[,<name>...]` suffix;
// blank lines and lines starting with '#' are skipped.
std::vector<UnitDefinition> load_unit_definitions(std::istream& in);

struct UnitMembers {
    std::string name;
    std::vector<std::string> paper_ids;  // sorted, cited-side ids only
};

struct UnitAssignment {
    std::vector<UnitMembers> units;  // definition order

    const UnitMembers* find(std::string_view name) const;
};

// Each unit gets the cited-side records matching its query, minus the records
// matching the base query of every unit in its minus list. Records may belong
// to several units. Throws UnknownUnitInMinus, CyclicMinus, DuplicateUnit.
UnitAssignment assign_units(const Corpus& corpus, const std::vector<UnitDefinition>& defs);

}  // namespace fraccite::query
