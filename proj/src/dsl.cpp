#include "amdl/dsl.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <sstream>

namespace amdl {

std::string to_string(const ParseDiagnostic& d) {
    std::ostringstream os;
    os << d.span.file << ':' << d.span.line << ':' << d.span.column << ": "
       << (d.severity == ParseDiagnostic::Severity::error ? "error" : "warning") << ": "
       << d.message;
    return os.str();
}

namespace {

enum class TokKind { ident, lbrace, rbrace, colon, arrow, comma, lparen, rparen, end, bad };

struct Token {
    TokKind kind = TokKind::end;
    std::string text;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view source) : src_(source) {}

    Token next() {
        skip_trivia();
        Token t;
        t.line = line_;
        t.column = column_;
        if (pos_ >= src_.size()) {
            t.kind = TokKind::end;
            return t;
        }
        char c = src_[pos_];
        if (c == '_' || std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (src_[pos_] == '_' || std::isalnum(static_cast<unsigned char>(src_[pos_]))))
                advance();
            t.kind = TokKind::ident;
            t.text = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        switch (c) {
            case '{': advance(); t.kind = TokKind::lbrace; return t;
            case '}': advance(); t.kind = TokKind::rbrace; return t;
            case ':': advance(); t.kind = TokKind::colon; return t;
            case ',': advance(); t.kind = TokKind::comma; return t;
            case '(': advance(); t.kind = TokKind::lparen; return t;
            case ')': advance(); t.kind = TokKind::rparen; return t;
            case '-':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                    advance();
                    advance();
                    t.kind = TokKind::arrow;
                    return t;
                }
                break;
            default: break;
        }
        advance();
        t.kind = TokKind::bad;
        t.text = printable(c);
        return t;
    }

private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_trivia() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                return;
            }
        }
    }

    static std::string printable(char c) {
        unsigned char u = static_cast<unsigned char>(c);
        if (u >= 0x20 && u < 0x7f) return std::string(1, c);
        static const char* hex = "0123456789abcdef";
        return std::string("\\x") + hex[u >> 4] + hex[u & 0xf];
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

struct MemberSpans {
    SourceSpan name;    // the member's name token
    SourceSpan detail;  // the reference target token, when one exists
};

class Parser {
public:
    Parser(std::string_view source, std::string file)
        : lexer_(source), file_(std::move(file)) {
        cur_ = lexer_.next();
        ahead_ = lexer_.next();
    }

    ParseResult run() {
        AbstractModel model;
        while (cur_.kind != TokKind::end) {
            if (cur_.kind == TokKind::ident && cur_.text == "entity") {
                advance();
                if (auto table = parse_table(AbstractTable::Kind::entity)) {
                    table_spans_.emplace(table->name.str(), span_of_last_name_);
                    model.tables.push_back(std::move(*table));
                }
            } else {
                error(cur_, "expected 'entity'");
                advance();
                synchronize_top_level();
            }
        }
        check_duplicate_tables(model);
        if (has_errors()) return {std::nullopt, std::move(diagnostics_)};

        for (const auto& issue : validate_model(model))
            diagnostics_.push_back({span_for(issue), ParseDiagnostic::Severity::error, issue.message});
        if (has_errors()) return {std::nullopt, std::move(diagnostics_)};
        return {std::move(model), std::move(diagnostics_)};
    }

private:
    void advance() {
        cur_ = ahead_;
        ahead_ = lexer_.next();
    }

    SourceSpan span(const Token& t) const { return {file_, t.line, t.column}; }

    void error(const Token& at, std::string message) {
        if (at.kind == TokKind::bad)
            message += " (found '" + at.text + "')";
        else if (at.kind == TokKind::end)
            message += " (found end of input)";
        diagnostics_.push_back({span(at), ParseDiagnostic::Severity::error, std::move(message)});
    }

    bool has_errors() const {
        for (const auto& d : diagnostics_)
            if (d.severity == ParseDiagnostic::Severity::error) return true;
        return false;
    }

    void synchronize_top_level() {
        while (cur_.kind != TokKind::end && !(cur_.kind == TokKind::ident && cur_.text == "entity"))
            advance();
    }

    // Recovery inside a table body: drop the offending token unless it closes
    // the body.
    void skip_member_token() {
        if (cur_.kind != TokKind::rbrace && cur_.kind != TokKind::end) advance();
    }

    std::optional<Identifier> expect_ident(const char* what) {
        if (cur_.kind != TokKind::ident) {
            error(cur_, std::string("expected ") + what);
            return std::nullopt;
        }
        span_of_last_name_ = span(cur_);
        Identifier id(cur_.text);
        advance();
        return id;
    }

    bool expect(TokKind kind, const char* what) {
        if (cur_.kind != kind) {
            error(cur_, std::string("expected ") + what);
            return false;
        }
        advance();
        return true;
    }

    std::optional<AbstractTable> parse_table(AbstractTable::Kind kind) {
        auto name = expect_ident("table name");
        if (!name) return std::nullopt;
        SourceSpan name_span = span_of_last_name_;
        if (!expect(TokKind::lbrace, "'{'")) return std::nullopt;

        AbstractTable table{*name, kind, {}};
        std::map<std::string, SourceSpan> seen;
        while (cur_.kind != TokKind::rbrace) {
            if (cur_.kind == TokKind::end) {
                error(cur_, "unterminated body of table " + name->str());
                span_of_last_name_ = name_span;
                return std::nullopt;
            }
            parse_member(table, seen);
        }
        advance();  // '}'
        span_of_last_name_ = name_span;
        return table;
    }

    void parse_member(AbstractTable& table, std::map<std::string, SourceSpan>& seen) {
        bool in_key = false;
        if (cur_.kind == TokKind::ident && cur_.text == "key" && ahead_.kind == TokKind::ident) {
            in_key = true;
            advance();
        }
        Token name_tok = cur_;
        auto name = expect_ident("member name");
        if (!name) {
            skip_member_token();
            return;
        }
        MemberSpans spans{span(name_tok), span(name_tok)};

        if (cur_.kind == TokKind::colon) {
            advance();
            if (cur_.kind == TokKind::ident && cur_.text == "multi" && ahead_.kind == TokKind::ident) {
                if (in_key) error(name_tok, "a multivalued member cannot be marked 'key'");
                advance();  // 'multi'
                auto child = parse_table(AbstractTable::Kind::multivalued);
                if (!child) return;
                spans.detail = span_of_last_name_;
                table_spans_.emplace(child->name.str(), span_of_last_name_);
                add_member(table, seen, *name, spans,
                           Member(MultivaluedChild{*name, std::make_shared<AbstractTable>(std::move(*child))}));
                return;
            }
            Token domain_tok = cur_;
            auto domain = expect_ident("domain name");
            if (!domain) {
                skip_member_token();
                return;
            }
            spans.detail = span(domain_tok);
            add_member(table, seen, *name, spans, Member(PlainAttribute{*name, *domain, in_key}));
            return;
        }
        if (cur_.kind == TokKind::arrow) {
            advance();
            Token target_tok = cur_;
            auto target = expect_ident("target table name");
            if (!target) {
                skip_member_token();
                return;
            }
            spans.detail = span(target_tok);
            EntityReference ref{*name, *target, in_key, {}};
            if (cur_.kind == TokKind::ident && cur_.text == "as" && ahead_.kind == TokKind::lparen) {
                advance();  // 'as'
                advance();  // '('
                while (true) {
                    auto col = expect_ident("column name");
                    if (!col) return;
                    ref.column_names.push_back(*col);
                    if (cur_.kind == TokKind::comma) {
                        advance();
                        continue;
                    }
                    break;
                }
                if (!expect(TokKind::rparen, "')'")) return;
            }
            add_member(table, seen, *name, spans, Member(std::move(ref)));
            return;
        }
        error(cur_, "expected ':' or '->' after member name " + name->str());
        skip_member_token();
    }

    void add_member(AbstractTable& table, std::map<std::string, SourceSpan>& seen,
                    const Identifier& name, const MemberSpans& spans, Member member) {
        auto [it, fresh] = seen.emplace(name.str(), spans.name);
        if (!fresh) {
            diagnostics_.push_back({spans.name, ParseDiagnostic::Severity::error,
                                    "duplicate member name " + name.str() + " in table " +
                                        table.name.str()});
            return;
        }
        member_spans_.emplace(table.name.str() + "\n" + name.str(), spans);
        table.members.push_back(std::move(member));
    }

    void check_duplicate_tables(const AbstractModel& model) {
        std::map<std::string, int> counts;
        for_each_table(model, [&](const AbstractTable& t) {
            if (++counts[t.name.str()] == 2) {
                SourceSpan at = {file_, 1, 1};
                auto it = table_spans_.find(t.name.str());
                if (it != table_spans_.end()) at = it->second;
                diagnostics_.push_back({at, ParseDiagnostic::Severity::error,
                                        "duplicate table name " + t.name.str()});
            }
        });
    }

    SourceSpan span_for(const ValidationIssue& issue) const {
        if (!issue.member.empty()) {
            auto it = member_spans_.find(issue.table + "\n" + issue.member);
            if (it != member_spans_.end()) {
                bool at_detail = issue.message.rfind("unknown entity table", 0) == 0 ||
                                 issue.message.rfind("entity reference target", 0) == 0;
                return at_detail ? it->second.detail : it->second.name;
            }
        }
        auto it = table_spans_.find(issue.table);
        if (it != table_spans_.end()) return it->second;
        return {file_, 1, 1};
    }

    Lexer lexer_;
    std::string file_;
    Token cur_;
    Token ahead_;
    SourceSpan span_of_last_name_{"", 1, 1};
    std::vector<ParseDiagnostic> diagnostics_;
    std::map<std::string, MemberSpans> member_spans_;  // "table\nmember"
    std::map<std::string, SourceSpan> table_spans_;
};

// Nested table declarations always construct multivalued children, so a
// parsed model can only violate the entity-kind nesting rules via the API.

void format_members(const AbstractTable& table, int indent, std::ostream& os);

void format_table(const AbstractTable& table, int indent, std::ostream& os) {
    std::string pad(indent, ' ');
    os << pad << "entity " << table.name << " {\n";
    format_members(table, indent + 2, os);
    os << pad << "}\n";
}

void format_members(const AbstractTable& table, int indent, std::ostream& os) {
    std::string pad(indent, ' ');
    for (const auto& m : table.members) {
        if (const auto* p = std::get_if<PlainAttribute>(&m)) {
            os << pad << (p->in_key ? "key " : "") << p->name << ": " << p->domain << "\n";
        } else if (const auto* e = std::get_if<EntityReference>(&m)) {
            os << pad << (e->in_key ? "key " : "") << e->name << " -> " << e->target;
            if (!e->column_names.empty()) {
                os << " as (";
                for (std::size_t i = 0; i < e->column_names.size(); ++i)
                    os << (i ? ", " : "") << e->column_names[i];
                os << ")";
            }
            os << "\n";
        } else {
            const auto& mv = std::get<MultivaluedChild>(m);
            os << pad << mv.name << ": multi " << mv.table().name << " {\n";
            format_members(mv.table(), indent + 2, os);
            os << pad << "}\n";
        }
    }
}

}  // namespace

ParseResult parse_model(std::string_view source, std::string file) {
    return Parser(source, std::move(file)).run();
}

std::string format_model(const AbstractModel& model) {
    std::ostringstream os;
    for (const auto& t : model.tables) format_table(t, 0, os);
    return os.str();
}

}  // namespace amdl
