#include "gridunit/formula.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>

#include "gridunit/errors.hpp"
#include "gridunit/value.hpp"

namespace gridunit {

std::string_view binary_op_token(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Pow: return "^";
        case BinaryOp::Concat: return "&";
        case BinaryOp::Eq: return "=";
        case BinaryOp::Ne: return "<>";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
    }
    return "?";
}

RangeRef normalize_range(const CellRef& a, const CellRef& b) {
    assert(text_equal_ci(a.sheet, b.sheet));
    // Sort each axis independently; on equal coordinates the relative flag
    // comes first so the normal form is a function of the endpoint set.
    auto axis = [](std::int32_t va, bool fa, std::int32_t vb, bool fb) {
        if (va > vb || (va == vb && fa && !fb)) {
            std::swap(va, vb);
            std::swap(fa, fb);
        }
        return std::tuple{va, fa, vb, fb};
    };
    auto [c1, cf1, c2, cf2] = axis(a.col, a.col_abs, b.col, b.col_abs);
    auto [r1, rf1, r2, rf2] = axis(a.row, a.row_abs, b.row, b.row_abs);
    RangeRef out;
    out.first = CellRef{a.sheet, c1, r1, cf1, rf1};
    out.second = CellRef{a.sheet, c2, r2, cf2, rf2};
    return out;
}

// ----- lexer -----------------------------------------------------------------

namespace {

bool is_alpha(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return is_alpha(c) || c == '_'; }
bool is_ident_char(char c) { return is_alpha(c) || is_digit(c) || c == '_'; }

struct RefMatch {
    std::size_t length = 0;
    std::optional<std::string> sheet;
    std::int32_t col = 0, row = 0;
    bool col_abs = false, row_abs = false;
    bool plain = false;  // no sheet and no $: could still be an identifier
};

// [ident '!']? '$'? letters '$'? digits, ending at a token boundary.
std::optional<RefMatch> match_ref(std::string_view s, std::size_t start) {
    RefMatch m;
    std::size_t i = start;

    if (i < s.size() && is_ident_start(s[i])) {
        std::size_t j = i;
        while (j < s.size() && is_ident_char(s[j])) ++j;
        if (j < s.size() && s[j] == '!') {
            m.sheet = std::string(s.substr(i, j - i));
            i = j + 1;
        }
    }
    if (i < s.size() && s[i] == '$') {
        m.col_abs = true;
        ++i;
    }
    std::size_t letters = i;
    while (i < s.size() && is_alpha(s[i])) ++i;
    if (i == letters) return std::nullopt;
    auto col = column_number(s.substr(letters, i - letters));
    if (!col) return std::nullopt;
    m.col = *col;

    if (i < s.size() && s[i] == '$') {
        m.row_abs = true;
        ++i;
    }
    std::size_t digits = i;
    std::int64_t row = 0;
    while (i < s.size() && is_digit(s[i])) {
        row = row * 10 + (s[i] - '0');
        if (row > kMaxRows) return std::nullopt;
        ++i;
    }
    if (i == digits || row < 1) return std::nullopt;
    m.row = static_cast<std::int32_t>(row);

    if (i < s.size() && (is_ident_char(s[i]) || s[i] == '$')) return std::nullopt;
    m.length = i - start;
    m.plain = !m.sheet && !m.col_abs && !m.row_abs;
    return m;
}

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto fail = [&](const std::string& msg, std::size_t at) -> void {
        throw ParseError(msg, 0, at + 1);
    };

    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t') {
            ++i;
            continue;
        }

        Token t;
        t.pos = i;

        switch (c) {
            case '(': t.kind = TokenKind::LParen; break;
            case ')': t.kind = TokenKind::RParen; break;
            case ',': t.kind = TokenKind::Comma; break;
            case ':': t.kind = TokenKind::Colon; break;
            case '&': t.kind = TokenKind::Ampersand; break;
            case '%': t.kind = TokenKind::Percent; break;
            case '^': t.kind = TokenKind::Caret; break;
            case '*': t.kind = TokenKind::Star; break;
            case '/': t.kind = TokenKind::Slash; break;
            case '+': t.kind = TokenKind::Plus; break;
            case '-': t.kind = TokenKind::Minus; break;
            case '=': t.kind = TokenKind::Equal; break;
            default: t.kind = TokenKind::End; break;
        }
        if (t.kind != TokenKind::End) {
            t.text = c;
            out.push_back(std::move(t));
            ++i;
            continue;
        }

        if (c == '<') {
            if (i + 1 < src.size() && src[i + 1] == '=') {
                t.kind = TokenKind::LessEqual;
                t.text = "<=";
                i += 2;
            } else if (i + 1 < src.size() && src[i + 1] == '>') {
                t.kind = TokenKind::NotEqual;
                t.text = "<>";
                i += 2;
            } else {
                t.kind = TokenKind::Less;
                t.text = "<";
                ++i;
            }
            out.push_back(std::move(t));
            continue;
        }
        if (c == '>') {
            if (i + 1 < src.size() && src[i + 1] == '=') {
                t.kind = TokenKind::GreaterEqual;
                t.text = ">=";
                i += 2;
            } else {
                t.kind = TokenKind::Greater;
                t.text = ">";
                ++i;
            }
            out.push_back(std::move(t));
            continue;
        }

        if (c == '"') {
            auto res = scan_quoted(src, i);
            if (!res) fail("unterminated string", i);
            t.kind = TokenKind::String;
            t.text = std::move(res->first);
            i = res->second;
            out.push_back(std::move(t));
            continue;
        }

        if (is_digit(c) || (c == '.' && i + 1 < src.size() && is_digit(src[i + 1]))) {
            std::size_t j = i;
            while (j < src.size() && is_digit(src[j])) ++j;
            if (j < src.size() && src[j] == '.') {
                ++j;
                while (j < src.size() && is_digit(src[j])) ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                std::size_t digits = k;
                while (k < src.size() && is_digit(src[k])) ++k;
                if (k > digits) j = k;  // only take the exponent when complete
            }
            auto parsed = parse_number(src.substr(i, j - i));
            if (!parsed) fail("malformed number", i);
            t.kind = TokenKind::Number;
            t.number = *parsed;
            t.text = std::string(src.substr(i, j - i));
            i = j;
            out.push_back(std::move(t));
            continue;
        }

        if (is_ident_start(c) || c == '$') {
            auto ref = match_ref(src, i);
            // A plain letters+digits run directly before '(' is a call name.
            if (ref && !(ref->plain && i + ref->length < src.size() && src[i + ref->length] == '(')) {
                t.kind = TokenKind::Ref;
                t.text = std::string(src.substr(i, ref->length));
                t.sheet = std::move(ref->sheet);
                t.col = ref->col;
                t.row = ref->row;
                t.col_abs = ref->col_abs;
                t.row_abs = ref->row_abs;
                i += ref->length;
                out.push_back(std::move(t));
                continue;
            }
            if (c == '$') fail("malformed reference", i);
            std::size_t j = i;
            while (j < src.size() && is_ident_char(src[j])) ++j;
            t.kind = TokenKind::Ident;
            t.text = std::string(src.substr(i, j - i));
            i = j;
            out.push_back(std::move(t));
            continue;
        }

        fail(std::string("illegal character '") + c + "'", i);
    }

    Token end;
    end.kind = TokenKind::End;
    end.pos = src.size();
    out.push_back(std::move(end));
    return out;
}

// ----- parser ----------------------------------------------------------------

namespace {

bool is_comparison(TokenKind k) {
    return k == TokenKind::Equal || k == TokenKind::NotEqual || k == TokenKind::Less ||
           k == TokenKind::LessEqual || k == TokenKind::Greater || k == TokenKind::GreaterEqual;
}

BinaryOp comparison_op(TokenKind k) {
    switch (k) {
        case TokenKind::Equal: return BinaryOp::Eq;
        case TokenKind::NotEqual: return BinaryOp::Ne;
        case TokenKind::Less: return BinaryOp::Lt;
        case TokenKind::LessEqual: return BinaryOp::Le;
        case TokenKind::Greater: return BinaryOp::Gt;
        default: return BinaryOp::Ge;
    }
}

class Parser {
public:
    Parser(std::vector<Token> toks, std::string_view default_sheet)
        : toks_(std::move(toks)), default_sheet_(default_sheet) {}

    ExprPtr run() {
        ExprPtr e = expression();
        if (cur().kind != TokenKind::End) fail("trailing input");
        return e;
    }

private:
    const Token& cur() const { return toks_[i_]; }
    const Token& advance() { return toks_[i_++]; }
    bool accept(TokenKind k) {
        if (cur().kind != k) return false;
        ++i_;
        return true;
    }
    void expect(TokenKind k, const char* what) {
        if (!accept(k)) fail(std::string("expected ") + what);
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, 0, cur().pos + 1);
    }

    ExprPtr expression() {
        ExprPtr lhs = concat();
        if (is_comparison(cur().kind)) {
            BinaryOp op = comparison_op(advance().kind);
            ExprPtr rhs = concat();
            if (is_comparison(cur().kind)) fail("comparisons do not chain");
            return make_node(BinaryExpr{op, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    ExprPtr concat() {
        ExprPtr e = additive();
        while (accept(TokenKind::Ampersand))
            e = make_node(BinaryExpr{BinaryOp::Concat, std::move(e), additive()});
        return e;
    }

    ExprPtr additive() {
        ExprPtr e = term();
        while (true) {
            if (accept(TokenKind::Plus))
                e = make_node(BinaryExpr{BinaryOp::Add, std::move(e), term()});
            else if (accept(TokenKind::Minus))
                e = make_node(BinaryExpr{BinaryOp::Sub, std::move(e), term()});
            else
                return e;
        }
    }

    ExprPtr term() {
        ExprPtr e = unary();
        while (true) {
            if (accept(TokenKind::Star))
                e = make_node(BinaryExpr{BinaryOp::Mul, std::move(e), unary()});
            else if (accept(TokenKind::Slash))
                e = make_node(BinaryExpr{BinaryOp::Div, std::move(e), unary()});
            else
                return e;
        }
    }

    ExprPtr unary() {
        if (accept(TokenKind::Minus)) return make_node(UnaryExpr{UnaryOp::Negate, unary()});
        if (accept(TokenKind::Plus)) return unary();  // unary plus is a no-op
        return power();
    }

    ExprPtr power() {
        ExprPtr base = postfix();
        if (accept(TokenKind::Caret))
            return make_node(BinaryExpr{BinaryOp::Pow, std::move(base), unary()});
        return base;
    }

    ExprPtr postfix() {
        ExprPtr e = primary();
        while (accept(TokenKind::Percent)) e = make_node(UnaryExpr{UnaryOp::Percent, std::move(e)});
        return e;
    }

    CellRef resolve(const Token& t) const {
        CellRef ref;
        ref.sheet = t.sheet ? *t.sheet : std::string(default_sheet_);
        ref.col = t.col;
        ref.row = t.row;
        ref.col_abs = t.col_abs;
        ref.row_abs = t.row_abs;
        return ref;
    }

    ExprPtr primary() {
        const Token& t = cur();
        switch (t.kind) {
            case TokenKind::Number: {
                advance();
                return make_node(NumberLit{t.number});
            }
            case TokenKind::String: {
                advance();
                return make_node(TextLit{t.text});
            }
            case TokenKind::Ident: {
                if (text_equal_ci(t.text, "TRUE") && toks_[i_ + 1].kind != TokenKind::LParen) {
                    advance();
                    return make_node(BoolLit{true});
                }
                if (text_equal_ci(t.text, "FALSE") && toks_[i_ + 1].kind != TokenKind::LParen) {
                    advance();
                    return make_node(BoolLit{false});
                }
                std::string name = t.text;
                for (char& c : name)
                    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
                advance();
                if (!accept(TokenKind::LParen)) fail("unknown name '" + t.text + "'");
                CallExpr call{std::move(name), {}};
                if (!accept(TokenKind::RParen)) {
                    call.args.push_back(expression());
                    while (accept(TokenKind::Comma)) call.args.push_back(expression());
                    expect(TokenKind::RParen, "')'");
                }
                return make_node(std::move(call));
            }
            case TokenKind::Ref: {
                CellRef first = resolve(t);
                advance();
                if (accept(TokenKind::Colon)) {
                    const Token& u = cur();
                    if (u.kind != TokenKind::Ref) fail("expected range endpoint");
                    CellRef second = resolve(u);
                    if (u.sheet && !text_equal_ci(*u.sheet, first.sheet))
                        fail("range endpoints on different sheets");
                    second.sheet = first.sheet;
                    advance();
                    return make_node(normalize_range(first, second));
                }
                return make_node(RefExpr{std::move(first)});
            }
            case TokenKind::LParen: {
                advance();
                ExprPtr e = expression();
                expect(TokenKind::RParen, "')'");
                return e;
            }
            default:
                fail("unexpected token");
        }
    }

    std::vector<Token> toks_;
    std::string_view default_sheet_;
    std::size_t i_ = 0;
};

}  // namespace

ExprPtr parse_formula(std::string_view src, std::string_view default_sheet) {
    return Parser(tokenize(src), default_sheet).run();
}

// ----- printer ---------------------------------------------------------------

namespace {

// comparisons=1; &=2; +-=3; */=4; unary minus=5; ^=6; %=7; atoms=9
int binary_precedence(BinaryOp op) {
    switch (op) {
        case BinaryOp::Eq:
        case BinaryOp::Ne:
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return 1;
        case BinaryOp::Concat: return 2;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 3;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 4;
        case BinaryOp::Pow: return 6;
    }
    return 9;
}

int node_precedence(const Expr& e) {
    struct V {
        int operator()(const NumberLit&) const { return 9; }
        int operator()(const TextLit&) const { return 9; }
        int operator()(const BoolLit&) const { return 9; }
        int operator()(const RefExpr&) const { return 9; }
        int operator()(const RangeRef&) const { return 9; }
        int operator()(const UnaryExpr& u) const { return u.op == UnaryOp::Negate ? 5 : 7; }
        int operator()(const BinaryExpr& b) const { return binary_precedence(b.op); }
        int operator()(const CallExpr&) const { return 9; }
    };
    return std::visit(V{}, e.node);
}

struct Printer {
    std::string_view default_sheet;
    std::string out;

    void emit(const Expr& e, int min_prec) {
        bool parens = node_precedence(e) < min_prec;
        if (parens) out += '(';
        std::visit([&](const auto& n) { (*this)(n); }, e.node);
        if (parens) out += ')';
    }

    void operator()(const NumberLit& n) { out += format_number(n.value); }
    void operator()(const TextLit& t) {
        out += '"';
        for (char c : t.value) {
            if (c == '"') out += "\"\"";
            else out += c;
        }
        out += '"';
    }
    void operator()(const BoolLit& b) { out += b.value ? "TRUE" : "FALSE"; }
    void operator()(const RefExpr& r) { out += render_cellref(r.ref, default_sheet); }
    void operator()(const RangeRef& r) {
        out += render_cellref(r.first, default_sheet);
        out += ':';
        // Same sheet by invariant, never re-qualified.
        out += render_cellref(r.second, r.second.sheet);
    }
    void operator()(const UnaryExpr& u) {
        if (u.op == UnaryOp::Negate) {
            out += '-';
            emit(*u.operand, 5);
        } else {
            emit(*u.operand, 7);
            out += '%';
        }
    }
    void operator()(const BinaryExpr& b) {
        int prec = binary_precedence(b.op);
        switch (b.op) {
            case BinaryOp::Pow:
                emit(*b.lhs, 7);
                out += '^';
                emit(*b.rhs, 5);
                return;
            case BinaryOp::Eq:
            case BinaryOp::Ne:
            case BinaryOp::Lt:
            case BinaryOp::Le:
            case BinaryOp::Gt:
            case BinaryOp::Ge:
                emit(*b.lhs, prec + 1);
                out += binary_op_token(b.op);
                emit(*b.rhs, prec + 1);
                return;
            default:
                emit(*b.lhs, prec);
                out += binary_op_token(b.op);
                emit(*b.rhs, prec + 1);
                return;
        }
    }
    void operator()(const CallExpr& c) {
        out += c.name;
        out += '(';
        for (std::size_t i = 0; i < c.args.size(); ++i) {
            if (i) out += ',';
            emit(*c.args[i], 1);
        }
        out += ')';
    }
};

}  // namespace

std::string print_formula(const Expr& ast, std::string_view default_sheet) {
    Printer p{default_sheet, {}};
    p.emit(ast, 0);
    return std::move(p.out);
}

// ----- structural equality ---------------------------------------------------

bool ast_equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    struct V {
        const Expr& other;
        bool operator()(const NumberLit& n) const { return std::get<NumberLit>(other.node).value == n.value; }
        bool operator()(const TextLit& t) const { return std::get<TextLit>(other.node).value == t.value; }
        bool operator()(const BoolLit& x) const { return std::get<BoolLit>(other.node).value == x.value; }
        bool operator()(const RefExpr& r) const { return std::get<RefExpr>(other.node).ref == r.ref; }
        bool operator()(const RangeRef& r) const {
            const auto& o = std::get<RangeRef>(other.node);
            return o.first == r.first && o.second == r.second;
        }
        bool operator()(const UnaryExpr& u) const {
            const auto& o = std::get<UnaryExpr>(other.node);
            return o.op == u.op && ast_equal(*o.operand, *u.operand);
        }
        bool operator()(const BinaryExpr& x) const {
            const auto& o = std::get<BinaryExpr>(other.node);
            return o.op == x.op && ast_equal(*o.lhs, *x.lhs) && ast_equal(*o.rhs, *x.rhs);
        }
        bool operator()(const CallExpr& c) const {
            const auto& o = std::get<CallExpr>(other.node);
            if (o.name != c.name || o.args.size() != c.args.size()) return false;
            for (std::size_t i = 0; i < c.args.size(); ++i)
                if (!ast_equal(*o.args[i], *c.args[i])) return false;
            return true;
        }
    };
    return std::visit(V{b}, a.node);
}

// ----- reference utilities ----------------------------------------------------

namespace {

void collect_into(const Expr& e, std::vector<RefOrRange>& out) {
    struct V {
        std::vector<RefOrRange>& out;
        void operator()(const NumberLit&) const {}
        void operator()(const TextLit&) const {}
        void operator()(const BoolLit&) const {}
        void operator()(const RefExpr& r) const { out.push_back(r.ref); }
        void operator()(const RangeRef& r) const { out.push_back(r); }
        void operator()(const UnaryExpr& u) const { collect_into(*u.operand, out); }
        void operator()(const BinaryExpr& b) const {
            collect_into(*b.lhs, out);
            collect_into(*b.rhs, out);
        }
        void operator()(const CallExpr& c) const {
            for (const auto& a : c.args) collect_into(*a, out);
        }
    };
    std::visit(V{out}, e.node);
}

}  // namespace

std::vector<RefOrRange> collect_refs(const Expr& ast) {
    std::vector<RefOrRange> out;
    collect_into(ast, out);
    return out;
}

CellRef translate_cellref(const CellRef& ref, std::int32_t drow, std::int32_t dcol) {
    CellRef out = ref;
    if (!out.col_abs) out.col += dcol;
    if (!out.row_abs) out.row += drow;
    if (out.col < 1 || out.col > kMaxCols || out.row < 1 || out.row > kMaxRows)
        throw GridError("reference " + render_cellref(ref, ref.sheet) +
                        " shifted out of the grid");
    return out;
}

ExprPtr translate_refs(const Expr& ast, std::int32_t drow, std::int32_t dcol) {
    struct V {
        std::int32_t drow, dcol;
        ExprPtr operator()(const NumberLit& n) const { return make_node(n); }
        ExprPtr operator()(const TextLit& t) const { return make_node(t); }
        ExprPtr operator()(const BoolLit& b) const { return make_node(b); }
        ExprPtr operator()(const RefExpr& r) const {
            return make_node(RefExpr{translate_cellref(r.ref, drow, dcol)});
        }
        ExprPtr operator()(const RangeRef& r) const {
            return make_node(normalize_range(translate_cellref(r.first, drow, dcol),
                                             translate_cellref(r.second, drow, dcol)));
        }
        ExprPtr operator()(const UnaryExpr& u) const {
            return make_node(UnaryExpr{u.op, translate_refs(*u.operand, drow, dcol)});
        }
        ExprPtr operator()(const BinaryExpr& b) const {
            return make_node(BinaryExpr{b.op, translate_refs(*b.lhs, drow, dcol),
                                        translate_refs(*b.rhs, drow, dcol)});
        }
        ExprPtr operator()(const CallExpr& c) const {
            CallExpr out{c.name, {}};
            out.args.reserve(c.args.size());
            for (const auto& a : c.args) out.args.push_back(translate_refs(*a, drow, dcol));
            return make_node(std::move(out));
        }
    };
    return std::visit(V{drow, dcol}, ast.node);
}

namespace {

std::string signature_axis_value(std::int32_t v, bool abs_flag, std::int32_t host) {
    if (abs_flag) return "$" + std::to_string(v);
    return "[" + std::to_string(v - host) + "]";
}

void signature_ref(const CellRef& r, Coord host, std::string& out) {
    out += fold_case(r.sheet);
    out += '!';
    out += signature_axis_value(r.col, r.col_abs, host.col);
    out += ':';
    out += signature_axis_value(r.row, r.row_abs, host.row);
}

// A range is the product of two axis intervals; the endpoint pairing carries
// no meaning, so each axis is encoded as a sorted pair. That keeps fills of
// mixed-anchor ranges in one equivalence class even when normalization pairs
// the flags differently at different rows.
void signature_range_axis(std::int32_t v1, bool abs1, std::int32_t v2, bool abs2,
                          std::int32_t host, std::string& out) {
    std::string a = signature_axis_value(v1, abs1, host);
    std::string b = signature_axis_value(v2, abs2, host);
    if (b < a) std::swap(a, b);
    out += a;
    out += ',';
    out += b;
}

void signature_into(const Expr& e, Coord host, std::string& out) {
    struct V {
        Coord host;
        std::string& out;
        void operator()(const NumberLit& n) const { out += 'n'; out += format_number(n.value); }
        void operator()(const TextLit& t) const {
            out += 't';
            out += std::to_string(t.value.size());
            out += ':';
            out += t.value;
        }
        void operator()(const BoolLit& b) const { out += b.value ? "b1" : "b0"; }
        void operator()(const RefExpr& r) const {
            out += "r(";
            signature_ref(r.ref, host, out);
            out += ')';
        }
        void operator()(const RangeRef& r) const {
            out += "g(";
            out += fold_case(r.first.sheet);
            out += '!';
            signature_range_axis(r.first.col, r.first.col_abs, r.second.col, r.second.col_abs,
                                 host.col, out);
            out += ';';
            signature_range_axis(r.first.row, r.first.row_abs, r.second.row, r.second.row_abs,
                                 host.row, out);
            out += ')';
        }
        void operator()(const UnaryExpr& u) const {
            out += u.op == UnaryOp::Negate ? "(- " : "(% ";
            signature_into(*u.operand, host, out);
            out += ')';
        }
        void operator()(const BinaryExpr& b) const {
            out += '(';
            out += binary_op_token(b.op);
            out += ' ';
            signature_into(*b.lhs, host, out);
            out += ' ';
            signature_into(*b.rhs, host, out);
            out += ')';
        }
        void operator()(const CallExpr& c) const {
            out += '(';
            out += c.name;
            for (const auto& a : c.args) {
                out += ' ';
                signature_into(*a, host, out);
            }
            out += ')';
        }
    };
    std::visit(V{host, out}, e.node);
}

}  // namespace

std::string translation_signature(const Expr& ast, Coord host) {
    std::string out;
    signature_into(ast, host, out);
    return out;
}

}  // namespace gridunit
