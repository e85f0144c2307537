#include "gridunit/value.hpp"

#include <array>
#include <cassert>
#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

namespace gridunit {

std::string_view error_token(ErrorKind k) {
    switch (k) {
        case ErrorKind::Div0: return "#DIV/0!";
        case ErrorKind::Value: return "#VALUE!";
        case ErrorKind::Name: return "#NAME?";
        case ErrorKind::Ref: return "#REF!";
        case ErrorKind::Cycle: return "#CYCLE!";
    }
    return "#VALUE!";
}

std::optional<ErrorKind> parse_error_token(std::string_view s) {
    static constexpr std::array kinds = {ErrorKind::Div0, ErrorKind::Value, ErrorKind::Name,
                                         ErrorKind::Ref, ErrorKind::Cycle};
    for (ErrorKind k : kinds) {
        if (s == error_token(k)) return k;
    }
    return std::nullopt;
}

std::string format_number(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    assert(res.ec == std::errc{});
    return std::string(buf, res.ptr);
}

std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    bool negative = false;
    std::size_t i = 0;
    if (s[0] == '+' || s[0] == '-') {
        negative = s[0] == '-';
        i = 1;
    }
    double v = 0;
    const char* first = s.data() + i;
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return negative ? -v : v;
}

std::string fold_case(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

bool text_equal_ci(std::string_view a, std::string_view b) {
    return compare_text_ci(a, b) == 0;
}

namespace {

char fold_one(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace

int compare_text_ci(std::string_view a, std::string_view b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        unsigned char ca = static_cast<unsigned char>(fold_one(a[i]));
        unsigned char cb = static_cast<unsigned char>(fold_one(b[i]));
        if (ca != cb) return ca < cb ? -1 : 1;
    }
    if (a.size() == b.size()) return 0;
    return a.size() < b.size() ? -1 : 1;
}

CellValue classify_bare_literal(std::string_view s) {
    if (auto n = parse_number(s)) return *n;
    if (text_equal_ci(s, "TRUE")) return true;
    if (text_equal_ci(s, "FALSE")) return false;
    return std::string(s);
}

namespace {

bool text_needs_quotes(const std::string& s) {
    if (s.empty()) return true;
    if (s.front() == '"' || s.front() == '=') return true;
    if (parse_number(s)) return true;
    if (text_equal_ci(s, "TRUE") || text_equal_ci(s, "FALSE")) return true;
    if (parse_error_token(s)) return true;
    return false;
}

std::string quote_text(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string render_literal(const CellValue& v, bool always_quote_text) {
    struct Renderer {
        bool quote;
        std::string operator()(Blank) const { return "(blank)"; }
        std::string operator()(double d) const { return format_number(d); }
        std::string operator()(const std::string& s) const {
            return (quote || text_needs_quotes(s)) ? quote_text(s) : s;
        }
        std::string operator()(bool b) const { return b ? "TRUE" : "FALSE"; }
        std::string operator()(ErrorKind k) const { return std::string(error_token(k)); }
    };
    return std::visit(Renderer{always_quote_text}, v);
}

namespace {

// Number < Text < Boolean
int type_rank(const CellValue& v) {
    if (is_number(v)) return 0;
    if (is_text(v)) return 1;
    return 2;
}

CellValue blank_stand_in(const CellValue& other) {
    if (is_number(other)) return 0.0;
    if (is_text(other)) return std::string();
    return false;
}

}  // namespace

int compare_values(const CellValue& a, const CellValue& b) {
    assert(!is_error(a) && !is_error(b));
    if (is_blank(a) && is_blank(b)) return 0;
    if (is_blank(a)) return compare_values(blank_stand_in(b), b);
    if (is_blank(b)) return compare_values(a, blank_stand_in(a));

    int ra = type_rank(a);
    int rb = type_rank(b);
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (ra) {
        case 0: {
            double x = std::get<double>(a);
            double y = std::get<double>(b);
            if (x < y) return -1;
            if (x > y) return 1;
            return 0;
        }
        case 1:
            return compare_text_ci(std::get<std::string>(a), std::get<std::string>(b));
        default: {
            bool x = std::get<bool>(a);
            bool y = std::get<bool>(b);
            if (x == y) return 0;
            return x ? 1 : -1;
        }
    }
}

std::optional<std::pair<std::string, std::size_t>> scan_quoted(std::string_view s, std::size_t pos) {
    assert(pos < s.size() && s[pos] == '"');
    std::string out;
    std::size_t i = pos + 1;
    while (i < s.size()) {
        if (s[i] == '"') {
            if (i + 1 < s.size() && s[i + 1] == '"') {
                out += '"';
                i += 2;
            } else {
                return std::make_pair(std::move(out), i + 1);
            }
        } else {
            out += s[i];
            ++i;
        }
    }
    return std::nullopt;
}

}  // namespace gridunit
