#include "gridunit/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <queue>
#include <random>

#include "gridunit/errors.hpp"

namespace gridunit {

// ----- ValueMap ----------------------------------------------------------------

const CellValue* ValueMap::find(CellId id) const {
    if (id.sheet < 0 || id.sheet >= sheet_count()) return nullptr;
    auto it = sheets_[id.sheet].find(id.rc);
    return it == sheets_[id.sheet].end() ? nullptr : &it->second;
}

void ValueMap::set(CellId id, CellValue v) { sheets_[id.sheet].insert_or_assign(id.rc, std::move(v)); }

void ValueMap::erase(CellId id) {
    if (id.sheet >= 0 && id.sheet < sheet_count()) sheets_[id.sheet].erase(id.rc);
}

CellValue ValueMap::get(const Workbook& wb, const CellRef& ref) const {
    int s = wb.find_sheet(ref.sheet);
    if (s < 0) return ErrorKind::Ref;
    if (const CellValue* v = find({s, ref.coord()})) return *v;
    return Blank{};
}

// ----- dependency graph ---------------------------------------------------------

namespace {

// Ranges larger than this keep their blank members out of the reverse-edge
// map; recalc_dirty then treats every change as dirtying everything.
constexpr std::int64_t kMaxExpandedRange = 1 << 16;

std::int64_t range_area(const RangeRef& r) {
    return std::int64_t(r.second.row - r.first.row + 1) * (r.second.col - r.first.col + 1);
}

}  // namespace

DepGraph build_dep_graph(const Workbook& wb) {
    DepGraph g;

    for (int s = 0; s < wb.sheet_count(); ++s) {
        for (const auto& [rc, cell] : wb.sheet_cells(s)) {
            if (!cell.is_formula()) continue;
            CellId id{s, rc};
            std::set<CellId> prec;
            for (const RefOrRange& rr : collect_refs(*cell.ast())) {
                if (const CellRef* ref = std::get_if<CellRef>(&rr)) {
                    int rs = wb.find_sheet(ref->sheet);
                    if (rs >= 0) prec.insert({rs, ref->coord()});
                    continue;
                }
                const RangeRef& range = std::get<RangeRef>(rr);
                int rs = wb.find_sheet(range.first.sheet);
                if (rs < 0) continue;
                if (range_area(range) > kMaxExpandedRange) {
                    // Too big to enumerate blanks: keep the populated members
                    // (needed for ordering) and go conservative for dirt.
                    g.conservative = true;
                    for (const auto& [mrc, mcell] : wb.sheet_cells(rs)) {
                        if (mrc.row >= range.first.row && mrc.row <= range.second.row &&
                            mrc.col >= range.first.col && mrc.col <= range.second.col)
                            prec.insert({rs, mrc});
                    }
                } else {
                    for (std::int32_t r = range.first.row; r <= range.second.row; ++r)
                        for (std::int32_t c = range.first.col; c <= range.second.col; ++c)
                            prec.insert({rs, Coord{r, c}});
                }
            }
            auto& out = g.precedents[id];
            out.assign(prec.begin(), prec.end());
            for (const CellId& p : prec) g.dependents[p].push_back(id);
        }
    }

    // Kahn's algorithm over formula-to-formula edges, smallest document
    // position first so the order is deterministic. Whatever never reaches
    // in-degree zero sits on a cycle or downstream of one.
    std::map<CellId, int> indegree;
    for (const auto& [id, prec] : g.precedents) {
        int d = 0;
        for (const CellId& p : prec)
            if (g.precedents.count(p)) ++d;
        indegree[id] = d;
    }

    std::set<CellId> ready;
    for (const auto& [id, d] : indegree)
        if (d == 0) ready.insert(id);

    while (!ready.empty()) {
        CellId id = *ready.begin();
        ready.erase(ready.begin());
        g.topo_order.push_back(id);
        auto dep = g.dependents.find(id);
        if (dep == g.dependents.end()) continue;
        for (const CellId& d : dep->second) {
            auto it = indegree.find(d);
            if (it != indegree.end() && --it->second == 0) ready.insert(d);
        }
    }

    for (const auto& [id, d] : indegree)
        if (d > 0) g.cyclic.insert(id);

    return g;
}

// ----- evaluation ----------------------------------------------------------------

namespace {

CellValue number_or_value_error(double v) {
    if (!std::isfinite(v)) return ErrorKind::Value;
    return v;
}

std::string_view trim_ascii(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

// Blank -> 0, booleans -> 1/0, numeric-looking text -> its number.
CellValue to_number(const CellValue& v) {
    if (is_error(v)) return v;
    if (is_number(v)) return v;
    if (is_blank(v)) return 0.0;
    if (is_boolean(v)) return std::get<bool>(v) ? 1.0 : 0.0;
    if (auto n = parse_number(trim_ascii(std::get<std::string>(v)))) return *n;
    return ErrorKind::Value;
}

// Number != 0, Blank -> FALSE, text only "TRUE"/"FALSE".
CellValue to_boolean(const CellValue& v) {
    if (is_error(v)) return v;
    if (is_boolean(v)) return v;
    if (is_number(v)) return std::get<double>(v) != 0.0;
    if (is_blank(v)) return false;
    const std::string& s = std::get<std::string>(v);
    if (text_equal_ci(s, "TRUE")) return true;
    if (text_equal_ci(s, "FALSE")) return false;
    return ErrorKind::Value;
}

std::string to_concat_text(const CellValue& v) {
    if (is_blank(v)) return "";
    if (is_number(v)) return format_number(std::get<double>(v));
    if (is_boolean(v)) return std::get<bool>(v) ? "TRUE" : "FALSE";
    return std::get<std::string>(v);
}

const CellValue* scalar_of(const ArgValue& a) { return std::get_if<CellValue>(&a); }

class Evaluator {
public:
    explicit Evaluator(EvalContext& ctx) : ctx_(ctx) {}

    CellValue eval(const Expr& e) {
        ArgValue a = eval_arg(e);
        if (const CellValue* v = scalar_of(a)) return *v;
        return ErrorKind::Value;  // a range where a scalar belongs
    }

    ArgValue eval_arg(const Expr& e) {
        struct V {
            Evaluator& self;
            ArgValue operator()(const NumberLit& n) const { return CellValue(n.value); }
            ArgValue operator()(const TextLit& t) const { return CellValue(t.value); }
            ArgValue operator()(const BoolLit& b) const { return CellValue(b.value); }
            ArgValue operator()(const RefExpr& r) const {
                return self.ctx_.lookup(r.ref.sheet, r.ref.coord());
            }
            ArgValue operator()(const RangeRef& r) const { return r; }
            ArgValue operator()(const UnaryExpr& u) const { return self.eval_unary(u); }
            ArgValue operator()(const BinaryExpr& b) const { return self.eval_binary(b); }
            ArgValue operator()(const CallExpr& c) const { return self.eval_call(c); }
        };
        return std::visit(V{*this}, e.node);
    }

private:
    CellValue eval_unary(const UnaryExpr& u) {
        CellValue v = to_number(eval(*u.operand));
        if (is_error(v)) return v;
        double x = std::get<double>(v);
        return number_or_value_error(u.op == UnaryOp::Negate ? -x : x / 100.0);
    }

    CellValue eval_binary(const BinaryExpr& b) {
        CellValue lhs = eval(*b.lhs);
        if (is_error(lhs)) return lhs;
        CellValue rhs = eval(*b.rhs);
        if (is_error(rhs)) return rhs;

        switch (b.op) {
            case BinaryOp::Concat:
                return to_concat_text(lhs) + to_concat_text(rhs);
            case BinaryOp::Eq:
            case BinaryOp::Ne:
            case BinaryOp::Lt:
            case BinaryOp::Le:
            case BinaryOp::Gt:
            case BinaryOp::Ge: {
                int c = compare_values(lhs, rhs);
                switch (b.op) {
                    case BinaryOp::Eq: return c == 0;
                    case BinaryOp::Ne: return c != 0;
                    case BinaryOp::Lt: return c < 0;
                    case BinaryOp::Le: return c <= 0;
                    case BinaryOp::Gt: return c > 0;
                    default: return c >= 0;
                }
            }
            default:
                break;
        }

        CellValue ln = to_number(lhs);
        if (is_error(ln)) return ln;
        CellValue rn = to_number(rhs);
        if (is_error(rn)) return rn;
        double x = std::get<double>(ln);
        double y = std::get<double>(rn);
        switch (b.op) {
            case BinaryOp::Add: return number_or_value_error(x + y);
            case BinaryOp::Sub: return number_or_value_error(x - y);
            case BinaryOp::Mul: return number_or_value_error(x * y);
            case BinaryOp::Div:
                if (y == 0.0) return ErrorKind::Div0;
                return number_or_value_error(x / y);
            case BinaryOp::Pow: {
                double r = std::pow(x, y);
                if (!std::isfinite(r)) return x == 0.0 && y < 0.0 ? ErrorKind::Div0 : ErrorKind::Value;
                return r;
            }
            default:
                return ErrorKind::Value;
        }
    }

    ArgValue eval_call(const CallExpr& c) {
        if (c.name == "IF") return eval_if(c);  // short-circuits
        std::vector<ArgValue> args;
        args.reserve(c.args.size());
        for (const auto& a : c.args) args.push_back(eval_arg(*a));
        return call_builtin(c.name, args, ctx_, &c);
    }

    CellValue eval_if(const CallExpr& c) {
        if (c.args.size() < 2 || c.args.size() > 3) return ErrorKind::Value;
        CellValue cond = to_boolean(eval(*c.args[0]));
        if (is_error(cond)) return cond;
        if (std::get<bool>(cond)) return eval(*c.args[1]);
        if (c.args.size() == 3) return eval(*c.args[2]);
        return false;
    }

    EvalContext& ctx_;
};

// Walks the scalar args and range members of an aggregate call, left to
// right. fn returns false to stop (after stashing an error).
template <class Fn>
CellValue walk_operands(std::span<const ArgValue> args, EvalContext& ctx, Fn&& fn) {
    for (const ArgValue& a : args) {
        if (const CellValue* v = scalar_of(a)) {
            if (is_error(*v)) return *v;
            if (auto err = fn(*v, /*from_range=*/false)) return *err;
            continue;
        }
        const RangeRef& r = std::get<RangeRef>(a);
        for (std::int32_t row = r.first.row; row <= r.second.row; ++row) {
            for (std::int32_t col = r.first.col; col <= r.second.col; ++col) {
                CellValue v = ctx.lookup(r.first.sheet, Coord{row, col});
                if (is_error(v)) return v;
                if (auto err = fn(v, /*from_range=*/true)) return *err;
            }
        }
    }
    return Blank{};  // sentinel: no error
}

CellValue logical_fold(std::span<const ArgValue> args, EvalContext& ctx, bool is_and) {
    if (args.empty()) return ErrorKind::Value;
    bool acc = is_and;
    bool saw_operand = false;
    CellValue stop = walk_operands(args, ctx, [&](const CellValue& v, bool) -> std::optional<CellValue> {
        if (is_blank(v)) return std::nullopt;  // skipped
        if (is_text(v)) return CellValue(ErrorKind::Value);
        bool b = is_boolean(v) ? std::get<bool>(v) : std::get<double>(v) != 0.0;
        saw_operand = true;
        acc = is_and ? (acc && b) : (acc || b);
        return std::nullopt;
    });
    if (is_error(stop)) return stop;
    if (!saw_operand) return ErrorKind::Value;
    return acc;
}

struct NumericFold {
    double sum = 0;
    double min = 0;
    double max = 0;
    std::int64_t count = 0;

    void add(double v) {
        if (count == 0) {
            min = max = v;
        } else {
            min = std::min(min, v);
            max = std::max(max, v);
        }
        sum += v;
        ++count;
    }
};

// Direct scalar args coerce (blank skipped, non-numeric text is an error);
// range members contribute only when they already hold numbers.
CellValue numeric_fold(std::span<const ArgValue> args, EvalContext& ctx, NumericFold& acc) {
    return walk_operands(args, ctx, [&](const CellValue& v, bool from_range) -> std::optional<CellValue> {
        if (is_blank(v)) return std::nullopt;
        if (from_range) {
            if (is_number(v)) acc.add(std::get<double>(v));
            return std::nullopt;
        }
        CellValue n = to_number(v);
        if (is_error(n)) return n;
        acc.add(std::get<double>(n));
        return std::nullopt;
    });
}

struct Criteria {
    BinaryOp op = BinaryOp::Eq;
    CellValue value;
};

std::optional<Criteria> parse_criteria(const CellValue& v) {
    if (is_error(v)) return std::nullopt;
    if (!is_text(v)) return Criteria{BinaryOp::Eq, v};
    std::string_view s = std::get<std::string>(v);
    BinaryOp op = BinaryOp::Eq;
    if (s.starts_with("<=")) { op = BinaryOp::Le; s.remove_prefix(2); }
    else if (s.starts_with(">=")) { op = BinaryOp::Ge; s.remove_prefix(2); }
    else if (s.starts_with("<>")) { op = BinaryOp::Ne; s.remove_prefix(2); }
    else if (s.starts_with("<")) { op = BinaryOp::Lt; s.remove_prefix(1); }
    else if (s.starts_with(">")) { op = BinaryOp::Gt; s.remove_prefix(1); }
    else if (s.starts_with("=")) { op = BinaryOp::Eq; s.remove_prefix(1); }
    else return Criteria{BinaryOp::Eq, v};
    return Criteria{op, classify_bare_literal(s)};
}

bool criteria_match(const Criteria& crit, const CellValue& member) {
    if (is_blank(crit.value)) return false;
    int c = compare_values(member, crit.value);
    switch (crit.op) {
        case BinaryOp::Eq: return c == 0;
        case BinaryOp::Ne: return c != 0;
        case BinaryOp::Lt: return c < 0;
        case BinaryOp::Le: return c <= 0;
        case BinaryOp::Gt: return c > 0;
        case BinaryOp::Ge: return c >= 0;
        default: return false;
    }
}

}  // namespace

CellValue call_builtin(std::string_view name, std::span<const ArgValue> args, EvalContext& ctx,
                       const void* rand_site) {
    auto scalar_arg = [&](std::size_t i) -> CellValue {
        if (const CellValue* v = scalar_of(args[i])) return *v;
        return ErrorKind::Value;
    };

    if (name == "IF") {
        // Reachable only through call_builtin directly; eval_formula handles
        // IF before argument evaluation so the untaken branch stays dead.
        if (args.size() < 2 || args.size() > 3) return ErrorKind::Value;
        CellValue cond = to_boolean(scalar_arg(0));
        if (is_error(cond)) return cond;
        if (std::get<bool>(cond)) return scalar_arg(1);
        return args.size() == 3 ? scalar_arg(2) : CellValue(false);
    }

    if (name == "AND" || name == "OR") return logical_fold(args, ctx, name == "AND");

    if (name == "NOT") {
        if (args.size() != 1) return ErrorKind::Value;
        CellValue b = to_boolean(scalar_arg(0));
        if (is_error(b)) return b;
        return !std::get<bool>(b);
    }

    if (name == "SUM" || name == "AVERAGE" || name == "MIN" || name == "MAX" || name == "COUNT") {
        if (name == "COUNT") {
            std::int64_t count = 0;
            CellValue stop = walk_operands(args, ctx, [&](const CellValue& v, bool) -> std::optional<CellValue> {
                if (is_number(v)) ++count;
                return std::nullopt;
            });
            if (is_error(stop)) return stop;
            return static_cast<double>(count);
        }
        NumericFold acc;
        CellValue stop = numeric_fold(args, ctx, acc);
        if (is_error(stop)) return stop;
        if (name == "SUM") return number_or_value_error(acc.sum);
        if (name == "AVERAGE") {
            if (acc.count == 0) return ErrorKind::Div0;
            return number_or_value_error(acc.sum / static_cast<double>(acc.count));
        }
        if (acc.count == 0) return 0.0;
        return name == "MIN" ? acc.min : acc.max;
    }

    if (name == "ABS") {
        if (args.size() != 1) return ErrorKind::Value;
        CellValue n = to_number(scalar_arg(0));
        if (is_error(n)) return n;
        return std::fabs(std::get<double>(n));
    }

    if (name == "ROUND") {
        if (args.size() != 2) return ErrorKind::Value;
        CellValue xn = to_number(scalar_arg(0));
        if (is_error(xn)) return xn;
        CellValue dn = to_number(scalar_arg(1));
        if (is_error(dn)) return dn;
        double x = std::get<double>(xn);
        double digits = std::trunc(std::get<double>(dn));
        if (digits > 308) return x;
        if (digits < -308) return 0.0;
        double f = std::pow(10.0, digits);
        return number_or_value_error(std::round(x * f) / f);  // half away from zero
    }

    if (name == "COUNTIF") {
        if (args.size() != 2) return ErrorKind::Value;
        const RangeRef* range = std::get_if<RangeRef>(&args[0]);
        if (!range) return ErrorKind::Value;
        CellValue craw = scalar_arg(1);
        if (is_error(craw)) return craw;
        auto crit = parse_criteria(craw);
        if (!crit) return ErrorKind::Value;
        std::int64_t count = 0;
        for (std::int32_t row = range->first.row; row <= range->second.row; ++row) {
            for (std::int32_t col = range->first.col; col <= range->second.col; ++col) {
                CellValue v = ctx.lookup(range->first.sheet, Coord{row, col});
                if (is_error(v)) return v;
                if (is_blank(v)) continue;
                if (criteria_match(*crit, v)) ++count;
            }
        }
        return static_cast<double>(count);
    }

    if (name == "RAND") {
        if (!args.empty()) return ErrorKind::Value;
        return ctx.rand_draw(rand_site);
    }

    return ErrorKind::Name;
}

CellValue eval_formula(const Expr& ast, EvalContext& ctx) {
    CellValue v = Evaluator(ctx).eval(ast);
    if (is_number(v) && !std::isfinite(std::get<double>(v))) return ErrorKind::Value;
    return v;
}

// ----- recalculation -------------------------------------------------------------

namespace {

void collect_rand_sites(const Expr& e, std::vector<const CallExpr*>& out) {
    struct V {
        std::vector<const CallExpr*>& out;
        void operator()(const NumberLit&) const {}
        void operator()(const TextLit&) const {}
        void operator()(const BoolLit&) const {}
        void operator()(const RefExpr&) const {}
        void operator()(const RangeRef&) const {}
        void operator()(const UnaryExpr& u) const { collect_rand_sites(*u.operand, out); }
        void operator()(const BinaryExpr& b) const {
            collect_rand_sites(*b.lhs, out);
            collect_rand_sites(*b.rhs, out);
        }
        void operator()(const CallExpr& c) const {
            if (c.name == "RAND") out.push_back(&c);
            for (const auto& a : c.args) collect_rand_sites(*a, out);
        }
    };
    std::visit(V{out}, e.node);
}

// Each RAND() call site gets one draw from the seeded stream, assigned in
// document order (sheet order, then row-major, then source order). The draw
// a site sees is therefore independent of topological evaluation order.
std::map<const void*, double> assign_rand_draws(const Workbook& wb, const EngineConfig& cfg) {
    std::vector<const CallExpr*> sites;
    for (int s = 0; s < wb.sheet_count(); ++s)
        for (const auto& [rc, cell] : wb.sheet_cells(s))
            if (cell.is_formula()) collect_rand_sites(*cell.ast(), sites);

    std::map<const void*, double> draws;
    if (sites.empty()) return draws;
    std::mt19937_64 gen(cfg.rand_seed);
    for (const CallExpr* site : sites)
        draws.emplace(site, static_cast<double>(gen() >> 11) * 0x1.0p-53);
    return draws;
}

class RecalcContext final : public EvalContext {
public:
    RecalcContext(const Workbook& wb, ValueMap& values, const std::map<const void*, double>& draws)
        : wb_(wb), values_(values), draws_(draws) {}

    CellValue lookup(std::string_view sheet, Coord rc) override {
        int s = wb_.find_sheet(sheet);
        if (s < 0) return ErrorKind::Ref;
        if (const CellValue* v = values_.find({s, rc})) return *v;
        return Blank{};
    }

    double rand_draw(const void* site) override {
        auto it = draws_.find(site);
        if (it != draws_.end()) return it->second;
        // Unregistered site (direct eval_formula use): fall back to a
        // sequential stream.
        return static_cast<double>(fallback_() >> 11) * 0x1.0p-53;
    }

private:
    const Workbook& wb_;
    ValueMap& values_;
    const std::map<const void*, double>& draws_;
    std::mt19937_64 fallback_{0};
};

void seed_literals(const Workbook& wb, ValueMap& m) {
    for (int s = 0; s < wb.sheet_count(); ++s)
        for (const auto& [rc, cell] : wb.sheet_cells(s))
            if (cell.is_literal()) m.set({s, rc}, cell.literal_value());
}

const Cell& formula_cell(const Workbook& wb, CellId id) {
    const Cell* c = wb.cell_at(id.sheet, id.rc);
    assert(c && c->is_formula());
    return *c;
}

}  // namespace

bool workbook_uses_rand(const Workbook& wb) {
    std::vector<const CallExpr*> sites;
    for (int s = 0; s < wb.sheet_count(); ++s)
        for (const auto& [rc, cell] : wb.sheet_cells(s)) {
            if (!cell.is_formula()) continue;
            collect_rand_sites(*cell.ast(), sites);
            if (!sites.empty()) return true;
        }
    return false;
}

ValueMap recalc(const Workbook& wb, const EngineConfig& cfg) {
    return recalc(wb, build_dep_graph(wb), cfg);
}

ValueMap recalc(const Workbook& wb, const DepGraph& graph, const EngineConfig& cfg) {
    ValueMap m(wb.sheet_count());
    seed_literals(wb, m);
    for (const CellId& id : graph.cyclic) m.set(id, ErrorKind::Cycle);

    auto draws = assign_rand_draws(wb, cfg);
    RecalcContext ctx(wb, m, draws);
    for (const CellId& id : graph.topo_order)
        m.set(id, eval_formula(*formula_cell(wb, id).ast(), ctx));
    return m;
}

ValueMap recalc_dirty(const Workbook& wb, std::span<const CellRef> changed, const ValueMap& prev,
                      const EngineConfig& cfg) {
    return recalc_dirty(wb, build_dep_graph(wb), changed, prev, cfg);
}

ValueMap recalc_dirty(const Workbook& wb, const DepGraph& graph, std::span<const CellRef> changed,
                      const ValueMap& prev, const EngineConfig& cfg) {
    if (graph.conservative || workbook_uses_rand(wb)) return recalc(wb, graph, cfg);

    std::set<CellId> dirty;
    std::queue<CellId> frontier;
    for (const CellRef& ref : changed) {
        int s = wb.find_sheet(ref.sheet);
        if (s < 0) continue;
        frontier.push({s, ref.coord()});
    }
    while (!frontier.empty()) {
        CellId id = frontier.front();
        frontier.pop();
        auto it = graph.dependents.find(id);
        if (it == graph.dependents.end()) continue;
        for (const CellId& d : it->second)
            if (dirty.insert(d).second) frontier.push(d);
    }

    ValueMap m = prev;
    for (const CellRef& ref : changed) {
        int s = wb.find_sheet(ref.sheet);
        if (s < 0) continue;
        const Cell* c = wb.cell_at(s, ref.coord());
        if (c && c->is_literal())
            m.set({s, ref.coord()}, c->literal_value());
        else if (!c)
            m.erase({s, ref.coord()});  // the change was a clear
    }

    std::map<const void*, double> no_draws;
    RecalcContext ctx(wb, m, no_draws);
    for (const CellId& id : graph.topo_order) {
        if (!dirty.count(id)) continue;
        m.set(id, eval_formula(*formula_cell(wb, id).ast(), ctx));
    }
    return m;
}

// ----- fill ----------------------------------------------------------------------

void fill_formula(Workbook& wb, const CellRef& src, const RangeRef& dst) {
    const Cell* origin = wb.cell_at(src);
    if (!origin || !origin->is_formula())
        throw GridError("source cell " + render_cellref(src, src.sheet) + " holds no formula");
    if (wb.find_sheet(dst.first.sheet) < 0)
        throw GridError("unknown sheet '" + dst.first.sheet + "'");

    bool same_sheet = text_equal_ci(src.sheet, dst.first.sheet);
    std::vector<std::pair<CellRef, Cell>> staged;
    for (std::int32_t row = dst.first.row; row <= dst.second.row; ++row) {
        for (std::int32_t col = dst.first.col; col <= dst.second.col; ++col) {
            if (same_sheet && row == src.row && col == src.col) continue;
            ExprPtr translated = translate_refs(*origin->ast(), row - src.row, col - src.col);
            std::string text = print_formula(*translated, dst.first.sheet);
            staged.emplace_back(CellRef{dst.first.sheet, col, row, false, false},
                                Cell::formula(std::move(text), std::move(translated)));
        }
    }
    for (auto& [ref, cell] : staged) wb.put_cell(ref, std::move(cell));
}

}  // namespace gridunit
