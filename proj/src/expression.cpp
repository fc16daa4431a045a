#include "bva/expression.hpp"

#include "bva/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bva {

struct Expression::Node {
    enum class Op { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call1, Call2 };
    Op op = Op::Number;
    double value = 0.0;
    int var = 0;
    double (*f1)(double) = nullptr;
    double (*f2)(double, double) = nullptr;
    std::shared_ptr<const Node> a, b;

    double eval(const Point& x) const {
        switch (op) {
            case Op::Number:
                return value;
            case Op::Var:
                return x[var];
            case Op::Neg:
                return -a->eval(x);
            case Op::Add:
                return a->eval(x) + b->eval(x);
            case Op::Sub:
                return a->eval(x) - b->eval(x);
            case Op::Mul:
                return a->eval(x) * b->eval(x);
            case Op::Div:
                return a->eval(x) / b->eval(x);
            case Op::Pow:
                return std::pow(a->eval(x), b->eval(x));
            case Op::Call1:
                return f1(a->eval(x));
            case Op::Call2:
                return f2(a->eval(x), b->eval(x));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

double f_sin(double v) { return std::sin(v); }
double f_cos(double v) { return std::cos(v); }
double f_tan(double v) { return std::tan(v); }
double f_exp(double v) { return std::exp(v); }
double f_log(double v) { return std::log(v); }
double f_sqrt(double v) { return std::sqrt(v); }
double f_abs(double v) { return std::abs(v); }
double f_pow(double a, double b) { return std::pow(a, b); }
double f_min(double a, double b) { return std::min(a, b); }
double f_max(double a, double b) { return std::max(a, b); }

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    Parser(std::string_view s, int dim) : s_(s), dim_(dim) {}

    NodePtr parse_all() {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("expression '" + std::string(s_) + "': " + what + " at column " + std::to_string(pos_ + 1));
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr l = term();
        for (;;) {
            if (eat('+'))
                l = make(Op::Add, l, term());
            else if (eat('-'))
                l = make(Op::Sub, l, term());
            else
                return l;
        }
    }
    NodePtr term() {
        NodePtr l = unary();
        for (;;) {
            if (eat('*'))
                l = make(Op::Mul, l, unary());
            else if (eat('/'))
                l = make(Op::Div, l, unary());
            else
                return l;
        }
    }
    NodePtr unary() {
        if (eat('-')) return make(Op::Neg, unary());
        if (eat('+')) return unary();
        return power();
    }
    NodePtr power() {
        NodePtr base = primary();
        if (eat('^')) return make(Op::Pow, base, unary());
        return base;
    }
    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            const char* begin = s_.data() + pos_;
            const auto [ptr, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
            if (ec != std::errc()) fail("bad number");
            pos_ += static_cast<std::size_t>(ptr - begin);
            auto n = std::make_shared<Expression::Node>();
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string id(s_.substr(start, pos_ - start));
            return identifier(id, start);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr identifier(const std::string& id, std::size_t start) {
        auto var = [&](int k) -> NodePtr {
            if (k < 0 || k >= dim_) {
                pos_ = start;
                fail("variable '" + id + "' outside dimension " + std::to_string(dim_));
            }
            auto n = std::make_shared<Expression::Node>();
            n->op = Op::Var;
            n->var = k;
            return n;
        };
        if (id == "x") return var(0);
        if (id == "y") return var(1);
        if (id == "z") return var(2);
        if (id.size() >= 2 && id[0] == 'x' && std::all_of(id.begin() + 1, id.end(), [](char ch) {
                return std::isdigit(static_cast<unsigned char>(ch));
            }))
            return var(std::stoi(id.substr(1)) - 1);
        if (id == "pi") {
            auto n = std::make_shared<Expression::Node>();
            n->value = std::numbers::pi;
            return n;
        }
        static const std::pair<const char*, double (*)(double)> unary_fns[] = {
            {"sin", f_sin}, {"cos", f_cos}, {"tan", f_tan}, {"exp", f_exp},
            {"log", f_log}, {"sqrt", f_sqrt}, {"abs", f_abs}};
        static const std::pair<const char*, double (*)(double, double)> binary_fns[] = {
            {"pow", f_pow}, {"min", f_min}, {"max", f_max}};
        for (const auto& [name, fn] : unary_fns) {
            if (id != name) continue;
            if (!eat('(')) fail("expected '(' after " + id);
            auto n = std::make_shared<Expression::Node>();
            n->op = Op::Call1;
            n->f1 = fn;
            n->a = expr();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        for (const auto& [name, fn] : binary_fns) {
            if (id != name) continue;
            if (!eat('(')) fail("expected '(' after " + id);
            auto n = std::make_shared<Expression::Node>();
            n->op = Op::Call2;
            n->f2 = fn;
            n->a = expr();
            if (!eat(',')) fail("expected ',' in " + id);
            n->b = expr();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        pos_ = start;
        fail("unknown identifier '" + id + "'");
    }

    std::string_view s_;
    int dim_;
    std::size_t pos_ = 0;
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Expression::Expression() = default;
Expression::~Expression() = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;

Expression Expression::parse(std::string_view text, int dim) {
    if (dim < 1 || dim > 3) throw DimensionError("expressions support 1 <= n <= 3");
    Expression e;
    e.root_ = Parser(text, dim).parse_all();
    e.dim_ = dim;
    e.text_ = trim(text);
    return e;
}

double Expression::operator()(const Point& x) const {
    if (!root_) throw Error("empty expression");
    return root_->eval(x);
}

FieldExpression FieldExpression::parse(std::string_view text, int dim) {
    std::string body = trim(text);
    char sep = ';';
    if (!body.empty() && body.front() == '[') {
        if (body.back() != ']') throw ParseError("field '" + body + "': missing ']'");
        body = body.substr(1, body.size() - 2);
        sep = ',';
    }
    // Split at top-level separators only.
    FieldExpression f;
    f.dim_ = dim;
    f.text_ = trim(text);
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= body.size(); ++i) {
        const char c = i < body.size() ? body[i] : sep;
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == sep && depth == 0) {
            const std::string part = trim(std::string_view(body).substr(start, i - start));
            if (part.empty()) throw ParseError("field '" + f.text_ + "': empty component");
            f.parts_.push_back(Expression::parse(part, dim));
            start = i + 1;
        }
    }
    return f;
}

void FieldExpression::evaluate(const Point& x, std::span<double> out) const {
    if (out.size() != parts_.size()) throw DimensionError("output size does not match component count");
    for (std::size_t k = 0; k < parts_.size(); ++k) {
        out[k] = parts_[k](x);
        if (!std::isfinite(out[k])) {
            std::ostringstream msg;
            msg << "field component " << k + 1 << " '" << parts_[k].text() << "' is not finite at (";
            for (Eigen::Index a = 0; a < x.size(); ++a) msg << (a ? ", " : "") << x[a];
            msg << ')';
            throw DomainError(msg.str());
        }
    }
}

FieldFn FieldExpression::function() const {
    return [f = *this](const Point& x, std::span<double> out) { f.evaluate(x, out); };
}

}  // namespace bva
