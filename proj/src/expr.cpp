#include "cbtest/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <vector>

namespace cbtest {

namespace {

struct Node {
    enum class Op { constant, var_x, var_y, add, sub, mul, div, neg, sqrt_ } op;
    double value = 0.0;
    std::unique_ptr<Node> a, b;

    double eval(double x, double y) const {
        switch (op) {
            case Op::constant: return value;
            case Op::var_x: return x;
            case Op::var_y: return y;
            case Op::add: return a->eval(x, y) + b->eval(x, y);
            case Op::sub: return a->eval(x, y) - b->eval(x, y);
            case Op::mul: return a->eval(x, y) * b->eval(x, y);
            case Op::div: return a->eval(x, y) / b->eval(x, y);
            case Op::neg: return -a->eval(x, y);
            case Op::sqrt_: return std::sqrt(a->eval(x, y));
        }
        return 0.0;
    }
};

using NodePtr = std::unique_ptr<Node>;

NodePtr make(Node::Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_unique<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        auto n = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return n;
    }

    bool uses_y = false;

private:
    NodePtr expr() {
        auto n = term();
        for (;;) {
            skip_ws();
            if (accept('+'))
                n = make(Node::Op::add, std::move(n), term());
            else if (accept('-'))
                n = make(Node::Op::sub, std::move(n), term());
            else
                return n;
        }
    }

    NodePtr term() {
        auto n = factor();
        for (;;) {
            skip_ws();
            if (accept('*'))
                n = make(Node::Op::mul, std::move(n), factor());
            else if (accept('/'))
                n = make(Node::Op::div, std::move(n), factor());
            else
                return n;
        }
    }

    NodePtr factor() {
        skip_ws();
        if (accept('-')) return make(Node::Op::neg, factor());
        if (accept('+')) return factor();
        return primary();
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            auto n = expr();
            skip_ws();
            if (!accept(')')) fail("missing ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (word("sqrt")) {
            skip_ws();
            if (!accept('(')) fail("sqrt needs '('");
            auto n = expr();
            skip_ws();
            if (!accept(')')) fail("missing ')' after sqrt argument");
            return make(Node::Op::sqrt_, std::move(n));
        }
        if (c == 'x' && !std::isalnum(peek_after()) ) {
            ++pos_;
            return make(Node::Op::var_x);
        }
        if (c == 'y' && !std::isalnum(peek_after())) {
            ++pos_;
            uses_y = true;
            return make(Node::Op::var_y);
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        size_t start = pos_;
        char* end = nullptr;
        double v = std::strtod(s_.c_str() + start, &end);
        if (end == s_.c_str() + start) fail("bad number");
        pos_ = static_cast<size_t>(end - s_.c_str());
        auto n = make(Node::Op::constant);
        n->value = v;
        return n;
    }

    char peek_after() const {
        return pos_ + 1 < s_.size() ? s_[pos_ + 1] : '\0';
    }

    bool word(const char* w) {
        size_t len = 0;
        while (w[len]) ++len;
        if (s_.compare(pos_, len, w) != 0) return false;
        char next = pos_ + len < s_.size() ? s_[pos_ + len] : '\0';
        if (std::isalnum(static_cast<unsigned char>(next))) return false;
        pos_ += len;
        return true;
    }

    bool accept(char c) {
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    // 1-based character position, the convention users expect from a column
    [[noreturn]] void fail(const std::string& msg) const {
        throw expr_error("expression error at position " + std::to_string(pos_ + 1) + ": " + msg +
                         " in \"" + s_ + "\"");
    }

    const std::string& s_;
    size_t pos_ = 0;
};

}  // namespace

ParsedExpr parse_expr(const std::string& text) {
    Parser p(text);
    std::shared_ptr<Node> root(p.parse().release());
    ParsedExpr out;
    out.uses_y = p.uses_y;
    out.eval = [root](double x, double y) { return root->eval(x, y); };
    return out;
}

std::function<double(double)> parse_function1(const std::string& text) {
    ParsedExpr e = parse_expr(text);
    if (e.uses_y) throw expr_error("expression must use only x: \"" + text + "\"");
    auto f = e.eval;
    return [f](double x) { return f(x, 0.0); };
}

}  // namespace cbtest
