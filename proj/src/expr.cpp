#include "linelab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "linelab/errors.hpp"

namespace linelab {

namespace {
enum class Op {
    constant,
    var_s,
    var_t,
    add,
    sub,
    mul,
    divide,
    power,
    neg,
    fn_sin,
    fn_cos,
    fn_cosh,
    fn_sinh,
    fn_exp,
    fn_ln,
    fn_sqrt,
};
} // namespace

struct Expr::Node {
    Op op;
    double value = 0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_const(double v) {
    auto n = std::make_shared<Expr::Node>();
    n->op = Op::constant;
    n->value = v;
    return n;
}

class Parser {
  public:
    explicit Parser(const std::string &text) : text_(text) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected trailing input");
        return e;
    }

  private:
    [[noreturn]] void fail(const std::string &msg) const {
        throw ConfigError("expression error at offset " +
                          std::to_string(pos_) + ": " + msg + " in \"" +
                          text_ + "\"");
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace((unsigned char)text_[pos_]))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+'))
                lhs = make(Op::add, lhs, term());
            else if (eat('-'))
                lhs = make(Op::sub, lhs, term());
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (eat('*'))
                lhs = make(Op::mul, lhs, unary());
            else if (eat('/'))
                lhs = make(Op::divide, lhs, unary());
            else
                return lhs;
        }
    }

    NodePtr unary() {
        if (eat('-'))
            return make(Op::neg, unary());
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (eat('^'))
            return make(Op::power, base, unary()); // right associative
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= text_.size())
            fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!eat(')'))
                fail("expected ')'");
            return e;
        }
        if (std::isdigit((unsigned char)c) || c == '.') {
            char *end = nullptr;
            const double v = std::strtod(text_.c_str() + pos_, &end);
            if (end == text_.c_str() + pos_)
                fail("malformed number");
            pos_ = end - text_.c_str();
            return make_const(v);
        }
        if (std::isalpha((unsigned char)c)) {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   std::isalpha((unsigned char)text_[pos_]))
                ++pos_;
            const std::string name = text_.substr(start, pos_ - start);
            if (name == "s")
                return make(Op::var_s);
            if (name == "t")
                return make(Op::var_t);
            if (name == "pi")
                return make_const(M_PI);
            Op fn;
            if (name == "sin")
                fn = Op::fn_sin;
            else if (name == "cos")
                fn = Op::fn_cos;
            else if (name == "cosh")
                fn = Op::fn_cosh;
            else if (name == "sinh")
                fn = Op::fn_sinh;
            else if (name == "exp")
                fn = Op::fn_exp;
            else if (name == "ln")
                fn = Op::fn_ln;
            else if (name == "sqrt")
                fn = Op::fn_sqrt;
            else
                fail("unknown identifier '" + name + "'");
            if (!eat('('))
                fail("expected '(' after function name");
            NodePtr arg = expr();
            if (!eat(')'))
                fail("expected ')'");
            return make(fn, arg);
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    const std::string &text_;
    size_t pos_ = 0;
};

double eval_node(const Expr::Node &n, double s, double t) {
    switch (n.op) {
    case Op::constant:
        return n.value;
    case Op::var_s:
        return s;
    case Op::var_t:
        return t;
    case Op::add:
        return eval_node(*n.a, s, t) + eval_node(*n.b, s, t);
    case Op::sub:
        return eval_node(*n.a, s, t) - eval_node(*n.b, s, t);
    case Op::mul:
        return eval_node(*n.a, s, t) * eval_node(*n.b, s, t);
    case Op::divide:
        return eval_node(*n.a, s, t) / eval_node(*n.b, s, t);
    case Op::power:
        return std::pow(eval_node(*n.a, s, t), eval_node(*n.b, s, t));
    case Op::neg:
        return -eval_node(*n.a, s, t);
    case Op::fn_sin:
        return std::sin(eval_node(*n.a, s, t));
    case Op::fn_cos:
        return std::cos(eval_node(*n.a, s, t));
    case Op::fn_cosh:
        return std::cosh(eval_node(*n.a, s, t));
    case Op::fn_sinh:
        return std::sinh(eval_node(*n.a, s, t));
    case Op::fn_exp:
        return std::exp(eval_node(*n.a, s, t));
    case Op::fn_ln:
        return std::log(eval_node(*n.a, s, t));
    case Op::fn_sqrt:
        return std::sqrt(eval_node(*n.a, s, t));
    }
    return 0; // unreachable
}

} // namespace

Expr Expr::parse(const std::string &text) {
    Expr e;
    e.root_ = Parser(text).run();
    return e;
}

double Expr::eval(double s, double t) const {
    if (!root_)
        throw ConfigError("evaluating an empty expression");
    return eval_node(*root_, s, t);
}

} // namespace linelab
