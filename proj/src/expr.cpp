#include "ensctrl/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

namespace ensctrl::expr {

ParseError::ParseError(const std::string& msg, std::size_t off)
    : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}

EvalError::EvalError(const std::string& msg, const std::string& sub)
    : std::runtime_error(msg + " in '" + sub + "'"), subexpr(sub) {}

namespace {

const std::map<std::string, Func> kFuncs = {
    {"sin", Func::Sin}, {"cos", Func::Cos}, {"tan", Func::Tan},
    {"exp", Func::Exp}, {"log", Func::Log}, {"sqrt", Func::Sqrt},
    {"abs", Func::Abs}};

NodePtr make_const(double v) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Constant;
    n->value = v;
    return n;
}

NodePtr make_param(const std::string& name) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Parameter;
    n->param_name = name;
    return n;
}

NodePtr make_neg(NodePtr c) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Unary;
    n->lhs = std::move(c);
    return n;
}

NodePtr make_bin(BinaryOp op, NodePtr l, NodePtr r) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Binary;
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

NodePtr make_call(Func f, NodePtr arg) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Call;
    n->func = f;
    n->lhs = std::move(arg);
    return n;
}

// Recursive-descent parser:
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := ("-")? power
//   power  := atom ("^" factor)?
//   atom   := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
class Parser {
public:
    Parser(const std::string& text, const std::string& param)
        : text_(text), param_(param) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
        return e;
    }

private:
    const std::string& text_;
    const std::string& param_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr e = term();
        for (;;) {
            if (eat('+')) e = make_bin(BinaryOp::Add, e, term());
            else if (eat('-')) e = make_bin(BinaryOp::Sub, e, term());
            else return e;
        }
    }

    NodePtr term() {
        NodePtr e = factor();
        for (;;) {
            if (eat('*')) e = make_bin(BinaryOp::Mul, e, factor());
            else if (eat('/')) e = make_bin(BinaryOp::Div, e, factor());
            else return e;
        }
    }

    NodePtr factor() {
        if (eat('-')) {
            skip_ws();
            // Fold a directly following literal so "-2" is the constant -2.
            if (pos_ < text_.size() &&
                (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
                NodePtr num = number();
                if (eat('^')) return make_neg(make_bin(BinaryOp::Pow, num, factor()));
                return make_const(-num->value);
            }
            return make_neg(factor());
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (eat('^')) return make_bin(BinaryOp::Pow, base, factor());
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
    }

    NodePtr number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            } else {
                pos_ = save;  // 'e' belongs to something else
            }
        }
        const std::string tok = text_.substr(start, pos_ - start);
        try {
            return make_const(std::stod(tok));
        } catch (const std::exception&) {
            throw ParseError("invalid number '" + tok + "'", start);
        }
    }

    NodePtr ident() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name = text_.substr(start, pos_ - start);
        if (peek() == '(') {
            auto it = kFuncs.find(name);
            if (it == kFuncs.end())
                throw ParseError("unknown function '" + name + "'", start);
            eat('(');
            NodePtr arg = expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return make_call(it->second, arg);
        }
        if (name == param_) return make_param(name);
        if (name == "pi") return make_const(M_PI);
        throw ParseError("unknown identifier '" + name + "'", start);
    }
};

int precedence(const Node& n) {
    switch (n.kind) {
        case NodeKind::Binary:
            switch (n.op) {
                case BinaryOp::Add: case BinaryOp::Sub: return 1;
                case BinaryOp::Mul: case BinaryOp::Div: return 2;
                case BinaryOp::Pow: return 4;
            }
            return 0;
        case NodeKind::Unary: return 3;
        case NodeKind::Constant:
            // A negative literal prints with a leading minus and binds like a
            // negation.
            return n.value < 0.0 ? 3 : 5;
        default: return 5;
    }
}

void print(const NodePtr& e, std::ostream& os);

void print_child(const NodePtr& child, int parent_prec, bool tight, std::ostream& os) {
    const int cp = precedence(*child);
    const bool parens = cp < parent_prec || (tight && cp == parent_prec);
    if (parens) os << '(';
    print(child, os);
    if (parens) os << ')';
}

void print(const NodePtr& e, std::ostream& os) {
    switch (e->kind) {
        case NodeKind::Constant: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << e->value;
            os << tmp.str();
            break;
        }
        case NodeKind::Parameter:
            os << e->param_name;
            break;
        case NodeKind::Unary:
            os << '-';
            print_child(e->lhs, 3, true, os);
            break;
        case NodeKind::Binary: {
            const int p = precedence(*e);
            const char* sym = "";
            switch (e->op) {
                case BinaryOp::Add: sym = "+"; break;
                case BinaryOp::Sub: sym = "-"; break;
                case BinaryOp::Mul: sym = "*"; break;
                case BinaryOp::Div: sym = "/"; break;
                case BinaryOp::Pow: sym = "^"; break;
            }
            // Sub/Div need parens on an equal-precedence right child; Pow is
            // right-associative, so the left child gets them instead.
            const bool right_tight = e->op != BinaryOp::Pow;
            const bool left_tight = e->op == BinaryOp::Pow;
            print_child(e->lhs, p, left_tight, os);
            if (e->op == BinaryOp::Pow)
                os << sym;
            else
                os << ' ' << sym << ' ';
            print_child(e->rhs, p, right_tight, os);
            break;
        }
        case NodeKind::Call: {
            const char* name = "";
            switch (e->func) {
                case Func::Sin: name = "sin"; break;
                case Func::Cos: name = "cos"; break;
                case Func::Tan: name = "tan"; break;
                case Func::Exp: name = "exp"; break;
                case Func::Log: name = "log"; break;
                case Func::Sqrt: name = "sqrt"; break;
                case Func::Abs: name = "abs"; break;
            }
            os << name << '(';
            print(e->lhs, os);
            os << ')';
            break;
        }
    }
}

}  // namespace

NodePtr parse(const std::string& text, const std::string& param) {
    return Parser(text, param).run();
}

double evaluate(const NodePtr& e, double value) {
    switch (e->kind) {
        case NodeKind::Constant: return e->value;
        case NodeKind::Parameter: return value;
        case NodeKind::Unary: return -evaluate(e->lhs, value);
        case NodeKind::Binary: {
            const double l = evaluate(e->lhs, value);
            const double r = evaluate(e->rhs, value);
            switch (e->op) {
                case BinaryOp::Add: return l + r;
                case BinaryOp::Sub: return l - r;
                case BinaryOp::Mul: return l * r;
                case BinaryOp::Div:
                    if (r == 0.0) throw EvalError("division by zero", to_string(e));
                    return l / r;
                case BinaryOp::Pow: {
                    const double p = std::pow(l, r);
                    if (!std::isfinite(p))
                        throw EvalError("non-finite power", to_string(e));
                    return p;
                }
            }
            break;
        }
        case NodeKind::Call: {
            const double a = evaluate(e->lhs, value);
            switch (e->func) {
                case Func::Sin: return std::sin(a);
                case Func::Cos: return std::cos(a);
                case Func::Tan: return std::tan(a);
                case Func::Exp: {
                    const double v = std::exp(a);
                    if (!std::isfinite(v)) throw EvalError("exp overflow", to_string(e));
                    return v;
                }
                case Func::Log:
                    if (a <= 0.0) throw EvalError("log of non-positive value", to_string(e));
                    return std::log(a);
                case Func::Sqrt:
                    if (a < 0.0) throw EvalError("sqrt of negative value", to_string(e));
                    return std::sqrt(a);
                case Func::Abs: return std::fabs(a);
            }
            break;
        }
    }
    throw EvalError("malformed expression node", "?");
}

std::string to_string(const NodePtr& e) {
    std::ostringstream os;
    print(e, os);
    return os.str();
}

namespace {

// A negated literal and a negative literal are the same tree as far as the
// parse/print round trip is concerned; compare modulo that folding.
NodePtr fold_negated_literals(const NodePtr& n) {
    switch (n->kind) {
        case NodeKind::Unary: {
            NodePtr child = fold_negated_literals(n->lhs);
            if (child->kind == NodeKind::Constant) return make_const(-child->value);
            if (child == n->lhs) return n;
            return make_neg(std::move(child));
        }
        case NodeKind::Binary: {
            NodePtr l = fold_negated_literals(n->lhs);
            NodePtr r = fold_negated_literals(n->rhs);
            if (l == n->lhs && r == n->rhs) return n;
            return make_bin(n->op, std::move(l), std::move(r));
        }
        case NodeKind::Call: {
            NodePtr arg = fold_negated_literals(n->lhs);
            if (arg == n->lhs) return n;
            return make_call(n->func, std::move(arg));
        }
        default: return n;
    }
}

bool equal_impl(const NodePtr& a, const NodePtr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case NodeKind::Constant: return a->value == b->value;
        case NodeKind::Parameter: return true;
        case NodeKind::Unary: return equal_impl(a->lhs, b->lhs);
        case NodeKind::Binary:
            return a->op == b->op && equal_impl(a->lhs, b->lhs) && equal_impl(a->rhs, b->rhs);
        case NodeKind::Call:
            return a->func == b->func && equal_impl(a->lhs, b->lhs);
    }
    return false;
}

}  // namespace

bool structurally_equal(const NodePtr& a, const NodePtr& b) {
    return equal_impl(fold_negated_literals(a), fold_negated_literals(b));
}


}  // namespace ensctrl::expr
