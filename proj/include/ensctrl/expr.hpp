#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ensctrl::expr {

enum class NodeKind { Constant, Parameter, Unary, Binary, Call };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Abs };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable expression tree in one free variable. Safe to share across
/// threads once built.
struct Node {
    NodeKind kind;
    double value = 0.0;      // Constant
    std::string param_name;  // Parameter
    BinaryOp op = BinaryOp::Add;
    Func func = Func::Sin;
    NodePtr lhs, rhs;        // Unary uses lhs only (negation); Call uses lhs
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t offset);
    std::size_t offset;
};

/// Domain error during evaluation (log of non-positive, division by zero, ...).
/// `subexpr` is the offending sub-expression, pretty-printed.
struct EvalError : std::runtime_error {
    EvalError(const std::string& msg, const std::string& subexpr);
    std::string subexpr;
};

/// Parses `text` against the expression grammar. The only permitted free
/// identifier is `param`; the function set is {sin, cos, tan, exp, log,
/// sqrt, abs}.
NodePtr parse(const std::string& text, const std::string& param = "beta");

/// Evaluates at a parameter value. Throws EvalError on domain errors.
double evaluate(const NodePtr& e, double value);

/// Minimal-parenthesis printer; re-parsing the result reproduces the tree.
std::string to_string(const NodePtr& e);

bool structurally_equal(const NodePtr& a, const NodePtr& b);

}  // namespace ensctrl::expr
