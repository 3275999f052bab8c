#pragma once

/**
 * @file dynamics.hpp
 * @brief Plant-model expression language.
 *
 * Right-hand sides f(x, u, w) are given as expression trees over state
 * variables x1..xn, control inputs u1..um and disturbances w1..wr.
 * The module provides parsing, point evaluation, symbolic differentiation
 * (for linearization Jacobians) and sound interval evaluation.
 *
 * Grammar: expr := term (('+'|'-') term)*; term := unary (('*'|'/') unary)*;
 * unary := '-' unary | factor; factor := base ('^' int)?;
 * base := number | ident | '(' expr ')' | func '(' expr ')';
 * ident := 'x'int | 'u'int | 'w'int;
 * func in {sin, cos, exp, tanh, sqrt, sigmoid}. Integer powers only.
 */

#include "polyzono/interval.hpp"

#include <memory>
#include <string>
#include <vector>

namespace polyzono {

enum class ExprKind { Constant, Var, Add, Sub, Mul, Div, Neg, Pow, Func };
enum class VarKind { State, Input, Disturbance };
enum class FuncKind { Sin, Cos, Exp, Tanh, Sqrt, Sigmoid };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprKind kind = ExprKind::Constant;
    double value = 0.0;                 // Constant
    VarKind var = VarKind::State;       // Var
    Eigen::Index index = 0;             // Var, 0-based
    std::int64_t power = 0;             // Pow
    FuncKind func = FuncKind::Sin;      // Func
    Expr lhs;
    Expr rhs;
};

/// Declared variable dimensions (state, input, disturbance).
struct VarDims {
    Eigen::Index n = 0;
    Eigen::Index m = 0;
    Eigen::Index r = 0;
};

// construction with 0/1 constant folding
Expr make_const(double v);
Expr make_var(VarKind kind, Eigen::Index index);
Expr make_add(Expr a, Expr b);
Expr make_sub(Expr a, Expr b);
Expr make_mul(Expr a, Expr b);
Expr make_div(Expr a, Expr b);
Expr make_neg(Expr a);
Expr make_pow(Expr a, std::int64_t k);
Expr make_func(FuncKind f, Expr a);

/// Parses the grammar above; throws std::invalid_argument with a 1-based
/// position on syntax errors, unknown identifiers, and out-of-range indices.
Expr parse_expr(const std::string& text, const VarDims& dims);

double eval(const Expr& e, const Vec& x, const Vec& u, const Vec& w);

/// Exact symbolic derivative with light simplification.
Expr diff(const Expr& e, VarKind kind, Eigen::Index index);

/// Sound range enclosure over a box in (x, u, w) space.
Interval interval_eval(const Expr& e, const Box& x, const Box& u, const Box& w);

std::string print_expr(const Expr& e);

/// Continuous-time plant x' = f(x, u, w).
struct Plant {
    VarDims dims;
    std::vector<Expr> f;

    Plant() = default;
    Plant(VarDims d, std::vector<Expr> rhs);

    static Plant parse(const std::vector<std::string>& expressions, Eigen::Index m,
                       Eigen::Index r);

    Vec eval_rhs(const Vec& x, const Vec& u, const Vec& w) const;
};

}  // namespace polyzono
