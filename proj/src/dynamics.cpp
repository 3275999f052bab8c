#include "polyzono/dynamics.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace polyzono {

namespace {

double sigmoid_scalar(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

bool is_const(const Expr& e) { return e->kind == ExprKind::Constant; }
bool is_const_value(const Expr& e, double v) { return is_const(e) && e->value == v; }

Expr node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

const char* func_name(FuncKind f) {
    switch (f) {
        case FuncKind::Sin: return "sin";
        case FuncKind::Cos: return "cos";
        case FuncKind::Exp: return "exp";
        case FuncKind::Tanh: return "tanh";
        case FuncKind::Sqrt: return "sqrt";
        case FuncKind::Sigmoid: return "sigmoid";
    }
    return "?";
}

}  // namespace

Expr make_const(double v) {
    ExprNode n;
    n.kind = ExprKind::Constant;
    n.value = v;
    return node(std::move(n));
}

Expr make_var(VarKind kind, Eigen::Index index) {
    ExprNode n;
    n.kind = ExprKind::Var;
    n.var = kind;
    n.index = index;
    return node(std::move(n));
}

Expr make_add(Expr a, Expr b) {
    if (is_const(a) && is_const(b)) return make_const(a->value + b->value);
    if (is_const_value(a, 0.0)) return b;
    if (is_const_value(b, 0.0)) return a;
    ExprNode n;
    n.kind = ExprKind::Add;
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return node(std::move(n));
}

Expr make_sub(Expr a, Expr b) {
    if (is_const(a) && is_const(b)) return make_const(a->value - b->value);
    if (is_const_value(b, 0.0)) return a;
    if (is_const_value(a, 0.0)) return make_neg(std::move(b));
    ExprNode n;
    n.kind = ExprKind::Sub;
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return node(std::move(n));
}

Expr make_mul(Expr a, Expr b) {
    if (is_const(a) && is_const(b)) return make_const(a->value * b->value);
    if (is_const_value(a, 0.0) || is_const_value(b, 0.0)) return make_const(0.0);
    if (is_const_value(a, 1.0)) return b;
    if (is_const_value(b, 1.0)) return a;
    ExprNode n;
    n.kind = ExprKind::Mul;
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return node(std::move(n));
}

Expr make_div(Expr a, Expr b) {
    if (is_const_value(b, 1.0)) return a;
    if (is_const(a) && is_const(b) && b->value != 0.0) return make_const(a->value / b->value);
    ExprNode n;
    n.kind = ExprKind::Div;
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return node(std::move(n));
}

Expr make_neg(Expr a) {
    if (is_const(a)) return make_const(-a->value);
    if (a->kind == ExprKind::Neg) return a->lhs;
    ExprNode n;
    n.kind = ExprKind::Neg;
    n.lhs = std::move(a);
    return node(std::move(n));
}

Expr make_pow(Expr a, std::int64_t k) {
    if (k < 0) {
        throw std::invalid_argument("make_pow: negative exponent");
    }
    if (k == 0) return make_const(1.0);
    if (k == 1) return a;
    if (is_const(a)) return make_const(std::pow(a->value, static_cast<double>(k)));
    ExprNode n;
    n.kind = ExprKind::Pow;
    n.power = k;
    n.lhs = std::move(a);
    return node(std::move(n));
}

Expr make_func(FuncKind f, Expr a) {
    ExprNode n;
    n.kind = ExprKind::Func;
    n.func = f;
    n.lhs = std::move(a);
    return node(std::move(n));
}

// ---------------------------------------------------------------------------
// parser
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum Kind { Number, Ident, LParen, RParen, Plus, Minus, Star, Slash, Caret, End } kind;
    double number = 0.0;
    std::string text;
    std::size_t pos = 0;  // 1-based position in the input
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) {
            ++i_;
        }
        current_ = Token{};
        current_.pos = i_ + 1;
        if (i_ >= text_.size()) {
            current_.kind = Token::End;
            return;
        }
        const char c = text_[i_];
        switch (c) {
            case '(': current_.kind = Token::LParen; ++i_; return;
            case ')': current_.kind = Token::RParen; ++i_; return;
            case '+': current_.kind = Token::Plus; ++i_; return;
            case '-': current_.kind = Token::Minus; ++i_; return;
            case '*': current_.kind = Token::Star; ++i_; return;
            case '/': current_.kind = Token::Slash; ++i_; return;
            case '^': current_.kind = Token::Caret; ++i_; return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t end = i_;
            while (end < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.')) {
                ++end;
            }
            if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
                std::size_t exp = end + 1;
                if (exp < text_.size() && (text_[exp] == '+' || text_[exp] == '-')) {
                    ++exp;
                }
                if (exp < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp]))) {
                    end = exp;
                    while (end < text_.size() &&
                           std::isdigit(static_cast<unsigned char>(text_[end]))) {
                        ++end;
                    }
                }
            }
            current_.kind = Token::Number;
            current_.text = text_.substr(i_, end - i_);
            try {
                current_.number = std::stod(current_.text);
            } catch (const std::exception&) {
                throw std::invalid_argument("syntax error at position " + std::to_string(i_ + 1) +
                                            ": bad number '" + current_.text + "'");
            }
            i_ = end;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = i_;
            while (end < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
                ++end;
            }
            current_.kind = Token::Ident;
            current_.text = text_.substr(i_, end - i_);
            i_ = end;
            return;
        }
        throw std::invalid_argument("syntax error at position " + std::to_string(i_ + 1) +
                                    ": unexpected character '" + std::string(1, c) + "'");
    }

    const std::string& text_;
    std::size_t i_ = 0;
    Token current_;
};

class Parser {
  public:
    Parser(const std::string& text, const VarDims& dims) : lex_(text), dims_(dims) {}

    Expr parse() {
        Expr e = expression();
        if (lex_.peek().kind != Token::End) {
            fail("unexpected trailing input");
        }
        return e;
    }

  private:
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("syntax error at position " +
                                    std::to_string(lex_.peek().pos) + ": " + what);
    }

    Expr expression() {
        Expr e = term();
        while (lex_.peek().kind == Token::Plus || lex_.peek().kind == Token::Minus) {
            const Token op = lex_.take();
            Expr r = term();
            e = (op.kind == Token::Plus) ? make_add(std::move(e), std::move(r))
                                         : make_sub(std::move(e), std::move(r));
        }
        return e;
    }

    Expr term() {
        Expr e = unary();
        while (lex_.peek().kind == Token::Star || lex_.peek().kind == Token::Slash) {
            const Token op = lex_.take();
            Expr r = unary();
            e = (op.kind == Token::Star) ? make_mul(std::move(e), std::move(r))
                                         : make_div(std::move(e), std::move(r));
        }
        return e;
    }

    Expr unary() {
        if (lex_.peek().kind == Token::Minus) {
            lex_.take();
            return make_neg(unary());
        }
        return factor();
    }

    Expr factor() {
        Expr b = base();
        if (lex_.peek().kind == Token::Caret) {
            lex_.take();
            if (lex_.peek().kind != Token::Number) {
                fail("expected integer exponent after '^'");
            }
            const Token t = lex_.take();
            if (t.text.find('.') != std::string::npos ||
                t.text.find('e') != std::string::npos ||
                t.text.find('E') != std::string::npos) {
                throw std::invalid_argument("syntax error at position " + std::to_string(t.pos) +
                                            ": only integer powers are supported");
            }
            return make_pow(std::move(b), static_cast<std::int64_t>(t.number));
        }
        return b;
    }

    Expr base() {
        const Token t = lex_.peek();
        switch (t.kind) {
            case Token::Number:
                lex_.take();
                return make_const(t.number);
            case Token::LParen: {
                lex_.take();
                Expr e = expression();
                if (lex_.peek().kind != Token::RParen) {
                    fail("expected ')'");
                }
                lex_.take();
                return e;
            }
            case Token::Ident:
                lex_.take();
                return ident(t);
            default:
                fail("expected number, variable, function, or '('");
        }
    }

    Expr ident(const Token& t) {
        static const std::pair<const char*, FuncKind> funcs[] = {
            {"sin", FuncKind::Sin},   {"cos", FuncKind::Cos},     {"exp", FuncKind::Exp},
            {"tanh", FuncKind::Tanh}, {"sqrt", FuncKind::Sqrt},   {"sigmoid", FuncKind::Sigmoid},
        };
        for (const auto& [name, f] : funcs) {
            if (t.text == name) {
                if (lex_.peek().kind != Token::LParen) {
                    fail("expected '(' after function name");
                }
                lex_.take();
                Expr arg = expression();
                if (lex_.peek().kind != Token::RParen) {
                    fail("expected ')'");
                }
                lex_.take();
                return make_func(f, std::move(arg));
            }
        }
        // variable of the form x<k>, u<k>, w<k>
        if (t.text.size() >= 2 &&
            (t.text[0] == 'x' || t.text[0] == 'u' || t.text[0] == 'w')) {
            bool digits = true;
            for (std::size_t i = 1; i < t.text.size(); ++i) {
                if (!std::isdigit(static_cast<unsigned char>(t.text[i]))) {
                    digits = false;
                    break;
                }
            }
            if (digits) {
                const auto k = static_cast<Eigen::Index>(std::stoll(t.text.substr(1)));
                VarKind kind = VarKind::State;
                Eigen::Index limit = dims_.n;
                if (t.text[0] == 'u') {
                    kind = VarKind::Input;
                    limit = dims_.m;
                } else if (t.text[0] == 'w') {
                    kind = VarKind::Disturbance;
                    limit = dims_.r;
                }
                if (k < 1 || k > limit) {
                    throw std::invalid_argument("index out of range at position " +
                                                std::to_string(t.pos) + ": " + t.text);
                }
                return make_var(kind, k - 1);
            }
        }
        throw std::invalid_argument("unknown identifier at position " + std::to_string(t.pos) +
                                    ": " + t.text);
    }

    Lexer lex_;
    VarDims dims_;
};

}  // namespace

Expr parse_expr(const std::string& text, const VarDims& dims) {
    return Parser(text, dims).parse();
}

double eval(const Expr& e, const Vec& x, const Vec& u, const Vec& w) {
    switch (e->kind) {
        case ExprKind::Constant: return e->value;
        case ExprKind::Var:
            switch (e->var) {
                case VarKind::State: return x(e->index);
                case VarKind::Input: return u(e->index);
                case VarKind::Disturbance: return w(e->index);
            }
            return 0.0;
        case ExprKind::Add: return eval(e->lhs, x, u, w) + eval(e->rhs, x, u, w);
        case ExprKind::Sub: return eval(e->lhs, x, u, w) - eval(e->rhs, x, u, w);
        case ExprKind::Mul: return eval(e->lhs, x, u, w) * eval(e->rhs, x, u, w);
        case ExprKind::Div: {
            const double denom = eval(e->rhs, x, u, w);
            if (denom == 0.0) {
                throw std::domain_error("eval: division by zero");
            }
            return eval(e->lhs, x, u, w) / denom;
        }
        case ExprKind::Neg: return -eval(e->lhs, x, u, w);
        case ExprKind::Pow: return std::pow(eval(e->lhs, x, u, w), static_cast<double>(e->power));
        case ExprKind::Func: {
            const double v = eval(e->lhs, x, u, w);
            switch (e->func) {
                case FuncKind::Sin: return std::sin(v);
                case FuncKind::Cos: return std::cos(v);
                case FuncKind::Exp: return std::exp(v);
                case FuncKind::Tanh: return std::tanh(v);
                case FuncKind::Sqrt:
                    if (v < 0.0) {
                        throw std::domain_error("eval: square root of negative value");
                    }
                    return std::sqrt(v);
                case FuncKind::Sigmoid: return sigmoid_scalar(v);
            }
            return 0.0;
        }
    }
    return 0.0;
}

Expr diff(const Expr& e, VarKind kind, Eigen::Index index) {
    switch (e->kind) {
        case ExprKind::Constant: return make_const(0.0);
        case ExprKind::Var:
            return make_const(e->var == kind && e->index == index ? 1.0 : 0.0);
        case ExprKind::Add: return make_add(diff(e->lhs, kind, index), diff(e->rhs, kind, index));
        case ExprKind::Sub: return make_sub(diff(e->lhs, kind, index), diff(e->rhs, kind, index));
        case ExprKind::Mul:
            return make_add(make_mul(diff(e->lhs, kind, index), e->rhs),
                            make_mul(e->lhs, diff(e->rhs, kind, index)));
        case ExprKind::Div:
            return make_div(make_sub(make_mul(diff(e->lhs, kind, index), e->rhs),
                                     make_mul(e->lhs, diff(e->rhs, kind, index))),
                            make_pow(e->rhs, 2));
        case ExprKind::Neg: return make_neg(diff(e->lhs, kind, index));
        case ExprKind::Pow:
            return make_mul(make_mul(make_const(static_cast<double>(e->power)),
                                     make_pow(e->lhs, e->power - 1)),
                            diff(e->lhs, kind, index));
        case ExprKind::Func: {
            const Expr inner = diff(e->lhs, kind, index);
            switch (e->func) {
                case FuncKind::Sin: return make_mul(make_func(FuncKind::Cos, e->lhs), inner);
                case FuncKind::Cos:
                    return make_mul(make_neg(make_func(FuncKind::Sin, e->lhs)), inner);
                case FuncKind::Exp: return make_mul(make_func(FuncKind::Exp, e->lhs), inner);
                case FuncKind::Tanh:
                    return make_mul(
                        make_sub(make_const(1.0), make_pow(make_func(FuncKind::Tanh, e->lhs), 2)),
                        inner);
                case FuncKind::Sqrt:
                    return make_div(inner, make_mul(make_const(2.0),
                                                    make_func(FuncKind::Sqrt, e->lhs)));
                case FuncKind::Sigmoid: {
                    const Expr s = make_func(FuncKind::Sigmoid, e->lhs);
                    return make_mul(make_mul(s, make_sub(make_const(1.0), s)), inner);
                }
            }
            return make_const(0.0);
        }
    }
    return make_const(0.0);
}

Interval interval_eval(const Expr& e, const Box& x, const Box& u, const Box& w) {
    switch (e->kind) {
        case ExprKind::Constant: return Interval(e->value);
        case ExprKind::Var:
            switch (e->var) {
                case VarKind::State: return x.component(e->index);
                case VarKind::Input: return u.component(e->index);
                case VarKind::Disturbance: return w.component(e->index);
            }
            return Interval(0.0);
        case ExprKind::Add: return interval_eval(e->lhs, x, u, w) + interval_eval(e->rhs, x, u, w);
        case ExprKind::Sub: return interval_eval(e->lhs, x, u, w) - interval_eval(e->rhs, x, u, w);
        case ExprKind::Mul: return interval_eval(e->lhs, x, u, w) * interval_eval(e->rhs, x, u, w);
        case ExprKind::Div: return interval_eval(e->lhs, x, u, w) / interval_eval(e->rhs, x, u, w);
        case ExprKind::Neg: return -interval_eval(e->lhs, x, u, w);
        case ExprKind::Pow:
            return iv_pow_int(interval_eval(e->lhs, x, u, w), static_cast<int>(e->power));
        case ExprKind::Func: {
            const Interval v = interval_eval(e->lhs, x, u, w);
            switch (e->func) {
                case FuncKind::Sin: return iv_sin(v);
                case FuncKind::Cos: return iv_cos(v);
                case FuncKind::Exp: return iv_exp(v);
                case FuncKind::Tanh: return iv_tanh(v);
                case FuncKind::Sqrt: return iv_sqrt(v);
                case FuncKind::Sigmoid: return iv_sigmoid(v);
            }
            return Interval(0.0);
        }
    }
    return Interval(0.0);
}

namespace {

int precedence(const Expr& e) {
    switch (e->kind) {
        case ExprKind::Add:
        case ExprKind::Sub: return 1;
        case ExprKind::Mul:
        case ExprKind::Div: return 2;
        case ExprKind::Neg: return 3;
        case ExprKind::Pow: return 4;
        default: return 5;
    }
}

void print_rec(const Expr& e, std::ostringstream& out, int parent_prec) {
    const int prec = precedence(e);
    const bool parens = prec < parent_prec;
    if (parens) {
        out << '(';
    }
    switch (e->kind) {
        case ExprKind::Constant: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", e->value);
            out << buf;
            break;
        }
        case ExprKind::Var:
            out << (e->var == VarKind::State ? 'x' : e->var == VarKind::Input ? 'u' : 'w')
                << (e->index + 1);
            break;
        case ExprKind::Add:
            print_rec(e->lhs, out, 1);
            out << " + ";
            print_rec(e->rhs, out, 2);
            break;
        case ExprKind::Sub:
            print_rec(e->lhs, out, 1);
            out << " - ";
            print_rec(e->rhs, out, 2);
            break;
        case ExprKind::Mul:
            print_rec(e->lhs, out, 2);
            out << "*";
            print_rec(e->rhs, out, 3);
            break;
        case ExprKind::Div:
            print_rec(e->lhs, out, 2);
            out << "/";
            print_rec(e->rhs, out, 3);
            break;
        case ExprKind::Neg:
            out << "-";
            print_rec(e->lhs, out, 3);
            break;
        case ExprKind::Pow:
            print_rec(e->lhs, out, 5);
            out << "^" << e->power;
            break;
        case ExprKind::Func:
            out << func_name(e->func) << "(";
            print_rec(e->lhs, out, 0);
            out << ")";
            break;
    }
    if (parens) {
        out << ')';
    }
}

}  // namespace

std::string print_expr(const Expr& e) {
    std::ostringstream out;
    print_rec(e, out, 0);
    return out.str();
}

Plant::Plant(VarDims d, std::vector<Expr> rhs) : dims(d), f(std::move(rhs)) {
    if (static_cast<Eigen::Index>(f.size()) != dims.n) {
        throw std::invalid_argument("Plant: expression count does not match state dimension");
    }
}

Plant Plant::parse(const std::vector<std::string>& expressions, Eigen::Index m, Eigen::Index r) {
    VarDims dims;
    dims.n = static_cast<Eigen::Index>(expressions.size());
    dims.m = m;
    dims.r = r;
    std::vector<Expr> f;
    f.reserve(expressions.size());
    for (const std::string& s : expressions) {
        f.push_back(parse_expr(s, dims));
    }
    return Plant(dims, std::move(f));
}

Vec Plant::eval_rhs(const Vec& x, const Vec& u, const Vec& w) const {
    Vec out(dims.n);
    for (Eigen::Index i = 0; i < dims.n; ++i) {
        out(i) = eval(f[static_cast<std::size_t>(i)], x, u, w);
    }
    return out;
}

}  // namespace polyzono
