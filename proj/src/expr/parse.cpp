#include "xsr/expr/parse.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

namespace xsr::expr {

namespace {

std::optional<UnaryOp> unary_by_name(std::string_view name) {
    static const std::map<std::string_view, UnaryOp> table = {
        {"id", UnaryOp::Id},     {"log", UnaryOp::Log},       {"sqrt", UnaryOp::Sqrt},
        {"sin", UnaryOp::Sin},   {"cos", UnaryOp::Cos},       {"tanh", UnaryOp::Tanh},
        {"exp", UnaryOp::Exp},   {"expn", UnaryOp::Expn},     {"asin", UnaryOp::Asin},
        {"arcsin", UnaryOp::Asin}, {"square", UnaryOp::Square},
    };
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

class InfixParser {
public:
    InfixParser(std::string_view text, std::span<const std::string> variables)
        : text_(text) {
        for (std::size_t i = 0; i < variables.size(); ++i) {
            variables_[variables[i]] = static_cast<int>(i);
        }
    }

    NodePtr run() {
        NodePtr result = expression();
        skip_space();
        if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
        return result;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::map<std::string, int, std::less<>> variables_;

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char ch) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ch) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char ch) {
        if (!accept(ch)) {
            throw ParseError(std::string("expected '") + ch + "'", pos_);
        }
    }

    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    NodePtr expression() {
        NodePtr lhs = term();
        while (true) {
            if (accept('+')) {
                lhs = add(std::move(lhs), term());
            } else if (accept('-')) {
                lhs = sub(std::move(lhs), term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        while (true) {
            if (accept('*')) {
                lhs = mul(std::move(lhs), factor());
            } else if (accept('/')) {
                lhs = div(std::move(lhs), factor());
            } else {
                return lhs;
            }
        }
    }

    NodePtr factor() {
        if (accept('-')) {
            NodePtr operand = factor();
            if (operand->kind() == Node::Kind::Constant) return c(-operand->value());
            return mul(c(-1.0), std::move(operand));
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (!accept('^')) return base;
        // Right-associative; the exponent may carry a sign: x^-2.
        NodePtr exponent = factor();
        if (exponent->kind() == Node::Kind::Constant) {
            const double e = exponent->value();
            if (e == std::floor(e) && std::abs(e) <= 12.0) {
                return integer_power(std::move(base), static_cast<long long>(e));
            }
        }
        return Node::binary(BinaryOp::Pow, std::move(base), std::move(exponent));
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        const char ch = text_[pos_];
        if (ch == '(') {
            ++pos_;
            NodePtr inner = expression();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') return identifier();
        throw ParseError(std::string("unexpected character '") + ch + "'", pos_);
    }

    NodePtr number() {
        const char* begin = text_.data() + pos_;
        char* end = nullptr;
        const double value = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(end - begin);
        return c(value);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string_view name = text_.substr(start, pos_ - start);
        if (peek() == '(') {
            const auto op = unary_by_name(name);
            if (!op) throw ParseError("unknown function '" + std::string(name) + "'", start);
            expect('(');
            NodePtr arg = expression();
            expect(')');
            return unary(*op, std::move(arg));
        }
        if (name == "pi") return c(std::numbers::pi);
        auto it = variables_.find(name);
        if (it == variables_.end()) {
            throw ParseError("unknown identifier '" + std::string(name) + "'", start);
        }
        return x(it->second);
    }
};

std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

void render_infix(const NodePtr& node, std::span<const std::string> names, int parent_precedence,
                  std::ostream& out);

int precedence_of(const NodePtr& node) {
    if (node->kind() != Node::Kind::Binary) {
        return node->kind() == Node::Kind::Constant && node->value() < 0.0 ? 1 : 4;
    }
    switch (node->binary_op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 2;
        case BinaryOp::Pow: return 3;
    }
    return 4;
}

void render_infix(const NodePtr& node, std::span<const std::string> names, int parent_precedence,
                  std::ostream& out) {
    const int precedence = precedence_of(node);
    const bool parens = precedence < parent_precedence;
    if (parens) out << '(';
    switch (node->kind()) {
        case Node::Kind::Constant:
            out << format_double(node->value());
            break;
        case Node::Kind::Variable:
            if (!names.empty()) {
                out << names[static_cast<std::size_t>(node->index())];
            } else {
                out << 'x' << node->index();
            }
            break;
        case Node::Kind::Parameter:
            out << "theta" << node->index();
            break;
        case Node::Kind::Unary:
            out << name_of(node->unary_op()) << '(';
            render_infix(node->child(), names, 0, out);
            out << ')';
            break;
        case Node::Kind::Binary: {
            const char* symbol = nullptr;
            switch (node->binary_op()) {
                case BinaryOp::Add: symbol = " + "; break;
                case BinaryOp::Sub: symbol = " - "; break;
                case BinaryOp::Mul: symbol = "*"; break;
                case BinaryOp::Div: symbol = "/"; break;
                case BinaryOp::Pow: symbol = "^"; break;
            }
            render_infix(node->left(), names, precedence, out);
            out << symbol;
            // Right operand gets a strictly higher context so that
            // non-associative operators parenthesize correctly.
            render_infix(node->right(), names, precedence + 1, out);
            break;
        }
    }
    if (parens) out << ')';
}

void render_prefix(const NodePtr& node, std::ostream& out) {
    switch (node->kind()) {
        case Node::Kind::Constant:
            out << "(const " << format_double(node->value()) << ')';
            break;
        case Node::Kind::Variable:
            out << "(var " << node->index() << ')';
            break;
        case Node::Kind::Parameter:
            out << "(param " << node->index() << ')';
            break;
        case Node::Kind::Unary:
            out << '(' << name_of(node->unary_op()) << ' ';
            render_prefix(node->child(), out);
            out << ')';
            break;
        case Node::Kind::Binary:
            out << '(' << name_of(node->binary_op()) << ' ';
            render_prefix(node->left(), out);
            out << ' ';
            render_prefix(node->right(), out);
            out << ')';
            break;
    }
}

class PrefixParser {
public:
    explicit PrefixParser(std::string_view text) : text_(text) {}

    NodePtr run() {
        NodePtr result = node();
        skip_space();
        if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
        return result;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string_view token() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '(' && text_[pos_] != ')') {
            ++pos_;
        }
        if (pos_ == start) throw ParseError("expected token", pos_);
        return text_.substr(start, pos_ - start);
    }

    void expect(char ch) {
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != ch) {
            throw ParseError(std::string("expected '") + ch + "'", pos_);
        }
        ++pos_;
    }

    NodePtr node() {
        expect('(');
        const std::string_view head = token();
        NodePtr result;
        if (head == "const") {
            const std::string value(token());
            result = c(std::stod(value));
        } else if (head == "var") {
            result = x(std::stoi(std::string(token())));
        } else if (head == "param") {
            result = p(std::stoi(std::string(token())));
        } else if (auto uop = unary_by_name(head)) {
            result = unary(*uop, node());
        } else if (head == "add" || head == "sub" || head == "mul" || head == "div" || head == "pow") {
            BinaryOp op = BinaryOp::Add;
            if (head == "sub") op = BinaryOp::Sub;
            if (head == "mul") op = BinaryOp::Mul;
            if (head == "div") op = BinaryOp::Div;
            if (head == "pow") op = BinaryOp::Pow;
            NodePtr left = node();
            NodePtr right = node();
            result = Node::binary(op, std::move(left), std::move(right));
        } else {
            throw ParseError("unknown prefix operator '" + std::string(head) + "'", pos_);
        }
        expect(')');
        return result;
    }
};

}  // namespace

ExprTree parse(std::string_view text, std::span<const std::string> variables) {
    return ExprTree(InfixParser(text, variables).run());
}

ExprTree parse_prefix(std::string_view text) { return ExprTree(PrefixParser(text).run()); }

std::string format_infix(const ExprTree& tree, std::span<const std::string> names) {
    std::ostringstream out;
    render_infix(tree.root(), names, 0, out);
    return out.str();
}

std::string format_prefix(const ExprTree& tree) {
    std::ostringstream out;
    render_prefix(tree.root(), out);
    return out.str();
}

}  // namespace xsr::expr
