#include "quotver/parse.hpp"

#include <cctype>
#include <memory>

namespace qv {

namespace {

struct Node {
    enum Kind { Num, Ident, Add, Sub, Mul, Div, Neg, Pow } kind;
    mpz_class num;
    std::string name;
    int exponent = 0;
    std::unique_ptr<Node> a, b;
};

using NodePtr = std::unique_ptr<Node>;

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr n = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected character '" + std::string(1, s_[i_]) + "'");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at offset " + std::to_string(i_) + " in \"" + s_ + "\"");
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    static NodePtr bin(Node::Kind k, NodePtr a, NodePtr b) {
        auto n = std::make_unique<Node>();
        n->kind = k;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }
    NodePtr expr() {
        NodePtr n = term();
        while (true) {
            if (eat('+')) {
                n = bin(Node::Add, std::move(n), term());
            } else if (eat('-')) {
                n = bin(Node::Sub, std::move(n), term());
            } else {
                return n;
            }
        }
    }
    NodePtr term() {
        NodePtr n = unary();
        while (true) {
            if (eat('*')) {
                n = bin(Node::Mul, std::move(n), unary());
            } else if (eat('/')) {
                n = bin(Node::Div, std::move(n), unary());
            } else {
                return n;
            }
        }
    }
    NodePtr unary() {
        if (eat('-')) {
            auto n = std::make_unique<Node>();
            n->kind = Node::Neg;
            n->a = unary();
            return n;
        }
        if (eat('+')) return unary();
        return power();
    }
    NodePtr power() {
        NodePtr base = atom();
        if (eat('^')) {
            skip();
            bool neg = false;
            bool paren = eat('(');
            if (eat('-')) neg = true;
            skip();
            std::size_t start = i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            if (start == i_) fail("expected integer exponent");
            if (i_ - start > 6) fail("exponent too large");
            int e = std::stoi(s_.substr(start, i_ - start));
            if (paren && !eat(')')) fail("expected ')'");
            auto n = std::make_unique<Node>();
            n->kind = Node::Pow;
            n->a = std::move(base);
            n->exponent = neg ? -e : e;
            return n;
        }
        return base;
    }
    NodePtr atom() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end of input");
        char c = s_[i_];
        if (c == '(') {
            ++i_;
            NodePtr n = expr();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        auto n = std::make_unique<Node>();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            n->kind = Node::Num;
            n->num = mpz_class(s_.substr(start, i_ - start));
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i_;
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || s_[i_] == '\''))
                ++i_;
            n->kind = Node::Ident;
            n->name = s_.substr(start, i_ - start);
            return n;
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    const std::string& s_;
    std::size_t i_ = 0;
};

template <class T, class Leaf, class Divide, class Power>
T evaluate(const Node& n, const Leaf& leaf, const Divide& divide, const Power& power) {
    switch (n.kind) {
        case Node::Num:
        case Node::Ident:
            return leaf(n);
        case Node::Add:
            return evaluate<T>(*n.a, leaf, divide, power) + evaluate<T>(*n.b, leaf, divide, power);
        case Node::Sub:
            return evaluate<T>(*n.a, leaf, divide, power) - evaluate<T>(*n.b, leaf, divide, power);
        case Node::Mul:
            return evaluate<T>(*n.a, leaf, divide, power) * evaluate<T>(*n.b, leaf, divide, power);
        case Node::Div:
            return divide(evaluate<T>(*n.a, leaf, divide, power), evaluate<T>(*n.b, leaf, divide, power));
        case Node::Neg:
            return -evaluate<T>(*n.a, leaf, divide, power);
        case Node::Pow:
            return power(evaluate<T>(*n.a, leaf, divide, power), n.exponent);
    }
    throw std::logic_error("bad node");
}

}  // namespace

Poly parse_poly(const std::string& text, const std::vector<std::string>& names) {
    NodePtr root = Parser(text).parse();
    auto leaf = [&](const Node& n) -> Poly {
        if (n.kind == Node::Num) return Poly(Coef(n.num));
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == n.name) return Poly::var(static_cast<int>(i));
        throw ParseError("unknown identifier '" + n.name + "' in \"" + text + "\"");
    };
    auto divide = [&](const Poly& a, const Poly& b) -> Poly {
        if (!b.is_constant() || b.is_zero()) throw ParseError("polynomial division by a non-constant in \"" + text + "\"");
        return a.scaled(Coef(1) / b.constant_term());
    };
    auto power = [&](const Poly& a, int e) -> Poly {
        if (e < 0) {
            if (!a.is_constant() || a.is_zero()) throw ParseError("negative power of a non-constant in \"" + text + "\"");
            return Poly((Coef(1) / a.constant_term()).pow(static_cast<unsigned>(-e)));
        }
        return a.pow(static_cast<unsigned>(e));
    };
    return evaluate<Poly>(*root, leaf, divide, power);
}

Frac parse_frac(const RingPtr& ring, const std::string& text) {
    NodePtr root = Parser(text).parse();
    auto leaf = [&](const Node& n) -> Frac {
        if (n.kind == Node::Num) return Frac::constant(ring, Coef(n.num));
        int i = ring->index_of(n.name);
        if (i >= 0) return Frac::var(ring, i);
        if (ring->mixed() && n.name == ring->ctx().symbol) return Frac::from_poly(ring, ring->uniformizer());
        throw ParseError("unknown identifier '" + n.name + "' in \"" + text + "\"");
    };
    auto divide = [&](const Frac& a, const Frac& b) -> Frac {
        if (b.is_zero()) throw ParseError("division by zero in \"" + text + "\"");
        return a / b;
    };
    auto power = [&](const Frac& a, int e) -> Frac {
        if (e < 0 && a.is_zero()) throw ParseError("division by zero in \"" + text + "\"");
        return a.pow(e);
    };
    return evaluate<Frac>(*root, leaf, divide, power);
}

}  // namespace qv
