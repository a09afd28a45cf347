#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cgp {

enum class FunctionKind { boolean, real };

/// Primitive operations known to the interpreter.
enum class Op : std::uint8_t {
    // boolean, applied bitwise to packed truth-table words
    bit_and,
    bit_or,
    bit_xor,
    bit_nor,
    bit_nand,
    bit_xnor,
    bit_and_not,  // a AND (NOT b)
    bit_not,
    // real
    add,
    sub,
    mul,
    div,  // protected: x / 0 -> 1
    sin,
    cos,
    log_abs,  // ln|x|, protected: ln|0| -> 0
    exp,
};

struct Function {
    std::string name;
    std::size_t arity;
    FunctionKind kind;
    Op op;
};

inline Function make_function(Op op)
{
    switch (op) {
    case Op::bit_and: return {"AND", 2, FunctionKind::boolean, op};
    case Op::bit_or: return {"OR", 2, FunctionKind::boolean, op};
    case Op::bit_xor: return {"XOR", 2, FunctionKind::boolean, op};
    case Op::bit_nor: return {"NOR", 2, FunctionKind::boolean, op};
    case Op::bit_nand: return {"NAND", 2, FunctionKind::boolean, op};
    case Op::bit_xnor: return {"XNOR", 2, FunctionKind::boolean, op};
    case Op::bit_and_not: return {"AND*", 2, FunctionKind::boolean, op};
    case Op::bit_not: return {"NOT", 1, FunctionKind::boolean, op};
    case Op::add: return {"+", 2, FunctionKind::real, op};
    case Op::sub: return {"-", 2, FunctionKind::real, op};
    case Op::mul: return {"*", 2, FunctionKind::real, op};
    case Op::div: return {"/", 2, FunctionKind::real, op};
    case Op::sin: return {"sin", 1, FunctionKind::real, op};
    case Op::cos: return {"cos", 1, FunctionKind::real, op};
    case Op::log_abs: return {"ln|n|", 1, FunctionKind::real, op};
    case Op::exp: return {"exp", 1, FunctionKind::real, op};
    }
    throw std::invalid_argument("unknown op");
}

/// Ordered primitive set. Function genes index into it, so order is part of
/// the genotype encoding.
class FunctionSet {
public:
    FunctionSet() = default;

    FunctionSet(std::initializer_list<Op> ops)
    {
        for (Op op : ops) entries_.push_back(make_function(op));
        check();
    }

    explicit FunctionSet(std::vector<Function> entries) : entries_(std::move(entries)) { check(); }

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
    [[nodiscard]] const Function& operator[](std::size_t i) const { return entries_[i]; }
    [[nodiscard]] const std::vector<Function>& entries() const noexcept { return entries_; }
    [[nodiscard]] FunctionKind kind() const noexcept { return kind_; }

    [[nodiscard]] std::size_t max_arity() const noexcept
    {
        std::size_t a = 0;
        for (const auto& f : entries_) a = f.arity > a ? f.arity : a;
        return a;
    }

    [[nodiscard]] std::size_t arity(std::size_t function_id) const { return entries_.at(function_id).arity; }

private:
    void check()
    {
        if (entries_.empty()) throw std::invalid_argument("function set must not be empty");
        kind_ = entries_.front().kind;
        for (const auto& f : entries_) {
            if (f.kind != kind_) throw std::invalid_argument("function set mixes boolean and real functions");
            if (f.arity == 0) throw std::invalid_argument("function '" + f.name + "' has arity 0");
        }
    }

    std::vector<Function> entries_;
    FunctionKind kind_ = FunctionKind::boolean;
};

inline std::uint64_t apply_boolean(Op op, std::uint64_t a, std::uint64_t b)
{
    switch (op) {
    case Op::bit_and: return a & b;
    case Op::bit_or: return a | b;
    case Op::bit_xor: return a ^ b;
    case Op::bit_nor: return ~(a | b);
    case Op::bit_nand: return ~(a & b);
    case Op::bit_xnor: return ~(a ^ b);
    case Op::bit_and_not: return a & ~b;
    case Op::bit_not: return ~a;
    default: throw std::logic_error("real op applied to boolean words");
    }
}

inline double apply_real(Op op, double a, double b)
{
    switch (op) {
    case Op::add: return a + b;
    case Op::sub: return a - b;
    case Op::mul: return a * b;
    case Op::div: return b == 0.0 ? 1.0 : a / b;
    case Op::sin: return std::sin(a);
    case Op::cos: return std::cos(a);
    case Op::log_abs: return a == 0.0 ? 0.0 : std::log(std::fabs(a));
    case Op::exp: return std::exp(a);
    default: throw std::logic_error("boolean op applied to real values");
    }
}

/// {AND, OR, XOR, AND*}
inline FunctionSet adder_multiplier_functions()
{
    return {Op::bit_and, Op::bit_or, Op::bit_xor, Op::bit_and_not};
}

/// {AND, OR, XOR, NOR, AND*}
inline FunctionSet subtractor_functions()
{
    return {Op::bit_and, Op::bit_or, Op::bit_xor, Op::bit_nor, Op::bit_and_not};
}

/// {+, -, *, /, sin, cos, ln|n|, exp}
inline FunctionSet regression_functions()
{
    return {Op::add, Op::sub, Op::mul, Op::div, Op::sin, Op::cos, Op::log_abs, Op::exp};
}

}  // namespace cgp
