#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace cbtest {

// Arithmetic expression strings for direction/kernel functions.
// Grammar: numbers, x, y, + - * / ( ), sqrt(...). Example: "(1-2*x)/(1+2*x)".
struct ParsedExpr {
    std::function<double(double, double)> eval;
    bool uses_y = false;
};

struct expr_error : std::runtime_error {
    explicit expr_error(const std::string& what) : std::runtime_error(what) {}
};

ParsedExpr parse_expr(const std::string& text);

// univariate view; rejects expressions mentioning y
std::function<double(double)> parse_function1(const std::string& text);

}  // namespace cbtest
