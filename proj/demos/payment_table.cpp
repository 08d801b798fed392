// Decomposes a published frequency series into topical advection and residual change.
#include <cmath>
#include <iomanip>
#include <iostream>
#include <vector>

#include "advect/advect.hpp"

int main() {
    const std::vector<std::string> periods{"1900s", "1910s", "1920s", "1930s", "1940s"};
    const std::vector<double> pmw{69.2, 71.2, 151.5, 226.3, 118.3};
    const std::vector<double> advection{-0.06, +0.45, +0.30, -0.42};

    auto c = advect::change_series(pmw, std::vector<double>(pmw.size(), 1.0));
    auto x = advect::adjust(c, advection);
    auto y = advect::reform(pmw[0], x);

    auto row = [&](const char* label, const std::vector<double>& v, std::size_t offset, int prec) {
        std::cout << std::left << std::setw(4) << label << std::right;
        for (std::size_t i = 0; i < offset; ++i) std::cout << std::setw(9) << "";
        for (double d : v) std::cout << std::setw(9) << std::fixed << std::setprecision(prec) << d;
        std::cout << '\n';
    };
    std::cout << std::setw(4) << "";
    for (const auto& p : periods) std::cout << std::setw(9) << p;
    std::cout << '\n';
    row("a", pmw, 0, 1);
    std::vector<double> b;
    for (double v : pmw) b.push_back(std::log(v));
    row("b", b, 0, 2);
    row("c", c, 1, 2);
    row("d", advection, 1, 2);
    row("x", x, 1, 2);
    row("y", y, 0, 2);
}
