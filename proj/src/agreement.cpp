#include "loadpat/agreement.hpp"

#include <map>
#include <stdexcept>
#include <utility>

namespace loadpat {

namespace {
double pairs(double n) { return n * (n - 1.0) / 2.0; }
}  // namespace

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw std::invalid_argument("labelings differ in length");
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> rows, cols;
    double n = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0 || b[i] < 0) continue;
        joint[{a[i], b[i]}] += 1.0;
        rows[a[i]] += 1.0;
        cols[b[i]] += 1.0;
        n += 1.0;
    }
    double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (const auto& [key, c] : joint) index += pairs(c);
    for (const auto& [key, c] : rows) sum_rows += pairs(c);
    for (const auto& [key, c] : cols) sum_cols += pairs(c);
    const double expected = sum_rows * sum_cols / pairs(n);
    const double max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

}  // namespace loadpat
