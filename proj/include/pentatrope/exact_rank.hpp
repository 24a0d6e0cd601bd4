#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace pentatrope {

/// Rank of an integer matrix by Gaussian elimination over the rationals. No tolerance.
inline std::size_t exact_rank(const std::vector<std::vector<int>>& rows) {
    using boost::multiprecision::cpp_rational;
    if (rows.empty()) {
        return 0;
    }
    const std::size_t cols = rows.front().size();
    std::vector<std::vector<cpp_rational>> m;
    m.reserve(rows.size());
    for (const auto& r : rows) {
        m.emplace_back(r.begin(), r.end());
    }
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
        std::size_t pivot = rank;
        while (pivot < m.size() && m[pivot][c] == 0) {
            ++pivot;
        }
        if (pivot == m.size()) {
            continue;
        }
        std::swap(m[rank], m[pivot]);
        for (std::size_t r = rank + 1; r < m.size(); ++r) {
            if (m[r][c] == 0) {
                continue;
            }
            const cpp_rational f = m[r][c] / m[rank][c];
            for (std::size_t j = c; j < cols; ++j) {
                m[r][j] -= f * m[rank][j];
            }
        }
        ++rank;
    }
    return rank;
}

}  // namespace pentatrope
