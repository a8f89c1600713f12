#pragma once

#include <cmath>
#include <vector>

#include "qms/space.hpp"

namespace qms::testing {

// symmetric space from explicit positions on a line with a distance exponent
inline QuasiMetricSpace line(std::initializer_list<double> xs, double exponent = 1.0) {
    std::vector<double> pos(xs);
    QuasiMetricSpace s;
    const int n = static_cast<int>(pos.size());
    s.dist = Mat(n);
    s.weight.assign(n, 1.0);
    for (int i = 0; i < n; ++i) {
        s.labels.push_back(std::to_string(i));
        for (int j = 0; j < n; ++j)
            s.dist.at(i, j) = (i == j) ? 0.0 : std::pow(std::fabs(pos[i] - pos[j]), exponent);
    }
    return s;
}

inline QuasiMetricSpace from_matrix(std::vector<std::vector<double>> d,
                                    std::vector<double> w = {}) {
    QuasiMetricSpace s;
    const int n = static_cast<int>(d.size());
    s.dist = Mat(n);
    s.weight = w.empty() ? std::vector<double>(n, 1.0) : w;
    for (int i = 0; i < n; ++i) {
        s.labels.push_back(std::to_string(i));
        for (int j = 0; j < n; ++j) s.dist.at(i, j) = d[i][j];
    }
    return s;
}

inline QuasiMetricSpace equilateral(int n, double side = 1.0) {
    QuasiMetricSpace s;
    s.dist = Mat(n);
    s.weight.assign(n, 1.0);
    for (int i = 0; i < n; ++i) {
        s.labels.push_back(std::to_string(i));
        for (int j = 0; j < n; ++j) s.dist.at(i, j) = (i == j) ? 0.0 : side;
    }
    return s;
}

}  // namespace qms::testing
