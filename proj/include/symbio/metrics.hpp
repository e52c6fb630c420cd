#pragma once

#include "symbio/table.hpp"

#include <Eigen/Dense>

namespace symbio {

// Binary classification metrics with CRC (1) as the positive class.
struct MetricReport {
    double accuracy = 0.0;
    double f1 = 0.0;
    // confusion(truth, pred): (0,0)=TN, (0,1)=FP, (1,0)=FN, (1,1)=TP.
    Eigen::Matrix2i confusion = Eigen::Matrix2i::Zero();
    std::size_t n = 0;

    [[nodiscard]] auto tp() const -> int { return confusion(1, 1); }
    [[nodiscard]] auto tn() const -> int { return confusion(0, 0); }
    [[nodiscard]] auto fp() const -> int { return confusion(0, 1); }
    [[nodiscard]] auto fn() const -> int { return confusion(1, 0); }
};

// Throws DimensionError on length mismatch or empty input.
[[nodiscard]] auto metrics(const Labels& pred, const Labels& truth) -> MetricReport;

} // namespace symbio
