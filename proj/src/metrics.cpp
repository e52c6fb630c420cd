#include "symbio/metrics.hpp"

#include "symbio/error.hpp"

namespace symbio {

auto metrics(const Labels& pred, const Labels& truth) -> MetricReport
{
    if (pred.size() != truth.size()) {
        throw DimensionError("metrics: " + std::to_string(pred.size()) + " prediction(s) for "
                             + std::to_string(truth.size()) + " label(s)");
    }
    if (truth.empty()) throw DimensionError("metrics on empty input");
    MetricReport r;
    r.n = truth.size();
    for (std::size_t i = 0; i < truth.size(); ++i) {
        r.confusion(truth[i] == 1 ? 1 : 0, pred[i] == 1 ? 1 : 0) += 1;
    }
    r.accuracy = static_cast<double>(r.tp() + r.tn()) / static_cast<double>(r.n);
    const int denom = 2 * r.tp() + r.fp() + r.fn();
    r.f1 = denom == 0 ? 0.0 : 2.0 * r.tp() / static_cast<double>(denom);
    return r;
}

} // namespace symbio
