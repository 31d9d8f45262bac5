#include "actirehab/signal.hpp"

#include <cmath>

#include "actirehab/error.hpp"

namespace actirehab {

double vector_magnitude(double ax, double ay, double az) {
    if (!std::isfinite(ax) || !std::isfinite(ay) || !std::isfinite(az)) {
        throw NonFiniteInput("acceleration sample has a non-finite axis");
    }
    return std::sqrt(ax * ax + ay * ay + az * az);
}

double vector_magnitude(const TriaxialSample& s) { return vector_magnitude(s.ax, s.ay, s.az); }

double gravity_removed_vm(double ax, double ay, double az) {
    return std::abs(vector_magnitude(ax, ay, az) - 1.0);
}

double gravity_removed_vm(const TriaxialSample& s) { return gravity_removed_vm(s.ax, s.ay, s.az); }

VmSeries secondwise_vm(const TriaxialRecording& rec) {
    if (rec.samples.empty()) throw EmptyRecording("recording has no samples");
    const double origin = std::floor(rec.samples.front().t);
    const auto last_bucket =
        static_cast<std::size_t>(std::floor(rec.samples.back().t) - origin);

    std::vector<double> sums(last_bucket + 1, 0.0);
    std::vector<std::size_t> counts(last_bucket + 1, 0);
    for (const auto& s : rec.samples) {
        const auto k = static_cast<std::size_t>(std::floor(s.t) - origin);
        sums[k] += gravity_removed_vm(s);
        ++counts[k];
    }
    VmSeries out;
    out.start_t = origin;
    out.values.resize(sums.size(), 0.0);
    for (std::size_t k = 0; k < sums.size(); ++k) {
        if (counts[k] > 0) out.values[k] = sums[k] / static_cast<double>(counts[k]);
    }
    return out;
}

}  // namespace actirehab
