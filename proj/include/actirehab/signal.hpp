#pragma once

#include <vector>

#include "actirehab/ingest.hpp"

namespace actirehab {

// Second-wise gravity-removed vector magnitude; the wavelet input.
struct VmSeries {
    std::vector<double> values;  // one per second, all >= 0
    double start_t = 0.0;        // floor of the first sample time
};

// sqrt(ax^2 + ay^2 + az^2). Throws NonFiniteInput.
double vector_magnitude(double ax, double ay, double az);
double vector_magnitude(const TriaxialSample& s);

// |vector_magnitude - 1|: acceleration with the 1 g gravity offset removed.
double gravity_removed_vm(double ax, double ay, double az);
double gravity_removed_vm(const TriaxialSample& s);

// Mean gravity-removed VM per whole-second bucket [k, k+1), with buckets
// anchored at floor(t of the first sample). Buckets without samples hold 0.
// Throws EmptyRecording.
VmSeries secondwise_vm(const TriaxialRecording& rec);

}  // namespace actirehab
