#pragma once

// Contour shape features: circularity ratio and bending energy.

#include <string>
#include <vector>

#include "gmtd/regions.hpp"

namespace gmtd {

struct FeatureVector {
    double cr = 0.0;  // circularity ratio, 1 for a disk, small when elongated
    double eb = 0.0;  // bending energy, mean squared discrete curvature
};

struct CurvatureResult {
    std::vector<double> delta;  // discrete curvature samples
    int skipped = 0;            // zero-length steps skipped (warning count)
};

// P = sum of consecutive boundary distances plus the closing distance
// between the last and first point. Throws validation_error on boundaries
// shorter than 2 points.
double perimeter(const Contour& contour);

// CR = 4*pi*A / P^2 with A the region pixel count. Throws validation_error
// on zero perimeter.
double circularity(const Region& region, const Contour& contour);

// delta(n) = wrap(alpha(n+1) - alpha(n)) / |ell(n+1) - ell(n)| with the wrap
// into (-pi, pi]. Steps with coincident ell points are skipped and counted.
CurvatureResult curvature(const ChainCode& chain);

// Mean of |delta|^2. Throws validation_error if no curvature samples remain.
double bending_energy(const CurvatureResult& curv);

// Convenience: trace + chain + both features for one region.
FeatureVector region_features(const Region& region);

struct FeatureRow {
    int region_id = 0;
    int area = 0;
    double perimeter = 0.0;
    FeatureVector f;
    std::string label;  // "target"/"clutter", empty when unknown
};

// CSV with columns region_id, area, perimeter, cr, eb, label.
void write_features_csv(const std::vector<FeatureRow>& rows, const std::string& path);

}  // namespace gmtd
