#pragma once

// Connected regions of the denoised map, edge-artifact discarding, and
// Moore-neighbor boundary tracing with chain codes.
//
// Raster convention: row indexes Doppler bins, col indexes angle bins. For
// chain-code angles the raster is treated as a y-down image (alpha =
// atan2(-drow, dcol)), so "east" along increasing angle is 0 and a step to
// the next row down is -pi/2.

#include <string>
#include <vector>

#include "gmtd/common.hpp"
#include "gmtd/spectral.hpp"

namespace gmtd {

struct BoundingBox {
    int min_row = 0;
    int max_row = 0;
    int min_col = 0;
    int max_col = 0;
};

struct Region {
    int id = 0;
    std::vector<Point> pixels;  // sorted in raster order
    BoundingBox bbox;

    int area() const { return static_cast<int>(pixels.size()); }
    bool contains(const Point& p) const;
};

struct Contour {
    std::vector<Point> boundary;    // clockwise, starts topmost-then-leftmost
    double closing_distance = 0.0;  // Euclidean distance first <-> last point
};

struct ChainCode {
    std::vector<double> alpha;  // step angles, multiples of pi/4; size n-1
    std::vector<Point> ell;     // the boundary coordinates; size n
};

// Maximal 8-connected components of the nonzero pixels, ids 1.. in raster
// order of each component's first pixel; components smaller than
// min_region_area are dropped (ids are assigned after the filter).
// connectivity must be 8 (4-connectivity is not part of this pipeline).
std::vector<Region> label_regions(const DenoisedMap& denoised, int connectivity = 8,
                                  int min_region_area = 3);
std::vector<Region> label_regions(const Eigen::MatrixXd& values, int connectivity = 8,
                                  int min_region_area = 3);

// Drop regions whose bounding box intersects the first/last `guard` angle
// columns (edge/corner artifacts of the spectral grid).
std::vector<Region> discard_edge_regions(const std::vector<Region>& regions, int n_angle_cols,
                                         int guard);

// Clockwise Moore-neighbor trace of the outer boundary, starting at the
// topmost-then-leftmost pixel with an initial backtrack to its west
// neighbor; terminates by Jacob's stopping criterion (re-entering the start
// pixel with the same successor as the first move). Pixels may appear once
// per visit on one-pixel-wide necks.
Contour trace_boundary(const Region& region);

// Quantized step angles along the boundary; ell is the boundary itself so
// consecutive ell distances are 1 or sqrt(2). Throws validation_error if the
// boundary has fewer than 2 points.
ChainCode chain_code(const Contour& contour);

// One region per line: {"id":..,"area":..,"bounding_box":[minr,maxr,minc,maxc],
// "boundary":[[r,c],...]}.
void write_regions_jsonl(const std::vector<Region>& regions,
                         const std::vector<Contour>& contours, const std::string& path);

}  // namespace gmtd
