#include "gmtd/features.hpp"

#include <cmath>
#include <fstream>

#include "gmtd/format.hpp"

namespace gmtd {

double perimeter(const Contour& contour) {
    const auto& b = contour.boundary;
    if (b.size() < 2) throw validation_error("perimeter: boundary has fewer than 2 points");
    double s = 0.0;
    for (std::size_t t = 0; t + 1 < b.size(); ++t)
        s += std::hypot(static_cast<double>(b[t + 1].row - b[t].row),
                        static_cast<double>(b[t + 1].col - b[t].col));
    return s + contour.closing_distance;
}

double circularity(const Region& region, const Contour& contour) {
    const double p = perimeter(contour);
    if (!(p > 0.0)) throw validation_error("circularity: zero perimeter");
    return 4.0 * kPi * static_cast<double>(region.area()) / (p * p);
}

CurvatureResult curvature(const ChainCode& chain) {
    if (chain.alpha.size() < 2)
        throw validation_error("curvature: need at least 2 chain angles");
    CurvatureResult out;
    out.delta.reserve(chain.alpha.size() - 1);
    for (std::size_t n = 0; n + 1 < chain.alpha.size(); ++n) {
        const double dl = std::hypot(static_cast<double>(chain.ell[n + 1].row - chain.ell[n].row),
                                     static_cast<double>(chain.ell[n + 1].col - chain.ell[n].col));
        if (dl == 0.0) {
            ++out.skipped;  // coincident points: curvature undefined, skip
            continue;
        }
        out.delta.push_back(wrap_angle(chain.alpha[n + 1] - chain.alpha[n]) / dl);
    }
    return out;
}

double bending_energy(const CurvatureResult& curv) {
    if (curv.delta.empty()) throw validation_error("bending_energy: no curvature samples");
    double s = 0.0;
    for (double d : curv.delta) s += d * d;
    return s / static_cast<double>(curv.delta.size());
}

FeatureVector region_features(const Region& region) {
    const Contour contour = trace_boundary(region);
    const ChainCode chain = chain_code(contour);
    FeatureVector f;
    f.cr = circularity(region, contour);
    f.eb = bending_energy(curvature(chain));
    return f;
}

void write_features_csv(const std::vector<FeatureRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write features CSV: " + path);
    out << "region_id,area,perimeter,cr,eb,label\n";
    for (const auto& r : rows) {
        out << r.region_id << ',' << r.area << ',' << double_to_string(r.perimeter) << ','
            << double_to_string(r.f.cr) << ',' << double_to_string(r.f.eb) << ',' << r.label
            << '\n';
    }
    if (!out) throw io_error("failed writing features CSV: " + path);
}

}  // namespace gmtd
