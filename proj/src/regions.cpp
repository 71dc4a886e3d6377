#include "gmtd/regions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

namespace gmtd {

namespace {

// Clockwise Moore neighborhood starting East (row down = clockwise in a
// y-down raster): E, SE, S, SW, W, NW, N, NE.
constexpr int kDirs[8][2] = {{0, 1},  {1, 1},   {1, 0},  {1, -1},
                             {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}};

int dir_index(const Point& from, const Point& to) {
    const int dr = to.row - from.row;
    const int dc = to.col - from.col;
    for (int k = 0; k < 8; ++k)
        if (kDirs[k][0] == dr && kDirs[k][1] == dc) return k;
    throw numerical_error("trace_boundary: non-adjacent backtrack point");
}

std::uint64_t pack(const Point& p) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.row)) << 32) |
           static_cast<std::uint32_t>(p.col);
}

}  // namespace

bool Region::contains(const Point& p) const {
    return std::binary_search(pixels.begin(), pixels.end(), p);
}

std::vector<Region> label_regions(const Eigen::MatrixXd& values, int connectivity,
                                  int min_region_area) {
    if (connectivity != 8)
        throw validation_error("label_regions: only 8-connectivity is supported");
    if (min_region_area < 1) throw validation_error("label_regions: min_region_area must be >= 1");

    const int rows = static_cast<int>(values.rows());
    const int cols = static_cast<int>(values.cols());
    std::vector<char> seen(static_cast<std::size_t>(rows) * cols, 0);
    auto at = [&](int r, int c) -> char& { return seen[static_cast<std::size_t>(r) * cols + c]; };

    std::vector<Region> out;
    std::vector<Point> stack;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (values(r, c) == 0.0 || at(r, c)) continue;
            Region reg;
            stack.clear();
            stack.push_back({r, c});
            at(r, c) = 1;
            while (!stack.empty()) {
                const Point p = stack.back();
                stack.pop_back();
                reg.pixels.push_back(p);
                for (const auto& d : kDirs) {
                    const int nr = p.row + d[0];
                    const int nc = p.col + d[1];
                    if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
                    if (values(nr, nc) == 0.0 || at(nr, nc)) continue;
                    at(nr, nc) = 1;
                    stack.push_back({nr, nc});
                }
            }
            if (static_cast<int>(reg.pixels.size()) < min_region_area) continue;
            std::sort(reg.pixels.begin(), reg.pixels.end());
            reg.bbox = {reg.pixels.front().row, reg.pixels.front().row, reg.pixels.front().col,
                        reg.pixels.front().col};
            for (const auto& p : reg.pixels) {
                reg.bbox.min_row = std::min(reg.bbox.min_row, p.row);
                reg.bbox.max_row = std::max(reg.bbox.max_row, p.row);
                reg.bbox.min_col = std::min(reg.bbox.min_col, p.col);
                reg.bbox.max_col = std::max(reg.bbox.max_col, p.col);
            }
            out.push_back(std::move(reg));
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i) + 1;
    return out;
}

std::vector<Region> label_regions(const DenoisedMap& denoised, int connectivity,
                                  int min_region_area) {
    return label_regions(denoised.map.values, connectivity, min_region_area);
}

std::vector<Region> discard_edge_regions(const std::vector<Region>& regions, int n_angle_cols,
                                         int guard) {
    if (guard < 0) throw validation_error("discard_edge_regions: guard must be >= 0");
    std::vector<Region> out;
    out.reserve(regions.size());
    for (const auto& r : regions) {
        if (r.bbox.min_col < guard || r.bbox.max_col >= n_angle_cols - guard) continue;
        out.push_back(r);
    }
    return out;
}

Contour trace_boundary(const Region& region) {
    Contour contour;
    if (region.pixels.empty()) throw validation_error("trace_boundary: empty region");
    const Point start = region.pixels.front();  // topmost, then leftmost (raster order)
    contour.boundary.push_back(start);
    if (region.pixels.size() == 1) {
        contour.closing_distance = 0.0;
        return contour;
    }

    std::unordered_set<std::uint64_t> pix;
    pix.reserve(region.pixels.size() * 2);
    for (const auto& p : region.pixels) pix.insert(pack(p));
    auto in_region = [&](const Point& p) { return pix.count(pack(p)) != 0; };

    Point cur = start;
    Point backtrack{start.row, start.col - 1};  // west neighbor is background
    Point first_next{};
    bool have_first = false;
    const std::size_t guard_limit = 8 * region.pixels.size() + 8;

    while (true) {
        const int k0 = dir_index(cur, backtrack);
        bool found = false;
        Point next{};
        for (int i = 1; i <= 8; ++i) {
            const int k = (k0 + i) % 8;
            const Point cand{cur.row + kDirs[k][0], cur.col + kDirs[k][1]};
            if (in_region(cand)) {
                next = cand;
                const int kb = (k + 7) % 8;
                backtrack = {cur.row + kDirs[kb][0], cur.col + kDirs[kb][1]};
                found = true;
                break;
            }
        }
        if (!found) break;  // isolated pixel
        if (cur == start) {
            if (!have_first) {
                first_next = next;
                have_first = true;
            } else if (next == first_next) {
                break;  // Jacob's stopping criterion
            }
        }
        contour.boundary.push_back(next);
        cur = next;
        if (contour.boundary.size() > guard_limit)
            throw numerical_error("trace_boundary: walk exceeded safety limit");
    }

    if (contour.boundary.size() > 1 && contour.boundary.back() == start)
        contour.boundary.pop_back();

    const Point& a = contour.boundary.front();
    const Point& b = contour.boundary.back();
    contour.closing_distance = std::hypot(static_cast<double>(b.row - a.row),
                                          static_cast<double>(b.col - a.col));
    return contour;
}

ChainCode chain_code(const Contour& contour) {
    const auto& b = contour.boundary;
    if (b.size() < 2) throw validation_error("chain_code: boundary has fewer than 2 points");
    ChainCode chain;
    chain.ell = b;
    chain.alpha.reserve(b.size() - 1);
    for (std::size_t t = 0; t + 1 < b.size(); ++t) {
        // y-down raster: negate the row delta (as an integer, so a zero
        // delta stays +0.0 and atan2 returns +pi for straight-west steps).
        const int dr = b[t + 1].row - b[t].row;
        const int dc = b[t + 1].col - b[t].col;
        chain.alpha.push_back(std::atan2(static_cast<double>(-dr), static_cast<double>(dc)));
    }
    return chain;
}

void write_regions_jsonl(const std::vector<Region>& regions,
                         const std::vector<Contour>& contours, const std::string& path) {
    if (regions.size() != contours.size())
        throw validation_error("write_regions_jsonl: regions/contours size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write regions JSONL: " + path);
    for (std::size_t i = 0; i < regions.size(); ++i) {
        nlohmann::ordered_json j;
        j["id"] = regions[i].id;
        j["area"] = regions[i].area();
        j["bounding_box"] = {regions[i].bbox.min_row, regions[i].bbox.max_row,
                             regions[i].bbox.min_col, regions[i].bbox.max_col};
        auto& pts = j["boundary"] = nlohmann::ordered_json::array();
        for (const auto& p : contours[i].boundary) pts.push_back({p.row, p.col});
        out << j.dump() << '\n';
    }
    if (!out) throw io_error("failed writing regions JSONL: " + path);
}

}  // namespace gmtd
