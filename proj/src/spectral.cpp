#include "gmtd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include "gmtd/format.hpp"

namespace gmtd {

MapGrid map_grid(const RadarScenarioConfig& cfg) {
    MapGrid g;
    g.n_angle = cfg.grid.n_angle;
    g.n_doppler = cfg.grid.n_doppler;
    g.num_elements = cfg.num_elements;
    g.num_pulses = cfg.num_pulses;
    g.prf_hz = cfg.prf_hz;
    return g;
}

namespace {

// Largest/smallest eigenvalue estimates via (inverse) power iteration; used
// only to decide whether diagonal loading is needed.
double estimate_condition(const Eigen::MatrixXcd& K, const Eigen::LLT<Eigen::MatrixXcd>& llt) {
    const Eigen::Index n = K.rows();
    Eigen::VectorXcd x = Eigen::VectorXcd::Ones(n) / std::sqrt(static_cast<double>(n));
    double lmax = 0.0;
    for (int it = 0; it < 20; ++it) {
        x = K * x;
        lmax = x.norm();
        if (lmax <= 0.0) return std::numeric_limits<double>::infinity();
        x /= lmax;
    }
    Eigen::VectorXcd y = Eigen::VectorXcd::Ones(n) / std::sqrt(static_cast<double>(n));
    double mu = 0.0;  // largest eigenvalue of K^{-1}
    for (int it = 0; it < 20; ++it) {
        y = llt.solve(y);
        mu = y.norm();
        if (mu <= 0.0) return std::numeric_limits<double>::infinity();
        y /= mu;
    }
    return lmax * mu;
}

}  // namespace

AngleDopplerMap mv_spectrum(const Eigen::MatrixXcd& K, const MapGrid& grid) {
    const int N = grid.num_elements;
    const int M = grid.num_pulses;
    const int NM = N * M;
    if (K.rows() != K.cols() || K.rows() != NM)
        throw validation_error("mv_spectrum: covariance dimension does not match the grid's N*M");
    if (grid.n_angle < 1 || grid.n_doppler < 1 || grid.prf_hz <= 0)
        throw validation_error("mv_spectrum: invalid grid");

    Eigen::LLT<Eigen::MatrixXcd> llt(K);
    bool loaded = false;
    Eigen::MatrixXcd Kl;
    if (llt.info() != Eigen::Success || estimate_condition(K, llt) > 1e12) {
        const double delta = 1e-6 * K.trace().real() / NM;
        Kl = K + delta * Eigen::MatrixXcd::Identity(NM, NM);
        llt.compute(Kl);
        loaded = true;
        if (llt.info() != Eigen::Success)
            throw numerical_error("mv_spectrum: covariance singular even after diagonal loading");
    }
    (void)loaded;
    const Eigen::MatrixXcd A = llt.solve(Eigen::MatrixXcd::Identity(NM, NM));

    AngleDopplerMap out;
    out.angle_axis.resize(grid.n_angle);
    for (int c = 0; c < grid.n_angle; ++c)
        out.angle_axis[c] = -0.5 + static_cast<double>(c) / grid.n_angle;
    out.doppler_axis.resize(grid.n_doppler);
    for (int r = 0; r < grid.n_doppler; ++r)
        out.doppler_axis[r] = (-0.5 + static_cast<double>(r) / grid.n_doppler) * grid.prf_hz;

    // Spatial/temporal phase tables.
    Eigen::MatrixXcd asteer(N, grid.n_angle);
    for (int c = 0; c < grid.n_angle; ++c)
        for (int n = 0; n < N; ++n)
            asteer(n, c) = std::polar(1.0, 2.0 * kPi * n * out.angle_axis[c]);
    Eigen::MatrixXcd bsteer(M, grid.n_doppler);
    for (int r = 0; r < grid.n_doppler; ++r) {
        const double omega = -0.5 + static_cast<double>(r) / grid.n_doppler;
        for (int m = 0; m < M; ++m) bsteer(m, r) = std::polar(1.0, 2.0 * kPi * m * omega);
    }

    // For each angle column, reduce A over the element dimension once:
    // C(m,p) = a^H A_{mp} a with A_{mp} the (m,p) N x N pulse block; then the
    // whole Doppler column is b^H C b over the temporal table.
    out.values.resize(grid.n_doppler, grid.n_angle);
    Eigen::MatrixXcd T1(NM, M);
    Eigen::MatrixXcd C(M, M);
    for (int c = 0; c < grid.n_angle; ++c) {
        const Eigen::VectorXcd a = asteer.col(c);
        for (int p = 0; p < M; ++p)
            T1.col(p).noalias() = A.middleCols(static_cast<Eigen::Index>(p) * N, N) * a;
        for (int m = 0; m < M; ++m)
            C.row(m).noalias() = a.adjoint() * T1.middleRows(static_cast<Eigen::Index>(m) * N, N);
        const Eigen::MatrixXcd G = C * bsteer;
        const Eigen::VectorXd qf =
            bsteer.conjugate().cwiseProduct(G).colwise().sum().real().transpose();
        for (int r = 0; r < grid.n_doppler; ++r) {
            const double q = qf[r];
            if (!(q > 0.0))
                throw numerical_error("mv_spectrum: non-positive quadratic form (K not PD)");
            out.values(r, c) = 1.0 / q;
        }
    }
    return out;
}

DenoisedMap denoise(const AngleDopplerMap& map, double k_sigma) {
    if (!(k_sigma > 0.0)) throw validation_error("denoise: k_sigma must be > 0");
    const Eigen::Index total = map.values.size();
    if (total <= 0) throw validation_error("denoise: empty map");

    std::vector<double> v(map.values.data(), map.values.data() + total);
    std::sort(v.begin(), v.end());
    const std::size_t nb = (v.size() + 1) / 2;  // lowest 50% of values
    double mean = 0.0;
    for (std::size_t i = 0; i < nb; ++i) mean += v[i];
    mean /= static_cast<double>(nb);
    double var = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
        const double d = v[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(nb);
    const double threshold = mean + k_sigma * std::sqrt(var);

    DenoisedMap out;
    out.map.angle_axis = map.angle_axis;
    out.map.doppler_axis = map.doppler_axis;
    out.map.values = map.values;
    out.threshold = threshold;
    out.support_count = 0;
    for (Eigen::Index i = 0; i < total; ++i) {
        double& x = out.map.values.data()[i];
        if (x > threshold)
            ++out.support_count;
        else
            x = 0.0;
    }
    return out;
}

void write_map_csv(const AngleDopplerMap& map, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write map CSV: " + path);
    out << "doppler_hz";
    for (Eigen::Index c = 0; c < map.angle_axis.size(); ++c)
        out << ',' << double_to_string(map.angle_axis[c]);
    out << '\n';
    for (Eigen::Index r = 0; r < map.values.rows(); ++r) {
        out << double_to_string(map.doppler_axis[r]);
        for (Eigen::Index c = 0; c < map.values.cols(); ++c)
            out << ',' << double_to_string(map.values(r, c));
        out << '\n';
    }
    if (!out) throw io_error("failed writing map CSV: " + path);
}

void write_map_pgm16(const AngleDopplerMap& map, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write PGM: " + path);
    const Eigen::Index rows = map.values.rows();
    const Eigen::Index cols = map.values.cols();
    const double lo = map.values.minCoeff();
    const double hi = map.values.maxCoeff();
    out << "P5\n" << cols << ' ' << rows << "\n65535\n";
    // Row 0 of the image = highest Doppler.
    for (Eigen::Index r = rows - 1; r >= 0; --r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            unsigned int pix = 0;
            if (hi > lo) {
                const double s = 65535.0 * (map.values(r, c) - lo) / (hi - lo);
                pix = static_cast<unsigned int>(std::lround(std::clamp(s, 0.0, 65535.0)));
            }
            const unsigned char bytes[2] = {static_cast<unsigned char>((pix >> 8) & 0xff),
                                            static_cast<unsigned char>(pix & 0xff)};
            out.write(reinterpret_cast<const char*>(bytes), 2);
        }
    }
    if (!out) throw io_error("failed writing PGM: " + path);
}

}  // namespace gmtd
