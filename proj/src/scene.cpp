#include "gmtd/scene.hpp"

#include <algorithm>
#include <cmath>

#include "gmtd/rng.hpp"

namespace gmtd {

SteeringVector steering_vector(double theta, double omega, int N, int M) {
    if (N < 1 || M < 1) throw validation_error("steering_vector: N and M must be >= 1");
    SteeringVector v;
    v.spatial_freq = theta;
    v.normalized_doppler = omega;
    v.entries.resize(static_cast<Eigen::Index>(N) * M);
    for (int m = 0; m < M; ++m) {
        for (int n = 0; n < N; ++n) {
            const double phase = 2.0 * kPi * (m * omega + n * theta);
            v.entries[static_cast<Eigen::Index>(m) * N + n] = std::polar(1.0, phase);
        }
    }
    return v;
}

std::vector<ClutterPatch> clutter_ridge(const RadarScenarioConfig& cfg) {
    validate(cfg);
    const int P = cfg.num_clutter_patches;
    const double lambda = cfg.wavelength_m();
    const double d = cfg.element_spacing();
    const double chi = cfg.crab_angle_rad();
    const double span_deg = cfg.azimuth_end_deg - cfg.azimuth_start_deg;
    const bool full_circle = span_deg >= 360.0 - 1e-9;

    std::vector<ClutterPatch> patches(P);
    for (int k = 0; k < P; ++k) {
        // Full circle: half-open sampling (the 360 degree point duplicates
        // 0). Sector: closed sampling so both tapered edges carry patches.
        const double az_deg = full_circle
                                  ? cfg.azimuth_start_deg + span_deg * k / P
                                  : cfg.azimuth_start_deg + span_deg * k / (P - 1);
        const double az = az_deg * kPi / 180.0;
        ClutterPatch& p = patches[k];
        p.azimuth_rad = std::fmod(az, 2.0 * kPi);
        p.spatial_freq = (d / lambda) * std::cos(az);
        p.doppler_hz = (2.0 * cfg.platform_speed_mps / lambda) * std::cos(az - chi);

        double w = 1.0;
        if (std::cos(az) < 0.0) w *= db_to_linear(-cfg.backlobe_gain_db);
        if (cfg.edge_taper_deg > 0.0) {
            const double ramp =
                std::min({1.0, (az_deg - cfg.azimuth_start_deg) / cfg.edge_taper_deg,
                          (cfg.azimuth_end_deg - az_deg) / cfg.edge_taper_deg});
            const double r = std::clamp(ramp, 0.0, 1.0);
            const double s = std::sin(0.5 * kPi * r);
            w *= s * s;
        }
        p.power = w;
    }

    if (cfg.amplitude_jitter) {
        Rng rng(derive_seed(cfg.rng_seed, stream::kClutterJitter));
        for (auto& p : patches) p.power *= rng.exponential();
    }

    double total = 0.0;
    for (const auto& p : patches) total += p.power;
    const double want = db_to_linear(cfg.cnr_db) * cfg.noise_power;
    if (total > 0.0) {
        const double scale = want / total;
        for (auto& p : patches) p.power *= scale;
    }
    return patches;
}

SpaceTimeCovariance covariance(const RadarScenarioConfig& cfg, Hypothesis hyp) {
    const int N = cfg.num_elements;
    const int M = cfg.num_pulses;
    const int NM = N * M;
    const auto patches = clutter_ridge(cfg);

    // K_c = sum_k w_k v_k v_k^H, assembled as one rank-P update.
    Eigen::MatrixXcd V(NM, static_cast<Eigen::Index>(patches.size()));
    for (std::size_t k = 0; k < patches.size(); ++k) {
        const auto& p = patches[k];
        const auto v = steering_vector(p.spatial_freq, p.doppler_hz / cfg.prf_hz, N, M);
        V.col(static_cast<Eigen::Index>(k)) = std::sqrt(p.power) * v.entries;
    }

    SpaceTimeCovariance out;
    out.hypothesis = hyp;
    out.K_c = Eigen::MatrixXcd::Zero(NM, NM);
    out.K_c.selfadjointView<Eigen::Lower>().rankUpdate(V);
    out.K_c = out.K_c.selfadjointView<Eigen::Lower>();

    out.K_n = cfg.noise_power * Eigen::MatrixXcd::Identity(NM, NM);

    out.K_t = Eigen::MatrixXcd::Zero(NM, NM);
    if (hyp == Hypothesis::H1) {
        const auto vt = steering_vector(cfg.target_spatial_freq,
                                        cfg.target_doppler_hz / cfg.prf_hz, N, M);
        const double sigma_t = db_to_linear(cfg.snr_db) * cfg.noise_power;
        out.K_t.selfadjointView<Eigen::Lower>().rankUpdate(vt.entries, sigma_t);
        out.K_t = out.K_t.selfadjointView<Eigen::Lower>();
    }

    out.K = out.K_c + out.K_n + out.K_t;
    return out;
}

Eigen::MatrixXcd sample_snapshots(const Eigen::MatrixXcd& K, int L, std::uint64_t seed) {
    if (L < 1) throw validation_error("sample_snapshots: L must be >= 1");
    if (K.rows() != K.cols()) throw validation_error("sample_snapshots: K must be square");
    const Eigen::Index NM = K.rows();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(K);
    if (es.info() != Eigen::Success)
        throw numerical_error("sample_snapshots: eigendecomposition failed");
    const Eigen::VectorXd ev = es.eigenvalues();
    const double lmax = ev.maxCoeff();
    if (ev.minCoeff() < -1e-9 * std::max(lmax, 0.0) || lmax < 0.0)
        throw numerical_error("sample_snapshots: covariance is not positive semidefinite");

    Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXcd factor = es.eigenvectors() * root.asDiagonal();

    Rng rng(seed);
    Eigen::MatrixXcd Z(NM, L);
    for (int l = 0; l < L; ++l)
        for (Eigen::Index i = 0; i < NM; ++i) Z(i, l) = rng.complex_normal();
    return factor * Z;
}

Eigen::MatrixXcd effective_covariance(const RadarScenarioConfig& cfg, Hypothesis hyp) {
    SpaceTimeCovariance cov = covariance(cfg, hyp);
    if (cfg.covariance_mode == CovarianceMode::Exact) return std::move(cov.K);

    const auto snaps =
        sample_snapshots(cov.K, cfg.num_snapshots, derive_seed(cfg.rng_seed, stream::kSnapshots));
    const int NM = cfg.space_time_dim();
    Eigen::MatrixXcd Khat = Eigen::MatrixXcd::Zero(NM, NM);
    Khat.selfadjointView<Eigen::Lower>().rankUpdate(snaps, 1.0 / cfg.num_snapshots);
    Khat = Khat.selfadjointView<Eigen::Lower>();
    return Khat;
}

int significant_eigenvalue_count(const Eigen::MatrixXcd& A, double rel_threshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw numerical_error("significant_eigenvalue_count: eigendecomposition failed");
    const Eigen::VectorXd ev = es.eigenvalues();
    const double lmax = ev.maxCoeff();
    if (lmax <= 0.0) return 0;
    const double thr = rel_threshold * lmax;
    int count = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev[i] > thr) ++count;
    return count;
}

}  // namespace gmtd
