#pragma once

// Scene model: space-time steering vectors, the crabbed clutter ridge, and
// the hypothesis-dependent space-time covariance matrix, plus Gaussian
// snapshot synthesis.
//
// Conventions: a uniform linear array of N elements and M coherent pulses;
// steering vectors are length NM in temporal-major order (pulse m, element n
// at index m*N + n). Spatial frequency is in cycles/element, normalized
// Doppler in cycles/pulse.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gmtd/config.hpp"

namespace gmtd {

struct SteeringVector {
    Eigen::VectorXcd entries;  // length N*M
    double spatial_freq = 0.0;       // cycles/element
    double normalized_doppler = 0.0; // cycles/pulse
};

struct ClutterPatch {
    double azimuth_rad = 0.0;   // in [0, 2*pi)
    double spatial_freq = 0.0;  // cycles/element
    double doppler_hz = 0.0;
    double power = 0.0;         // linear
};

struct SpaceTimeCovariance {
    Eigen::MatrixXcd K;    // K_c + K_n + K_t
    Eigen::MatrixXcd K_c;  // clutter
    Eigen::MatrixXcd K_n;  // noise (noise_power * I)
    Eigen::MatrixXcd K_t;  // target; zero matrix under H0
    Hypothesis hypothesis = Hypothesis::H0;
};

// entry(m*N + n) = exp(i*2*pi*(m*omega + n*theta)).
SteeringVector steering_vector(double theta, double omega, int N, int M);

// Clutter patches along the ridge theta = (d/lambda)*cos(az),
// f = (2v/lambda)*cos(az - chi). Patch powers: backlobe attenuation for
// cos(az) < 0, cosine-squared edge taper over the configured roll-off, an
// optional per-patch exponential amplitude draw (seeded from cfg.rng_seed),
// then a global scale so the total equals CNR_linear * noise_power.
std::vector<ClutterPatch> clutter_ridge(const RadarScenarioConfig& cfg);

// K = K_c + K_n (+ K_t under H1) assembled from clutter_ridge patches.
SpaceTimeCovariance covariance(const RadarScenarioConfig& cfg, Hypothesis hyp);

// L i.i.d. circular complex Gaussian snapshots with covariance K, one per
// column. Throws numerical_error if K is not PSD within tolerance.
Eigen::MatrixXcd sample_snapshots(const Eigen::MatrixXcd& K, int L, std::uint64_t seed);

// Covariance fed to the detector: the exact model matrix, or its estimate
// from cfg.num_snapshots sampled snapshots (covariance_mode == Sample).
Eigen::MatrixXcd effective_covariance(const RadarScenarioConfig& cfg, Hypothesis hyp);

// Count of eigenvalues above rel_threshold * lambda_max (used for clutter
// rank checks).
int significant_eigenvalue_count(const Eigen::MatrixXcd& A, double rel_threshold = 1e-6);

}  // namespace gmtd
