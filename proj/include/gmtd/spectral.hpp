#pragma once

// Minimum-variance angle-Doppler map and threshold denoising.
//
// Map layout: values(row, col) = P(doppler_axis[row], angle_axis[col]) with
// both axes strictly increasing (row 0 = most negative Doppler). The axes are
// uniform and half-open: theta in [-0.5, 0.5) cycles/element, Doppler in
// [-prf/2, prf/2) Hz, so each frequency appears exactly once (the +0.5 edge
// aliases the -0.5 edge).

#include <string>

#include <Eigen/Dense>

#include "gmtd/config.hpp"

namespace gmtd {

struct MapGrid {
    int n_angle = 64;
    int n_doppler = 64;
    int num_elements = 18;
    int num_pulses = 18;
    double prf_hz = 300.0;
};

MapGrid map_grid(const RadarScenarioConfig& cfg);

struct AngleDopplerMap {
    Eigen::MatrixXd values;       // n_doppler x n_angle, nonnegative power
    Eigen::VectorXd angle_axis;   // cycles/element, strictly increasing
    Eigen::VectorXd doppler_axis; // Hz, strictly increasing
};

struct DenoisedMap {
    AngleDopplerMap map;      // sub-threshold pixels zeroed
    double threshold = 0.0;   // linear power
    int support_count = 0;    // surviving (nonzero) pixels
};

// P(theta, omega) = 1 / (v^H (K + delta*I)^{-1} v). The inverse is computed
// once and reused for the whole grid; diagonal loading
// delta = 1e-6 * trace(K)/NM is applied only if the estimated condition
// number exceeds 1e12. Throws numerical_error if K stays non-invertible.
AngleDopplerMap mv_spectrum(const Eigen::MatrixXcd& K, const MapGrid& grid);

// Threshold T = mean(B) + k_sigma * std(B) where B is the lowest 50% of the
// pixel values (population std). Pixels survive only if strictly above T.
DenoisedMap denoise(const AngleDopplerMap& map, double k_sigma);

// CSV export: header row = angle axis, first column = Doppler axis, rows in
// increasing Doppler. Values use shortest round-trip formatting.
void write_map_csv(const AngleDopplerMap& map, const std::string& path);

// 16-bit binary PGM (P5, big-endian), min-max scaled:
// pixel = round(65535*(v-min)/(max-min)), all zeros when max == min.
// Row 0 of the image is the highest Doppler.
void write_map_pgm16(const AngleDopplerMap& map, const std::string& path);

}  // namespace gmtd
