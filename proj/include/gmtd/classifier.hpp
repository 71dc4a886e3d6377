#pragma once

// Two-class Mahalanobis classifier over (CR, E_B) feature vectors.
//
// Class 0 is clutter, class 1 is target. d_s = sqrt((f-m_s)^T C_s^{-1}
// (f-m_s)); the region is clutter if d1 > d0, otherwise target (ties go to
// target).

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmtd/features.hpp"

namespace gmtd {

struct LabeledFeature {
    FeatureVector f;
    int label = 0;  // 0 clutter, 1 target
};

struct ClassifierModel {
    Eigen::Vector2d m0 = Eigen::Vector2d::Zero();
    Eigen::Vector2d m1 = Eigen::Vector2d::Zero();
    Eigen::Matrix2d C0 = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d C1 = Eigen::Matrix2d::Identity();
    double epsilon0 = 0.0;  // diagonal regularization actually applied
    double epsilon1 = 0.0;
    int count0 = 0;  // training samples per class
    int count1 = 0;
    bool pooled = false;
    std::string config_digest;
};

struct Decision {
    int label = 0;  // 0 clutter, 1 target
    double d0 = 0.0;
    double d1 = 0.0;
};

// Class means and unbiased (n-1) covariances; a covariance whose smallest
// eigenvalue is below 1e-9 * trace gets epsilon = 1e-6 * trace / 2 added to
// its diagonal. pooled uses the within-class pooled covariance for both
// classes. Throws validation_error with fewer than 2 samples in a class.
ClassifierModel fit(const std::vector<LabeledFeature>& dataset, bool pooled = false);

// Throws validation_error on non-finite features.
Decision classify(const FeatureVector& f, const ClassifierModel& model);

// JSON persistence; load re-validates the model invariants (symmetry,
// positive-definite covariances, counts >= 2).
void save_model(const ClassifierModel& model, const std::string& path);
ClassifierModel load_model(const std::string& path);

}  // namespace gmtd
