#include "gmtd/classifier.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gmtd {

namespace {

// Adds diagonal regularization when the covariance is near-singular:
// epsilon = 1e-6 * trace / 2 when the smallest eigenvalue is below
// 1e-9 * trace (absolute floor for an all-zero covariance).
double regularize(Eigen::Matrix2d& C) {
    const double tr = C.trace();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(C);
    if (es.eigenvalues().minCoeff() >= 1e-9 * tr && tr > 0.0) return 0.0;
    const double eps = tr > 0.0 ? 1e-6 * tr / 2.0 : 1e-12;
    C += eps * Eigen::Matrix2d::Identity();
    return eps;
}

void check_positive_definite(const Eigen::Matrix2d& C, const char* name) {
    if (std::abs(C(0, 1) - C(1, 0)) > 1e-12 * std::max(1.0, C.cwiseAbs().maxCoeff()))
        throw validation_error(std::string("model: ") + name + " is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(C);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw validation_error(std::string("model: ") + name + " is not positive definite");
}

double mahalanobis(const Eigen::Vector2d& f, const Eigen::Vector2d& m, const Eigen::Matrix2d& C) {
    const Eigen::Vector2d d = f - m;
    const double q = d.dot(C.llt().solve(d));
    return std::sqrt(std::max(q, 0.0));
}

}  // namespace

ClassifierModel fit(const std::vector<LabeledFeature>& dataset, bool pooled) {
    int n0 = 0;
    int n1 = 0;
    Eigen::Vector2d s0 = Eigen::Vector2d::Zero();
    Eigen::Vector2d s1 = Eigen::Vector2d::Zero();
    for (const auto& row : dataset) {
        if (!std::isfinite(row.f.cr) || !std::isfinite(row.f.eb))
            throw validation_error("fit: non-finite feature value in dataset");
        const Eigen::Vector2d x(row.f.cr, row.f.eb);
        if (row.label == 1) {
            s1 += x;
            ++n1;
        } else {
            s0 += x;
            ++n0;
        }
    }
    if (n0 < 2 || n1 < 2)
        throw validation_error("fit: need at least 2 samples per class (clutter=" +
                               std::to_string(n0) + ", target=" + std::to_string(n1) + ")");

    ClassifierModel model;
    model.count0 = n0;
    model.count1 = n1;
    model.pooled = pooled;
    model.m0 = s0 / n0;
    model.m1 = s1 / n1;

    Eigen::Matrix2d q0 = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d q1 = Eigen::Matrix2d::Zero();
    for (const auto& row : dataset) {
        const Eigen::Vector2d x(row.f.cr, row.f.eb);
        if (row.label == 1) {
            const Eigen::Vector2d d = x - model.m1;
            q1 += d * d.transpose();
        } else {
            const Eigen::Vector2d d = x - model.m0;
            q0 += d * d.transpose();
        }
    }
    model.C0 = q0 / (n0 - 1);  // unbiased sample covariance
    model.C1 = q1 / (n1 - 1);
    if (pooled) {
        const Eigen::Matrix2d Cp = (q0 + q1) / (n0 + n1 - 2);
        model.C0 = Cp;
        model.C1 = Cp;
    }
    model.epsilon0 = regularize(model.C0);
    model.epsilon1 = regularize(model.C1);
    return model;
}

Decision classify(const FeatureVector& f, const ClassifierModel& model) {
    if (!std::isfinite(f.cr) || !std::isfinite(f.eb))
        throw validation_error("classify: non-finite feature value");
    const Eigen::Vector2d x(f.cr, f.eb);
    Decision d;
    d.d0 = mahalanobis(x, model.m0, model.C0);
    d.d1 = mahalanobis(x, model.m1, model.C1);
    d.label = (d.d1 > d.d0) ? 0 : 1;  // ties go to target
    return d;
}

void save_model(const ClassifierModel& model, const std::string& path) {
    nlohmann::ordered_json j;
    j["m0"] = {model.m0[0], model.m0[1]};
    j["m1"] = {model.m1[0], model.m1[1]};
    j["C0"] = {{model.C0(0, 0), model.C0(0, 1)}, {model.C0(1, 0), model.C0(1, 1)}};
    j["C1"] = {{model.C1(0, 0), model.C1(0, 1)}, {model.C1(1, 0), model.C1(1, 1)}};
    j["epsilon"] = {model.epsilon0, model.epsilon1};
    j["training_counts"] = {model.count0, model.count1};
    j["pooled"] = model.pooled;
    j["config_digest"] = model.config_digest;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write model file: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw io_error("failed writing model file: " + path);
}

ClassifierModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open model file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    ClassifierModel model;
    try {
        const auto j = nlohmann::json::parse(ss.str());
        model.m0 = Eigen::Vector2d(j.at("m0").at(0).get<double>(), j.at("m0").at(1).get<double>());
        model.m1 = Eigen::Vector2d(j.at("m1").at(0).get<double>(), j.at("m1").at(1).get<double>());
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                model.C0(r, c) = j.at("C0").at(r).at(c).get<double>();
                model.C1(r, c) = j.at("C1").at(r).at(c).get<double>();
            }
        model.epsilon0 = j.at("epsilon").at(0).get<double>();
        model.epsilon1 = j.at("epsilon").at(1).get<double>();
        model.count0 = j.at("training_counts").at(0).get<int>();
        model.count1 = j.at("training_counts").at(1).get<int>();
        model.pooled = j.at("pooled").get<bool>();
        model.config_digest = j.at("config_digest").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("model: invalid JSON (" + path + "): " + e.what());
    }
    if (model.count0 < 2 || model.count1 < 2)
        throw validation_error("model: training_counts must be >= 2 per class");
    check_positive_definite(model.C0, "C0");
    check_positive_definite(model.C1, "C1");
    if (!model.m0.allFinite() || !model.m1.allFinite())
        throw validation_error("model: non-finite mean vector");
    return model;
}

}  // namespace gmtd
