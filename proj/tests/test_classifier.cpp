#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "gmtd/classifier.hpp"

using namespace gmtd;

namespace {

LabeledFeature lf(double cr, double eb, int label) { return {{cr, eb}, label}; }

// Two well-separated, nondegenerate classes.
std::vector<LabeledFeature> toy_dataset() {
    return {
        lf(0.10, 0.20, 0), lf(0.18, 0.26, 0), lf(0.14, 0.20, 0), lf(0.14, 0.26, 0),
        lf(0.95, 1.70, 1), lf(1.05, 1.80, 1), lf(1.00, 1.70, 1), lf(1.00, 1.80, 1),
    };
}

ClassifierModel hand_model() {
    ClassifierModel m;
    m.m0 << 0.14, 0.23;
    m.m1 << 1.0, 1.75;
    m.C0.setIdentity();
    m.C1.setIdentity();
    m.count0 = 2;
    m.count1 = 2;
    return m;
}

}  // namespace

TEST_CASE("fit computes per-class means and unbiased covariances") {
    // Class 0: {(0,0),(2,2)} -> mean (1,1), var 2 on each axis, cov 2.
    std::vector<LabeledFeature> data{lf(0.0, 0.0, 0), lf(2.0, 2.0, 0),
                                     lf(10.0, 0.0, 1), lf(12.0, 4.0, 1)};
    const auto model = fit(data);
    CHECK(model.m0(0) == doctest::Approx(1.0));
    CHECK(model.m0(1) == doctest::Approx(1.0));
    CHECK(model.m1(0) == doctest::Approx(11.0));
    CHECK(model.m1(1) == doctest::Approx(2.0));
    // Unbiased covariance of {(0,0),(2,2)}: [[2,2],[2,2]] + epsilon on diagonal.
    CHECK(model.C0(0, 1) == doctest::Approx(2.0));
    CHECK(model.C0(1, 0) == doctest::Approx(2.0));
    CHECK(model.C0(0, 0) == doctest::Approx(2.0 + model.epsilon0));
    // Perfectly correlated points -> singular -> regularization must kick in.
    CHECK(model.epsilon0 > 0.0);
    CHECK(model.epsilon0 == doctest::Approx(1e-6 * 4.0 / 2.0));
    CHECK(model.count0 == 2);
    CHECK(model.count1 == 2);
}

TEST_CASE("a class of identical points still yields a positive-definite covariance") {
    std::vector<LabeledFeature> data{lf(0.5, 0.5, 0), lf(0.5, 0.5, 0),
                                     lf(2.0, 1.0, 1), lf(3.0, 2.0, 1)};
    const auto model = fit(data);
    CHECK(model.epsilon0 > 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(model.C0);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    // Classification near the degenerate mean must not blow up.
    const auto d = classify({0.5, 0.5}, model);
    CHECK(d.label == 0);
    CHECK(std::isfinite(d.d0));
    CHECK(std::isfinite(d.d1));
}

TEST_CASE("classify picks the nearer class mean and ties go to target") {
    const auto model = fit(toy_dataset());
    CHECK(classify({0.14, 0.23}, model).label == 0);
    CHECK(classify({1.0, 1.75}, model).label == 1);

    // Symmetric model: equidistant point must resolve to target.
    ClassifierModel sym;
    sym.m0 << -1.0, 0.0;
    sym.m1 << 1.0, 0.0;
    sym.C0.setIdentity();
    sym.C1.setIdentity();
    sym.count0 = sym.count1 = 2;
    const auto d = classify({0.0, 0.0}, sym);
    CHECK(d.d0 == doctest::Approx(d.d1));
    CHECK(d.label == 1);
}

TEST_CASE("hand-computed Mahalanobis distances with identity covariances") {
    const auto model = hand_model();
    const auto d = classify({0.9, 1.6}, model);
    CHECK(d.d1 == doctest::Approx(std::sqrt(0.0325)).epsilon(1e-9));
    CHECK(d.d0 == doctest::Approx(std::sqrt(2.4545)).epsilon(1e-9));
    CHECK(d.label == 1);
}

TEST_CASE("Mahalanobis distance accounts for covariance shape") {
    ClassifierModel m;
    m.m0 << 0.0, 0.0;
    m.m1 << 10.0, 0.0;
    m.C0 << 100.0, 0.0, 0.0, 0.01;  // wide in x, narrow in y
    m.C1.setIdentity();
    m.count0 = m.count1 = 2;
    // (3, 0): d0 = 3/10 = 0.3, d1 = 7 -> clutter.
    const auto a = classify({3.0, 0.0}, m);
    CHECK(a.d0 == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(a.label == 0);
    // (0, 0.5): d0 = 0.5/0.1 = 5, still well under d1 = sqrt(100.25).
    const auto b = classify({0.0, 0.5}, m);
    CHECK(b.d0 == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(b.label == 0);
}

TEST_CASE("labels are invariant under a common affine rescaling of features") {
    const auto raw = toy_dataset();
    const auto model_raw = fit(raw);
    std::vector<LabeledFeature> scaled;
    for (const auto& s : raw) scaled.push_back(lf(3.0 * s.f.cr - 1.0, 0.5 * s.f.eb + 2.0, s.label));
    const auto model_scaled = fit(scaled);
    for (const auto& s : raw) {
        const auto a = classify(s.f, model_raw);
        const auto b = classify({3.0 * s.f.cr - 1.0, 0.5 * s.f.eb + 2.0}, model_scaled);
        CHECK(a.label == b.label);
        CHECK(a.d0 == doctest::Approx(b.d0).epsilon(1e-6));
        CHECK(a.d1 == doctest::Approx(b.d1).epsilon(1e-6));
    }
}

TEST_CASE("pooled mode uses one shared covariance for both classes") {
    const auto pooled = fit(toy_dataset(), true);
    CHECK(pooled.pooled);
    CHECK((pooled.C0 - pooled.C1).cwiseAbs().maxCoeff() == 0.0);
    // Separation is preserved.
    CHECK(classify({0.14, 0.23}, pooled).label == 0);
    CHECK(classify({1.0, 1.75}, pooled).label == 1);
}

TEST_CASE("fit rejects undersized or non-finite datasets") {
    std::vector<LabeledFeature> one_side{lf(0.1, 0.2, 0), lf(0.2, 0.3, 0), lf(1.0, 1.7, 1)};
    CHECK_THROWS_AS(fit(one_side), validation_error);

    std::vector<LabeledFeature> empty;
    CHECK_THROWS_AS(fit(empty), validation_error);

    auto bad = toy_dataset();
    bad[0].f.cr = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(fit(bad), validation_error);
}

TEST_CASE("classify rejects non-finite features") {
    const auto model = fit(toy_dataset());
    CHECK_THROWS_AS(classify({std::numeric_limits<double>::infinity(), 0.0}, model),
                    validation_error);
}

TEST_CASE("model JSON round-trips exactly and validates on load") {
    auto model = fit(toy_dataset());
    model.config_digest = "0x0123456789abcdef";
    const auto path = std::filesystem::temp_directory_path() / "gmtd_model_test.json";
    save_model(model, path.string());
    const auto back = load_model(path.string());
    CHECK(back.m0 == model.m0);
    CHECK(back.m1 == model.m1);
    CHECK(back.C0 == model.C0);
    CHECK(back.C1 == model.C1);
    CHECK(back.epsilon0 == model.epsilon0);
    CHECK(back.epsilon1 == model.epsilon1);
    CHECK(back.count0 == model.count0);
    CHECK(back.count1 == model.count1);
    CHECK(back.pooled == model.pooled);
    CHECK(back.config_digest == model.config_digest);

    // Saving the loaded model again must produce identical bytes.
    const auto path2 = std::filesystem::temp_directory_path() / "gmtd_model_test2.json";
    save_model(back, path2.string());
    std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    std::filesystem::remove(path);
    std::filesystem::remove(path2);
}

TEST_CASE("loading a missing or malformed model fails loudly") {
    CHECK_THROWS_AS(load_model("/nonexistent/path/model.json"), io_error);

    const auto path = std::filesystem::temp_directory_path() / "gmtd_bad_model.json";
    {
        std::ofstream out(path);
        out << "{\"m0\": [0.1, 0.2]}";
    }
    CHECK_THROWS_AS(load_model(path.string()), validation_error);

    {
        std::ofstream out(path);
        out << "not json at all";
    }
    CHECK_THROWS_AS(load_model(path.string()), validation_error);
    std::filesystem::remove(path);
}
