#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mlb/error.hpp"
#include "mlb/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

using namespace mlb;

namespace {

// Tiny hand-specified net for closed-form forward checks.
MlpNet tiny_net(Activation act) {
    MlpNet net;
    net.layer_sizes = {1, 2, 1};
    net.weights = {Mat(1, 2, {1.0, -1.0}), Mat(2, 1, {2.0, 3.0})};
    net.biases = {Mat(1, 2, {0.5, 0.5}), Mat(1, 1, {0.25})};
    net.activation = act;
    return net;
}

double silu_ref(double x) { return x / (1.0 + std::exp(-x)); }

} // namespace

TEST_CASE("activation names round-trip") {
    CHECK(std::string(activation_name(Activation::Tanh)) == "tanh");
    CHECK(std::string(activation_name(Activation::Silu)) == "silu");
    CHECK(activation_from_name("tanh") == Activation::Tanh);
    CHECK(activation_from_name("silu") == Activation::Silu);
    CHECK_THROWS_AS(activation_from_name("relu"), BadShape);
}

TEST_CASE("parameter and MAC counts match the two production shapes") {
    // 2-128-128-128-2 trunk: 2*128 + 128*128 + 128*128 + 128*2 = 33280 MACs,
    // plus 128+128+128+2 = 386 biases -> 33666 parameters.
    MlpNet node_shape = init_mlp({2, 128, 128, 128, 2}, Activation::Tanh, 0);
    CHECK(param_count(node_shape) == 33666);
    CHECK(mac_count(node_shape) == 33280);
    // 1-128-128-128-2 trunk: one fewer input column.
    MlpNet pinn_shape = init_mlp({1, 128, 128, 128, 2}, Activation::Tanh, 0);
    CHECK(param_count(pinn_shape) == 33538);
    CHECK(mac_count(pinn_shape) == 33152);
}

TEST_CASE("init_mlp is seed-deterministic with Glorot bounds and zero biases") {
    std::vector<int> sizes = {2, 16, 3};
    MlpNet a = init_mlp(sizes, Activation::Tanh, 42);
    MlpNet b = init_mlp(sizes, Activation::Tanh, 42);
    MlpNet c = init_mlp(sizes, Activation::Tanh, 43);
    REQUIRE(a.weights.size() == 2);
    bool any_differs = false;
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
        double bound = std::sqrt(6.0 / (sizes[l] + sizes[l + 1]));
        for (int i = 0; i < a.weights[l].size(); ++i) {
            CHECK(a.weights[l][i] == b.weights[l][i]); // bitwise
            CHECK(std::abs(a.weights[l][i]) <= bound);
            if (a.weights[l][i] != c.weights[l][i])
                any_differs = true;
        }
        for (int i = 0; i < a.biases[l].size(); ++i)
            CHECK(a.biases[l][i] == 0.0);
    }
    CHECK(any_differs);
    CHECK(a.seed == 42);
    CHECK_THROWS_AS(init_mlp({5}, Activation::Tanh, 0), BadShape);
    CHECK_THROWS_AS(init_mlp({5, 0, 2}, Activation::Tanh, 0), BadShape);
}

TEST_CASE("init_mlp_fan_in draws nonzero biases within the fan-in bound") {
    std::vector<int> sizes = {2, 32, 2};
    MlpNet net = init_mlp_fan_in(sizes, Activation::Tanh, 7);
    bool any_bias_nonzero = false;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        double bound = 1.0 / std::sqrt(static_cast<double>(sizes[l]));
        for (int i = 0; i < net.weights[l].size(); ++i)
            CHECK(std::abs(net.weights[l][i]) <= bound);
        for (int i = 0; i < net.biases[l].size(); ++i) {
            CHECK(std::abs(net.biases[l][i]) <= bound);
            if (net.biases[l][i] != 0.0)
                any_bias_nonzero = true;
        }
    }
    CHECK(any_bias_nonzero);
    // Deterministic under the same seed.
    MlpNet again = init_mlp_fan_in(sizes, Activation::Tanh, 7);
    CHECK(again.weights[0][0] == net.weights[0][0]);
    CHECK(again.biases[0][0] == net.biases[0][0]);
}

TEST_CASE("init_mlp_for_regression spreads first-layer transitions over the window") {
    const double t_lo = 0.0, t_hi = 300.0, sweep = 6.0;
    MlpNet net = init_mlp_for_regression({1, 64, 64, 2}, Activation::Tanh, 3,
                                         t_lo, t_hi, {-25.0, 0.4}, sweep);
    const Mat& w1 = net.weights.front();
    const Mat& b1 = net.biases.front();
    for (int j = 0; j < w1.cols(); ++j) {
        CHECK(std::abs(w1(0, j)) <= sweep / (t_hi - t_lo));
        // Transition center -b/w lies inside the window.
        if (w1(0, j) != 0.0) {
            double center = -b1(0, j) / w1(0, j);
            CHECK(center >= t_lo - 1e-9);
            CHECK(center <= t_hi + 1e-9);
        }
    }
    // Output bias starts at the requested target means.
    CHECK(net.biases.back()(0, 0) == -25.0);
    CHECK(net.biases.back()(0, 1) == 0.4);
    CHECK_THROWS_AS(init_mlp_for_regression({1, 8, 2}, Activation::Tanh, 0,
                                            5.0, 5.0, {0.0, 0.0}),
                    BadShape);
    CHECK_THROWS_AS(init_mlp_for_regression({1, 8, 2}, Activation::Tanh, 0,
                                            0.0, 1.0, {0.0}),
                    BadShape);
}

TEST_CASE("forward matches the closed-form value of a tiny net") {
    MlpNet net = tiny_net(Activation::Tanh);
    Mat x(2, 1, {0.3, -0.8});
    Mat y = forward(net, x);
    REQUIRE(y.rows() == 2);
    REQUIRE(y.cols() == 1);
    auto expect = [](double t) {
        return 2.0 * std::tanh(t + 0.5) + 3.0 * std::tanh(-t + 0.5) + 0.25;
    };
    CHECK(y(0, 0) == doctest::Approx(expect(0.3)).epsilon(1e-15));
    CHECK(y(1, 0) == doctest::Approx(expect(-0.8)).epsilon(1e-15));

    MlpNet snet = tiny_net(Activation::Silu);
    Mat ys = forward(snet, x);
    auto expect_s = [](double t) {
        return 2.0 * silu_ref(t + 0.5) + 3.0 * silu_ref(-t + 0.5) + 0.25;
    };
    CHECK(ys(0, 0) == doctest::Approx(expect_s(0.3)).epsilon(1e-15));

    CHECK_THROWS_AS(forward(net, Mat(1, 2, {0.0, 0.0})), ShapeMismatch);
}

TEST_CASE("tape_forward reproduces forward bitwise") {
    // The neural-ODE replay depends on the tape arithmetic matching the
    // plain forward pass exactly, not just to rounding.
    for (Activation act : {Activation::Tanh, Activation::Silu}) {
        MlpNet net = init_mlp({2, 32, 32, 2}, act, 5);
        Mat x(3, 2, {0.1, -0.2, 0.7, 0.4, -1.3, 0.9});
        Mat direct = forward(net, x);
        ad::Tape tape;
        TapeNet tn = register_params(net, tape);
        ad::Var out = tape_forward(tn, tape.constant(x));
        const Mat& taped = tape.value(out);
        REQUIRE(taped.rows() == direct.rows());
        REQUIRE(taped.cols() == direct.cols());
        for (int i = 0; i < direct.size(); ++i)
            CHECK(taped[i] == direct[i]); // bitwise
    }
}

TEST_CASE("lsq_output_head fits the head and leaves the trunk alone") {
    MlpNet net = init_mlp({1, 16, 2}, Activation::Tanh, 9);
    const Mat w1_before = net.weights[0];
    const int n = 40;
    Mat t(n, 1);
    Mat target(n, 2);
    for (int i = 0; i < n; ++i) {
        double ti = i / double(n - 1);
        t(i, 0) = ti;
        target(i, 0) = std::sin(3.0 * ti);
        target(i, 1) = ti * ti;
    }
    auto mse = [&](const MlpNet& m) {
        Mat y = forward(m, t);
        double acc = 0.0;
        for (int i = 0; i < y.size(); ++i) {
            double d = y[i] - target[i];
            acc += d * d;
        }
        return acc / y.size();
    };
    double before = mse(net);
    lsq_output_head(net, t, target);
    double after = mse(net);
    CHECK(after < before);
    // Trunk untouched.
    for (int i = 0; i < w1_before.size(); ++i)
        CHECK(net.weights[0][i] == w1_before[i]);
    // Heavier ridge damping gives a smaller-norm head.
    MlpNet light = init_mlp({1, 16, 2}, Activation::Tanh, 9);
    MlpNet heavy = init_mlp({1, 16, 2}, Activation::Tanh, 9);
    lsq_output_head(light, t, target, 0.1);
    lsq_output_head(heavy, t, target, 10.0);
    double norm_light = 0.0, norm_heavy = 0.0;
    for (int i = 0; i < light.weights.back().size(); ++i) {
        norm_light += light.weights.back()[i] * light.weights.back()[i];
        norm_heavy += heavy.weights.back()[i] * heavy.weights.back()[i];
    }
    CHECK(norm_heavy < norm_light);

    CHECK_THROWS_AS(lsq_output_head(net, Mat(3, 1), Mat(4, 2)), ShapeMismatch);
    CHECK_THROWS_AS(lsq_output_head(net, t, Mat(n, 3)), ShapeMismatch);
}

TEST_CASE("adam first step moves each parameter by ~lr in the gradient direction") {
    MlpNet net;
    net.layer_sizes = {1, 1};
    net.weights = {Mat(1, 1, {0.5})};
    net.biases = {Mat(1, 1, {0.1})};
    AdamState adam = make_adam(net, 1e-3);
    CHECK(adam.t == 0);
    std::vector<Mat> gw = {Mat(1, 1, {0.2})};
    std::vector<Mat> gb = {Mat(1, 1, {-0.3})};
    adam_step(adam, net, gw, gb);
    CHECK(adam.t == 1);
    // Bias correction makes the first update lr * g/(|g| + eps).
    double expect_w = 0.5 - 1e-3 * (0.2 / (0.2 + 1e-8));
    double expect_b = 0.1 + 1e-3 * (0.3 / (0.3 + 1e-8));
    CHECK(net.weights[0][0] == doctest::Approx(expect_w).epsilon(1e-14));
    CHECK(net.biases[0][0] == doctest::Approx(expect_b).epsilon(1e-14));
    // Gradient shape mismatches are rejected.
    std::vector<Mat> bad = {Mat(2, 1)};
    CHECK_THROWS_AS(adam_step(adam, net, bad, gb), ShapeMismatch);
}

TEST_CASE("adam integrates a quadratic toward its minimum") {
    // Minimize (w - 2)^2: gradient 2(w - 2).  400 steps at lr 0.05 must get
    // close to the optimum and stay there.
    MlpNet net;
    net.layer_sizes = {1, 1};
    net.weights = {Mat(1, 1, {-1.0})};
    net.biases = {Mat(1, 1, {0.0})};
    AdamState adam = make_adam(net, 0.05);
    for (int i = 0; i < 400; ++i) {
        std::vector<Mat> gw = {Mat(1, 1, {2.0 * (net.weights[0][0] - 2.0)})};
        std::vector<Mat> gb = {Mat(1, 1, {0.0})};
        adam_step(adam, net, gw, gb);
    }
    CHECK(net.weights[0][0] == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("checkpoint round-trips the net and metadata bitwise") {
    MlpNet net = init_mlp_fan_in({2, 24, 24, 2}, Activation::Silu, 77);
    CheckpointMeta meta;
    meta.method = "node";
    meta.epochs = 1234;
    const std::string path = "/tmp/mlb_test_ckpt.bin";
    save_checkpoint(net, meta, path);

    CheckpointMeta back_meta;
    MlpNet back = load_checkpoint(path, &back_meta);
    CHECK(back.layer_sizes == net.layer_sizes);
    CHECK(back.activation == net.activation);
    CHECK(back.seed == net.seed);
    CHECK(back_meta.method == "node");
    CHECK(back_meta.epochs == 1234);
    REQUIRE(back.weights.size() == net.weights.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (int i = 0; i < net.weights[l].size(); ++i)
            CHECK(back.weights[l][i] == net.weights[l][i]); // bitwise
        for (int i = 0; i < net.biases[l].size(); ++i)
            CHECK(back.biases[l][i] == net.biases[l][i]);
    }
    // Meta pointer is optional.
    MlpNet again = load_checkpoint(path);
    CHECK(again.weights[0][0] == net.weights[0][0]);

    // Corrupted magic is rejected.
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("XXXXXXXX", 8);
    }
    CHECK_THROWS_AS(load_checkpoint(path), BadShape);
    CHECK_THROWS_AS(load_checkpoint("/tmp/does_not_exist_мlb.bin"), Error);
    std::remove(path.c_str());
}

TEST_CASE("truncated checkpoint is rejected") {
    MlpNet net = init_mlp({1, 8, 2}, Activation::Tanh, 1);
    const std::string path = "/tmp/mlb_test_ckpt_trunc.bin";
    save_checkpoint(net, {"pinn", 10}, path);
    // Chop the parameter block in half.
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<long>(bytes.size() / 2));
    out.close();
    CHECK_THROWS_AS(load_checkpoint(path), BadShape);
    std::remove(path.c_str());
}
