#include "mlb/mlp.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>

#include "mlb/error.hpp"

namespace mlb {

namespace {

// Uniform double in [0, 1) with the full 53-bit mantissa, built directly
// from raw mt19937_64 output so results do not depend on the standard
// library's distribution implementation.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_pm(std::mt19937_64& rng, double bound) {
    return (2.0 * uniform01(rng) - 1.0) * bound;
}

void check_sizes(const std::vector<int>& layer_sizes) {
    if (layer_sizes.size() < 2)
        throw BadShape("init_mlp: need at least an input and an output layer");
    for (int s : layer_sizes)
        if (s <= 0)
            throw BadShape("init_mlp: layer sizes must be positive");
}

MlpNet glorot_base(const std::vector<int>& layer_sizes, Activation activation,
                   unsigned long long seed, std::mt19937_64& rng) {
    MlpNet net;
    net.layer_sizes = layer_sizes;
    net.activation = activation;
    net.seed = seed;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        int n_in = layer_sizes[l];
        int n_out = layer_sizes[l + 1];
        double bound = std::sqrt(6.0 / (n_in + n_out));
        Mat w(n_in, n_out);
        for (int i = 0; i < w.size(); ++i)
            w[i] = uniform_pm(rng, bound);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(1, n_out);
    }
    return net;
}

} // namespace

const char* activation_name(Activation a) {
    return a == Activation::Tanh ? "tanh" : "silu";
}

Activation activation_from_name(const std::string& name) {
    if (name == "tanh")
        return Activation::Tanh;
    if (name == "silu")
        return Activation::Silu;
    throw BadShape("unknown activation: " + name);
}

MlpNet init_mlp(const std::vector<int>& layer_sizes, Activation activation,
                unsigned long long seed) {
    check_sizes(layer_sizes);
    std::mt19937_64 rng(seed);
    return glorot_base(layer_sizes, activation, seed, rng);
}

MlpNet init_mlp_fan_in(const std::vector<int>& layer_sizes, Activation activation,
                       unsigned long long seed) {
    check_sizes(layer_sizes);
    std::mt19937_64 rng(seed);
    MlpNet net;
    net.layer_sizes = layer_sizes;
    net.activation = activation;
    net.seed = seed;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        int n_in = layer_sizes[l];
        int n_out = layer_sizes[l + 1];
        double bound = 1.0 / std::sqrt(static_cast<double>(n_in));
        Mat w(n_in, n_out);
        for (int i = 0; i < w.size(); ++i)
            w[i] = uniform_pm(rng, bound);
        Mat b(1, n_out);
        for (int i = 0; i < b.size(); ++i)
            b[i] = uniform_pm(rng, bound);
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    return net;
}

MlpNet init_mlp_for_regression(const std::vector<int>& layer_sizes,
                               Activation activation, unsigned long long seed,
                               double in_lo, double in_hi,
                               const std::vector<double>& out_mean,
                               double sweep) {
    check_sizes(layer_sizes);
    if (!(in_lo < in_hi))
        throw BadShape("init_mlp_for_regression: need in_lo < in_hi");
    if (out_mean.size() != static_cast<std::size_t>(layer_sizes.back()))
        throw BadShape("init_mlp_for_regression: out_mean length != output width");

    std::mt19937_64 rng(seed);
    MlpNet net = glorot_base(layer_sizes, activation, seed, rng);

    // First layer: slope w in +-sweep/span so a unit's preactivation moves
    // O(sweep) across the window instead of saturating immediately; bias
    // -w*center places each unit's transition at a random point inside the
    // window.
    double span = in_hi - in_lo;
    Mat& w1 = net.weights.front();
    Mat& b1 = net.biases.front();
    for (int i = 0; i < w1.size(); ++i)
        w1[i] = uniform_pm(rng, sweep / span);
    for (int j = 0; j < b1.cols(); ++j) {
        double center = in_lo + span * uniform01(rng);
        double slope_sum = 0.0;
        for (int r = 0; r < w1.rows(); ++r)
            slope_sum += w1(r, j);
        b1(0, j) = -slope_sum * center;
    }

    Mat& b_out = net.biases.back();
    for (int j = 0; j < b_out.cols(); ++j)
        b_out(0, j) = out_mean[j];
    return net;
}

Mat forward(const MlpNet& net, const Mat& input) {
    if (input.cols() != net.layer_sizes.front())
        throw ShapeMismatch("forward: input width does not match the first layer");
    Mat h = input;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        Mat z;
        matmul_into(h, net.weights[l], z);
        emap(z).rowwise() += emap(net.biases[l]).row(0);
        if (l + 1 < net.weights.size()) {
            if (net.activation == Activation::Tanh) {
                for (int i = 0; i < z.size(); ++i)
                    z[i] = std::tanh(z[i]);
            } else {
                // x * sigmoid(x) with the multiply form, matching the tape's
                // silu node bitwise (x / (1 + e^-x) rounds differently).
                for (int i = 0; i < z.size(); ++i)
                    z[i] = z[i] * (1.0 / (1.0 + std::exp(-z[i])));
            }
        }
        h = std::move(z);
    }
    return h;
}

void lsq_output_head(MlpNet& net, const Mat& inputs, const Mat& targets,
                     double lambda_rel) {
    if (inputs.rows() != targets.rows())
        throw ShapeMismatch("lsq_output_head: row counts differ");
    if (targets.cols() != net.layer_sizes.back())
        throw ShapeMismatch("lsq_output_head: target width != output width");

    // Activations entering the output layer.
    Mat h = inputs;
    for (std::size_t l = 0; l + 1 < net.weights.size(); ++l) {
        Mat z;
        matmul_into(h, net.weights[l], z);
        emap(z).rowwise() += emap(net.biases[l]).row(0);
        if (net.activation == Activation::Tanh) {
            for (int i = 0; i < z.size(); ++i)
                z[i] = std::tanh(z[i]);
        } else {
            for (int i = 0; i < z.size(); ++i)
                z[i] = z[i] * (1.0 / (1.0 + std::exp(-z[i])));
        }
        h = std::move(z);
    }

    // beta = (H^T H + lambda I)^-1 H^T T, bias = column means of T - H*beta.
    // The ridge term scales with the Gram diagonal rather than using an
    // absolute floor: hidden activations here are O(1) and heavily
    // correlated, so a tiny absolute lambda produces enormous near-singular
    // weights that gradient descent cannot recover from.  lambda equal to
    // the mean diagonal entry damps the head toward small weights while
    // still fitting the bulk of the target.
    EigenRowMajor gram = emap(h).transpose() * emap(h);
    gram.diagonal().array() += lambda_rel * gram.diagonal().mean();
    EigenRowMajor rhs = emap(h).transpose() * emap(targets);
    EigenRowMajor beta = gram.ldlt().solve(rhs);

    Mat& w_out = net.weights.back();
    for (int r = 0; r < w_out.rows(); ++r)
        for (int c = 0; c < w_out.cols(); ++c)
            w_out(r, c) = beta(r, c);
    EigenRowMajor resid = emap(targets) - emap(h) * beta;
    Mat& b_out = net.biases.back();
    for (int c = 0; c < b_out.cols(); ++c)
        b_out(0, c) = resid.col(c).mean();
}

long param_count(const MlpNet& net) {
    long total = 0;
    for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l)
        total += static_cast<long>(net.layer_sizes[l]) * net.layer_sizes[l + 1]
               + net.layer_sizes[l + 1];
    return total;
}

long mac_count(const MlpNet& net) {
    long total = 0;
    for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l)
        total += static_cast<long>(net.layer_sizes[l]) * net.layer_sizes[l + 1];
    return total;
}

TapeNet register_params(const MlpNet& net, ad::Tape& tape) {
    TapeNet tn;
    tn.activation = net.activation;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        tn.weights.push_back(tape.input(net.weights[l]));
        tn.biases.push_back(tape.input(net.biases[l]));
    }
    return tn;
}

ad::Var tape_forward(const TapeNet& tn, ad::Var input) {
    ad::Tape& tape = *input.tape;
    ad::Var h = input;
    for (std::size_t l = 0; l < tn.weights.size(); ++l) {
        h = tape.affine(h, tn.weights[l], tn.biases[l]);
        if (l + 1 < tn.weights.size())
            h = tn.activation == Activation::Tanh ? tape.tanh(h) : tape.silu(h);
    }
    return h;
}

AdamState make_adam(const MlpNet& net, double lr) {
    AdamState st;
    st.lr = lr;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        st.m_w.emplace_back(net.weights[l].rows(), net.weights[l].cols());
        st.v_w.emplace_back(net.weights[l].rows(), net.weights[l].cols());
        st.m_b.emplace_back(net.biases[l].rows(), net.biases[l].cols());
        st.v_b.emplace_back(net.biases[l].rows(), net.biases[l].cols());
    }
    return st;
}

namespace {

void adam_update(Mat& theta, Mat& m, Mat& v, const Mat& g, const AdamState& st,
                 double corr1, double corr2) {
    if (!theta.same_shape(g))
        throw ShapeMismatch("adam_step: gradient shape does not match parameter");
    for (int i = 0; i < theta.size(); ++i) {
        m[i] = st.beta1 * m[i] + (1.0 - st.beta1) * g[i];
        v[i] = st.beta2 * v[i] + (1.0 - st.beta2) * g[i] * g[i];
        double m_hat = m[i] / corr1;
        double v_hat = v[i] / corr2;
        theta[i] -= st.lr * m_hat / (std::sqrt(v_hat) + st.eps);
    }
}

} // namespace

void adam_step(AdamState& state, MlpNet& net,
               const std::vector<Mat>& grad_w, const std::vector<Mat>& grad_b) {
    if (grad_w.size() != net.weights.size() || grad_b.size() != net.biases.size())
        throw ShapeMismatch("adam_step: gradient count does not match layers");
    ++state.t;
    double corr1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    double corr2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        adam_update(net.weights[l], state.m_w[l], state.v_w[l], grad_w[l],
                    state, corr1, corr2);
        adam_update(net.biases[l], state.m_b[l], state.v_b[l], grad_b[l],
                    state, corr1, corr2);
    }
}

// --- checkpoint ----------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'M', 'L', 'B', 'C', 'K', 'P', 'T', '\x01'};

template <class T>
void write_pod(std::ofstream& f, T v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <class T>
T read_pod(std::ifstream& f) {
    T v;
    f.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!f)
        throw BadShape("checkpoint: truncated file");
    return v;
}

} // namespace

void save_checkpoint(const MlpNet& net, const CheckpointMeta& meta,
                     const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("checkpoint: cannot open " + path + " for writing");
    f.write(kMagic, sizeof(kMagic));
    write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(net.layer_sizes.size()));
    for (int s : net.layer_sizes)
        write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(s));
    write_pod<std::uint8_t>(f, net.activation == Activation::Tanh ? 0 : 1);
    write_pod<std::uint64_t>(f, net.seed);
    write_pod<std::uint64_t>(f, meta.epochs);
    write_pod<std::uint32_t>(f, static_cast<std::uint32_t>(meta.method.size()));
    f.write(meta.method.data(), static_cast<std::streamsize>(meta.method.size()));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        f.write(reinterpret_cast<const char*>(net.weights[l].data()),
                sizeof(double) * net.weights[l].size());
        f.write(reinterpret_cast<const char*>(net.biases[l].data()),
                sizeof(double) * net.biases[l].size());
    }
    if (!f)
        throw Error("checkpoint: write failed for " + path);
}

MlpNet load_checkpoint(const std::string& path, CheckpointMeta* meta) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw Error("checkpoint: cannot open " + path);
    char magic[8];
    f.read(magic, sizeof(magic));
    if (!f || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw BadShape("checkpoint: bad magic/version in " + path);

    auto n_layers = read_pod<std::uint32_t>(f);
    if (n_layers < 2 || n_layers > 64)
        throw BadShape("checkpoint: implausible layer count");
    std::vector<int> sizes(n_layers);
    for (auto& s : sizes)
        s = static_cast<int>(read_pod<std::uint32_t>(f));
    auto act = read_pod<std::uint8_t>(f);
    auto seed = read_pod<std::uint64_t>(f);
    auto epochs = read_pod<std::uint64_t>(f);
    auto method_len = read_pod<std::uint32_t>(f);
    std::string method(method_len, '\0');
    f.read(method.data(), method_len);
    if (!f)
        throw BadShape("checkpoint: truncated file");

    MlpNet net;
    net.layer_sizes = sizes;
    net.activation = act == 0 ? Activation::Tanh : Activation::Silu;
    net.seed = seed;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        Mat w(sizes[l], sizes[l + 1]);
        Mat b(1, sizes[l + 1]);
        f.read(reinterpret_cast<char*>(w.data()), sizeof(double) * w.size());
        f.read(reinterpret_cast<char*>(b.data()), sizeof(double) * b.size());
        if (!f)
            throw BadShape("checkpoint: truncated parameter block");
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    if (meta) {
        meta->method = method;
        meta->epochs = epochs;
    }
    return net;
}

} // namespace mlb
