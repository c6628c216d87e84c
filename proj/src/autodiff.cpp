#include "mlb/autodiff.hpp"

#include <cmath>
#include <random>

#include "mlb/error.hpp"

namespace mlb::ad {

namespace {

// Entry i of m, treating a 1x1 matrix as a broadcast scalar.
inline double bval(const Mat& m, int i) {
    return m.is_scalar() ? m[0] : m[i];
}

// Elementwise binary with scalar broadcast on either side.
template <class F>
Mat ew_binary(const Mat& a, const Mat& b, F f, const char* opname) {
    if (!a.same_shape(b) && !a.is_scalar() && !b.is_scalar())
        throw ShapeMismatch(std::string(opname) + ": shapes do not conform");
    const Mat& shape = a.is_scalar() ? b : a;
    Mat out(shape.rows(), shape.cols());
    for (int i = 0; i < out.size(); ++i)
        out[i] = f(bval(a, i), bval(b, i));
    return out;
}

template <class F>
Mat ew_unary(const Mat& x, F f) {
    Mat out(x.rows(), x.cols());
    for (int i = 0; i < out.size(); ++i)
        out[i] = f(x[i]);
    return out;
}

} // namespace

int Tape::push(NodeRec&& rec) {
    nodes_.push_back(std::move(rec));
    return static_cast<int>(nodes_.size()) - 1;
}

const Tape::NodeRec& Tape::at(Var v) const {
    if (!v.valid())
        throw NoOutput("autodiff: invalid node handle");
    if (v.tape != this || v.idx >= static_cast<int>(nodes_.size()))
        throw UnknownInput("autodiff: handle does not belong to this tape");
    return nodes_[v.idx];
}

void Tape::check_same_tape(Var v) const {
    (void)at(v);
}

Var Tape::input(Mat value) {
    NodeRec rec;
    rec.op = Op::Input;
    rec.requires_grad = true;
    rec.value = std::move(value);
    return handle(push(std::move(rec)));
}

Var Tape::constant(Mat value) {
    NodeRec rec;
    rec.op = Op::Constant;
    rec.requires_grad = false;
    rec.value = std::move(value);
    return handle(push(std::move(rec)));
}

Var Tape::add(Var a, Var b) {
    check_same_tape(a);
    check_same_tape(b);
    NodeRec rec;
    rec.op = Op::Add;
    rec.a = a.idx;
    rec.b = b.idx;
    rec.requires_grad = nodes_[a.idx].requires_grad || nodes_[b.idx].requires_grad;
    rec.value = ew_binary(nodes_[a.idx].value, nodes_[b.idx].value,
                          [](double x, double y) { return x + y; }, "add");
    int idx = push(std::move(rec));
    maybe_build_tangent(idx);
    return handle(idx);
}

Var Tape::sub(Var a, Var b) {
    check_same_tape(a);
    check_same_tape(b);
    NodeRec rec;
    rec.op = Op::Sub;
    rec.a = a.idx;
    rec.b = b.idx;
    rec.requires_grad = nodes_[a.idx].requires_grad || nodes_[b.idx].requires_grad;
    rec.value = ew_binary(nodes_[a.idx].value, nodes_[b.idx].value,
                          [](double x, double y) { return x - y; }, "sub");
    int idx = push(std::move(rec));
    maybe_build_tangent(idx);
    return handle(idx);
}

Var Tape::mul(Var a, Var b) {
    check_same_tape(a);
    check_same_tape(b);
    NodeRec rec;
    rec.op = Op::Mul;
    rec.a = a.idx;
    rec.b = b.idx;
    rec.requires_grad = nodes_[a.idx].requires_grad || nodes_[b.idx].requires_grad;
    rec.value = ew_binary(nodes_[a.idx].value, nodes_[b.idx].value,
                          [](double x, double y) { return x * y; }, "mul");
    int idx = push(std::move(rec));
    maybe_build_tangent(idx);
    return handle(idx);
}

Var Tape::div(Var a, Var b) {
    check_same_tape(a);
    check_same_tape(b);
    const Mat& denom = nodes_[b.idx].value;
    for (int i = 0; i < denom.size(); ++i)
        if (denom[i] == 0.0)
            throw DivisionByZero("div: divisor entry is exactly zero");
    NodeRec rec;
    rec.op = Op::Div;
    rec.a = a.idx;
    rec.b = b.idx;
    rec.requires_grad = nodes_[a.idx].requires_grad || nodes_[b.idx].requires_grad;
    rec.value = ew_binary(nodes_[a.idx].value, denom,
                          [](double x, double y) { return x / y; }, "div");
    int idx = push(std::move(rec));
    maybe_build_tangent(idx);
    return handle(idx);
}

Var Tape::matmul(Var a, Var b) {
    check_same_tape(a);
    check_same_tape(b);
    NodeRec rec;
    rec.op = Op::MatMul;
    rec.a = a.idx;
    rec.b = b.idx;
    rec.requires_grad = nodes_[a.idx].requires_grad || nodes_[b.idx].requires_grad;
    matmul_into(nodes_[a.idx].value, nodes_[b.idx].value, rec.value);
    int idx = push(std::move(rec));
    maybe_build_tangent(idx);
    return handle(idx);
}

Var Tape::affine(Var x, Var w, Var b) {
    check_same_tape(x);
    check_same_tape(w);
    check_same_tape(b);
    const Mat& bias = nodes_[b.idx].value;
    NodeRec rec;
    rec.op = Op::Affine;
    rec.a = x.idx;
    rec.b = w.idx;
    rec.c = b.idx;
    rec.requires_grad = nodes_[x.idx].requires_grad ||
                        nodes_[w.idx].requires_grad ||
                        nodes_[b.idx].requires_grad;
    matmul_into(nodes_[x.idx].value, nodes_[w.idx].value, rec.value);
    if (bias.rows() != 1 || bias.cols() != rec.value.cols())
        throw ShapeMismatch("affine: bias must be a 1 x n_out row");
    emap(rec.value).rowwise() += emap(bias).row(0);
    int idx = push(std::move(rec));
    maybe_build_tangent(idx);
    return handle(idx);
}

Var Tape::tanh(Var x) {
    check_same_tape(x);
    NodeRec rec;
    rec.op = Op::Tanh;
    rec.a = x.idx;
    rec.requires_grad = nodes_[x.idx].requires_grad;
    rec.value = ew_unary(nodes_[x.idx].value, [](double v) { return std::tanh(v); });
    int idx = push(std::move(rec));
    maybe_build_tangent(idx);
    return handle(idx);
}

Var Tape::silu(Var x) {
    check_same_tape(x);
    NodeRec rec;
    rec.op = Op::Silu;
    rec.a = x.idx;
    rec.requires_grad = nodes_[x.idx].requires_grad;
    const Mat& v = nodes_[x.idx].value;
    rec.aux = ew_unary(v, [](double t) { return 1.0 / (1.0 + std::exp(-t)); });
    rec.value = Mat(v.rows(), v.cols());
    for (int i = 0; i < v.size(); ++i)
        rec.value[i] = v[i] * rec.aux[i];
    int idx = push(std::move(rec));
    maybe_build_tangent(idx);
    return handle(idx);
}

Var Tape::sigmoid(Var x) {
    check_same_tape(x);
    NodeRec rec;
    rec.op = Op::Sigmoid;
    rec.a = x.idx;
    rec.requires_grad = nodes_[x.idx].requires_grad;
    rec.value = ew_unary(nodes_[x.idx].value,
                         [](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    int idx = push(std::move(rec));
    maybe_build_tangent(idx);
    return handle(idx);
}

Var Tape::sinh(Var x) {
    check_same_tape(x);
    NodeRec rec;
    rec.op = Op::Sinh;
    rec.a = x.idx;
    rec.requires_grad = nodes_[x.idx].requires_grad;
    rec.value = ew_unary(nodes_[x.idx].value, [](double v) { return std::sinh(v); });
    int idx = push(std::move(rec));
    maybe_build_tangent(idx);
    return handle(idx);
}

Var Tape::cosh(Var x) {
    check_same_tape(x);
    NodeRec rec;
    rec.op = Op::Cosh;
    rec.a = x.idx;
    rec.requires_grad = nodes_[x.idx].requires_grad;
    rec.value = ew_unary(nodes_[x.idx].value, [](double v) { return std::cosh(v); });
    int idx = push(std::move(rec));
    maybe_build_tangent(idx);
    return handle(idx);
}

Var Tape::square(Var x) {
    check_same_tape(x);
    NodeRec rec;
    rec.op = Op::Square;
    rec.a = x.idx;
    rec.requires_grad = nodes_[x.idx].requires_grad;
    rec.value = ew_unary(nodes_[x.idx].value, [](double v) { return v * v; });
    int idx = push(std::move(rec));
    maybe_build_tangent(idx);
    return handle(idx);
}

Var Tape::mean(Var x) {
    check_same_tape(x);
    const Mat& v = nodes_[x.idx].value;
    if (v.size() == 0)
        throw ShapeMismatch("mean: empty operand");
    NodeRec rec;
    rec.op = Op::Mean;
    rec.a = x.idx;
    rec.requires_grad = nodes_[x.idx].requires_grad;
    double acc = 0.0;
    for (int i = 0; i < v.size(); ++i)
        acc += v[i];
    rec.value = Mat::scalar(acc / v.size());
    int idx = push(std::move(rec));
    maybe_build_tangent(idx);
    return handle(idx);
}

Var Tape::sum(Var x) {
    check_same_tape(x);
    const Mat& v = nodes_[x.idx].value;
    NodeRec rec;
    rec.op = Op::Sum;
    rec.a = x.idx;
    rec.requires_grad = nodes_[x.idx].requires_grad;
    double acc = 0.0;
    for (int i = 0; i < v.size(); ++i)
        acc += v[i];
    rec.value = Mat::scalar(acc);
    int idx = push(std::move(rec));
    maybe_build_tangent(idx);
    return handle(idx);
}

Var Tape::concat(Var a, Var b) {
    check_same_tape(a);
    check_same_tape(b);
    const Mat& va = nodes_[a.idx].value;
    const Mat& vb = nodes_[b.idx].value;
    if (va.rows() != vb.rows())
        throw ShapeMismatch("concat: row counts differ");
    NodeRec rec;
    rec.op = Op::Concat;
    rec.a = a.idx;
    rec.b = b.idx;
    rec.requires_grad = nodes_[a.idx].requires_grad || nodes_[b.idx].requires_grad;
    rec.value = Mat(va.rows(), va.cols() + vb.cols());
    for (int r = 0; r < va.rows(); ++r) {
        for (int c = 0; c < va.cols(); ++c)
            rec.value(r, c) = va(r, c);
        for (int c = 0; c < vb.cols(); ++c)
            rec.value(r, va.cols() + c) = vb(r, c);
    }
    int idx = push(std::move(rec));
    maybe_build_tangent(idx);
    return handle(idx);
}

Var Tape::slice(Var x, int c0, int c1) {
    check_same_tape(x);
    const Mat& v = nodes_[x.idx].value;
    if (c0 < 0 || c1 > v.cols() || c0 >= c1)
        throw ShapeMismatch("slice: column range out of bounds");
    NodeRec rec;
    rec.op = Op::Slice;
    rec.a = x.idx;
    rec.c0 = c0;
    rec.c1 = c1;
    rec.requires_grad = nodes_[x.idx].requires_grad;
    rec.value = Mat(v.rows(), c1 - c0);
    for (int r = 0; r < v.rows(); ++r)
        for (int c = c0; c < c1; ++c)
            rec.value(r, c - c0) = v(r, c);
    int idx = push(std::move(rec));
    maybe_build_tangent(idx);
    return handle(idx);
}

void Tape::seed_input_tangent(Var v, const Mat& direction) {
    const NodeRec& rec = at(v);
    if (rec.op != Op::Input)
        throw UnknownInput("seed_input_tangent: node is not an input of this tape");
    if (!rec.value.same_shape(direction))
        throw ShapeMismatch("seed_input_tangent: direction shape differs from input");
    Var dir = constant(direction);
    nodes_[v.idx].tangent = dir.idx;
    tangent_mode_ = true;
}

Var Tape::tangent(Var v) const {
    const NodeRec& rec = at(v);
    if (rec.tangent < 0)
        return Var{};
    return Var{const_cast<Tape*>(this), rec.tangent};
}

void Tape::maybe_build_tangent(int idx) {
    if (!tangent_mode_ || building_jvp_)
        return;
    const NodeRec& rec = nodes_[idx];
    bool any = (rec.a >= 0 && nodes_[rec.a].tangent >= 0) ||
               (rec.b >= 0 && nodes_[rec.b].tangent >= 0) ||
               (rec.c >= 0 && nodes_[rec.c].tangent >= 0);
    if (!any)
        return;
    building_jvp_ = true;
    Var t = build_tangent(rec, idx);
    building_jvp_ = false;
    nodes_[idx].tangent = t.idx;
}

Var Tape::build_tangent(const NodeRec& rec_in, int idx) {
    // Copy the fields first: pushing tangent nodes may reallocate nodes_.
    const Op op = rec_in.op;
    const int pa = rec_in.a, pb = rec_in.b, pc = rec_in.c;
    const int sc0 = rec_in.c0, sc1 = rec_in.c1;

    auto tan_of = [&](int p) {
        if (p < 0 || nodes_[p].tangent < 0)
            return Var{};
        return handle(nodes_[p].tangent);
    };
    auto zeros_like = [&](int p) {
        const Mat& v = nodes_[p].value;
        return constant(Mat(v.rows(), v.cols()));
    };
    Var ta = tan_of(pa), tb = tan_of(pb), tc = tan_of(pc);
    Var av = pa >= 0 ? handle(pa) : Var{};
    Var bv = pb >= 0 ? handle(pb) : Var{};
    Var self = handle(idx);

    switch (op) {
        case Op::Add:
            if (ta.valid() && tb.valid()) return add(ta, tb);
            return ta.valid() ? ta : tb;
        case Op::Sub:
            if (ta.valid() && tb.valid()) return sub(ta, tb);
            if (ta.valid()) return ta;
            return mul(tb, constant(-1.0));
        case Op::Mul: {
            Var t1 = ta.valid() ? mul(ta, bv) : Var{};
            Var t2 = tb.valid() ? mul(av, tb) : Var{};
            if (t1.valid() && t2.valid()) return add(t1, t2);
            return t1.valid() ? t1 : t2;
        }
        case Op::Div: {
            // d(a/b) = da/b - (a/b)*db/b
            Var t1 = ta.valid() ? div(ta, bv) : Var{};
            Var t2 = tb.valid() ? mul(self, div(tb, bv)) : Var{};
            if (t1.valid() && t2.valid()) return sub(t1, t2);
            if (t1.valid()) return t1;
            return mul(t2, constant(-1.0));
        }
        case Op::MatMul: {
            Var t1 = ta.valid() ? matmul(ta, bv) : Var{};
            Var t2 = tb.valid() ? matmul(av, tb) : Var{};
            if (t1.valid() && t2.valid()) return add(t1, t2);
            return t1.valid() ? t1 : t2;
        }
        case Op::Affine: {
            // d(x*w + b) = dx*w + x*dw + db (row-broadcast via affine)
            Var base;
            if (tc.valid()) {
                Var tx = ta.valid() ? ta : zeros_like(pa);
                base = affine(tx, bv, tc);
            } else if (ta.valid()) {
                base = matmul(ta, bv);
            }
            Var tw = tb.valid() ? matmul(av, tb) : Var{};
            if (base.valid() && tw.valid()) return add(base, tw);
            return base.valid() ? base : tw;
        }
        case Op::Tanh:
            return mul(sub(constant(1.0), square(self)), ta);
        case Op::Sigmoid:
            return mul(mul(self, sub(constant(1.0), self)), ta);
        case Op::Silu: {
            // d silu = sigmoid(x) * (1 + x*(1 - sigmoid(x)))
            Var s = sigmoid(av);
            Var deriv = mul(s, add(constant(1.0), mul(av, sub(constant(1.0), s))));
            return mul(deriv, ta);
        }
        case Op::Sinh:
            return mul(cosh(av), ta);
        case Op::Cosh:
            return mul(sinh(av), ta);
        case Op::Square:
            return mul(mul(constant(2.0), av), ta);
        case Op::Mean:
            return mean(ta);
        case Op::Sum:
            return sum(ta);
        case Op::Slice:
            return slice(ta, sc0, sc1);
        case Op::Concat: {
            Var t1 = ta.valid() ? ta : zeros_like(pa);
            Var t2 = tb.valid() ? tb : zeros_like(pb);
            return concat(t1, t2);
        }
        case Op::Input:
        case Op::Constant:
            break;
    }
    return Var{};
}

void Tape::accumulate(int parent, const Mat& contribution) {
    NodeRec& p = nodes_[parent];
    if (!p.requires_grad)
        return;
    if (!p.has_adjoint) {
        p.adjoint = Mat(p.value.rows(), p.value.cols());
        p.has_adjoint = true;
    }
    if (p.adjoint.same_shape(contribution)) {
        for (int i = 0; i < contribution.size(); ++i)
            p.adjoint[i] += contribution[i];
    } else if (p.adjoint.is_scalar()) {
        double acc = 0.0;
        for (int i = 0; i < contribution.size(); ++i)
            acc += contribution[i];
        p.adjoint[0] += acc;
    } else {
        throw ShapeMismatch("backward: adjoint accumulation shape bug");
    }
}

void Tape::backward(Var loss) {
    const NodeRec& out = at(loss);
    if (!out.value.is_scalar())
        throw NonScalarOutput("backward: loss must be a 1x1 scalar");

    for (auto& n : nodes_)
        n.has_adjoint = false;
    nodes_[loss.idx].adjoint = Mat::scalar(1.0);
    nodes_[loss.idx].has_adjoint = true;

    for (int i = loss.idx; i >= 0; --i) {
        NodeRec& n = nodes_[i];
        if (!n.has_adjoint || !n.requires_grad)
            continue;
        const Mat& g = n.adjoint;
        switch (n.op) {
            case Op::Input:
            case Op::Constant:
                break;
            case Op::Add: {
                accumulate(n.a, g);
                accumulate(n.b, g);
                break;
            }
            case Op::Sub: {
                accumulate(n.a, g);
                Mat neg = ew_unary(g, [](double v) { return -v; });
                accumulate(n.b, neg);
                break;
            }
            case Op::Mul: {
                const Mat& va = nodes_[n.a].value;
                const Mat& vb = nodes_[n.b].value;
                Mat ga(g.rows(), g.cols());
                Mat gb(g.rows(), g.cols());
                for (int k = 0; k < g.size(); ++k) {
                    ga[k] = g[k] * bval(vb, k);
                    gb[k] = g[k] * bval(va, k);
                }
                accumulate(n.a, ga);
                accumulate(n.b, gb);
                break;
            }
            case Op::Div: {
                const Mat& vb = nodes_[n.b].value;
                const Mat& z = n.value;
                Mat ga(g.rows(), g.cols());
                Mat gb(g.rows(), g.cols());
                for (int k = 0; k < g.size(); ++k) {
                    double inv_b = 1.0 / bval(vb, k);
                    ga[k] = g[k] * inv_b;
                    gb[k] = -g[k] * z[k] * inv_b;
                }
                accumulate(n.a, ga);
                accumulate(n.b, gb);
                break;
            }
            case Op::MatMul: {
                const Mat& va = nodes_[n.a].value;
                const Mat& vb = nodes_[n.b].value;
                Mat ga(va.rows(), va.cols());
                Mat gb(vb.rows(), vb.cols());
                emap(ga).noalias() = emap(g) * emap(vb).transpose();
                emap(gb).noalias() = emap(va).transpose() * emap(g);
                accumulate(n.a, ga);
                accumulate(n.b, gb);
                break;
            }
            case Op::Affine: {
                const Mat& vx = nodes_[n.a].value;
                const Mat& vw = nodes_[n.b].value;
                Mat gx(vx.rows(), vx.cols());
                Mat gw(vw.rows(), vw.cols());
                Mat gb(1, n.value.cols());
                emap(gx).noalias() = emap(g) * emap(vw).transpose();
                emap(gw).noalias() = emap(vx).transpose() * emap(g);
                emap(gb).row(0) = emap(g).colwise().sum();
                accumulate(n.a, gx);
                accumulate(n.b, gw);
                accumulate(n.c, gb);
                break;
            }
            case Op::Tanh: {
                Mat gx(g.rows(), g.cols());
                for (int k = 0; k < g.size(); ++k)
                    gx[k] = g[k] * (1.0 - n.value[k] * n.value[k]);
                accumulate(n.a, gx);
                break;
            }
            case Op::Sigmoid: {
                Mat gx(g.rows(), g.cols());
                for (int k = 0; k < g.size(); ++k)
                    gx[k] = g[k] * n.value[k] * (1.0 - n.value[k]);
                accumulate(n.a, gx);
                break;
            }
            case Op::Silu: {
                const Mat& vx = nodes_[n.a].value;
                Mat gx(g.rows(), g.cols());
                for (int k = 0; k < g.size(); ++k) {
                    double s = n.aux[k];
                    gx[k] = g[k] * (s + vx[k] * s * (1.0 - s));
                }
                accumulate(n.a, gx);
                break;
            }
            case Op::Sinh: {
                const Mat& vx = nodes_[n.a].value;
                Mat gx(g.rows(), g.cols());
                for (int k = 0; k < g.size(); ++k)
                    gx[k] = g[k] * std::cosh(vx[k]);
                accumulate(n.a, gx);
                break;
            }
            case Op::Cosh: {
                const Mat& vx = nodes_[n.a].value;
                Mat gx(g.rows(), g.cols());
                for (int k = 0; k < g.size(); ++k)
                    gx[k] = g[k] * std::sinh(vx[k]);
                accumulate(n.a, gx);
                break;
            }
            case Op::Square: {
                const Mat& vx = nodes_[n.a].value;
                Mat gx(g.rows(), g.cols());
                for (int k = 0; k < g.size(); ++k)
                    gx[k] = g[k] * 2.0 * vx[k];
                accumulate(n.a, gx);
                break;
            }
            case Op::Mean: {
                const Mat& vx = nodes_[n.a].value;
                Mat gx(vx.rows(), vx.cols(), g[0] / vx.size());
                accumulate(n.a, gx);
                break;
            }
            case Op::Sum: {
                const Mat& vx = nodes_[n.a].value;
                Mat gx(vx.rows(), vx.cols(), g[0]);
                accumulate(n.a, gx);
                break;
            }
            case Op::Concat: {
                const Mat& va = nodes_[n.a].value;
                const Mat& vb = nodes_[n.b].value;
                Mat ga(va.rows(), va.cols());
                Mat gb(vb.rows(), vb.cols());
                for (int r = 0; r < g.rows(); ++r) {
                    for (int c = 0; c < va.cols(); ++c)
                        ga(r, c) = g(r, c);
                    for (int c = 0; c < vb.cols(); ++c)
                        gb(r, c) = g(r, va.cols() + c);
                }
                accumulate(n.a, ga);
                accumulate(n.b, gb);
                break;
            }
            case Op::Slice: {
                const Mat& vx = nodes_[n.a].value;
                Mat gx(vx.rows(), vx.cols());
                for (int r = 0; r < g.rows(); ++r)
                    for (int c = 0; c < g.cols(); ++c)
                        gx(r, n.c0 + c) = g(r, c);
                accumulate(n.a, gx);
                break;
            }
        }
    }
}

const Mat& Tape::value(Var v) const {
    return at(v).value;
}

Mat Tape::grad(Var v) const {
    const NodeRec& rec = at(v);
    if (rec.has_adjoint)
        return rec.adjoint;
    return Mat(rec.value.rows(), rec.value.cols());
}

void Tape::reset() {
    nodes_.clear();
    tangent_mode_ = false;
    building_jvp_ = false;
}

double grad_check(const std::function<double()>& loss_value,
                  const std::vector<Mat*>& params,
                  const std::vector<Mat>& analytic_grads,
                  double h, int n_probe, unsigned long long seed) {
    if (!(h > 0.0))
        throw BadShape("grad_check: step must be positive");
    if (params.size() != analytic_grads.size())
        throw LengthMismatch("grad_check: params and gradients differ in count");

    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int probe = 0; probe < n_probe; ++probe) {
        std::size_t pi = rng() % params.size();
        Mat& p = *params[pi];
        if (p.size() == 0)
            continue;
        int ei = static_cast<int>(rng() % static_cast<unsigned long long>(p.size()));
        double saved = p[ei];
        p[ei] = saved + h;
        double up = loss_value();
        p[ei] = saved - h;
        double down = loss_value();
        p[ei] = saved;
        double numeric = (up - down) / (2.0 * h);
        double analytic = analytic_grads[pi][ei];
        double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-12});
        worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
    return worst;
}

} // namespace mlb::ad
