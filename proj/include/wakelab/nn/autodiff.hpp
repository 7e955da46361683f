// Minimal reverse-mode automatic differentiation over dense matrices.
//
// A Tape records each forward operation as a node holding its value and a
// pullback closure; backward() seeds the root and replays the closures in
// reverse creation order, then accumulates leaf gradients into registered
// parameter tensors. The op set is exactly what the actor-critic models
// need; everything is 64-bit.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wakelab/bessel.hpp"

namespace wakelab::nn {

using Mat = Eigen::MatrixXd;

/// A named parameter: value plus gradient slot of identical shape.
struct Tensor {
    std::string name;
    Mat value;
    Mat grad;

    Tensor() = default;
    Tensor(std::string n, Mat v) : name(std::move(n)), value(std::move(v)) {
        grad = Mat::Zero(value.rows(), value.cols());
    }

    Eigen::Index size() const { return value.size(); }
    void zero_grad() { grad.setZero(); }
};

class Tape {
public:
    using Backprop = std::function<void(Tape&, int)>;

    int push(Mat value, bool needs_grad, Backprop fn) {
        nodes_.push_back({std::move(value), Mat(), needs_grad, std::move(fn)});
        return static_cast<int>(nodes_.size()) - 1;
    }

    /// External input. Inputs participate in the gradient by default so
    /// input-gradient checks work the same way as parameter checks.
    int leaf(Mat value, bool needs_grad = true) {
        return push(std::move(value), needs_grad, nullptr);
    }

    /// Parameter leaf: after backward() the accumulated gradient is added
    /// into p.grad.
    int param(Tensor& p) {
        const int id = push(p.value, true, nullptr);
        params_.push_back({id, &p});
        return id;
    }

    const Mat& value(int id) const { return nodes_[id].value; }
    bool needs_grad(int id) const { return nodes_[id].needs_grad; }

    Mat& grad_ref(int id) {
        Mat& g = nodes_[id].grad;
        if (g.size() == 0) g = Mat::Zero(nodes_[id].value.rows(), nodes_[id].value.cols());
        return g;
    }

    /// Gradient of a node after backward(); zero if the node was never
    /// reached.
    Mat grad_of(int id) const {
        if (nodes_[id].grad.size() == 0) {
            return Mat::Zero(nodes_[id].value.rows(), nodes_[id].value.cols());
        }
        return nodes_[id].grad;
    }

    /// Reverse pass from a scalar (1x1) root. `seed` scales the whole
    /// gradient, which is how minibatch means are formed without an extra
    /// node per sample.
    void backward(int root, double seed = 1.0) {
        if (nodes_.empty()) throw std::logic_error("Tape::backward: empty tape");
        if (value(root).rows() != 1 || value(root).cols() != 1) {
            throw std::logic_error("Tape::backward: root must be scalar");
        }
        grad_ref(root)(0, 0) += seed;
        for (int i = root; i >= 0; --i) {
            if (nodes_[i].backprop && nodes_[i].needs_grad && nodes_[i].grad.size() != 0) {
                nodes_[i].backprop(*this, i);
            }
        }
        for (auto& [id, p] : params_) {
            if (nodes_[id].grad.size() != 0) p->grad += nodes_[id].grad;
        }
        params_.clear();
    }

    int size() const { return static_cast<int>(nodes_.size()); }

private:
    struct Node {
        Mat value;
        Mat grad;
        bool needs_grad = false;
        Backprop backprop;
    };
    std::vector<Node> nodes_;
    std::vector<std::pair<int, Tensor*>> params_;
};

// ---------------------------------------------------------------------------
// Elementwise and linear-algebra operations
// ---------------------------------------------------------------------------

inline int matmul(Tape& t, int a, int b) {
    if (t.value(a).cols() != t.value(b).rows()) {
        throw std::invalid_argument("matmul: inner dimensions differ");
    }
    const bool ng = t.needs_grad(a) || t.needs_grad(b);
    return t.push(t.value(a) * t.value(b), ng, [a, b](Tape& tp, int out) {
        const Mat& g = tp.grad_ref(out);
        if (tp.needs_grad(a)) tp.grad_ref(a).noalias() += g * tp.value(b).transpose();
        if (tp.needs_grad(b)) tp.grad_ref(b).noalias() += tp.value(a).transpose() * g;
    });
}

/// a * b^T without materializing the transpose as a node.
inline int matmul_nt(Tape& t, int a, int b) {
    if (t.value(a).cols() != t.value(b).cols()) {
        throw std::invalid_argument("matmul_nt: inner dimensions differ");
    }
    const bool ng = t.needs_grad(a) || t.needs_grad(b);
    return t.push(t.value(a) * t.value(b).transpose(), ng, [a, b](Tape& tp, int out) {
        const Mat& g = tp.grad_ref(out);
        if (tp.needs_grad(a)) tp.grad_ref(a).noalias() += g * tp.value(b);
        if (tp.needs_grad(b)) tp.grad_ref(b).noalias() += g.transpose() * tp.value(a);
    });
}

inline int transpose(Tape& t, int a) {
    return t.push(t.value(a).transpose(), t.needs_grad(a), [a](Tape& tp, int out) {
        if (tp.needs_grad(a)) tp.grad_ref(a) += tp.grad_ref(out).transpose();
    });
}

inline int add(Tape& t, int a, int b) {
    if (t.value(a).rows() != t.value(b).rows() || t.value(a).cols() != t.value(b).cols()) {
        throw std::invalid_argument("add: shape mismatch");
    }
    const bool ng = t.needs_grad(a) || t.needs_grad(b);
    return t.push(t.value(a) + t.value(b), ng, [a, b](Tape& tp, int out) {
        const Mat& g = tp.grad_ref(out);
        if (tp.needs_grad(a)) tp.grad_ref(a) += g;
        if (tp.needs_grad(b)) tp.grad_ref(b) += g;
    });
}

inline int sub(Tape& t, int a, int b) {
    if (t.value(a).rows() != t.value(b).rows() || t.value(a).cols() != t.value(b).cols()) {
        throw std::invalid_argument("sub: shape mismatch");
    }
    const bool ng = t.needs_grad(a) || t.needs_grad(b);
    return t.push(t.value(a) - t.value(b), ng, [a, b](Tape& tp, int out) {
        const Mat& g = tp.grad_ref(out);
        if (tp.needs_grad(a)) tp.grad_ref(a) += g;
        if (tp.needs_grad(b)) tp.grad_ref(b) -= g;
    });
}

inline int cwise_mul(Tape& t, int a, int b) {
    if (t.value(a).rows() != t.value(b).rows() || t.value(a).cols() != t.value(b).cols()) {
        throw std::invalid_argument("cwise_mul: shape mismatch");
    }
    const bool ng = t.needs_grad(a) || t.needs_grad(b);
    return t.push(t.value(a).cwiseProduct(t.value(b)), ng, [a, b](Tape& tp, int out) {
        const Mat& g = tp.grad_ref(out);
        if (tp.needs_grad(a)) tp.grad_ref(a) += g.cwiseProduct(tp.value(b));
        if (tp.needs_grad(b)) tp.grad_ref(b) += g.cwiseProduct(tp.value(a));
    });
}

/// Broadcast-add of a 1 x m row vector onto every row of an n x m matrix.
inline int add_rowvec(Tape& t, int a, int row) {
    if (t.value(row).rows() != 1 || t.value(row).cols() != t.value(a).cols()) {
        throw std::invalid_argument("add_rowvec: need a 1 x cols(a) row vector");
    }
    const bool ng = t.needs_grad(a) || t.needs_grad(row);
    return t.push(t.value(a).rowwise() + t.value(row).row(0), ng, [a, row](Tape& tp, int out) {
        const Mat& g = tp.grad_ref(out);
        if (tp.needs_grad(a)) tp.grad_ref(a) += g;
        if (tp.needs_grad(row)) tp.grad_ref(row) += g.colwise().sum();
    });
}

inline int scale(Tape& t, int a, double c) {
    return t.push(t.value(a) * c, t.needs_grad(a), [a, c](Tape& tp, int out) {
        if (tp.needs_grad(a)) tp.grad_ref(a) += tp.grad_ref(out) * c;
    });
}

inline int add_const(Tape& t, int a, double c) {
    return t.push((t.value(a).array() + c).matrix(), t.needs_grad(a), [a](Tape& tp, int out) {
        if (tp.needs_grad(a)) tp.grad_ref(a) += tp.grad_ref(out);
    });
}

/// c - a for a constant matrix c.
inline int rsub_const(Tape& t, const Mat& c, int a) {
    if (c.rows() != t.value(a).rows() || c.cols() != t.value(a).cols()) {
        throw std::invalid_argument("rsub_const: shape mismatch");
    }
    return t.push(c - t.value(a), t.needs_grad(a), [a](Tape& tp, int out) {
        if (tp.needs_grad(a)) tp.grad_ref(a) -= tp.grad_ref(out);
    });
}

inline int relu(Tape& t, int a) {
    return t.push(t.value(a).cwiseMax(0.0), t.needs_grad(a), [a](Tape& tp, int out) {
        if (!tp.needs_grad(a)) return;
        tp.grad_ref(a).array() +=
            tp.grad_ref(out).array() * (tp.value(a).array() > 0.0).cast<double>();
    });
}

inline int leaky_relu(Tape& t, int a, double slope = 0.2) {
    Mat v = t.value(a).unaryExpr([slope](double x) { return x > 0.0 ? x : slope * x; });
    return t.push(std::move(v), t.needs_grad(a), [a, slope](Tape& tp, int out) {
        if (!tp.needs_grad(a)) return;
        tp.grad_ref(a).array() +=
            tp.grad_ref(out).array() *
            tp.value(a).array().unaryExpr([slope](double x) { return x > 0.0 ? 1.0 : slope; });
    });
}

inline int tanh_op(Tape& t, int a) {
    return t.push(t.value(a).array().tanh().matrix(), t.needs_grad(a), [a](Tape& tp, int out) {
        if (!tp.needs_grad(a)) return;
        tp.grad_ref(a).array() +=
            tp.grad_ref(out).array() * (1.0 - tp.value(out).array().square());
    });
}

/// pi * tanh(x); output strictly inside (-pi, pi).
inline int tanh_pi(Tape& t, int a) {
    return t.push((M_PI * t.value(a).array().tanh()).matrix(), t.needs_grad(a),
                  [a](Tape& tp, int out) {
        if (!tp.needs_grad(a)) return;
        tp.grad_ref(a).array() +=
            tp.grad_ref(out).array() *
            (M_PI - tp.value(out).array().square() / M_PI);
    });
}

/// 1 + softplus(x); output strictly greater than one for finite input.
inline int softplus_plus_one(Tape& t, int a) {
    Mat v = t.value(a).unaryExpr(
        [](double x) { return 1.0 + std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); });
    return t.push(std::move(v), t.needs_grad(a), [a](Tape& tp, int out) {
        if (!tp.needs_grad(a)) return;
        tp.grad_ref(a).array() +=
            tp.grad_ref(out).array() *
            tp.value(a).array().unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
    });
}

inline int exp_op(Tape& t, int a) {
    return t.push(t.value(a).array().exp().matrix(), t.needs_grad(a), [a](Tape& tp, int out) {
        if (!tp.needs_grad(a)) return;
        tp.grad_ref(a).array() += tp.grad_ref(out).array() * tp.value(out).array();
    });
}

inline int cos_op(Tape& t, int a) {
    return t.push(t.value(a).array().cos().matrix(), t.needs_grad(a), [a](Tape& tp, int out) {
        if (!tp.needs_grad(a)) return;
        tp.grad_ref(a).array() -= tp.grad_ref(out).array() * tp.value(a).array().sin();
    });
}

/// Clamp with zero gradient outside the open interval (lo, hi).
inline int clip(Tape& t, int a, double lo, double hi) {
    return t.push(t.value(a).cwiseMax(lo).cwiseMin(hi), t.needs_grad(a),
                  [a, lo, hi](Tape& tp, int out) {
                      if (!tp.needs_grad(a)) return;
                      const auto& x = tp.value(a).array();
                      tp.grad_ref(a).array() +=
                          tp.grad_ref(out).array() *
                          ((x > lo && x < hi).cast<double>());
                  });
}

/// Elementwise minimum; ties route the gradient to the first argument.
inline int minimum(Tape& t, int a, int b) {
    const bool ng = t.needs_grad(a) || t.needs_grad(b);
    return t.push(t.value(a).cwiseMin(t.value(b)), ng, [a, b](Tape& tp, int out) {
        const auto& g = tp.grad_ref(out).array();
        const auto take_a = (tp.value(a).array() <= tp.value(b).array()).cast<double>();
        if (tp.needs_grad(a)) tp.grad_ref(a).array() += g * take_a;
        if (tp.needs_grad(b)) tp.grad_ref(b).array() += g * (1.0 - take_a);
    });
}

// ---------------------------------------------------------------------------
// Reductions, reshaping, normalization
// ---------------------------------------------------------------------------

inline int sum_all(Tape& t, int a) {
    Mat v(1, 1);
    v(0, 0) = t.value(a).sum();
    return t.push(std::move(v), t.needs_grad(a), [a](Tape& tp, int out) {
        if (tp.needs_grad(a)) tp.grad_ref(a).array() += tp.grad_ref(out)(0, 0);
    });
}

inline int mean_all(Tape& t, int a) {
    const double inv = 1.0 / static_cast<double>(t.value(a).size());
    Mat v(1, 1);
    v(0, 0) = t.value(a).sum() * inv;
    return t.push(std::move(v), t.needs_grad(a), [a, inv](Tape& tp, int out) {
        if (tp.needs_grad(a)) tp.grad_ref(a).array() += tp.grad_ref(out)(0, 0) * inv;
    });
}

/// Column means: n x d -> 1 x d.
inline int mean_rows(Tape& t, int a) {
    const double inv = 1.0 / static_cast<double>(t.value(a).rows());
    return t.push(t.value(a).colwise().mean(), t.needs_grad(a), [a, inv](Tape& tp, int out) {
        if (!tp.needs_grad(a)) return;
        tp.grad_ref(a) += Mat::Ones(tp.value(a).rows(), 1) * (tp.grad_ref(out) * inv);
    });
}

/// Column sums: n x d -> 1 x d.
inline int sum_rows(Tape& t, int a) {
    return t.push(t.value(a).colwise().sum(), t.needs_grad(a), [a](Tape& tp, int out) {
        if (!tp.needs_grad(a)) return;
        tp.grad_ref(a) += Mat::Ones(tp.value(a).rows(), 1) * tp.grad_ref(out);
    });
}

inline int concat_cols(Tape& t, const std::vector<int>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: empty");
    const Eigen::Index rows = t.value(parts[0]).rows();
    Eigen::Index cols = 0;
    bool ng = false;
    for (int p : parts) {
        if (t.value(p).rows() != rows) throw std::invalid_argument("concat_cols: row mismatch");
        cols += t.value(p).cols();
        ng = ng || t.needs_grad(p);
    }
    Mat v(rows, cols);
    Eigen::Index at = 0;
    for (int p : parts) {
        v.middleCols(at, t.value(p).cols()) = t.value(p);
        at += t.value(p).cols();
    }
    return t.push(std::move(v), ng, [parts](Tape& tp, int out) {
        const Mat& g = tp.grad_ref(out);
        Eigen::Index at2 = 0;
        for (int p : parts) {
            const Eigen::Index w = tp.value(p).cols();
            if (tp.needs_grad(p)) tp.grad_ref(p) += g.middleCols(at2, w);
            at2 += w;
        }
    });
}

inline int gather_rows(Tape& t, int a, const std::vector<int>& idx) {
    Mat v(static_cast<Eigen::Index>(idx.size()), t.value(a).cols());
    for (std::size_t k = 0; k < idx.size(); ++k) v.row(k) = t.value(a).row(idx[k]);
    return t.push(std::move(v), t.needs_grad(a), [a, idx](Tape& tp, int out) {
        if (!tp.needs_grad(a)) return;
        Mat& g = tp.grad_ref(a);
        const Mat& go = tp.grad_ref(out);
        for (std::size_t k = 0; k < idx.size(); ++k) g.row(idx[k]) += go.row(k);
    });
}

/// Softmax across each row.
inline int row_softmax(Tape& t, int a) {
    Mat v = t.value(a);
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
        const double m = v.row(r).maxCoeff();
        v.row(r) = (v.row(r).array() - m).exp();
        v.row(r) /= v.row(r).sum();
    }
    return t.push(std::move(v), t.needs_grad(a), [a](Tape& tp, int out) {
        if (!tp.needs_grad(a)) return;
        const Mat& s = tp.value(out);
        const Mat& g = tp.grad_ref(out);
        Mat& ga = tp.grad_ref(a);
        for (Eigen::Index r = 0; r < s.rows(); ++r) {
            const double dot = g.row(r).dot(s.row(r));
            ga.row(r).array() += (g.row(r).array() - dot) * s.row(r).array();
        }
    });
}

/// Softmax over contiguous segments of an m x 1 column.
inline int segment_softmax(Tape& t, int a, const std::vector<std::pair<int, int>>& ranges) {
    if (t.value(a).cols() != 1) throw std::invalid_argument("segment_softmax: need a column");
    Mat v = t.value(a);
    for (const auto& [lo, hi] : ranges) {
        const auto seg = v.col(0).segment(lo, hi - lo);
        const double m = seg.maxCoeff();
        v.col(0).segment(lo, hi - lo) = (seg.array() - m).exp();
        v.col(0).segment(lo, hi - lo) /= v.col(0).segment(lo, hi - lo).sum();
    }
    return t.push(std::move(v), t.needs_grad(a), [a, ranges](Tape& tp, int out) {
        if (!tp.needs_grad(a)) return;
        const Mat& s = tp.value(out);
        const Mat& g = tp.grad_ref(out);
        Mat& ga = tp.grad_ref(a);
        for (const auto& [lo, hi] : ranges) {
            const auto sseg = s.col(0).segment(lo, hi - lo);
            const auto gseg = g.col(0).segment(lo, hi - lo);
            const double dot = gseg.dot(sseg);
            ga.col(0).segment(lo, hi - lo).array() +=
                (gseg.array() - dot) * sseg.array();
        }
    });
}

/// out.row(n) = sum over entries k in segment n of w(k) * x.row(k).
inline int segment_weighted_sum(Tape& t, int w, int x,
                                const std::vector<std::pair<int, int>>& ranges) {
    if (t.value(w).cols() != 1 || t.value(w).rows() != t.value(x).rows()) {
        throw std::invalid_argument("segment_weighted_sum: weight column mismatch");
    }
    Mat v = Mat::Zero(static_cast<Eigen::Index>(ranges.size()), t.value(x).cols());
    for (std::size_t n = 0; n < ranges.size(); ++n) {
        for (int k = ranges[n].first; k < ranges[n].second; ++k) {
            v.row(n) += t.value(w)(k, 0) * t.value(x).row(k);
        }
    }
    const bool ng = t.needs_grad(w) || t.needs_grad(x);
    return t.push(std::move(v), ng, [w, x, ranges](Tape& tp, int out) {
        const Mat& g = tp.grad_ref(out);
        for (std::size_t n = 0; n < ranges.size(); ++n) {
            for (int k = ranges[n].first; k < ranges[n].second; ++k) {
                if (tp.needs_grad(w)) {
                    tp.grad_ref(w)(k, 0) += g.row(n).dot(tp.value(x).row(k));
                }
                if (tp.needs_grad(x)) {
                    tp.grad_ref(x).row(k) += tp.value(w)(k, 0) * g.row(n);
                }
            }
        }
    });
}

/// Row-wise layer normalization with learned gain and offset.
inline int layer_norm_rows(Tape& t, int a, int gamma, int beta, double eps = 1e-5) {
    const Eigen::Index d = t.value(a).cols();
    if (t.value(gamma).cols() != d || t.value(beta).cols() != d) {
        throw std::invalid_argument("layer_norm_rows: gain/offset width mismatch");
    }
    const Mat& x = t.value(a);
    Mat xhat(x.rows(), d);
    std::vector<double> inv_std(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double mu = x.row(r).mean();
        const double var = (x.row(r).array() - mu).square().mean();
        inv_std[r] = 1.0 / std::sqrt(var + eps);
        xhat.row(r) = (x.row(r).array() - mu) * inv_std[r];
    }
    Mat v(x.rows(), d);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        v.row(r) = xhat.row(r).cwiseProduct(t.value(gamma).row(0)) + t.value(beta).row(0);
    }
    const bool ng = t.needs_grad(a) || t.needs_grad(gamma) || t.needs_grad(beta);
    return t.push(std::move(v), ng,
                  [a, gamma, beta, xhat, inv_std](Tape& tp, int out) {
                      const Mat& g = tp.grad_ref(out);
                      if (tp.needs_grad(beta)) tp.grad_ref(beta) += g.colwise().sum();
                      if (tp.needs_grad(gamma)) {
                          tp.grad_ref(gamma) +=
                              (g.array() * xhat.array()).colwise().sum().matrix();
                      }
                      if (!tp.needs_grad(a)) return;
                      Mat& ga = tp.grad_ref(a);
                      using RowArr = Eigen::Array<double, 1, Eigen::Dynamic>;
                      const RowArr gam = tp.value(gamma).row(0).array();
                      for (Eigen::Index r = 0; r < g.rows(); ++r) {
                          const RowArr gh = g.row(r).array() * gam;
                          const RowArr xh = xhat.row(r).array();
                          const double mean_gh = gh.mean();
                          const double mean_ghx = (gh * xh).mean();
                          ga.row(r).array() +=
                              inv_std[r] * (gh - mean_gh - xh * mean_ghx);
                      }
                  });
}

// ---------------------------------------------------------------------------
// Distribution-specific operations
// ---------------------------------------------------------------------------

/// Elementwise log I0(kappa); d/dk = I1/I0.
inline int log_i0(Tape& t, int a) {
    Mat v = t.value(a).unaryExpr([](double k) { return log_bessel_i0(k); });
    return t.push(std::move(v), t.needs_grad(a), [a](Tape& tp, int out) {
        if (!tp.needs_grad(a)) return;
        tp.grad_ref(a).array() +=
            tp.grad_ref(out).array() *
            tp.value(a).array().unaryExpr([](double k) { return bessel_i1_over_i0(k); });
    });
}

/// Elementwise von Mises entropy of kappa; d/dk = -k * d(I1/I0)/dk.
inline int vonmises_entropy_op(Tape& t, int a) {
    Mat v = t.value(a).unaryExpr([](double k) {
        return -k * bessel_i1_over_i0(k) + std::log(2.0 * M_PI) + log_bessel_i0(k);
    });
    return t.push(std::move(v), t.needs_grad(a), [a](Tape& tp, int out) {
        if (!tp.needs_grad(a)) return;
        tp.grad_ref(a).array() +=
            tp.grad_ref(out).array() *
            tp.value(a).array().unaryExpr(
                [](double k) { return -k * bessel_ratio_derivative(k); });
    });
}

}  // namespace wakelab::nn
