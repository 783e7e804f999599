#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "dkt/encoding.hpp"
#include "dkt/matrix.hpp"
#include "dkt/predictions.hpp"
#include "dkt/rng.hpp"

namespace dkt {

// Vanilla recurrent network:
//   h_t = tanh(W_hx x_t + W_hh h_{t-1} + b_h)
//   y_t = sigmoid(W_yh h~_t + b_y)
// where h~_t is h_t with dropout applied on the readout path only; the
// recurrence always sees the undropped h_t. h0 is a learned parameter.
struct RnnParams {
    std::size_t hidden_dim = 0;  // H
    std::size_t input_dim = 0;   // D
    std::size_t output_dim = 0;  // M

    Matrix w_hx;               // H x D
    Matrix w_hh;               // H x H
    std::vector<double> b_h;   // H
    std::vector<double> h0;    // H
    Matrix w_yh;               // M x H
    std::vector<double> b_y;   // M

    static RnnParams zeros(std::size_t h, std::size_t d, std::size_t m) {
        RnnParams p;
        p.hidden_dim = h;
        p.input_dim = d;
        p.output_dim = m;
        p.w_hx = Matrix(h, d);
        p.w_hh = Matrix(h, h);
        p.b_h.assign(h, 0.0);
        p.h0.assign(h, 0.0);
        p.w_yh = Matrix(m, h);
        p.b_y.assign(m, 0.0);
        return p;
    }

    void set_zero() {
        auto z = [](std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); };
        z(w_hx.data());
        z(w_hh.data());
        z(b_h);
        z(h0);
        z(w_yh.data());
        z(b_y);
    }
};

// Weight matrices start at N(0, 0.01); biases and the learned initial
// state start at zero.
inline RnnParams init_rnn(std::size_t h, std::size_t d, std::size_t m, Rng& rng) {
    RnnParams p = RnnParams::zeros(h, d, m);
    for (double& x : p.w_hx.data()) x = 0.01 * rng.normal();
    for (double& x : p.w_hh.data()) x = 0.01 * rng.normal();
    for (double& x : p.w_yh.data()) x = 0.01 * rng.normal();
    return p;
}

// Uniform view over every parameter tensor, in the order the model file
// stores them. Vectors report cols == 1.
template <typename P, typename F>
void rnn_for_each_tensor(P& p, F&& f) {
    f("w_hx", p.w_hx.data().data(), p.w_hx.size(), p.w_hx.rows(), p.w_hx.cols());
    f("w_hh", p.w_hh.data().data(), p.w_hh.size(), p.w_hh.rows(), p.w_hh.cols());
    f("b_h", p.b_h.data(), p.b_h.size(), p.b_h.size(), std::size_t{1});
    f("h0", p.h0.data(), p.h0.size(), p.h0.size(), std::size_t{1});
    f("w_yh", p.w_yh.data().data(), p.w_yh.size(), p.w_yh.rows(), p.w_yh.cols());
    f("b_y", p.b_y.data(), p.b_y.size(), p.b_y.size(), std::size_t{1});
}

struct RnnForwardResult {
    std::vector<std::vector<double>> hidden;  // T x H
    PredictionSeries outputs;                 // T x M
};

// `readout_scale` applies inverted dropout to the readout path: entry j is
// 0 (dropped) or 1/keep. Null means no dropout.
inline RnnForwardResult rnn_forward(const RnnParams& p, const std::vector<EncodedInput>& inputs,
                                    const std::vector<double>* readout_scale = nullptr) {
    const std::size_t h_dim = p.hidden_dim;
    RnnForwardResult r;
    r.hidden.reserve(inputs.size());
    r.outputs.y.reserve(inputs.size());

    std::vector<double> h = p.h0;
    std::vector<double> pre(h_dim);
    std::vector<double> h_read(h_dim);
    for (const auto& x : inputs) {
        if (x.dim != p.input_dim) {
            fail(ErrorCode::DimensionMismatch,
                 "rnn_forward: input dim " + std::to_string(x.dim) + " != " + std::to_string(p.input_dim));
        }
        pre = p.b_h;
        input_matvec_add(p.w_hx, x, pre.data());
        matvec_add(p.w_hh, h.data(), pre.data());
        for (std::size_t i = 0; i < h_dim; ++i) h[i] = std::tanh(pre[i]);
        r.hidden.push_back(h);

        h_read = h;
        if (readout_scale) {
            for (std::size_t i = 0; i < h_dim; ++i) h_read[i] *= (*readout_scale)[i];
        }
        std::vector<double> z = p.b_y;
        matvec_add(p.w_yh, h_read.data(), z.data());
        for (double& v : z) v = sigmoid(v);
        r.outputs.y.push_back(std::move(z));
    }
    return r;
}

// Exact backpropagation through time for the summed next-step log loss.
// Gradients are accumulated into `grads` (caller zeroes); returns the
// loss over `targets`.
inline double rnn_backward(const RnnParams& p, const std::vector<EncodedInput>& inputs,
                           const std::vector<LossTarget>& targets,
                           const std::vector<double>* readout_scale, RnnParams& grads) {
    const std::size_t h_dim = p.hidden_dim;
    const std::size_t m_dim = p.output_dim;
    const auto fwd = rnn_forward(p, inputs, readout_scale);

    double loss = 0.0;
    // dz[t] holds the loss gradient at the readout pre-activation.
    std::vector<std::vector<double>> dz(inputs.size());
    for (const auto& t : targets) {
        const double y = fwd.outputs.y[t.step][static_cast<std::size_t>(t.exercise)];
        loss += bce(y, t.answer);
        if (dz[t.step].empty()) dz[t.step].assign(m_dim, 0.0);
        dz[t.step][static_cast<std::size_t>(t.exercise)] += y - static_cast<double>(t.answer);
    }

    std::vector<double> dh_carry(h_dim, 0.0);
    std::vector<double> dpre(h_dim);
    std::vector<double> h_read(h_dim);
    std::vector<double> dh_read(h_dim);
    for (std::size_t ti = inputs.size(); ti-- > 0;) {
        const std::vector<double>& h_t = fwd.hidden[ti];
        if (!dz[ti].empty()) {
            const double* d = dz[ti].data();
            h_read = h_t;
            if (readout_scale) {
                for (std::size_t i = 0; i < h_dim; ++i) h_read[i] *= (*readout_scale)[i];
            }
            for (std::size_t i = 0; i < m_dim; ++i) grads.b_y[i] += d[i];
            outer_add(grads.w_yh, d, h_read.data());
            std::fill(dh_read.begin(), dh_read.end(), 0.0);
            matvec_transpose_add(p.w_yh, d, dh_read.data());
            if (readout_scale) {
                for (std::size_t i = 0; i < h_dim; ++i) dh_carry[i] += dh_read[i] * (*readout_scale)[i];
            } else {
                for (std::size_t i = 0; i < h_dim; ++i) dh_carry[i] += dh_read[i];
            }
        }
        for (std::size_t i = 0; i < h_dim; ++i) dpre[i] = dh_carry[i] * (1.0 - h_t[i] * h_t[i]);
        for (std::size_t i = 0; i < h_dim; ++i) grads.b_h[i] += dpre[i];
        input_outer_add(grads.w_hx, dpre.data(), inputs[ti]);
        const std::vector<double>& h_prev = ti == 0 ? p.h0 : fwd.hidden[ti - 1];
        outer_add(grads.w_hh, dpre.data(), h_prev.data());
        std::fill(dh_carry.begin(), dh_carry.end(), 0.0);
        matvec_transpose_add(p.w_hh, dpre.data(), dh_carry.data());
    }
    for (std::size_t i = 0; i < h_dim; ++i) grads.h0[i] += dh_carry[i];
    return loss;
}

}  // namespace dkt
