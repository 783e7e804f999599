#pragma once

#include <cstddef>
#include <vector>

#include "dkt/encoding.hpp"
#include "dkt/matrix.hpp"
#include "dkt/predictions.hpp"
#include "dkt/rng.hpp"

namespace dkt {

// LSTM variant with sigmoid cell input and a readout taken from the cell
// state:
//   i_t = sigmoid(W_ix x_t + W_ih h_{t-1} + b_i)
//   g_t = sigmoid(W_gx x_t + W_gh h_{t-1} + b_g)
//   f_t = sigmoid(W_fx x_t + W_fh h_{t-1} + b_f)
//   o_t = sigmoid(W_ox x_t + W_oh h_{t-1} + b_o)
//   m_t = f_t * m_{t-1} + i_t * g_t
//   h_t = o_t * m_t
//   y_t = sigmoid(W_zm m~_t + b_z)
// Dropout (m~_t) applies only on the readout path. h0 and m0 are learned.
struct LstmParams {
    std::size_t hidden_dim = 0;  // H
    std::size_t input_dim = 0;   // D
    std::size_t output_dim = 0;  // M

    Matrix w_ix, w_gx, w_fx, w_ox;  // H x D
    Matrix w_ih, w_gh, w_fh, w_oh;  // H x H
    std::vector<double> b_i, b_g, b_f, b_o;  // H
    Matrix w_zm;                   // M x H
    std::vector<double> b_z;       // M
    std::vector<double> h0, m0;    // H

    static LstmParams zeros(std::size_t h, std::size_t d, std::size_t m) {
        LstmParams p;
        p.hidden_dim = h;
        p.input_dim = d;
        p.output_dim = m;
        for (Matrix* w : {&p.w_ix, &p.w_gx, &p.w_fx, &p.w_ox}) *w = Matrix(h, d);
        for (Matrix* w : {&p.w_ih, &p.w_gh, &p.w_fh, &p.w_oh}) *w = Matrix(h, h);
        for (auto* v : {&p.b_i, &p.b_g, &p.b_f, &p.b_o}) v->assign(h, 0.0);
        p.w_zm = Matrix(m, h);
        p.b_z.assign(m, 0.0);
        p.h0.assign(h, 0.0);
        p.m0.assign(h, 0.0);
        return p;
    }

    void set_zero() {
        for (Matrix* w : {&w_ix, &w_gx, &w_fx, &w_ox, &w_ih, &w_gh, &w_fh, &w_oh, &w_zm})
            std::fill(w->data().begin(), w->data().end(), 0.0);
        for (auto* v : {&b_i, &b_g, &b_f, &b_o, &b_z, &h0, &m0})
            std::fill(v->begin(), v->end(), 0.0);
    }
};

inline LstmParams init_lstm(std::size_t h, std::size_t d, std::size_t m, Rng& rng) {
    LstmParams p = LstmParams::zeros(h, d, m);
    for (Matrix* w : {&p.w_ix, &p.w_gx, &p.w_fx, &p.w_ox, &p.w_ih, &p.w_gh, &p.w_fh, &p.w_oh, &p.w_zm})
        for (double& x : w->data()) x = 0.01 * rng.normal();
    return p;
}

template <typename P, typename F>
void lstm_for_each_tensor(P& p, F&& f) {
    auto mat = [&](const char* name, auto& w) { f(name, w.data().data(), w.size(), w.rows(), w.cols()); };
    auto vec = [&](const char* name, auto& v) { f(name, v.data(), v.size(), v.size(), std::size_t{1}); };
    mat("w_ix", p.w_ix);
    mat("w_gx", p.w_gx);
    mat("w_fx", p.w_fx);
    mat("w_ox", p.w_ox);
    mat("w_ih", p.w_ih);
    mat("w_gh", p.w_gh);
    mat("w_fh", p.w_fh);
    mat("w_oh", p.w_oh);
    vec("b_i", p.b_i);
    vec("b_g", p.b_g);
    vec("b_f", p.b_f);
    vec("b_o", p.b_o);
    mat("w_zm", p.w_zm);
    vec("b_z", p.b_z);
    vec("h0", p.h0);
    vec("m0", p.m0);
}

struct LstmForwardResult {
    // Gate and state traces, one row per timestep; kept for backprop.
    std::vector<std::vector<double>> gate_i, gate_g, gate_f, gate_o;
    std::vector<std::vector<double>> cell;    // m_t
    std::vector<std::vector<double>> hidden;  // h_t
    PredictionSeries outputs;
};

inline LstmForwardResult lstm_forward(const LstmParams& p, const std::vector<EncodedInput>& inputs,
                                      const std::vector<double>* readout_scale = nullptr) {
    const std::size_t h_dim = p.hidden_dim;
    LstmForwardResult r;
    const std::size_t steps = inputs.size();
    for (auto* v : {&r.gate_i, &r.gate_g, &r.gate_f, &r.gate_o, &r.cell, &r.hidden}) v->reserve(steps);
    r.outputs.y.reserve(steps);

    std::vector<double> h = p.h0;
    std::vector<double> m = p.m0;
    std::vector<double> ai(h_dim), ag(h_dim), af(h_dim), ao(h_dim), m_read(h_dim);
    for (const auto& x : inputs) {
        if (x.dim != p.input_dim) {
            fail(ErrorCode::DimensionMismatch,
                 "lstm_forward: input dim " + std::to_string(x.dim) + " != " + std::to_string(p.input_dim));
        }
        ai = p.b_i;
        ag = p.b_g;
        af = p.b_f;
        ao = p.b_o;
        input_matvec_add(p.w_ix, x, ai.data());
        input_matvec_add(p.w_gx, x, ag.data());
        input_matvec_add(p.w_fx, x, af.data());
        input_matvec_add(p.w_ox, x, ao.data());
        matvec_add(p.w_ih, h.data(), ai.data());
        matvec_add(p.w_gh, h.data(), ag.data());
        matvec_add(p.w_fh, h.data(), af.data());
        matvec_add(p.w_oh, h.data(), ao.data());
        for (std::size_t j = 0; j < h_dim; ++j) {
            ai[j] = sigmoid(ai[j]);
            ag[j] = sigmoid(ag[j]);
            af[j] = sigmoid(af[j]);
            ao[j] = sigmoid(ao[j]);
            m[j] = af[j] * m[j] + ai[j] * ag[j];
            h[j] = ao[j] * m[j];
        }
        r.gate_i.push_back(ai);
        r.gate_g.push_back(ag);
        r.gate_f.push_back(af);
        r.gate_o.push_back(ao);
        r.cell.push_back(m);
        r.hidden.push_back(h);

        m_read = m;
        if (readout_scale) {
            for (std::size_t j = 0; j < h_dim; ++j) m_read[j] *= (*readout_scale)[j];
        }
        std::vector<double> z = p.b_z;
        matvec_add(p.w_zm, m_read.data(), z.data());
        for (double& v : z) v = sigmoid(v);
        r.outputs.y.push_back(std::move(z));
    }
    return r;
}

inline double lstm_backward(const LstmParams& p, const std::vector<EncodedInput>& inputs,
                            const std::vector<LossTarget>& targets,
                            const std::vector<double>* readout_scale, LstmParams& grads) {
    const std::size_t h_dim = p.hidden_dim;
    const std::size_t m_dim = p.output_dim;
    const auto fwd = lstm_forward(p, inputs, readout_scale);

    double loss = 0.0;
    std::vector<std::vector<double>> dz(inputs.size());
    for (const auto& t : targets) {
        const double y = fwd.outputs.y[t.step][static_cast<std::size_t>(t.exercise)];
        loss += bce(y, t.answer);
        if (dz[t.step].empty()) dz[t.step].assign(m_dim, 0.0);
        dz[t.step][static_cast<std::size_t>(t.exercise)] += y - static_cast<double>(t.answer);
    }

    std::vector<double> dh(h_dim, 0.0), dm_carry(h_dim, 0.0);
    std::vector<double> dm(h_dim), m_read(h_dim), dm_read(h_dim);
    std::vector<double> dai(h_dim), dag(h_dim), daf(h_dim), dao(h_dim);
    for (std::size_t ti = inputs.size(); ti-- > 0;) {
        const auto& i_t = fwd.gate_i[ti];
        const auto& g_t = fwd.gate_g[ti];
        const auto& f_t = fwd.gate_f[ti];
        const auto& o_t = fwd.gate_o[ti];
        const auto& m_t = fwd.cell[ti];
        const std::vector<double>& m_prev = ti == 0 ? p.m0 : fwd.cell[ti - 1];
        const std::vector<double>& h_prev = ti == 0 ? p.h0 : fwd.hidden[ti - 1];

        // readout path
        for (std::size_t j = 0; j < h_dim; ++j) dm[j] = dm_carry[j] + dh[j] * o_t[j];
        if (!dz[ti].empty()) {
            const double* d = dz[ti].data();
            m_read = m_t;
            if (readout_scale) {
                for (std::size_t j = 0; j < h_dim; ++j) m_read[j] *= (*readout_scale)[j];
            }
            for (std::size_t j = 0; j < m_dim; ++j) grads.b_z[j] += d[j];
            outer_add(grads.w_zm, d, m_read.data());
            std::fill(dm_read.begin(), dm_read.end(), 0.0);
            matvec_transpose_add(p.w_zm, d, dm_read.data());
            if (readout_scale) {
                for (std::size_t j = 0; j < h_dim; ++j) dm[j] += dm_read[j] * (*readout_scale)[j];
            } else {
                for (std::size_t j = 0; j < h_dim; ++j) dm[j] += dm_read[j];
            }
        }

        for (std::size_t j = 0; j < h_dim; ++j) {
            const double do_j = dh[j] * m_t[j];
            const double di_j = dm[j] * g_t[j];
            const double dg_j = dm[j] * i_t[j];
            const double df_j = dm[j] * m_prev[j];
            dm_carry[j] = dm[j] * f_t[j];
            dai[j] = di_j * i_t[j] * (1.0 - i_t[j]);
            dag[j] = dg_j * g_t[j] * (1.0 - g_t[j]);
            daf[j] = df_j * f_t[j] * (1.0 - f_t[j]);
            dao[j] = do_j * o_t[j] * (1.0 - o_t[j]);
        }
        for (std::size_t j = 0; j < h_dim; ++j) {
            grads.b_i[j] += dai[j];
            grads.b_g[j] += dag[j];
            grads.b_f[j] += daf[j];
            grads.b_o[j] += dao[j];
        }
        input_outer_add(grads.w_ix, dai.data(), inputs[ti]);
        input_outer_add(grads.w_gx, dag.data(), inputs[ti]);
        input_outer_add(grads.w_fx, daf.data(), inputs[ti]);
        input_outer_add(grads.w_ox, dao.data(), inputs[ti]);
        outer_add(grads.w_ih, dai.data(), h_prev.data());
        outer_add(grads.w_gh, dag.data(), h_prev.data());
        outer_add(grads.w_fh, daf.data(), h_prev.data());
        outer_add(grads.w_oh, dao.data(), h_prev.data());
        std::fill(dh.begin(), dh.end(), 0.0);
        matvec_transpose_add(p.w_ih, dai.data(), dh.data());
        matvec_transpose_add(p.w_gh, dag.data(), dh.data());
        matvec_transpose_add(p.w_fh, daf.data(), dh.data());
        matvec_transpose_add(p.w_oh, dao.data(), dh.data());
    }
    for (std::size_t j = 0; j < h_dim; ++j) {
        grads.h0[j] += dh[j];
        grads.m0[j] += dm_carry[j];
    }
    return loss;
}

}  // namespace dkt
