#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "dkt/encoding.hpp"
#include "dkt/lstm.hpp"
#include "dkt/rnn.hpp"

namespace dkt {

enum class ModelKind { Rnn, Lstm };

inline const char* model_kind_name(ModelKind k) { return k == ModelKind::Rnn ? "rnn" : "lstm"; }

// Trained knowledge-tracing model: parameters, the input encoding they
// were trained with, and the exercise tag names of the dataset.
struct Model {
    ModelKind kind = ModelKind::Lstm;
    RnnParams rnn;
    LstmParams lstm;
    EncodingScheme scheme;
    std::vector<std::string> tags;

    std::size_t hidden_dim() const { return kind == ModelKind::Rnn ? rnn.hidden_dim : lstm.hidden_dim; }
    std::size_t input_dim() const { return kind == ModelKind::Rnn ? rnn.input_dim : lstm.input_dim; }
    std::size_t output_dim() const { return kind == ModelKind::Rnn ? rnn.output_dim : lstm.output_dim; }

    const std::vector<double>& readout_bias() const { return kind == ModelKind::Rnn ? rnn.b_y : lstm.b_z; }
};

template <typename M, typename F>
void model_for_each_tensor(M& model, F&& f) {
    if (model.kind == ModelKind::Rnn) {
        rnn_for_each_tensor(model.rnn, f);
    } else {
        lstm_for_each_tensor(model.lstm, f);
    }
}

// Recurrent state that advances one interaction at a time; `cell` is used
// by the LSTM only. Mirrors the batch forward passes bit for bit.
struct ModelState {
    std::vector<double> hidden;
    std::vector<double> cell;
};

inline ModelState initial_state(const Model& m) {
    ModelState s;
    if (m.kind == ModelKind::Rnn) {
        s.hidden = m.rnn.h0;
    } else {
        s.hidden = m.lstm.h0;
        s.cell = m.lstm.m0;
    }
    return s;
}

inline void advance_state(const Model& m, ModelState& s, const EncodedInput& x) {
    if (m.kind == ModelKind::Rnn) {
        const auto& p = m.rnn;
        if (x.dim != p.input_dim)
            fail(ErrorCode::DimensionMismatch, "advance_state: input dim mismatch");
        std::vector<double> pre = p.b_h;
        input_matvec_add(p.w_hx, x, pre.data());
        matvec_add(p.w_hh, s.hidden.data(), pre.data());
        for (std::size_t i = 0; i < p.hidden_dim; ++i) s.hidden[i] = std::tanh(pre[i]);
    } else {
        const auto& p = m.lstm;
        if (x.dim != p.input_dim)
            fail(ErrorCode::DimensionMismatch, "advance_state: input dim mismatch");
        const std::size_t h_dim = p.hidden_dim;
        std::vector<double> ai = p.b_i, ag = p.b_g, af = p.b_f, ao = p.b_o;
        input_matvec_add(p.w_ix, x, ai.data());
        input_matvec_add(p.w_gx, x, ag.data());
        input_matvec_add(p.w_fx, x, af.data());
        input_matvec_add(p.w_ox, x, ao.data());
        matvec_add(p.w_ih, s.hidden.data(), ai.data());
        matvec_add(p.w_gh, s.hidden.data(), ag.data());
        matvec_add(p.w_fh, s.hidden.data(), af.data());
        matvec_add(p.w_oh, s.hidden.data(), ao.data());
        for (std::size_t j = 0; j < h_dim; ++j) {
            ai[j] = sigmoid(ai[j]);
            ag[j] = sigmoid(ag[j]);
            af[j] = sigmoid(af[j]);
            ao[j] = sigmoid(ao[j]);
            s.cell[j] = af[j] * s.cell[j] + ai[j] * ag[j];
            s.hidden[j] = ao[j] * s.cell[j];
        }
    }
}

// Full probability vector y at the current state (dropout never applies
// at inference).
inline std::vector<double> readout_probs(const Model& m, const ModelState& s) {
    if (m.kind == ModelKind::Rnn) {
        std::vector<double> z = m.rnn.b_y;
        matvec_add(m.rnn.w_yh, s.hidden.data(), z.data());
        for (double& v : z) v = sigmoid(v);
        return z;
    }
    std::vector<double> z = m.lstm.b_z;
    matvec_add(m.lstm.w_zm, s.cell.data(), z.data());
    for (double& v : z) v = sigmoid(v);
    return z;
}

inline double readout_prob(const Model& m, const ModelState& s, int exercise) {
    const auto q = static_cast<std::size_t>(exercise);
    if (exercise < 0 || q >= m.output_dim())
        fail(ErrorCode::IndexOutOfRange, "readout_prob: exercise " + std::to_string(exercise));
    const Matrix& w = m.kind == ModelKind::Rnn ? m.rnn.w_yh : m.lstm.w_zm;
    const std::vector<double>& state = m.kind == ModelKind::Rnn ? s.hidden : s.cell;
    return sigmoid(m.readout_bias()[q] + dot(w.row(q), state.data(), m.hidden_dim()));
}

// One output vector per interaction of `steps`, dropout disabled.
inline PredictionSeries predict_series(const Model& m, const std::vector<Interaction>& steps) {
    PredictionSeries out;
    out.y.reserve(steps.size());
    ModelState s = initial_state(m);
    for (const auto& it : steps) {
        advance_state(m, s, m.scheme.encode(it));
        out.y.push_back(readout_probs(m, s));
    }
    return out;
}

// Probability the student answers `q_next` correctly after `history`.
inline double predict_next(const Model& m, const InteractionSequence& history, int q_next) {
    if (history.size() < 1) fail(ErrorCode::SequenceTooShort, "predict_next: empty history");
    if (q_next < 0 || static_cast<std::size_t>(q_next) >= m.output_dim())
        fail(ErrorCode::IndexOutOfRange, "predict_next: exercise " + std::to_string(q_next));
    ModelState s = initial_state(m);
    for (const auto& it : history.steps) advance_state(m, s, m.scheme.encode(it));
    return readout_prob(m, s, q_next);
}

template <typename F>
void for_each_tensor(RnnParams& p, F&& f) {
    rnn_for_each_tensor(p, std::forward<F>(f));
}

template <typename F>
void for_each_tensor(LstmParams& p, F&& f) {
    lstm_for_each_tensor(p, std::forward<F>(f));
}

// Global L2 norm over every tensor of a parameter/gradient struct.
template <typename P>
double global_norm(P& params_or_grads) {
    double sum = 0.0;
    for_each_tensor(params_or_grads, [&](const char*, const double* d, std::size_t n, std::size_t,
                                         std::size_t) {
        for (std::size_t i = 0; i < n; ++i) sum += d[i] * d[i];
    });
    return std::sqrt(sum);
}

// Rescale all gradients so their global L2 norm is at most `threshold`.
// Returns the pre-clip norm.
template <typename P>
double clip_gradients(P& grads, double threshold) {
    if (threshold <= 0.0) fail(ErrorCode::InvalidArgument, "clip threshold must be > 0");
    const double norm = global_norm(grads);
    if (norm > threshold) {
        const double scale = threshold / norm;
        for_each_tensor(grads, [&](const char*, double* d, std::size_t n, std::size_t, std::size_t) {
            for (std::size_t i = 0; i < n; ++i) d[i] *= scale;
        });
    }
    return norm;
}

}  // namespace dkt
