#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dkt/model.hpp"
#include "dkt/types.hpp"

namespace dkt {

struct TrainConfig {
    ModelKind kind = ModelKind::Lstm;
    std::size_t hidden_dim = 200;
    std::size_t minibatch_size = 100;
    double learning_rate = 0.01;
    std::size_t epochs = 25;
    double dropout_keep = 0.5;      // keep probability; 1.0 disables dropout
    double clip_threshold = 100.0;  // global gradient norm
    std::uint64_t seed = 42;
    int threads = 1;

    void validate() const {
        if (dropout_keep <= 0.0 || dropout_keep > 1.0)
            fail(ErrorCode::InvalidArgument, "dropout keep probability must be in (0, 1]");
        if (clip_threshold <= 0.0) fail(ErrorCode::InvalidArgument, "clip threshold must be > 0");
        if (minibatch_size < 1) fail(ErrorCode::InvalidArgument, "minibatch size must be >= 1");
        if (hidden_dim < 1) fail(ErrorCode::InvalidArgument, "hidden dim must be >= 1");
        if (threads < 1) fail(ErrorCode::InvalidArgument, "threads must be >= 1");
    }
};

struct TrainResult {
    Model model;
    std::vector<double> epoch_loss;  // summed training loss per epoch
};

// Flat (pointer, length) view over every tensor of a parameter struct.
// Pointers stay valid as long as the struct's shape is untouched.
using TensorSpans = std::vector<std::pair<double*, std::size_t>>;

inline TensorSpans tensor_spans(RnnParams& p) {
    TensorSpans s;
    rnn_for_each_tensor(p, [&](const char*, double* d, std::size_t n, std::size_t, std::size_t) {
        s.push_back({d, n});
    });
    return s;
}

inline TensorSpans tensor_spans(LstmParams& p) {
    TensorSpans s;
    lstm_for_each_tensor(p, [&](const char*, double* d, std::size_t n, std::size_t, std::size_t) {
        s.push_back({d, n});
    });
    return s;
}

namespace detail {

// Inverted-dropout readout scale: entry is 1/keep with probability keep,
// else 0. Train-time activations are scaled up so inference needs none.
inline std::vector<double> sample_dropout_scale(std::size_t h_dim, double keep, Rng rng) {
    std::vector<double> scale(h_dim);
    const double inv = 1.0 / keep;
    for (auto& s : scale) s = rng.bernoulli(keep) ? inv : 0.0;
    return scale;
}

inline void spans_add(const TensorSpans& dst, const TensorSpans& src) {
    for (std::size_t k = 0; k < dst.size(); ++k)
        for (std::size_t i = 0; i < dst[k].second; ++i) dst[k].first[i] += src[k].first[i];
}

inline void spans_axpy(const TensorSpans& dst, double a, const TensorSpans& src) {
    for (std::size_t k = 0; k < dst.size(); ++k)
        for (std::size_t i = 0; i < dst[k].second; ++i) dst[k].first[i] += a * src[k].first[i];
}

template <typename Params, typename BackwardFn>
void sgd_epochs(Params& params, const TrainConfig& cfg, const Rng& base_rng,
                const std::vector<std::vector<EncodedInput>>& inputs,
                const std::vector<std::vector<LossTarget>>& targets, BackwardFn backward,
                std::vector<double>& epoch_loss_out) {
    const int threads =
        static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.threads),
                                               std::max<std::size_t>(inputs.size(), 1)));
    const bool use_dropout = cfg.dropout_keep < 1.0;

    Params batch_grads = params;
    batch_grads.set_zero();
    const TensorSpans param_spans = tensor_spans(params);
    const TensorSpans batch_spans = tensor_spans(batch_grads);

    // One gradient buffer per worker lane; lanes are summed in student
    // order so the result is identical for any thread count.
    std::vector<Params> lane_grads(static_cast<std::size_t>(threads), batch_grads);
    std::vector<TensorSpans> lane_spans;
    std::vector<double> lane_loss(static_cast<std::size_t>(threads), 0.0);
    for (auto& g : lane_grads) lane_spans.push_back(tensor_spans(g));

    std::vector<std::size_t> order(inputs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng = base_rng.derive2(0x5bf, epoch);
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;

        for (std::size_t start = 0; start < order.size(); start += cfg.minibatch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.minibatch_size);
            for (auto& [d, n] : batch_spans) std::fill(d, d + n, 0.0);
            double batch_loss = 0.0;

            for (std::size_t pos = start; pos < stop; pos += static_cast<std::size_t>(threads)) {
                const std::size_t lanes =
                    std::min<std::size_t>(static_cast<std::size_t>(threads), stop - pos);
                auto work = [&](std::size_t lane) {
                    const std::size_t u = order[pos + lane];
                    std::vector<double> scale;
                    const std::vector<double>* scale_ptr = nullptr;
                    if (use_dropout) {
                        scale = sample_dropout_scale(cfg.hidden_dim, cfg.dropout_keep,
                                                     base_rng.derive2(epoch + 1, u));
                        scale_ptr = &scale;
                    }
                    lane_grads[lane].set_zero();
                    lane_loss[lane] = backward(params, inputs[u], targets[u], scale_ptr, lane_grads[lane]);
                };
                if (lanes == 1) {
                    work(0);
                } else {
                    std::vector<std::thread> pool;
                    pool.reserve(lanes);
                    for (std::size_t l = 0; l < lanes; ++l) pool.emplace_back(work, l);
                    for (auto& t : pool) t.join();
                }
                for (std::size_t l = 0; l < lanes; ++l) {
                    batch_loss += lane_loss[l];
                    spans_add(batch_spans, lane_spans[l]);
                }
            }

            clip_gradients(batch_grads, cfg.clip_threshold);
            spans_axpy(param_spans, -cfg.learning_rate, batch_spans);
            epoch_loss += batch_loss;
        }

        if (!std::isfinite(epoch_loss)) {
            fail(ErrorCode::Diverged,
                 "training diverged (non-finite loss) at epoch " + std::to_string(epoch + 1));
        }
        epoch_loss_out.push_back(epoch_loss);
    }
}

}  // namespace detail

// Minibatch SGD on the summed next-step log loss (Deep Knowledge Tracing
// training). Per-student gradients within a minibatch are summed, the
// batch gradient is clipped by global norm, and a constant learning rate
// is applied. Dropout masks are resampled per sequence per epoch from a
// stream derived from (seed, epoch, sequence index), so the trained model
// is a pure function of (data, scheme, config) regardless of `threads`.
inline TrainResult train(const std::vector<InteractionSequence>& sequences,
                         const EncodingScheme& scheme, const TrainConfig& cfg) {
    cfg.validate();

    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < sequences.size(); ++i)
        if (sequences[i].size() >= 2) usable.push_back(i);
    if (usable.empty())
        fail(ErrorCode::SequenceTooShort, "training needs at least one sequence of length >= 2");

    const std::size_t m_dim = scheme.exercise_count();
    const std::size_t d_dim = scheme.input_dim();
    Rng rng(cfg.seed);

    TrainResult result;
    result.model.kind = cfg.kind;
    result.model.scheme = scheme;
    if (cfg.kind == ModelKind::Rnn) {
        result.model.rnn = init_rnn(cfg.hidden_dim, d_dim, m_dim, rng);
    } else {
        result.model.lstm = init_lstm(cfg.hidden_dim, d_dim, m_dim, rng);
    }

    // Encodings and targets are pure functions of the data; build once.
    std::vector<std::vector<EncodedInput>> inputs(usable.size());
    std::vector<std::vector<LossTarget>> targets(usable.size());
    for (std::size_t u = 0; u < usable.size(); ++u) {
        const auto& seq = sequences[usable[u]];
        std::vector<Interaction> fed(seq.steps.begin(), seq.steps.end() - 1);
        inputs[u] = scheme.encode_all(fed);
        targets[u] = targets_from_sequence(seq);
    }

    if (cfg.kind == ModelKind::Rnn) {
        detail::sgd_epochs(result.model.rnn, cfg, rng, inputs, targets,
                           [](const RnnParams& p, const std::vector<EncodedInput>& x,
                              const std::vector<LossTarget>& t, const std::vector<double>* s,
                              RnnParams& g) { return rnn_backward(p, x, t, s, g); },
                           result.epoch_loss);
    } else {
        detail::sgd_epochs(result.model.lstm, cfg, rng, inputs, targets,
                           [](const LstmParams& p, const std::vector<EncodedInput>& x,
                              const std::vector<LossTarget>& t, const std::vector<double>* s,
                              LstmParams& g) { return lstm_backward(p, x, t, s, g); },
                           result.epoch_loss);
    }
    return result;
}

}  // namespace dkt
