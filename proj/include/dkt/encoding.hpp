#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dkt/error.hpp"
#include "dkt/matrix.hpp"
#include "dkt/rng.hpp"
#include "dkt/types.hpp"

namespace dkt {

enum class EncodingVariant { OneHot, CompressedGaussian };

// Model input for one interaction. One-hot inputs are kept sparse (a
// single hot index into a 2M-dimensional vector); compressed inputs carry
// the dense code vector. The model forward/backward passes dispatch on
// this so one-hot training never touches the 2M-wide zero columns.
struct EncodedInput {
    int hot = -1;               // >= 0: one-hot at this index
    std::vector<double> dense;  // used when hot < 0
    std::size_t dim = 0;

    bool is_hot() const { return hot >= 0; }
};

// Compressed input width for M distinct exercises: a 1-sparse signal in
// 2M dimensions is recoverable from O(log 2M) random projections; the
// constant 4 plus a floor of 16 keeps nearest-row decoding exact at any
// realistic M.
inline std::size_t default_compressed_dim(std::size_t exercise_count) {
    const double bits = std::log2(2.0 * static_cast<double>(exercise_count));
    const auto n = static_cast<std::size_t>(std::ceil(4.0 * bits));
    return n < 16 ? 16 : n;
}

// Fixed map from interaction tuples (q, a) to model input vectors.
// Index convention: tuple (q, a) occupies slot q + a*M, i.e. incorrect
// answers fill the first M slots and correct answers the second M. Model
// files depend on this convention.
class EncodingScheme {
public:
    static EncodingScheme one_hot(std::size_t exercise_count) {
        EncodingScheme s;
        s.variant_ = EncodingVariant::OneHot;
        s.exercise_count_ = exercise_count;
        return s;
    }

    static EncodingScheme compressed_gaussian(std::size_t exercise_count,
                                              std::size_t compressed_dim,
                                              std::uint64_t seed) {
        if (compressed_dim < 1) fail(ErrorCode::InvalidArgument, "compressed_dim must be >= 1");
        EncodingScheme s;
        s.variant_ = EncodingVariant::CompressedGaussian;
        s.exercise_count_ = exercise_count;
        s.compressed_dim_ = compressed_dim;
        s.seed_ = seed;
        Rng rng(seed);
        s.code_table_ = gaussian_matrix(rng, 2 * exercise_count, compressed_dim);
        return s;
    }

    EncodingVariant variant() const { return variant_; }
    std::size_t exercise_count() const { return exercise_count_; }
    std::size_t compressed_dim() const { return compressed_dim_; }
    std::uint64_t seed() const { return seed_; }
    const Matrix& code_table() const { return code_table_; }

    // Model input dimension D.
    std::size_t input_dim() const {
        return variant_ == EncodingVariant::OneHot ? 2 * exercise_count_ : compressed_dim_;
    }

    EncodedInput encode(const Interaction& it) const {
        if (it.exercise < 0 || static_cast<std::size_t>(it.exercise) >= exercise_count_) {
            fail(ErrorCode::IndexOutOfRange,
                 "encode: exercise " + std::to_string(it.exercise) + " not in [0, " +
                     std::to_string(exercise_count_) + ")");
        }
        const std::size_t slot =
            static_cast<std::size_t>(it.exercise) + static_cast<std::size_t>(it.correct) * exercise_count_;
        EncodedInput in;
        in.dim = input_dim();
        if (variant_ == EncodingVariant::OneHot) {
            in.hot = static_cast<int>(slot);
        } else {
            in.dense.assign(code_table_.row(slot), code_table_.row(slot) + compressed_dim_);
        }
        return in;
    }

    std::vector<EncodedInput> encode_all(const std::vector<Interaction>& steps) const {
        std::vector<EncodedInput> out;
        out.reserve(steps.size());
        for (const auto& it : steps) out.push_back(encode(it));
        return out;
    }

    // Index of the code-table row nearest to `v` in Euclidean distance.
    // With one-hot inputs this inverts the slot directly.
    std::size_t nearest_code(const std::vector<double>& v) const {
        if (variant_ == EncodingVariant::OneHot) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < v.size(); ++i)
                if (v[i] > v[best]) best = i;
            return best;
        }
        std::size_t best = 0;
        double best_d2 = 0.0;
        for (std::size_t r = 0; r < code_table_.rows(); ++r) {
            double d2 = 0.0;
            const double* row = code_table_.row(r);
            for (std::size_t c = 0; c < compressed_dim_; ++c) {
                const double d = row[c] - v[c];
                d2 += d * d;
            }
            if (r == 0 || d2 < best_d2) {
                best = r;
                best_d2 = d2;
            }
        }
        return best;
    }

private:
    EncodingVariant variant_ = EncodingVariant::OneHot;
    std::size_t exercise_count_ = 0;
    std::size_t compressed_dim_ = 0;
    std::uint64_t seed_ = 0;
    Matrix code_table_;  // 2M x N, CompressedGaussian only
};

// out += W x for an encoded input; one-hot inputs reduce to a column pick.
inline void input_matvec_add(const Matrix& w, const EncodedInput& x, double* out) {
    if (x.is_hot()) {
        const auto c = static_cast<std::size_t>(x.hot);
        for (std::size_t r = 0; r < w.rows(); ++r) out[r] += w(r, c);
    } else {
        matvec_add(w, x.dense.data(), out);
    }
}

// G += d x^T for an encoded input; one-hot inputs touch a single column.
inline void input_outer_add(Matrix& g, const double* d, const EncodedInput& x) {
    if (x.is_hot()) {
        const auto c = static_cast<std::size_t>(x.hot);
        for (std::size_t r = 0; r < g.rows(); ++r) g(r, c) += d[r];
    } else {
        outer_add(g, d, x.dense.data());
    }
}

// One-hot vector of length M marking which exercise is answered next.
inline std::vector<double> target_mask(std::size_t exercise_count, int q_next) {
    if (q_next < 0 || static_cast<std::size_t>(q_next) >= exercise_count) {
        fail(ErrorCode::IndexOutOfRange,
             "target_mask: index " + std::to_string(q_next) + " not in [0, " +
                 std::to_string(exercise_count) + ")");
    }
    std::vector<double> v(exercise_count, 0.0);
    v[static_cast<std::size_t>(q_next)] = 1.0;
    return v;
}

}  // namespace dkt
