#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dkt/dataset.hpp"
#include "dkt/model.hpp"

namespace dkt {

namespace detail {

inline constexpr const char* kModelMagic = "dktlab-model";
inline constexpr int kModelVersion = 1;

// %.17g: shortest text that round-trips an IEEE double bit-exactly.
inline void write_value(std::FILE* f, double v) { std::fprintf(f, "%.17g", v); }

struct NamedTensor {
    double* data = nullptr;
    std::size_t rows = 0, cols = 0;
    bool seen = false;
};

template <typename Params>
std::map<std::string, NamedTensor> tensor_table(Params& p) {
    std::map<std::string, NamedTensor> table;
    for_each_tensor(p, [&](const char* name, double* d, std::size_t, std::size_t rows, std::size_t cols) {
        table[name] = NamedTensor{d, rows, cols, false};
    });
    return table;
}

}  // namespace detail

inline void save_model(const std::string& path, const Model& model) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    std::fprintf(f, "%s %d\n", detail::kModelMagic, detail::kModelVersion);
    std::fprintf(f, "kind %s\n", model_kind_name(model.kind));
    std::fprintf(f, "dims %zu %zu %zu\n", model.hidden_dim(), model.input_dim(), model.output_dim());
    const auto& sch = model.scheme;
    if (sch.variant() == EncodingVariant::OneHot) {
        std::fprintf(f, "encoding onehot %zu\n", sch.exercise_count());
    } else {
        std::fprintf(f, "encoding gaussian %zu %zu %llu\n", sch.exercise_count(), sch.compressed_dim(),
                     static_cast<unsigned long long>(sch.seed()));
    }
    std::fprintf(f, "tags %zu\n", model.tags.size());
    for (const auto& t : model.tags) std::fprintf(f, "%s\n", t.c_str());

    auto write_tensor = [&](const char* name, const double* d, std::size_t, std::size_t rows,
                            std::size_t cols) {
        std::fprintf(f, "tensor %s %zu %zu\n", name, rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                if (c) std::fputc(' ', f);
                detail::write_value(f, d[r * cols + c]);
            }
            std::fputc('\n', f);
        }
    };
    if (model.kind == ModelKind::Rnn) {
        rnn_for_each_tensor(const_cast<RnnParams&>(model.rnn), write_tensor);
    } else {
        lstm_for_each_tensor(const_cast<LstmParams&>(model.lstm), write_tensor);
    }
    std::fprintf(f, "end\n");
    if (std::fclose(f) != 0) fail(ErrorCode::IoError, "error closing '" + path + "'");
}

inline Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
    auto bad = [&](const std::string& why) -> void {
        fail(ErrorCode::FormatError, "'" + path + "': " + why);
    };

    std::string line;
    auto next_line = [&]() -> std::string {
        if (!std::getline(in, line)) bad("unexpected end of file");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };

    {
        std::istringstream head(next_line());
        std::string magic;
        int version = 0;
        head >> magic >> version;
        if (magic != detail::kModelMagic) bad("not a model file");
        if (version != detail::kModelVersion)
            bad("unsupported version " + std::to_string(version) + " (expected " +
                std::to_string(detail::kModelVersion) + ")");
    }

    Model model;
    {
        std::istringstream k(next_line());
        std::string key, kind;
        k >> key >> kind;
        if (key != "kind" || (kind != "rnn" && kind != "lstm")) bad("bad kind line");
        model.kind = kind == "rnn" ? ModelKind::Rnn : ModelKind::Lstm;
    }
    std::size_t h = 0, d = 0, m = 0;
    {
        std::istringstream k(next_line());
        std::string key;
        k >> key >> h >> d >> m;
        if (key != "dims" || !k || h < 1 || d < 1 || m < 1) bad("bad dims line");
    }
    {
        std::istringstream k(next_line());
        std::string key, variant;
        k >> key >> variant;
        if (key != "encoding") bad("bad encoding line");
        if (variant == "onehot") {
            std::size_t em = 0;
            k >> em;
            if (!k || em != m) bad("encoding exercise count disagrees with dims");
            model.scheme = EncodingScheme::one_hot(em);
        } else if (variant == "gaussian") {
            std::size_t em = 0, n = 0;
            unsigned long long seed = 0;
            k >> em >> n >> seed;
            if (!k || em != m || n < 1) bad("bad gaussian encoding line");
            model.scheme = EncodingScheme::compressed_gaussian(em, n, seed);
        } else {
            bad("unknown encoding variant '" + variant + "'");
        }
        if (model.scheme.input_dim() != d) bad("encoding input dim disagrees with dims");
    }
    {
        std::istringstream k(next_line());
        std::string key;
        std::size_t count = 0;
        k >> key >> count;
        if (key != "tags" || !k || count != m) bad("bad tags line");
        model.tags.reserve(count);
        for (std::size_t i = 0; i < count; ++i) model.tags.push_back(next_line());
    }

    if (model.kind == ModelKind::Rnn) {
        model.rnn = RnnParams::zeros(h, d, m);
    } else {
        model.lstm = LstmParams::zeros(h, d, m);
    }
    auto table = model.kind == ModelKind::Rnn ? detail::tensor_table(model.rnn)
                                               : detail::tensor_table(model.lstm);

    while (true) {
        const std::string header = next_line();
        if (header == "end") break;
        std::istringstream k(header);
        std::string key, name;
        std::size_t rows = 0, cols = 0;
        k >> key >> name >> rows >> cols;
        if (key != "tensor" || !k) bad("bad tensor header '" + header + "'");
        auto it = table.find(name);
        if (it == table.end()) bad("unknown tensor '" + name + "'");
        if (it->second.seen) bad("duplicate tensor '" + name + "'");
        if (it->second.rows != rows || it->second.cols != cols)
            bad("tensor '" + name + "' has shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                ", expected " + std::to_string(it->second.rows) + "x" + std::to_string(it->second.cols));
        for (std::size_t r = 0; r < rows; ++r) {
            const std::string row = next_line();
            const char* p = row.c_str();
            char* endp = nullptr;
            for (std::size_t c = 0; c < cols; ++c) {
                const double v = std::strtod(p, &endp);
                if (endp == p) bad("tensor '" + name + "' row " + std::to_string(r) + ": corrupted number");
                if (!std::isfinite(v))
                    bad("tensor '" + name + "' row " + std::to_string(r) + ": non-finite value");
                it->second.data[r * cols + c] = v;
                p = endp;
            }
            while (*p == ' ' || *p == '\t') ++p;
            if (*p != '\0') bad("tensor '" + name + "' row " + std::to_string(r) + ": trailing data");
        }
        it->second.seen = true;
    }
    for (const auto& [name, t] : table)
        if (!t.seen) bad("missing tensor '" + name + "'");
    return model;
}

}  // namespace dkt
