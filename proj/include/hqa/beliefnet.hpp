#pragma once

// Stacked restricted Boltzmann machines. Visible and hidden units are
// Bernoulli; hidden probabilities are sigmoid(b_j + sum_i a_i W_ij), visible
// probabilities sigmoid(b_i + sum_j W_ij h_j). Learning is one-step
// contrastive divergence with momentum and weight decay; stacking feeds each
// level the previous level's hidden activation probabilities. Encoding is a
// deterministic probability forward pass, never a sample.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "hqa/matrix.hpp"
#include "hqa/rng.hpp"
#include "hqa/util.hpp"

namespace hqa::beliefnet {

using json = nlohmann::json;

struct RbmLayer {
    Matrix W;  // n_visible x n_hidden
    std::vector<double> visible_bias;
    std::vector<double> hidden_bias;

    std::size_t n_visible() const { return W.rows; }
    std::size_t n_hidden() const { return W.cols; }
};

struct TrainHyper {
    double learning_rate = 0.6;
    double weight_cost = 0.0002;
    double momentum_initial = 0.5;
    double momentum_final = 0.9;
    std::size_t momentum_switch_epoch = 5;
    std::size_t n_epochs = 50;
    std::size_t batch_size = 100;
    std::uint64_t seed = 0;
};

inline void validate(const TrainHyper& h) {
    if (h.learning_rate <= 0) throw ValidationError("learning_rate must be positive");
    if (h.momentum_initial < 0 || h.momentum_initial >= 1 || h.momentum_final < 0 ||
        h.momentum_final >= 1)
        throw ValidationError("momenta must lie in [0,1)");
    if (h.n_epochs < 1) throw ValidationError("n_epochs must be at least 1");
    if (h.batch_size < 1) throw ValidationError("batch_size must be at least 1");
}

struct CdStatistics {
    Matrix positive;  // <a_i h_j> over the data
    Matrix negative;  // <a_i h_j> over the one-step reconstruction
    double reconstruction_error = 0.0;  // mean cross-entropy per example
};

struct Velocity {
    Matrix w;
    std::vector<double> visible_bias;
    std::vector<double> hidden_bias;

    explicit Velocity(const RbmLayer& layer)
        : w(layer.n_visible(), layer.n_hidden()),
          visible_bias(layer.n_visible(), 0.0),
          hidden_bias(layer.n_hidden(), 0.0) {}
};

inline std::vector<double> hidden_probabilities(const RbmLayer& layer,
                                                const std::vector<double>& a) {
    if (a.size() != layer.n_visible()) throw ValidationError("hidden_probabilities: dim mismatch");
    std::vector<double> p(layer.n_hidden());
    for (std::size_t j = 0; j < layer.n_hidden(); ++j) p[j] = layer.hidden_bias[j];
    for (std::size_t i = 0; i < layer.n_visible(); ++i) {
        const double x = a[i];
        if (x == 0.0) continue;
        const double* wi = layer.W.row(i);
        for (std::size_t j = 0; j < layer.n_hidden(); ++j) p[j] += x * wi[j];
    }
    for (double& x : p) x = sigmoid(x);
    return p;
}

inline std::vector<double> visible_probabilities(const RbmLayer& layer,
                                                 const std::vector<double>& h) {
    if (h.size() != layer.n_hidden()) throw ValidationError("visible_probabilities: dim mismatch");
    std::vector<double> p(layer.n_visible());
    for (std::size_t i = 0; i < layer.n_visible(); ++i) {
        const double* wi = layer.W.row(i);
        double s = layer.visible_bias[i];
        for (std::size_t j = 0; j < layer.n_hidden(); ++j) s += wi[j] * h[j];
        p[i] = sigmoid(s);
    }
    return p;
}

inline std::vector<double> sample_bernoulli(const std::vector<double>& p, Rng& rng) {
    std::vector<double> s(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) s[i] = rng.bernoulli(p[i]) ? 1.0 : 0.0;
    return s;
}

namespace detail {

inline void sample_bernoulli_rows(const Matrix& p, Rng& rng, Matrix& out) {
    out = Matrix(p.rows, p.cols);
    for (std::size_t i = 0; i < p.v.size(); ++i) out.v[i] = rng.bernoulli(p.v[i]) ? 1.0 : 0.0;
}

inline double batch_cross_entropy(const Matrix& data, const Matrix& recon) {
    double total = 0.0;
    for (std::size_t i = 0; i < data.v.size(); ++i) {
        // Clamp keeps the log finite when a probability saturates in double.
        const double p = std::min(1.0 - 1e-12, std::max(1e-12, recon.v[i]));
        const double a = data.v[i];
        total -= a * std::log(p) + (1.0 - a) * std::log1p(-p);
    }
    return total / static_cast<double>(data.rows);
}

inline void check_finite(const RbmLayer& layer, std::size_t epoch, std::size_t batch) {
    for (double x : layer.W.v)
        if (!std::isfinite(x))
            throw RuntimeFailure("non-finite weight at epoch " + std::to_string(epoch) +
                                 ", batch " + std::to_string(batch));
}

}  // namespace detail

// One CD-1 update over a batch (rows of `batch` are visible vectors).
// Positive statistics pair the data with p(h|data); the negative phase takes
// one Gibbs step (sample h, mean-field reconstruction, p(h|recon)). The
// velocity carries momentum; weight decay applies to W only.
inline CdStatistics cd1_step(RbmLayer& layer, const Matrix& batch, const TrainHyper& hyper,
                             double momentum, Velocity& vel, Rng& rng, std::size_t epoch = 0,
                             std::size_t batch_index = 0) {
    if (batch.rows == 0 || batch.cols != layer.n_visible())
        throw ValidationError("cd1_step: batch dimension mismatch");
    const double n = static_cast<double>(batch.rows);

    Matrix ph;
    affine_rows(batch, layer.W, layer.hidden_bias, ph);
    sigmoid_in_place(ph);

    CdStatistics stats;
    accumulate_outer(batch, ph, stats.positive);
    for (double& x : stats.positive.v) x /= n;

    Matrix h;
    detail::sample_bernoulli_rows(ph, rng, h);

    const Matrix wt = transpose(layer.W);
    Matrix recon;
    affine_rows(h, wt, layer.visible_bias, recon);
    sigmoid_in_place(recon);

    Matrix nh;
    affine_rows(recon, layer.W, layer.hidden_bias, nh);
    sigmoid_in_place(nh);

    accumulate_outer(recon, nh, stats.negative);
    for (double& x : stats.negative.v) x /= n;

    stats.reconstruction_error = detail::batch_cross_entropy(batch, recon);

    const double lr = hyper.learning_rate;
    for (std::size_t i = 0; i < layer.W.v.size(); ++i) {
        vel.w.v[i] = momentum * vel.w.v[i] +
                     lr * (stats.positive.v[i] - stats.negative.v[i] -
                           hyper.weight_cost * layer.W.v[i]);
        layer.W.v[i] += vel.w.v[i];
    }
    for (std::size_t i = 0; i < layer.n_visible(); ++i) {
        double g = 0.0;
        for (std::size_t r = 0; r < batch.rows; ++r) g += batch(r, i) - recon(r, i);
        vel.visible_bias[i] = momentum * vel.visible_bias[i] + lr * g / n;
        layer.visible_bias[i] += vel.visible_bias[i];
    }
    for (std::size_t j = 0; j < layer.n_hidden(); ++j) {
        double g = 0.0;
        for (std::size_t r = 0; r < batch.rows; ++r) g += ph(r, j) - nh(r, j);
        vel.hidden_bias[j] = momentum * vel.hidden_bias[j] + lr * g / n;
        layer.hidden_bias[j] += vel.hidden_bias[j];
    }
    detail::check_finite(layer, epoch, batch_index);
    return stats;
}

struct RbmTrainLog {
    std::vector<double> epoch_error;  // mean reconstruction cross-entropy per example
};

// Weights start at N(0, 0.01^2), biases at zero; examples are reshuffled
// every epoch; momentum switches from its initial to its final value at
// momentum_switch_epoch.
inline RbmLayer train_rbm(const Matrix& data, std::size_t n_hidden, const TrainHyper& hyper,
                          RbmTrainLog* log = nullptr) {
    validate(hyper);
    if (data.rows == 0 || data.cols == 0) throw ValidationError("train_rbm: empty data");
    if (n_hidden == 0) throw ValidationError("train_rbm: n_hidden must be positive");

    RbmLayer layer;
    layer.W = Matrix(data.cols, n_hidden);
    layer.visible_bias.assign(data.cols, 0.0);
    layer.hidden_bias.assign(n_hidden, 0.0);
    Rng init_rng(derive_seed(hyper.seed, "rbm_init"));
    for (double& w : layer.W.v) w = init_rng.normal(0.0, 0.01);

    Velocity vel(layer);
    Rng train_rng(derive_seed(hyper.seed, "rbm_train"));
    std::vector<std::size_t> order(data.rows);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < hyper.n_epochs; ++epoch) {
        const double momentum = epoch < hyper.momentum_switch_epoch ? hyper.momentum_initial
                                                                    : hyper.momentum_final;
        train_rng.shuffle(order);
        double err_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < data.rows; start += hyper.batch_size) {
            const std::size_t size = std::min(hyper.batch_size, data.rows - start);
            Matrix batch(size, data.cols);
            for (std::size_t r = 0; r < size; ++r)
                std::memcpy(batch.row(r), data.row(order[start + r]), data.cols * sizeof(double));
            const auto stats =
                cd1_step(layer, batch, hyper, momentum, vel, train_rng, epoch, batch_index);
            err_sum += stats.reconstruction_error * static_cast<double>(size);
            ++batch_index;
        }
        if (log) log->epoch_error.push_back(err_sum / static_cast<double>(data.rows));
    }
    return layer;
}

struct DbnModel {
    std::vector<RbmLayer> layers;
    std::vector<std::size_t> layout;  // unit counts, length = layers + 1
    TrainHyper hyper;
    std::string input_vocabulary_ref;  // provenance of the visible dimension
    std::vector<RbmTrainLog> logs;
};

// Greedy layer-wise training: level l+1 trains on level l's hidden
// activation probabilities (real valued, never samples).
inline DbnModel train_dbn(const Matrix& data, const std::vector<std::size_t>& layout,
                          const TrainHyper& hyper) {
    validate(hyper);
    if (layout.size() < 2) throw ValidationError("train_dbn: layout needs at least two levels");
    if (data.cols != layout[0])
        throw ValidationError("train_dbn: layout[0] must equal the input dimension");
    for (std::size_t u : layout)
        if (u == 0) throw ValidationError("train_dbn: zero-width level");

    DbnModel model;
    model.layout = layout;
    model.hyper = hyper;
    Matrix current = data;
    for (std::size_t level = 0; level + 1 < layout.size(); ++level) {
        TrainHyper level_hyper = hyper;
        level_hyper.seed = derive_seed(hyper.seed, "dbn_level", level);
        RbmTrainLog log;
        RbmLayer layer = train_rbm(current, layout[level + 1], level_hyper, &log);
        Matrix next;
        affine_rows(current, layer.W, layer.hidden_bias, next);
        sigmoid_in_place(next);
        current = std::move(next);
        model.layers.push_back(std::move(layer));
        model.logs.push_back(std::move(log));
    }
    return model;
}

inline std::vector<double> encode(const DbnModel& m, const std::vector<double>& a) {
    if (a.size() != m.layout[0]) throw ValidationError("encode: dim mismatch");
    std::vector<double> v = a;
    for (const auto& layer : m.layers) v = hidden_probabilities(layer, v);
    return v;
}

inline Matrix encode_rows(const DbnModel& m, const Matrix& rows) {
    if (rows.cols != m.layout[0]) throw ValidationError("encode_rows: dim mismatch");
    Matrix v = rows;
    for (const auto& layer : m.layers) {
        Matrix next;
        affine_rows(v, layer.W, layer.hidden_bias, next);
        sigmoid_in_place(next);
        v = std::move(next);
    }
    return v;
}

// Test oracle: exact <a_i h_j> under the Boltzmann distribution by
// enumerating every joint state. Exponential in the unit count.
inline Matrix exact_rbm_statistics(const RbmLayer& layer) {
    const std::size_t nv = layer.n_visible();
    const std::size_t nh = layer.n_hidden();
    if (nv + nh > 24) throw ValidationError("exact_rbm_statistics: more than 24 units");

    const auto energy = [&](std::uint32_t a_bits, std::uint32_t h_bits) {
        double e = 0.0;
        for (std::size_t i = 0; i < nv; ++i) {
            if (!(a_bits >> i & 1u)) continue;
            e -= layer.visible_bias[i];
            const double* wi = layer.W.row(i);
            for (std::size_t j = 0; j < nh; ++j)
                if (h_bits >> j & 1u) e -= wi[j];
        }
        for (std::size_t j = 0; j < nh; ++j)
            if (h_bits >> j & 1u) e -= layer.hidden_bias[j];
        return e;
    };

    double min_energy = 0.0;
    for (std::uint32_t a = 0; a < (1u << nv); ++a)
        for (std::uint32_t h = 0; h < (1u << nh); ++h)
            min_energy = std::min(min_energy, energy(a, h));

    Matrix expectation(nv, nh);
    double z = 0.0;
    for (std::uint32_t a = 0; a < (1u << nv); ++a) {
        for (std::uint32_t h = 0; h < (1u << nh); ++h) {
            const double w = std::exp(-(energy(a, h) - min_energy));
            z += w;
            for (std::size_t i = 0; i < nv; ++i) {
                if (!(a >> i & 1u)) continue;
                for (std::size_t j = 0; j < nh; ++j)
                    if (h >> j & 1u) expectation(i, j) += w;
            }
        }
    }
    for (double& x : expectation.v) x /= z;
    return expectation;
}

// ---------------------------------------------------------------------------
// Persistence: versioned binary container plus a JSON sidecar of the header.

namespace detail {

constexpr char kMagic[8] = {'H', 'Q', 'A', 'D', 'B', 'N', '0', '1'};

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i) & 0xFF));
}

inline void put_f64(std::string& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(out, bits);
}

struct Reader {
    const std::string& data;
    std::size_t pos = 0;
    const std::string file;

    std::uint64_t u64() {
        if (pos + 8 > data.size()) throw ValidationError("truncated model file: " + file);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }

    double f64() {
        const std::uint64_t bits = u64();
        double d;
        std::memcpy(&d, &bits, 8);
        return d;
    }
};

}  // namespace detail

inline json hyper_to_json(const TrainHyper& h) {
    json j;
    j["learning_rate"] = h.learning_rate;
    j["weight_cost"] = h.weight_cost;
    j["momentum_initial"] = h.momentum_initial;
    j["momentum_final"] = h.momentum_final;
    j["momentum_switch_epoch"] = h.momentum_switch_epoch;
    j["n_epochs"] = h.n_epochs;
    j["batch_size"] = h.batch_size;
    j["seed"] = h.seed;
    return j;
}

inline TrainHyper hyper_from_json(const json& j) {
    TrainHyper h;
    h.learning_rate = j.at("learning_rate").get<double>();
    h.weight_cost = j.at("weight_cost").get<double>();
    h.momentum_initial = j.at("momentum_initial").get<double>();
    h.momentum_final = j.at("momentum_final").get<double>();
    h.momentum_switch_epoch = j.at("momentum_switch_epoch").get<std::size_t>();
    h.n_epochs = j.at("n_epochs").get<std::size_t>();
    h.batch_size = j.at("batch_size").get<std::size_t>();
    h.seed = j.at("seed").get<std::uint64_t>();
    return h;
}

inline void save_dbn(const DbnModel& m, const std::filesystem::path& path) {
    std::string out;
    out.append(detail::kMagic, 8);
    detail::put_u64(out, m.layout.size());
    for (std::size_t u : m.layout) detail::put_u64(out, u);
    detail::put_f64(out, m.hyper.learning_rate);
    detail::put_f64(out, m.hyper.weight_cost);
    detail::put_f64(out, m.hyper.momentum_initial);
    detail::put_f64(out, m.hyper.momentum_final);
    detail::put_u64(out, m.hyper.momentum_switch_epoch);
    detail::put_u64(out, m.hyper.n_epochs);
    detail::put_u64(out, m.hyper.batch_size);
    detail::put_u64(out, m.hyper.seed);
    for (const auto& layer : m.layers) {
        for (double w : layer.W.v) detail::put_f64(out, w);
        for (double b : layer.visible_bias) detail::put_f64(out, b);
        for (double b : layer.hidden_bias) detail::put_f64(out, b);
    }
    write_text_file_atomic(path, out);

    json sidecar;
    sidecar["format"] = "HQADBN01";
    sidecar["layout"] = m.layout;
    sidecar["hyper"] = hyper_to_json(m.hyper);
    sidecar["input_vocabulary"] = m.input_vocabulary_ref;
    write_text_file_atomic(path.string() + ".json", sidecar.dump(2) + "\n");
}

inline DbnModel load_dbn(const std::filesystem::path& path) {
    const std::string data = read_text_file(path);
    if (data.size() < 8 || std::memcmp(data.data(), detail::kMagic, 8) != 0)
        throw ValidationError("bad magic in model file: " + path.string());
    detail::Reader r{data, 8, path.string()};
    DbnModel m;
    const std::uint64_t levels = r.u64();
    if (levels < 2 || levels > 64)
        throw ValidationError("implausible layout in model file: " + path.string());
    for (std::uint64_t i = 0; i < levels; ++i)
        m.layout.push_back(static_cast<std::size_t>(r.u64()));
    m.hyper.learning_rate = r.f64();
    m.hyper.weight_cost = r.f64();
    m.hyper.momentum_initial = r.f64();
    m.hyper.momentum_final = r.f64();
    m.hyper.momentum_switch_epoch = static_cast<std::size_t>(r.u64());
    m.hyper.n_epochs = static_cast<std::size_t>(r.u64());
    m.hyper.batch_size = static_cast<std::size_t>(r.u64());
    m.hyper.seed = r.u64();
    for (std::size_t level = 0; level + 1 < m.layout.size(); ++level) {
        RbmLayer layer;
        const std::size_t nv = m.layout[level];
        const std::size_t nh = m.layout[level + 1];
        layer.W = Matrix(nv, nh);
        for (double& w : layer.W.v) w = r.f64();
        layer.visible_bias.resize(nv);
        for (double& b : layer.visible_bias) b = r.f64();
        layer.hidden_bias.resize(nh);
        for (double& b : layer.hidden_bias) b = r.f64();
        m.layers.push_back(std::move(layer));
    }
    if (r.pos != data.size())
        throw ValidationError("trailing bytes in model file: " + path.string());
    const auto sidecar_path = path.string() + ".json";
    if (std::filesystem::exists(sidecar_path)) {
        const json sidecar = json::parse(read_text_file(sidecar_path));
        m.input_vocabulary_ref = sidecar.value("input_vocabulary", "");
    }
    return m;
}

}  // namespace hqa::beliefnet
