#include "costarr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "costarr/rng.hpp"

namespace costarr {

namespace {

// Stream ids are (purpose << 32) | sub so unrelated draws never collide.
// Purposes: 1 mask deal, 2 mask extras, 3 active weights, 4 off-mask
// weights, 10+split known noise, 20+split unknown source class, 23+split
// boost tier, 26+split boost size, 29+split boost dims, 40+split unknown
// base noise (splits: 0 train, 1 test, 2 val).
constexpr std::uint64_t stream_id(std::uint64_t purpose, std::uint64_t sub = 0) {
    return (purpose << 32) | sub;
}

constexpr std::uint64_t kTrainSplit = 0, kTestSplit = 1, kValSplit = 2;

} // namespace

void SynthConfig::validate() const {
    if (num_classes < 2) throw ArgumentError("synth needs at least 2 classes");
    if (feature_dim < 4) throw ArgumentError("synth needs feature_dim >= 4");
    if (train_per_class < 1) throw ArgumentError("synth needs train_per_class >= 1");
    if (test_known < 1 || test_unknown < 1) throw ArgumentError("synth needs test_known >= 1 and test_unknown >= 1");
    if (!(active_frac > 0.0) || !(active_frac < 1.0))
        throw ArgumentError("active_frac must lie strictly between 0 and 1");
    if (!(unknown_boost > 0.0) || !std::isfinite(unknown_boost))
        throw ArgumentError("unknown_boost must be finite and positive");
    if (mask_size() >= feature_dim)
        throw ArgumentError("active_frac leaves no inactive dimensions at this feature_dim");
}

std::int64_t SynthConfig::mask_size() const {
    return static_cast<std::int64_t>(
        std::ceil(active_frac * static_cast<double>(feature_dim)));
}

namespace {

// Every dimension is dealt to exactly one class before any class tops up
// its mask with extra random dims, so whenever ceil(D/C) <= m each dim is
// active for at least one class.
std::vector<std::vector<std::int64_t>> build_masks(const SynthConfig& cfg) {
    const std::size_t C = static_cast<std::size_t>(cfg.num_classes);
    const std::size_t D = static_cast<std::size_t>(cfg.feature_dim);
    const std::size_t m = static_cast<std::size_t>(cfg.mask_size());

    std::vector<std::size_t> perm(D);
    std::iota(perm.begin(), perm.end(), 0);
    std::uint64_t ctr = 0;
    for (std::size_t i = D - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(rng::rand_u64(cfg.seed, stream_id(1), ctr++) % (i + 1));
        std::swap(perm[i], perm[j]);
    }

    std::vector<std::vector<std::int64_t>> active(C, std::vector<std::int64_t>(D, 0));
    std::vector<std::size_t> count(C, 0);
    for (std::size_t t = 0; t < D; ++t) {
        std::size_t j = t % C;
        if (count[j] < m) {
            active[j][perm[t]] = 1;
            ++count[j];
        }
    }

    for (std::size_t j = 0; j < C; ++j) {
        if (count[j] >= m) continue;
        std::vector<std::size_t> cand;
        cand.reserve(D);
        for (std::size_t k = 0; k < D; ++k)
            if (!active[j][k]) cand.push_back(k);
        std::size_t extra = m - count[j];
        for (std::size_t t = 0; t < extra; ++t) {
            std::size_t pick =
                t + static_cast<std::size_t>(rng::rand_u64(cfg.seed, stream_id(2, j), t) % (cand.size() - t));
            std::swap(cand[t], cand[pick]);
            active[j][cand[t]] = 1;
        }
    }
    return active;
}

void known_feature_row(const SynthConfig& cfg, const std::vector<std::int64_t>& mask, std::uint64_t purpose,
                       std::uint64_t sample, double* out) {
    const std::size_t D = static_cast<std::size_t>(cfg.feature_dim);
    std::uint64_t stream = stream_id(purpose, sample);
    for (std::size_t k = 0; k < D; ++k) {
        double base = mask[k] ? 1.0 : 0.1;
        out[k] = std::max(0.0, base + 0.2 * rng::normal(cfg.seed, stream, k));
    }
}

} // namespace

SynthData generate_synth(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t C = static_cast<std::size_t>(cfg.num_classes);
    const std::size_t D = static_cast<std::size_t>(cfg.feature_dim);
    const std::size_t m = static_cast<std::size_t>(cfg.mask_size());

    auto active = build_masks(cfg);

    SynthData data;
    data.masks = Tensor({C, D}, Dtype::i64);
    data.weights = Tensor({C, D}, Dtype::f64);
    data.bias = Tensor({C}, Dtype::f64);
    auto masks = data.masks.i64();
    auto w = data.weights.f64();
    for (std::size_t j = 0; j < C; ++j) {
        for (std::size_t k = 0; k < D; ++k) {
            masks[j * D + k] = active[j][k];
            if (active[j][k]) {
                w[j * D + k] = rng::uniform_open_range(cfg.seed, stream_id(3, j), k, 0.8, 1.2);
            } else {
                w[j * D + k] = 0.05 * rng::uniform01(cfg.seed, stream_id(4, j), k);
            }
        }
    }

    auto logits_of = [&](const Tensor& features) {
        std::size_t n = features.rows();
        Tensor logits({n, C}, Dtype::f64);
        auto l = logits.f64();
        auto f = features.f64();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < C; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < D; ++k) acc += f[i * D + k] * w[j * D + k];
                l[i * C + j] = acc; // bias is identically zero
            }
        }
        return logits;
    };

    auto make_known = [&](std::uint64_t split, std::size_t count, auto class_of) {
        Tensor features({count, D}, Dtype::f64);
        Tensor labels({count}, Dtype::i64);
        auto f = features.f64();
        auto y = labels.i64();
        for (std::size_t i = 0; i < count; ++i) {
            std::size_t c = class_of(i);
            y[i] = static_cast<std::int64_t>(c);
            known_feature_row(cfg, active[c], 10 + split, i, f.data() + i * D);
        }
        Tensor logits = logits_of(features);
        return LabeledSet{std::move(features), std::move(logits), std::move(labels)};
    };

    auto make_unknown_rows = [&](std::uint64_t split, std::size_t count, double* f, std::int64_t* y) {
        for (std::size_t i = 0; i < count; ++i) {
            std::size_t c = static_cast<std::size_t>(rng::rand_u64(cfg.seed, stream_id(20 + split), i) % C);
            double* row = f + i * D;
            known_feature_row(cfg, active[c], 40 + split, i, row);
            for (std::size_t k = 0; k < D; ++k) row[k] *= 0.8;

            // Boost size: one tier in four gets no off-mask energy at all
            // (a pure low-intensity impostor only the logit scale can
            // catch); the rest light up 1..s_max of the source class's
            // quiet dims. The D/8 cap keeps the strongest impostor logit
            // inside the known logit band instead of far above it, so
            // raw-logit scores are fooled rather than inverted.
            std::size_t s_max = std::max<std::size_t>(1, std::min(D - m, D / 8));
            std::uint64_t tier = rng::rand_u64(cfg.seed, stream_id(23 + split), i) % 4;
            std::size_t s = 0;
            if (tier != 0) {
                s = 1 + static_cast<std::size_t>(rng::rand_u64(cfg.seed, stream_id(26 + split), i) % s_max);
            }
            if (s > 0) {
                std::vector<std::size_t> quiet;
                quiet.reserve(D - m);
                for (std::size_t k = 0; k < D; ++k)
                    if (!active[c][k]) quiet.push_back(k);
                for (std::size_t t = 0; t < s; ++t) {
                    std::size_t pick = t + static_cast<std::size_t>(
                                               rng::rand_u64(cfg.seed, stream_id(29 + split, i), t) %
                                               (quiet.size() - t));
                    std::swap(quiet[t], quiet[pick]);
                    row[quiet[t]] += cfg.unknown_boost;
                }
            }
            y[i] = kUnknownLabel;
        }
    };

    auto make_eval_split = [&](std::uint64_t split) {
        std::size_t nk = static_cast<std::size_t>(cfg.test_known);
        std::size_t nu = static_cast<std::size_t>(cfg.test_unknown);
        Tensor features({nk + nu, D}, Dtype::f64);
        Tensor labels({nk + nu}, Dtype::i64);
        auto f = features.f64();
        auto y = labels.i64();
        for (std::size_t i = 0; i < nk; ++i) {
            std::size_t c = i % C;
            y[i] = static_cast<std::int64_t>(c);
            known_feature_row(cfg, active[c], 10 + split, i, f.data() + i * D);
        }
        make_unknown_rows(split, nu, f.data() + nk * D, y.data() + nk);
        Tensor logits = logits_of(features);
        return LabeledSet{std::move(features), std::move(logits), std::move(labels)};
    };

    std::size_t per = static_cast<std::size_t>(cfg.train_per_class);
    data.train = make_known(kTrainSplit, C * per, [&](std::size_t i) { return i / per; });
    data.test = make_eval_split(kTestSplit);
    data.val = make_eval_split(kValSplit);
    return data;
}

void save_synth(const SynthData& data, const SynthConfig& cfg, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

    write_tensor(data.weights, dir / "weights.cst");
    write_tensor(data.bias, dir / "bias.cst");
    write_tensor(data.masks, dir / "masks.cst");
    write_tensor(data.train.features, dir / "train_features.cst");
    write_tensor(data.train.logits, dir / "train_logits.cst");
    write_tensor(data.train.labels, dir / "train_labels.cst");
    write_tensor(data.val.features, dir / "val_features.cst");
    write_tensor(data.val.logits, dir / "val_logits.cst");
    write_tensor(data.val.labels, dir / "val_labels.cst");
    write_tensor(data.test.features, dir / "test_features.cst");
    write_tensor(data.test.logits, dir / "test_logits.cst");
    write_tensor(data.test.labels, dir / "test_labels.cst");

    std::ofstream f(dir / "synth_config.txt", std::ios::trunc);
    if (!f) throw IoError("cannot open " + (dir / "synth_config.txt").string() + " for writing");
    f << "seed=" << cfg.seed << "\n"
      << "num_classes=" << cfg.num_classes << "\n"
      << "feature_dim=" << cfg.feature_dim << "\n"
      << "train_per_class=" << cfg.train_per_class << "\n"
      << "test_known=" << cfg.test_known << "\n"
      << "test_unknown=" << cfg.test_unknown << "\n"
      << "active_frac=" << format_f64(cfg.active_frac) << "\n"
      << "unknown_boost=" << format_f64(cfg.unknown_boost) << "\n";
    f.flush();
    if (!f) throw IoError("write failure on " + (dir / "synth_config.txt").string());
}

} // namespace costarr
