#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "costarr/fit.hpp"
#include "costarr/metrics.hpp"
#include "costarr/score.hpp"
#include "costarr/synth.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace costarr;

namespace {

SynthConfig small_config() {
    SynthConfig cfg;
    cfg.seed = 9;
    cfg.num_classes = 8;
    cfg.feature_dim = 32;
    cfg.train_per_class = 20;
    cfg.test_known = 160;
    cfg.test_unknown = 160;
    cfg.active_frac = 0.2; // mask size 7
    return cfg;
}

} // namespace

TEST_CASE("synth generation is deterministic and seed-sensitive") {
    SynthConfig cfg = small_config();
    SynthData a = generate_synth(cfg);
    SynthData b = generate_synth(cfg);

    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
    CHECK(a.masks == b.masks);
    CHECK(a.train.features == b.train.features);
    CHECK(a.train.logits == b.train.logits);
    CHECK(a.train.labels == b.train.labels);
    CHECK(a.val.features == b.val.features);
    CHECK(a.test.features == b.test.features);
    CHECK(a.test.logits == b.test.logits);

    SynthConfig other = cfg;
    other.seed = 10;
    SynthData c = generate_synth(other);
    CHECK(c.weights != a.weights);
    CHECK(c.test.features != a.test.features);

    // The val split mirrors the test split's composition, not its draws.
    CHECK(a.val.features.dims() == a.test.features.dims());
    CHECK(a.val.features != a.test.features);
}

TEST_CASE("synth shapes and label layout") {
    SynthConfig cfg = small_config();
    SynthData d = generate_synth(cfg);
    const auto C = static_cast<std::size_t>(cfg.num_classes);
    const auto D = static_cast<std::size_t>(cfg.feature_dim);
    const auto per = static_cast<std::size_t>(cfg.train_per_class);
    const auto nk = static_cast<std::size_t>(cfg.test_known);
    const auto nu = static_cast<std::size_t>(cfg.test_unknown);

    CHECK(d.weights.dims() == std::vector<std::uint64_t>{C, D});
    CHECK(d.weights.dtype() == Dtype::f64);
    CHECK(d.bias.dims() == std::vector<std::uint64_t>{C});
    CHECK(d.masks.dims() == std::vector<std::uint64_t>{C, D});
    CHECK(d.masks.dtype() == Dtype::i64);
    for (double v : d.bias.f64()) CHECK(v == 0.0);

    CHECK(d.train.size() == C * per);
    CHECK(d.train.feature_dim() == D);
    CHECK(d.train.num_classes() == C);
    for (std::size_t i = 0; i < d.train.size(); ++i)
        CHECK(d.train.label(i) == static_cast<std::int64_t>(i / per));

    for (const LabeledSet* s : {&d.test, &d.val}) {
        CHECK(s->size() == nk + nu);
        CHECK(s->num_classes() == C);
        for (std::size_t i = 0; i < nk; ++i) CHECK(s->label(i) == static_cast<std::int64_t>(i % C));
        for (std::size_t i = nk; i < nk + nu; ++i) CHECK(s->label(i) == kUnknownLabel);
    }

    SUBCASE("features are non-negative") {
        for (double v : d.train.features.f64()) CHECK(v >= 0.0);
        for (double v : d.test.features.f64()) CHECK(v >= 0.0);
    }
}

TEST_CASE("masks cover every dimension and weights echo them") {
    SynthConfig cfg = small_config();
    SynthData d = generate_synth(cfg);
    const auto C = static_cast<std::size_t>(cfg.num_classes);
    const auto D = static_cast<std::size_t>(cfg.feature_dim);
    const auto m = static_cast<std::size_t>(cfg.mask_size());
    auto masks = d.masks.i64();
    auto w = d.weights.f64();

    SUBCASE("each class activates exactly mask_size dims") {
        for (std::size_t j = 0; j < C; ++j) {
            std::size_t row = 0;
            for (std::size_t k = 0; k < D; ++k) {
                CHECK((masks[j * D + k] == 0 || masks[j * D + k] == 1));
                row += static_cast<std::size_t>(masks[j * D + k]);
            }
            CHECK(row == m);
        }
    }
    SUBCASE("every dimension is active for at least one class") {
        // ceil(D/C) = 4 <= m = 7, so the dealing pass covers all dims.
        for (std::size_t k = 0; k < D; ++k) {
            std::int64_t any = 0;
            for (std::size_t j = 0; j < C; ++j) any |= masks[j * D + k];
            CHECK(any == 1);
        }
    }
    SUBCASE("active weights lie in (0.8, 1.2], inactive in [0, 0.05)") {
        for (std::size_t j = 0; j < C; ++j) {
            for (std::size_t k = 0; k < D; ++k) {
                double v = w[j * D + k];
                if (masks[j * D + k]) {
                    CHECK(v > 0.8);
                    CHECK(v <= 1.2);
                } else {
                    CHECK(v >= 0.0);
                    CHECK(v < 0.05);
                }
            }
        }
    }
    SUBCASE("per-dimension spread separates activated from attenuated weights") {
        for (std::size_t k = 0; k < D; ++k) {
            double mn = 2.0, mx = -1.0;
            bool any_active = false, any_inactive = false;
            for (std::size_t j = 0; j < C; ++j) {
                mn = std::min(mn, w[j * D + k]);
                mx = std::max(mx, w[j * D + k]);
                (masks[j * D + k] ? any_active : any_inactive) = true;
            }
            if (any_active) CHECK(mx > 0.8);
            if (any_inactive) CHECK(mn < 0.05);
        }
    }
}

TEST_CASE("two classes at half density split the dimensions exactly") {
    SynthConfig cfg;
    cfg.seed = 5;
    cfg.num_classes = 2;
    cfg.feature_dim = 4;
    cfg.train_per_class = 3;
    cfg.test_known = 4;
    cfg.test_unknown = 4;
    cfg.active_frac = 0.5; // mask size 2, dealt round-robin: disjoint, complete
    SynthData d = generate_synth(cfg);
    auto masks = d.masks.i64();
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(masks[k] + masks[4 + k] == 1); // exactly one class owns each dim
    }
}

TEST_CASE("saved logits equal the feature-weight product") {
    SynthConfig cfg = small_config();
    SynthData d = generate_synth(cfg);
    const auto C = static_cast<std::size_t>(cfg.num_classes);
    const auto D = static_cast<std::size_t>(cfg.feature_dim);
    auto w = d.weights.f64();

    for (const LabeledSet* s : {&d.train, &d.test}) {
        auto f = s->features.f64();
        for (std::size_t i = 0; i < s->size(); i += 7) { // sample rows
            for (std::size_t j = 0; j < C; ++j) {
                double acc = 0.0; // reverse order: independent of the generator's sum
                for (std::size_t k = D; k-- > 0;) acc += f[i * D + k] * w[j * D + k];
                double got = s->logits.at_f64(i * C + j);
                CHECK(std::abs(got - acc) <= 1e-9 * std::max(1.0, std::abs(acc)));
            }
        }
    }
}

TEST_CASE("unknowns differ from their twin run only by the boost on quiet dims") {
    SynthConfig cfg;
    cfg.seed = 17;
    cfg.num_classes = 6;
    cfg.feature_dim = 40; // mask 4, boost subset of at most min(36, 5) = 5 dims
    cfg.train_per_class = 2;
    cfg.test_known = 4;
    cfg.test_unknown = 400;
    cfg.active_frac = 0.1;

    SynthConfig hi = cfg, lo = cfg;
    hi.unknown_boost = 4.0;
    lo.unknown_boost = 2.0;
    SynthData dh = generate_synth(hi);
    SynthData dl = generate_synth(lo);
    const auto C = static_cast<std::size_t>(cfg.num_classes);
    const auto D = static_cast<std::size_t>(cfg.feature_dim);
    const auto nk = static_cast<std::size_t>(cfg.test_known);
    const auto nu = static_cast<std::size_t>(cfg.test_unknown);

    // Everything before the unknowns is independent of the boost value.
    CHECK(dh.weights == dl.weights);
    CHECK(dh.masks == dl.masks);
    CHECK(dh.train.features == dl.train.features);

    auto fh = dh.test.features.f64();
    auto fl = dl.test.features.f64();
    auto masks = dh.masks.i64();
    std::size_t zero_tier = 0;
    for (std::size_t i = nk; i < nk + nu; ++i) {
        std::vector<std::size_t> boosted;
        for (std::size_t k = 0; k < D; ++k) {
            double diff = fh[i * D + k] - fl[i * D + k];
            if (diff == 0.0) {
                CHECK(fh[i * D + k] == fl[i * D + k]); // bit-equal base elsewhere
            } else {
                CHECK(std::abs(diff - 2.0) <= 1e-12); // boost delta 4 - 2
                boosted.push_back(k);
            }
        }
        CHECK(boosted.size() <= 5);
        if (boosted.empty()) {
            ++zero_tier;
            continue;
        }
        // Some class (the source) has none of the boosted dims active;
        // for every such class the logit shift stays under 0.05 per unit
        // of boost per dim, the attenuation cap.
        bool found_quiet_class = false;
        for (std::size_t j = 0; j < C; ++j) {
            std::int64_t overlap = 0;
            for (std::size_t k : boosted) overlap += masks[j * D + k];
            if (overlap != 0) continue;
            found_quiet_class = true;
            double dlog = dh.test.logits.at_f64(i * C + j) - dl.test.logits.at_f64(i * C + j);
            CHECK(dlog >= -1e-9);
            CHECK(dlog <= 0.05 * 2.0 * static_cast<double>(boosted.size()) + 1e-9);
        }
        CHECK(found_quiet_class);
    }

    // One tier in four carries no boost at all.
    double frac = static_cast<double>(zero_tier) / static_cast<double>(nu);
    CHECK(frac > 0.15);
    CHECK(frac < 0.35);
}

TEST_CASE("the benchmark is actually separable by the fitted scorer") {
    SynthConfig cfg;
    cfg.seed = 7;
    cfg.num_classes = 8;
    cfg.feature_dim = 64;
    cfg.train_per_class = 50;
    cfg.test_known = 200;
    cfg.test_unknown = 200;
    SynthData d = generate_synth(cfg);

    ClassifierHead head;
    head.weights = d.weights;
    head.bias = d.bias;
    CostarrModel model = fit_model(d.train, head);
    CHECK_FALSE(model.used_fallback);

    auto scores = score_set(model, d.test, Method::costarr, 2);
    auto ev = make_eval_samples(scores, d.test.labels);
    CHECK(auroc(ev) > 0.8);
    CHECK(oscr(ev).auc > 0.7);
}

TEST_CASE("synth config validation") {
    SynthConfig good = small_config();
    CHECK_NOTHROW(good.validate());

    auto expect_bad = [](auto mutate) {
        SynthConfig c;
        c.seed = 1;
        c.num_classes = 8;
        c.feature_dim = 32;
        c.train_per_class = 4;
        c.test_known = 8;
        c.test_unknown = 8;
        mutate(c);
        CHECK_THROWS_AS(c.validate(), ArgumentError);
        CHECK_THROWS_AS(generate_synth(c), ArgumentError);
    };
    expect_bad([](SynthConfig& c) { c.num_classes = 1; });
    expect_bad([](SynthConfig& c) { c.feature_dim = 3; });
    expect_bad([](SynthConfig& c) { c.train_per_class = 0; });
    expect_bad([](SynthConfig& c) { c.test_known = 0; });
    expect_bad([](SynthConfig& c) { c.test_unknown = 0; });
    expect_bad([](SynthConfig& c) { c.active_frac = 0.0; });
    expect_bad([](SynthConfig& c) { c.active_frac = 1.0; });
    expect_bad([](SynthConfig& c) { c.active_frac = -0.2; });
    expect_bad([](SynthConfig& c) { c.active_frac = 0.97; }); // mask_size == feature_dim
    expect_bad([](SynthConfig& c) { c.unknown_boost = 0.0; });
    expect_bad([](SynthConfig& c) { c.unknown_boost = -1.0; });
    expect_bad([](SynthConfig& c) { c.unknown_boost = std::numeric_limits<double>::infinity(); });
    expect_bad([](SynthConfig& c) { c.unknown_boost = std::numeric_limits<double>::quiet_NaN(); });

    CHECK(small_config().mask_size() == 7); // ceil(0.2 * 32)
    SynthConfig defaults;
    CHECK(defaults.mask_size() == 26); // ceil(0.1 * 256)
}

TEST_CASE("synth directory layout round trips") {
    SynthConfig cfg;
    cfg.seed = 3;
    cfg.num_classes = 4;
    cfg.feature_dim = 16;
    cfg.train_per_class = 5;
    cfg.test_known = 8;
    cfg.test_unknown = 8;
    SynthData d = generate_synth(cfg);
    testutil::TempDir dir("synth_io");
    save_synth(d, cfg, dir.path());

    const char* names[] = {"weights.cst",       "bias.cst",          "masks.cst",
                           "train_features.cst", "train_logits.cst", "train_labels.cst",
                           "val_features.cst",   "val_logits.cst",   "val_labels.cst",
                           "test_features.cst",  "test_logits.cst",  "test_labels.cst",
                           "synth_config.txt"};
    for (const char* n : names) CHECK(std::filesystem::exists(dir.path() / n));

    CHECK(read_tensor(dir.path() / "weights.cst") == d.weights);
    CHECK(read_tensor(dir.path() / "masks.cst") == d.masks);
    CHECK(read_tensor(dir.path() / "train_features.cst") == d.train.features);
    CHECK(read_tensor(dir.path() / "test_logits.cst") == d.test.logits);
    CHECK(read_tensor(dir.path() / "val_labels.cst") == d.val.labels);

    std::ifstream f(dir.path() / "synth_config.txt");
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(f, line)) lines.push_back(line);
    REQUIRE(lines.size() == 8);
    CHECK(lines[0] == "seed=3");
    CHECK(lines[1] == "num_classes=4");
    CHECK(lines[2] == "feature_dim=16");
    CHECK(lines[5] == "test_unknown=8");
    CHECK(lines[6] == "active_frac=" + format_f64(0.1));
    CHECK(lines[7] == "unknown_boost=" + format_f64(3.0));

    // A loadable labeled set comes back out of the files.
    LabeledSet back = load_labeled_set(dir.path() / "test_features.cst", dir.path() / "test_logits.cst",
                                       dir.path() / "test_labels.cst");
    CHECK(back.features == d.test.features);
    CHECK(back.logits == d.test.logits);
    CHECK(back.labels == d.test.labels);
}
