// costarr: command-line front end tying together the synth / fit / score /
// eval / stats / analyze pipeline. Reports go to stdout, data files to
// --out, and every directory-producing command drops a run_manifest.txt
// with input digests so a run can be audited later.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "costarr/analyze.hpp"
#include "costarr/metrics.hpp"
#include "costarr/score.hpp"
#include "costarr/stats.hpp"
#include "costarr/synth.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using namespace costarr;

namespace {

constexpr const char* kVersion = "costarr 1.0.0";

std::uint64_t fnv1a_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open " + p.string() + " for digesting");
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (true) {
        in.read(buf, sizeof buf);
        std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
        if (got < static_cast<std::streamsize>(sizeof buf)) break;
    }
    if (in.bad()) throw IoError("read failure on " + p.string());
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_manifest(const fs::path& dir, const std::string& command, const std::vector<fs::path>& inputs,
                    const std::vector<std::string>& config) {
    std::ofstream f(dir / "run_manifest.txt", std::ios::trunc);
    if (!f) throw IoError("cannot open " + (dir / "run_manifest.txt").string() + " for writing");
    f << "tool: " << kVersion << "\n";
    f << "command: " << command << "\n";
    for (const auto& line : config) f << "config: " << line << "\n";
    for (const auto& p : inputs) f << "input: " << hex64(fnv1a_file(p)) << " " << p.string() << "\n";
    f.flush();
    if (!f) throw IoError("write failure on run_manifest.txt");
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::string kv(const std::string& key, double v) { return key + "=" + format_f64(v); }

// ---- synth -------------------------------------------------------------

struct SynthArgs {
    std::string out;
    SynthConfig cfg;
};

void run_synth(const SynthArgs& a, const std::string& command) {
    SynthData data = generate_synth(a.cfg);
    ensure_dir(a.out);
    save_synth(data, a.cfg, a.out);
    write_manifest(a.out, command, {},
                   {"seed=" + std::to_string(a.cfg.seed), "classes=" + std::to_string(a.cfg.num_classes),
                    "dim=" + std::to_string(a.cfg.feature_dim),
                    "train_per_class=" + std::to_string(a.cfg.train_per_class),
                    "test_known=" + std::to_string(a.cfg.test_known),
                    "test_unknown=" + std::to_string(a.cfg.test_unknown),
                    kv("active_frac", a.cfg.active_frac), kv("unknown_boost", a.cfg.unknown_boost)});
    std::cout << "written=" << a.out << "\n"
              << "train=" << data.train.size() << "\n"
              << "val=" << data.val.size() << "\n"
              << "test=" << data.test.size() << "\n";
}

// ---- fit ---------------------------------------------------------------

struct FitArgs {
    std::string features, logits, labels, weights, bias, out;
};

void run_fit(const FitArgs& a, const std::string& command) {
    LabeledSet train = load_labeled_set(a.features, a.logits, a.labels);
    ClassifierHead head = load_head(a.weights, a.bias);
    CostarrModel model = fit_model(train, head);
    if (model.used_fallback)
        std::cerr << "warning: some class had no correctly classified training samples; "
                     "its mean uses all samples of the class\n";
    ensure_dir(a.out);
    save_model(model, a.out);
    write_manifest(a.out, command, {a.features, a.logits, a.labels, a.weights, a.bias},
                   {"classes=" + std::to_string(model.num_classes()), "dim=" + std::to_string(model.feature_dim()),
                    kv("l_tmin", model.l_tmin), kv("l_tmax", model.l_tmax),
                    std::string("fallback=") + (model.used_fallback ? "1" : "0")});
    std::cout << "model=" << a.out << "\n"
              << kv("l_tmin", model.l_tmin) << "\n"
              << kv("l_tmax", model.l_tmax) << "\n";
}

// ---- score -------------------------------------------------------------

struct ScoreArgs {
    std::string model, features, logits, method, out;
    unsigned threads = 1;
};

void run_score(const ScoreArgs& a) {
    Method method = parse_method(a.method);
    CostarrModel model = load_model(a.model);
    Tensor features = read_tensor(a.features);
    Tensor logits = read_tensor(a.logits);
    auto rows = score_set(model, features, logits, method, a.threads);
    write_scores_csv(rows, a.out);
    std::cout << "scores=" << a.out << "\n"
              << "rows=" << rows.size() << "\n"
              << "method=" << method_name(method) << "\n";
}

// ---- eval --------------------------------------------------------------

std::vector<EvalSample> load_eval_samples(const std::string& scores_path, const std::string& labels_path) {
    auto scores = read_scores_csv(scores_path);
    Tensor labels = read_tensor(labels_path);
    return make_eval_samples(scores, labels);
}

struct EvalArgs {
    std::string scores, labels, val_scores, val_labels, curve_out, emit_svg;
};

void run_eval_oosa(const EvalArgs& a) {
    auto val = load_eval_samples(a.val_scores, a.val_labels);
    auto test = load_eval_samples(a.scores, a.labels);
    OosaResult r = oosa(val, test);
    if (!a.curve_out.empty() || !a.emit_svg.empty()) {
        auto candidates = threshold_candidates(val);
        std::vector<double> osas(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) osas[i] = osa(val, candidates[i]);
        if (!a.curve_out.empty()) {
            Tensor curve({candidates.size(), 2}, Dtype::f64);
            auto c = curve.f64();
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                c[2 * i] = candidates[i];
                c[2 * i + 1] = osas[i];
            }
            write_csv_matrix(curve, a.curve_out, "threshold,osa");
        }
        if (!a.emit_svg.empty())
            svg::write_curve(a.emit_svg, candidates, osas, "threshold", "validation osa", "threshold sweep");
    }
    std::cout << kv("threshold", r.tau) << "\n"
              << kv("val_osa", r.val_osa) << "\n"
              << kv("test_osa", r.test_osa) << "\n";
}

void run_eval_oscr(const EvalArgs& a) {
    auto test = load_eval_samples(a.scores, a.labels);
    OscrCurve curve = oscr(test);
    if (!a.curve_out.empty()) {
        Tensor t({curve.fpr.size(), 2}, Dtype::f64);
        auto c = t.f64();
        for (std::size_t i = 0; i < curve.fpr.size(); ++i) {
            c[2 * i] = curve.fpr[i];
            c[2 * i + 1] = curve.ccr[i];
        }
        write_csv_matrix(t, a.curve_out, "fpr,ccr");
    }
    if (!a.emit_svg.empty()) svg::write_curve(a.emit_svg, curve.fpr, curve.ccr, "fpr", "ccr", "oscr");
    std::cout << kv("auoscr", curve.auc) << "\n"
              << "points=" << curve.fpr.size() << "\n";
}

void run_eval_auroc(const EvalArgs& a) {
    auto test = load_eval_samples(a.scores, a.labels);
    std::cout << kv("auroc", auroc(test)) << "\n";
}

// ---- stats -------------------------------------------------------------

struct StatsArgs {
    std::string a, b;
    std::size_t bonferroni_m = 1;
};

std::vector<double> load_series(const std::string& path) {
    Tensor t = read_csv_matrix(path);
    if (t.rows() != 1 && t.cols() != 1)
        throw FormatError("expected a single row or column of values in " + path);
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) v[i] = t.at_f64(i);
    return v;
}

void run_stats_wilcoxon(const StatsArgs& args) {
    auto a = load_series(args.a);
    auto b = load_series(args.b);
    WilcoxonResult r = wilcoxon_signed_rank(a, b);
    std::cout << kv("W", r.w) << " " << kv("p", r.p) << " " << kv("p_adj", bonferroni(r.p, args.bonferroni_m))
              << " n=" << r.n << " method=" << wilcoxon_mode_name(r.mode) << "\n";
}

// ---- analyze -----------------------------------------------------------

struct AnalyzeArgs {
    std::string weights, out, features, emit_svg;
    std::size_t bins = kDefaultHistogramBins;
    std::int64_t hadamard_class = -1;
};

void run_analyze(const AnalyzeArgs& a, const std::string& command) {
    Tensor weights = read_tensor(a.weights);
    Tensor stats = weight_stats(weights);
    Tensor hist = weight_histogram(weights, a.bins);

    ensure_dir(a.out);
    fs::path out(a.out);
    write_weight_stats_csv(stats, out / "weight_stats.csv");
    write_csv_matrix(hist, out / "weight_histogram.csv");

    std::vector<fs::path> inputs = {a.weights};
    std::vector<std::string> config = {"bins=" + std::to_string(a.bins)};
    if (!a.features.empty()) {
        if (a.hadamard_class < 0)
            throw ArgumentError("--features needs --class to pick the weight row for the hadamard export");
        Tensor features = read_tensor(a.features);
        Tensor h = export_sorted_hadamard(features, weights, static_cast<std::size_t>(a.hadamard_class));
        write_csv_matrix(h, out / "sorted_hadamard.csv");
        inputs.push_back(a.features);
        config.push_back("class=" + std::to_string(a.hadamard_class));
    }
    if (!a.emit_svg.empty()) svg::write_heatstrip(a.emit_svg, hist, "|weight| histogram per dimension");

    write_manifest(out, command, inputs, config);
    std::cout << "analysis=" << a.out << "\n"
              << "dims=" << weights.cols() << "\n"
              << "bins=" << a.bins << "\n";
}

} // namespace

int main(int argc, char** argv) {
    std::string command;
    for (int i = 0; i < argc; ++i) {
        if (i) command += ' ';
        command += argv[i];
    }

    CLI::App app{"COSTARR open-set recognition scoring and evaluation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate the deterministic synthetic benchmark");
    synth->add_option("--out", synth_args.out, "output directory")->required();
    synth->add_option("--seed", synth_args.cfg.seed, "rng seed");
    synth->add_option("--classes", synth_args.cfg.num_classes, "number of known classes");
    synth->add_option("--dim", synth_args.cfg.feature_dim, "feature dimensionality");
    synth->add_option("--train-per-class", synth_args.cfg.train_per_class, "training samples per class");
    synth->add_option("--test-known", synth_args.cfg.test_known, "known test samples");
    synth->add_option("--test-unknown", synth_args.cfg.test_unknown, "unknown test samples");
    synth->add_option("--active-frac", synth_args.cfg.active_frac, "fraction of active dims per class");
    synth->add_option("--unknown-boost", synth_args.cfg.unknown_boost, "activation added on attenuated dims");

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "fit class means and logit bounds from a training split");
    fit->add_option("--features", fit_args.features, "training features .cst")->required()->check(CLI::ExistingFile);
    fit->add_option("--logits", fit_args.logits, "training logits .cst")->required()->check(CLI::ExistingFile);
    fit->add_option("--labels", fit_args.labels, "training labels .cst")->required()->check(CLI::ExistingFile);
    fit->add_option("--weights", fit_args.weights, "classifier weights .cst")->required()->check(CLI::ExistingFile);
    fit->add_option("--bias", fit_args.bias, "classifier bias .cst")->required()->check(CLI::ExistingFile);
    fit->add_option("--out", fit_args.out, "model output directory")->required();

    ScoreArgs score_args;
    auto* score = app.add_subcommand("score", "score samples with one method");
    score->add_option("--model", score_args.model, "model directory")->required()->check(CLI::ExistingDirectory);
    score->add_option("--features", score_args.features, "features .cst")->required()->check(CLI::ExistingFile);
    score->add_option("--logits", score_args.logits, "logits .cst")->required()->check(CLI::ExistingFile);
    score->add_option("--method", score_args.method, "costarr|hadamard|features|nologit|cosm|maxlogit|msp|magnorm")
        ->required();
    score->add_option("--out", score_args.out, "output scores csv")->required();
    score->add_option("--threads", score_args.threads, "worker threads (0 = all cores)");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "evaluate score files");
    eval->require_subcommand(1);
    auto* oosa_cmd = eval->add_subcommand("oosa", "threshold on validation, accuracy on test");
    oosa_cmd->add_option("--scores", eval_args.scores, "test scores csv")->required()->check(CLI::ExistingFile);
    oosa_cmd->add_option("--labels", eval_args.labels, "test labels .cst")->required()->check(CLI::ExistingFile);
    oosa_cmd->add_option("--val-scores", eval_args.val_scores, "validation scores csv")
        ->required()
        ->check(CLI::ExistingFile);
    oosa_cmd->add_option("--val-labels", eval_args.val_labels, "validation labels .cst")
        ->required()
        ->check(CLI::ExistingFile);
    oosa_cmd->add_option("--curve-out", eval_args.curve_out, "write threshold,osa sweep csv");
    oosa_cmd->add_option("--emit-svg", eval_args.emit_svg, "write threshold sweep svg");
    auto* oscr_cmd = eval->add_subcommand("oscr", "ccr-vs-fpr curve and its area");
    oscr_cmd->add_option("--scores", eval_args.scores, "test scores csv")->required()->check(CLI::ExistingFile);
    oscr_cmd->add_option("--labels", eval_args.labels, "test labels .cst")->required()->check(CLI::ExistingFile);
    oscr_cmd->add_option("--curve-out", eval_args.curve_out, "write fpr,ccr curve csv");
    oscr_cmd->add_option("--emit-svg", eval_args.emit_svg, "write curve svg");
    auto* auroc_cmd = eval->add_subcommand("auroc", "known-vs-unknown separability");
    auroc_cmd->add_option("--scores", eval_args.scores, "test scores csv")->required()->check(CLI::ExistingFile);
    auroc_cmd->add_option("--labels", eval_args.labels, "test labels .cst")->required()->check(CLI::ExistingFile);

    StatsArgs stats_args;
    auto* stats = app.add_subcommand("stats", "significance testing");
    stats->require_subcommand(1);
    auto* wilcoxon_cmd = stats->add_subcommand("wilcoxon", "paired two-sided signed-rank test");
    wilcoxon_cmd->add_option("--a", stats_args.a, "first metric series csv")->required()->check(CLI::ExistingFile);
    wilcoxon_cmd->add_option("--b", stats_args.b, "second metric series csv")->required()->check(CLI::ExistingFile);
    wilcoxon_cmd->add_option("--bonferroni", stats_args.bonferroni_m, "number of comparisons");

    AnalyzeArgs analyze_args;
    auto* analyze = app.add_subcommand("analyze", "weight diagnostics");
    analyze->add_option("--weights", analyze_args.weights, "classifier weights .cst")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("--out", analyze_args.out, "output directory")->required();
    analyze->add_option("--bins", analyze_args.bins, "histogram bins");
    analyze->add_option("--features", analyze_args.features, "features .cst for the sorted-hadamard export")
        ->check(CLI::ExistingFile);
    analyze->add_option("--class", analyze_args.hadamard_class, "class row for the sorted-hadamard export");
    analyze->add_option("--emit-svg", analyze_args.emit_svg, "write histogram heat strip svg");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed()) run_synth(synth_args, command);
        else if (fit->parsed()) run_fit(fit_args, command);
        else if (score->parsed()) run_score(score_args);
        else if (eval->parsed()) {
            if (oosa_cmd->parsed()) run_eval_oosa(eval_args);
            else if (oscr_cmd->parsed()) run_eval_oscr(eval_args);
            else run_eval_auroc(eval_args);
        } else if (stats->parsed()) {
            if (wilcoxon_cmd->parsed()) run_stats_wilcoxon(stats_args);
        } else if (analyze->parsed()) {
            run_analyze(analyze_args, command);
        }
        return 0;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
