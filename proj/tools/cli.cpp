#include "commands.hpp"

#include "dynafit/error.hpp"

#include <CLI11.hpp>

#include <ostream>

namespace dynafit::cli {
namespace {

void add_kernel_options(CLI::App* cmd, KernelOptions& k) {
    cmd->add_option("--kernel", k.name, "Kernel: poly, gauss or logistic")
        ->check(CLI::IsMember({"poly", "gauss", "logistic"}))
        ->capture_default_str();
    cmd->add_option("--degree", k.degree, "Polynomial degree")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--sigma", k.sigma,
                    "Gaussian width (recommended: 2.9, 4.2, 7.5, 15 for prefix 10, 20, 50, 100; "
                    "used automatically when --prefix-len matches)")
        ->check(CLI::PositiveNumber);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dynafit: kernel distance-to-dynamics trajectory classifier"};
    app.name("dynafit");
    app.set_config("--config", "", "Read options from a TOML/INI configuration file");
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a Lyapunov-labeled logistic-map dataset");
    gen_cmd->add_option("--per-class", gen.per_class, "Trajectories per class")->required();
    gen_cmd->add_option("--length", gen.length, "Samples per trajectory")->capture_default_str();
    gen_cmd->add_option("--burn-in", gen.burn_in, "Discarded transient steps")->capture_default_str();
    gen_cmd->add_option("--lyapunov-iters", gen.lyapunov_iters, "Iterates averaged for the exponent")
        ->capture_default_str();
    gen_cmd->add_option("--margin", gen.margin, "Reject |lambda| <= margin")->capture_default_str();
    gen_cmd->add_option("--r-min", gen.r_min, "Lower end of the r range")->capture_default_str();
    gen_cmd->add_option("--r-max", gen.r_max, "Upper end of the r range")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    gen_cmd->add_option("--out", gen.out, "Output directory")->required();

    TrainOptions train;
    auto* train_cmd = app.add_subcommand("train", "Fit one metric per class and save the model");
    train_cmd->add_option("--manifest", train.manifest, "Dataset manifest")->required();
    add_kernel_options(train_cmd, train.kernel);
    train_cmd->add_option("--eig-threshold", train.eig_threshold,
                          "Relative Gram eigenvalue cutoff")
        ->capture_default_str();
    train_cmd->add_option("--prefix-len", train.prefix_len, "Use only the first N samples")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--out", train.out, "Model file")->required();
    train_cmd->add_option("--one-class", train.one_class,
                          "Train a one-class detector on this label");
    train_cmd->add_option("--quantile", train.quantile, "Calibration quantile for the threshold")
        ->capture_default_str();
    train_cmd->add_option("--train-fraction", train.train_fraction,
                          "One-class: fraction used for fitting, the rest calibrates")
        ->capture_default_str();
    train_cmd->add_option("--seed", train.seed, "Split seed")->capture_default_str();

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand(
        "eval", "Evaluate a saved model, or retrain over stratified resplits when --model is absent");
    eval_cmd->add_option("--manifest", eval.manifest, "Labeled dataset manifest")->required();
    eval_cmd->add_option("--model", eval.model, "Saved model file");
    add_kernel_options(eval_cmd, eval.kernel);
    eval_cmd->add_option("--eig-threshold", eval.eig_threshold, "Relative Gram eigenvalue cutoff")
        ->capture_default_str();
    eval_cmd->add_option("--prefix-len", eval.prefix_len, "Use only the first N samples")
        ->check(CLI::PositiveNumber);
    eval_cmd->add_option("--train-fraction", eval.train_fraction, "Stratified training fraction")
        ->capture_default_str();
    eval_cmd->add_option("--seed", eval.seed, "Seed of the first split")->capture_default_str();
    eval_cmd->add_option("--trials", eval.trials, "Number of resplits")->capture_default_str();
    eval_cmd->add_option("--normal-label", eval.normal_label,
                         "One-class models: label of normal trajectories");
    eval_cmd->add_option("--out", eval.out, "Write the JSON report here");

    PredictOptions predict;
    auto* predict_cmd = app.add_subcommand("predict", "Label the trajectories of a manifest");
    predict_cmd->add_option("--model", predict.model, "Saved model file")->required();
    predict_cmd->add_option("--manifest", predict.manifest, "Dataset manifest")->required();
    predict_cmd->add_option("--prefix-len", predict.prefix_len, "Use only the first N samples")
        ->check(CLI::PositiveNumber);
    predict_cmd->add_option("--out", predict.out, "Write the JSON report here");

    BenchOptions bench;
    auto* bench_cmd =
        app.add_subcommand("bench", "Time Gram construction, eigensolve and inference");
    bench_cmd->add_option("--sizes", bench.sizes, "Training set sizes")->delimiter(',');
    bench_cmd->add_option("--length", bench.length, "Samples per trajectory")
        ->capture_default_str();
    bench_cmd->add_option("--queries", bench.queries, "Inference batch size")
        ->capture_default_str();
    add_kernel_options(bench_cmd, bench.kernel);
    bench_cmd->add_option("--eig-threshold", bench.eig_threshold,
                          "Relative Gram eigenvalue cutoff")
        ->capture_default_str();
    bench_cmd->add_option("--seed", bench.seed, "Data seed")->capture_default_str();
    bench_cmd->add_option("--out", bench.out, "Write the JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "dynafit: " << e.what() << '\n';
        if (const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front())
            err << "run 'dynafit " << sub->get_name() << " --help' for usage\n";
        else
            err << "run 'dynafit --help' for usage\n";
        return kExitUsageError;
    }

    try {
        if (*gen_cmd)
            return cmd_gen(gen, out);
        if (*train_cmd)
            return cmd_train(train, out);
        if (*eval_cmd)
            return cmd_eval(eval, out);
        if (*predict_cmd)
            return cmd_predict(predict, out);
        return cmd_bench(bench, out);
    } catch (const UsageError& e) {
        err << "dynafit: " << e.what() << '\n';
        return kExitUsageError;
    } catch (const std::exception& e) {
        err << "dynafit: error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
}

}  // namespace dynafit::cli
