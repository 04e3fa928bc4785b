#include "cli.hpp"

#include "budgetsvm/data_io.hpp"
#include "budgetsvm/diagnostics.hpp"
#include "budgetsvm/errors.hpp"
#include "budgetsvm/model.hpp"
#include "budgetsvm/parallel.hpp"
#include "budgetsvm/plot.hpp"
#include "budgetsvm/solvers.hpp"
#include "budgetsvm/synth.hpp"
#include "budgetsvm/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

namespace budgetsvm::cli {

namespace {

struct TrainFlags {
    std::string data;
    std::string test;
    std::string algo = "bsca";
    std::size_t budget = 500;
    double C = 1.0;
    double gamma = 1.0;
    std::string kernel = "gaussian";
    std::size_t epochs = 10;
    std::uint64_t seed = 1;
    std::size_t log_every = 1;
    std::string out;
    std::string coalesce = "on";
    std::string model_out;
    std::string plot;
    std::string maintenance_log;
    bool timing = false;
    bool skip_dual = false;
};

// Exceptions raised while wiring files, mapped to exit code 1.
struct FileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_train_flags(CLI::App& cmd, TrainFlags& f) {
    cmd.add_option("--data", f.data, "training set (sparse text format)")->required();
    cmd.add_option("--test", f.test, "test set (sparse text format)")->required();
    cmd.add_option("--algo", f.algo, "solver")->check(CLI::IsMember({"bsca", "bsgd", "sca", "sgd"}));
    cmd.add_option("--budget", f.budget, "budget B (bsca, bsgd)");
    cmd.add_option("--c", f.C, "regularization C = 1/(lambda n)");
    cmd.add_option("--gamma", f.gamma, "gaussian kernel width");
    cmd.add_option("--kernel", f.kernel, "kernel")->check(CLI::IsMember({"gaussian", "linear"}));
    cmd.add_option("--epochs", f.epochs, "epochs of n steps");
    cmd.add_option("--seed", f.seed, "RNG seed");
    cmd.add_option("--log-every", f.log_every, "epochs between CSV rows");
    cmd.add_option("--out", f.out, "CSV output")->required();
    cmd.add_option("--coalesce", f.coalesce, "fold repeated updates of a point into one entry")
        ->check(CLI::IsMember({"on", "off"}));
    cmd.add_option("--model-out", f.model_out, "write the final model");
    cmd.add_option("--plot", f.plot, "write an SVG of the curves");
    cmd.add_option("--maintenance-log", f.maintenance_log, "CSV of every budget maintenance event");
    cmd.add_flag("--timing", f.timing, "record wall-clock training time (otherwise wall_time_s is 0)");
    cmd.add_flag("--skip-dual", f.skip_dual, "do not evaluate the dual objective (NaN column)");
}

TrainConfig to_config(const TrainFlags& f) {
    TrainConfig cfg;
    cfg.algo = parse_algorithm(f.algo);
    cfg.C = f.C;
    cfg.kernel = f.kernel == "linear" ? KernelSpec::linear() : KernelSpec{KernelKind::gaussian, f.gamma};
    cfg.budget = f.budget;
    cfg.epochs = f.epochs;
    cfg.seed = f.seed;
    cfg.log_every = f.log_every;
    cfg.coalesce = f.coalesce == "on";
    cfg.skip_dual_objective = f.skip_dual;
    cfg.validate();
    return cfg;
}

SparseDataset load_or_fail(const std::string& path) {
    if (!std::filesystem::exists(path)) throw FileError("no such file: " + path);
    try {
        return load_dataset(path);
    } catch (const ParseError& e) {
        throw FileError(path + ": " + e.what());
    } catch (const FormatError& e) {
        throw FileError(path + ": " + e.what());
    } catch (const std::runtime_error& e) {
        throw FileError(e.what());
    }
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw FileError("cannot write " + p.string());
    return out;
}

struct Outputs {
    std::filesystem::path csv;
    std::filesystem::path model;
    std::filesystem::path plot;
    std::filesystem::path maintenance;
};

void run_training(const TrainConfig& cfg, const SparseDataset& train_set, const SparseDataset& test_set,
                  const Outputs& outs, bool timing) {
    std::optional<std::ofstream> mlog;
    TrainObserver obs;
    if (!outs.maintenance.empty()) {
        mlog.emplace(open_out(outs.maintenance));
        *mlog << "step,kind,wd,h\n";
        obs.on_step = [&mlog](const SolverState& s, const StepReport& r) {
            if (!r.maintenance) return;
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g", r.maintenance->weight_degradation, r.maintenance->h);
            *mlog << (s.t - 1) << ',' << to_string(r.maintenance->kind) << ',' << buf << '\n';
        };
    }
    auto result = train(cfg, train_set, test_set, obs);
    if (!timing)
        for (auto& r : result.records) r.wall_time_s = 0.0;

    auto csv = open_out(outs.csv);
    write_epoch_csv(result.records, csv);
    if (!csv) throw FileError("write failed: " + outs.csv.string());
    if (!outs.model.empty()) {
        auto m = open_out(outs.model);
        save_model(result.model, m);
    }
    if (!outs.plot.empty()) {
        auto p = open_out(outs.plot);
        write_svg_plot(result.records, std::string(to_string(cfg.algo)) + " (" + to_string(cfg.kernel) + ")", p);
    }
}

int cmd_train(const TrainFlags& f, std::ostream& out) {
    const auto cfg = to_config(f);
    const auto train_set = load_or_fail(f.data);
    const auto test_set = load_or_fail(f.test);
    run_training(cfg, train_set, test_set, {f.out, f.model_out, f.plot, f.maintenance_log}, f.timing);
    out << "wrote " << f.out << '\n';
    return kExitOk;
}

int cmd_sweep(const TrainFlags& f, const std::string& budgets_text, std::ostream& out) {
    std::vector<std::size_t> budgets;
    try {
        budgets = parse_budget_list(budgets_text);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    std::vector<TrainConfig> configs;
    for (auto b : budgets) {
        TrainFlags fb = f;
        fb.budget = b;
        configs.push_back(to_config(fb));
    }
    const auto train_set = load_or_fail(f.data);
    const auto test_set = load_or_fail(f.test);

    auto suffixed = [](const std::string& p, std::size_t b) {
        return p.empty() ? std::filesystem::path{} : with_budget_suffix(p, b);
    };
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::optional<std::string> failure;
    auto worker = [&] {
        for (std::size_t k = next++; k < configs.size(); k = next++) {
            const auto b = budgets[k];
            try {
                run_training(configs[k], train_set, test_set,
                             {suffixed(f.out, b), suffixed(f.model_out, b), suffixed(f.plot, b),
                              suffixed(f.maintenance_log, b)},
                             f.timing);
            } catch (const std::exception& e) {
                std::lock_guard lock(err_mu);
                if (!failure) failure = e.what();
            }
        }
    };
    const std::size_t threads = std::min(worker_count(), configs.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    if (failure) throw FileError(*failure);
    for (auto b : budgets) out << "wrote " << with_budget_suffix(f.out, b).string() << '\n';
    return kExitOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, std::optional<std::size_t> n, std::ostream& out) {
    verify::CheckResult r;
    if (suite == "lemma1") {
        verify::Lemma1Options o;
        o.seed = seed;
        if (n) o.max_n = *n;
        r = verify::lemma1(o);
    } else if (suite == "lemma2") {
        verify::Lemma2Options o;
        o.seed = seed;
        if (n) o.n = *n;
        r = verify::lemma2(o);
    } else if (suite == "theorem1") {
        verify::Theorem1Options o;
        o.seed = seed;
        if (n) o.n = *n;
        r = verify::theorem1(o);
    } else if (suite == "merge-oracle") {
        verify::MergeOracleOptions o;
        o.seed = seed;
        if (n) o.trials = *n;
        r = verify::merge_oracle(o);
    } else if (suite == "qp-oracle") {
        verify::QpOracleOptions o;
        o.seed = seed;
        if (n) o.max_n = *n;
        r = verify::qp_oracle(o);
    } else if (suite == "step-optimality") {
        verify::StepOptimalityOptions o;
        o.seed = seed;
        if (n) o.max_n = *n;
        r = verify::step_optimality(o);
    } else if (suite == "equivalence") {
        verify::EquivalenceOptions o;
        o.seed = seed;
        if (n) o.n = *n;
        r = verify::budget_inactive_equivalence(o);
    } else {
        verify::MergeFractionOptions o;
        o.seed = seed;
        if (n) o.n = *n;
        r = verify::merge_fraction(o);
    }
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    return r.passed ? kExitOk : kExitFailure;
}

int cmd_synth(std::size_t n, std::size_t d, std::uint64_t seed, const std::string& path, std::ostream& out) {
    const auto ds = make_two_blobs(n, d, seed);
    auto f = open_out(path);
    serialize_dataset(ds, f);
    f.flush();
    if (!f) throw FileError("write failed: " + path);
    out << "wrote " << n << " examples to " << path << '\n';
    return kExitOk;
}

}  // namespace

std::filesystem::path with_budget_suffix(const std::filesystem::path& path, std::size_t budget) {
    auto result = path;
    result.replace_filename(path.stem().string() + "_B" + std::to_string(budget) + path.extension().string());
    return result;
}

std::vector<std::size_t> parse_budget_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::string_view rest(text);
    while (true) {
        const auto comma = rest.find(',');
        auto tok = rest.substr(0, comma);
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
            throw std::invalid_argument("budget list entry '" + std::string(tok) + "' is not an integer");
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kernel SVM training on a budget"};
    app.name("budgetsvm");
    app.require_subcommand(1);

    TrainFlags train_flags;
    auto* train_cmd = app.add_subcommand("train", "train one model and log per-epoch diagnostics");
    add_train_flags(*train_cmd, train_flags);

    TrainFlags sweep_flags;
    std::string budgets = "200,500,1000";
    auto* sweep_cmd = app.add_subcommand("sweep", "train once per budget, one CSV each");
    add_train_flags(*sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--budgets", budgets, "comma-separated budgets");

    std::string suite;
    std::uint64_t verify_seed = 1;
    std::optional<std::size_t> verify_n;
    auto* verify_cmd = app.add_subcommand("verify", "check the solvers against reference computations");
    verify_cmd->add_option("--suite", suite)
        ->required()
        ->check(CLI::IsMember({"lemma1", "lemma2", "theorem1", "merge-oracle", "qp-oracle", "step-optimality",
                               "equivalence", "merge-fraction"}));
    verify_cmd->add_option("--seed", verify_seed);
    verify_cmd->add_option("--n", verify_n, "instance size (or trial count for merge-oracle)");

    std::size_t synth_n = 0, synth_d = 0;
    std::uint64_t synth_seed = 1;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "write a two-blob synthetic dataset");
    synth_cmd->add_option("--n", synth_n)->required()->check(CLI::PositiveNumber);
    synth_cmd->add_option("--d", synth_d)->required()->check(CLI::PositiveNumber);
    synth_cmd->add_option("--seed", synth_seed);
    synth_cmd->add_option("--out", synth_out)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (train_cmd->parsed()) return cmd_train(train_flags, out);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_flags, budgets, out);
        if (verify_cmd->parsed()) return cmd_verify(suite, verify_seed, verify_n, out);
        return cmd_synth(synth_n, synth_d, synth_seed, synth_out, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace budgetsvm::cli
