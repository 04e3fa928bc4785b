#include "budgetsvm/errors.hpp"
#include "budgetsvm/oracle/reference.hpp"
#include "budgetsvm/solvers.hpp"
#include "budgetsvm/synth.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace budgetsvm;
using budgetsvm::testing::dense_gauss;
using budgetsvm::testing::random_dataset;

namespace {

SparseVector pt(double a, double b) { return SparseVector::from_dense(std::vector<double>{a, b}); }

TrainConfig config_for(Algorithm algo, double C, double gamma, std::size_t budget = 500) {
    TrainConfig c;
    c.algo = algo;
    c.C = C;
    c.kernel = KernelSpec::gaussian(gamma);
    c.budget = budget;
    return c;
}

}  // namespace

TEST_CASE("algorithm names") {
    CHECK(parse_algorithm("bsca") == Algorithm::bsca);
    CHECK(parse_algorithm("bsgd") == Algorithm::bsgd);
    CHECK(parse_algorithm("sca") == Algorithm::sca);
    CHECK(parse_algorithm("sgd") == Algorithm::sgd);
    CHECK(std::string(to_string(Algorithm::bsgd)) == "bsgd");
    CHECK_THROWS_AS(parse_algorithm("svm"), ConfigError);
}

TEST_CASE("configuration errors") {
    auto bad = [](auto mutate) {
        TrainConfig c;
        mutate(c);
        CHECK_THROWS_AS(c.validate(), ConfigError);
    };
    bad([](TrainConfig& c) { c.C = 0.0; });
    bad([](TrainConfig& c) { c.C = -1.0; });
    bad([](TrainConfig& c) { c.budget = 1; });
    bad([](TrainConfig& c) { c.epochs = 0; });
    bad([](TrainConfig& c) { c.log_every = 0; });
    bad([](TrainConfig& c) { c.kernel = KernelSpec{KernelKind::gaussian, 0.0}; });
    bad([](TrainConfig& c) { c.kernel = KernelSpec::linear(); });
    TrainConfig linear_sca;
    linear_sca.algo = Algorithm::sca;
    linear_sca.kernel = KernelSpec::linear();
    CHECK_NOTHROW(linear_sca.validate());

    const SparseDataset one({pt(1, 0)}, {1.0});
    CHECK_THROWS_AS(train(TrainConfig{}, SparseDataset{}, one), ConfigError);
    CHECK_THROWS_AS(train(TrainConfig{}, one, SparseDataset{}), ConfigError);
}

TEST_CASE("first coordinate step on an empty model") {
    const SparseDataset ds({pt(1, 0), pt(0, 1)}, {1.0, -1.0});
    SolverState s(config_for(Algorithm::bsca, 1.0, 1.0, 10), ds.size());
    const auto r = bsca_step(s, ds, 0);
    CHECK(r.margin == 0.0);
    CHECK(r.delta == 1.0);
    CHECK(s.alpha[0] == 1.0);
    REQUIRE(s.model.size() == 1);
    CHECK(s.model.effective_beta(0) == 1.0);
}

TEST_CASE("coordinate step clips at C") {
    const SparseDataset ds({pt(1, 0), pt(0, 1)}, {1.0, -1.0});
    SolverState s(config_for(Algorithm::bsca, 0.5, 1.0, 10), ds.size());
    const auto r = bsca_step(s, ds, 1);
    CHECK(r.delta == 0.5);
    CHECK(s.alpha[1] == 0.5);
    CHECK(s.model.effective_beta(0) == -0.5);
}

TEST_CASE("single training point converges in one step") {
    const SparseDataset ds({pt(0.3, -0.2)}, {1.0});
    SolverState s(config_for(Algorithm::sca, 10.0, 1.0), 1);
    sca_step(s, ds, 0);
    CHECK(s.alpha[0] == 1.0);
    CHECK(dual_objective(s.alpha, ds, s.config().kernel) == 0.5);
    const auto again = sca_step(s, ds, 0);
    CHECK(again.delta == 0.0);
    CHECK(s.model.size() == 1);
}

TEST_CASE("exact coordinate steps increase the dual by exactly J") {
    Rng rng(51);
    const auto ds = random_dataset(rng, 15, 4);
    const auto cfg = config_for(Algorithm::sca, 0.7, 0.5);
    SolverState s(cfg, ds.size());
    for (int step = 0; step < 300; ++step) {
        const std::size_t i = rng.uniform_index(ds.size());
        const std::vector<double> before(s.alpha.values().begin(), s.alpha.values().end());
        const double d_before = dual_objective(before, ds, cfg.kernel);
        const auto r = sca_step(s, ds, i);
        const double d_after = dual_objective(s.alpha, ds, cfg.kernel);
        const double j = progress_J(before, ds, cfg.kernel, i, r.delta);
        CHECK(j >= -1e-12);
        CHECK(std::abs((d_after - d_before) - j) <= 1e-10);
        CHECK(d_after >= d_before - 1e-12);
        for (double a : s.alpha.values()) {
            CHECK(a >= 0.0);
            CHECK(a <= cfg.C);
        }
    }
}

TEST_CASE("gradient step at t = 1 discards the old model") {
    const SparseDataset ds({pt(1, 0), pt(0, 1)}, {1.0, -1.0});
    SolverState s(config_for(Algorithm::bsgd, 1.0, 1.0, 10), ds.size());
    const auto r = bsgd_step(s, ds, 1);
    CHECK(r.violation);
    CHECK(r.delta == 2.0);
    REQUIRE(s.model.size() == 1);
    CHECK(s.model.effective_beta(0) == -2.0);
    CHECK(s.t == 2);
}

TEST_CASE("gradient step without a violation only shrinks") {
    const SparseDataset ds({pt(1, 0), pt(0, 1)}, {1.0, -1.0});
    SolverState s(config_for(Algorithm::bsgd, 1.0, 1.0, 10), ds.size());
    bsgd_step(s, ds, 0);
    const auto r = bsgd_step(s, ds, 0);
    CHECK(r.margin == 2.0);
    CHECK_FALSE(r.violation);
    REQUIRE(s.model.size() == 1);
    CHECK(s.model.effective_beta(0) == 1.0);
}

TEST_CASE("lazy scaling matches eager coefficient updates over 10^4 steps") {
    Rng rng(52);
    const auto ds = random_dataset(rng, 30, 3);
    const double C = 0.5;
    const double gamma = 0.8;
    const auto cfg = config_for(Algorithm::sgd, C, gamma);
    SolverState s(cfg, ds.size());
    std::vector<double> eager(ds.size(), 0.0);
    const double n = static_cast<double>(ds.size());
    for (std::uint64_t t = 1; t <= 10'000; ++t) {
        const std::size_t i = rng.uniform_index(ds.size());
        double margin = 0.0;
        for (std::size_t k = 0; k < ds.size(); ++k)
            if (eager[k] != 0.0) margin += eager[k] * ds.y(k) * dense_gauss(ds.x(i), ds.x(k), gamma);
        const auto r = sgd_step(s, ds, i);
        CHECK(std::abs(r.margin - margin) <= 1e-9 * std::max(1.0, std::abs(margin)));
        for (double& a : eager) a *= 1.0 - 1.0 / static_cast<double>(t);
        if (ds.y(i) * margin < 1.0) eager[i] += n * C / static_cast<double>(t);
    }
    const auto lazy = s.alpha_vector();
    for (std::size_t k = 0; k < ds.size(); ++k) CHECK(std::abs(lazy[k] - eager[k]) <= 1e-10);
}

TEST_CASE("SGD coefficient mass equals the violation fraction") {
    Rng rng(53);
    const auto ds = random_dataset(rng, 40, 3);
    const auto cfg = [] {
        auto c = config_for(Algorithm::sgd, 2.0, 0.5);
        c.epochs = 5;
        return c;
    }();
    const auto res = train(cfg, ds, ds);
    const double mass = std::accumulate(res.alpha.begin(), res.alpha.end(), 0.0);
    const double frac = static_cast<double>(res.totals.violations) / static_cast<double>(res.totals.steps);
    CHECK(std::abs(mass / (40.0 * cfg.C) - frac) <= 1e-12);
}

TEST_CASE("one epoch performs n steps") {
    Rng rng(54);
    const auto ds = random_dataset(rng, 5, 2);
    for (auto algo : {Algorithm::bsca, Algorithm::bsgd, Algorithm::sca, Algorithm::sgd}) {
        auto cfg = config_for(algo, 1.0, 1.0, 2);
        std::size_t steps = 0;
        TrainObserver obs;
        obs.on_step = [&](const SolverState&, const StepReport&) { ++steps; };
        const auto res = train(cfg, ds, ds, obs);
        CHECK(steps == 5);
        CHECK(res.totals.steps == 5);
        CHECK(res.records.size() == 1);
    }
}

TEST_CASE("training is deterministic") {
    Rng rng(55);
    const auto ds = random_dataset(rng, 60, 4);
    for (auto algo : {Algorithm::bsca, Algorithm::bsgd}) {
        auto cfg = config_for(algo, 1.0, 0.5, 10);
        cfg.epochs = 3;
        cfg.seed = 99;
        const auto a = train(cfg, ds, ds);
        const auto b = train(cfg, ds, ds);
        REQUIRE(a.records.size() == b.records.size());
        for (std::size_t k = 0; k < a.records.size(); ++k) {
            auto ra = a.records[k];
            auto rb = b.records[k];
            ra.wall_time_s = rb.wall_time_s = 0.0;
            CHECK(ra.primal_obj == rb.primal_obj);
            CHECK(ra.dual_obj == rb.dual_obj);
            CHECK(ra.sv_count == rb.sv_count);
            CHECK(ra.merge_fraction == rb.merge_fraction);
        }
        CHECK(a.alpha == b.alpha);
        REQUIRE(a.model.size() == b.model.size());
        for (std::size_t k = 0; k < a.model.size(); ++k) CHECK(a.model.entry(k).beta == b.model.entry(k).beta);
    }
}

TEST_CASE("budget, box and counter invariants during training") {
    Rng rng(56);
    const auto ds = random_dataset(rng, 80, 4);
    for (auto algo : {Algorithm::bsca, Algorithm::bsgd}) {
        auto cfg = config_for(algo, 1.0, 1.0, 8);
        cfg.epochs = 4;
        TrainObserver obs;
        bool ok = true;
        obs.on_step = [&](const SolverState& s, const StepReport&) {
            ok = ok && s.model.size() <= cfg.budget;
            if (is_dual(algo))
                for (double a : s.alpha.values()) ok = ok && a >= 0.0 && a <= cfg.C;
        };
        obs.on_epoch_end = [&](const SolverState& s, std::size_t) {
            ok = ok && s.epoch_counters.maintenance_events <= s.epoch_counters.nonzero_steps;
            ok = ok && s.epoch_counters.nonzero_steps <= s.epoch_counters.steps;
        };
        train(cfg, ds, ds, obs);
        CHECK(ok);
    }
}

TEST_CASE("exact SCA dual objective never decreases") {
    Rng rng(57);
    const auto ds = random_dataset(rng, 25, 3);
    auto cfg = config_for(Algorithm::sca, 1.5, 0.7);
    cfg.epochs = 20;
    double prev = 0.0;
    bool monotone = true;
    TrainObserver obs;
    obs.on_step = [&](const SolverState& s, const StepReport&) {
        const double d = dual_objective(s.alpha, ds, cfg.kernel);
        monotone = monotone && d >= prev - 1e-12;
        prev = d;
    };
    train(cfg, ds, ds, obs);
    CHECK(monotone);
}

TEST_CASE("index sampling is uniform") {
    Rng rng(58);
    constexpr std::size_t k = 10;
    constexpr double draws = 1e6;
    std::vector<double> counts(k, 0.0);
    for (int s = 0; s < 1'000'000; ++s) counts[rng.uniform_index(k)] += 1.0;
    const double p = 1.0 / k;
    const double sigma = std::sqrt(draws * p * (1 - p));
    for (double c : counts) CHECK(std::abs(c - draws * p) <= 5 * sigma);
}

TEST_CASE("inactive budget: BSCA reaches the exact dual optimum") {
    Rng rng(59);
    const auto ds = random_dataset(rng, 20, 4);
    auto cfg = config_for(Algorithm::bsca, 2.0, 0.5, 20);
    cfg.epochs = 200;
    const auto res = train(cfg, ds, ds);
    CHECK(res.totals.maintenance_events == 0);
    const auto opt = oracle::solve_svm_dual(ds, cfg.kernel, cfg.C);
    REQUIRE(opt.converged);
    const double d = dual_objective(res.alpha, ds, cfg.kernel);
    CHECK(std::abs(d - opt.objective) <= 1e-6);
}

TEST_CASE("exact SCA generalizes on two Gaussian blobs") {
    // The blobs overlap: the best possible rule sign(sum_k x_k) is right with
    // probability Phi(1) ~ 0.8413, so SCA is measured against that ceiling.
    const auto train_set = make_two_blobs(1000, 2, 1);
    const auto test_set = make_two_blobs(2000, 2, 2);
    auto cfg = config_for(Algorithm::sca, 1.0, 1.0);
    cfg.epochs = 10;
    const auto res = train(cfg, train_set, test_set);

    double bayes_hits = 0.0;
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        double s = 0.0;
        for (const auto& f : test_set.x(i).entries()) s += f.value;
        bayes_hits += (s >= 0.0 ? 1.0 : -1.0) == test_set.y(i);
    }
    const double bayes = bayes_hits / static_cast<double>(test_set.size());
    CHECK(res.records.back().test_accuracy >= 0.80);
    CHECK(res.records.back().test_accuracy >= bayes - 0.02);
}

TEST_CASE("two blob Bayes accuracy") {
    const auto big = make_two_blobs(50'000, 3, 9);
    double hits = 0.0;
    for (std::size_t i = 0; i < big.size(); ++i) {
        double s = 0.0;
        for (const auto& f : big.x(i).entries()) s += f.value;
        hits += (s >= 0.0 ? 1.0 : -1.0) == big.y(i);
    }
    const double phi1 = 0.5 * std::erfc(-1.0 / std::sqrt(2.0));
    const double sigma = std::sqrt(phi1 * (1 - phi1) / 50'000.0);
    CHECK(std::abs(hits / 50'000.0 - phi1) <= 5 * sigma);
}

TEST_CASE("two blob generator") {
    const auto a = make_two_blobs(100, 2, 7);
    const auto b = make_two_blobs(100, 2, 7);
    CHECK(a == b);
    CHECK(a.size() == 100);
    CHECK_FALSE(a == make_two_blobs(100, 2, 8));
}
