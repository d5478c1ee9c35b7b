// End-to-end gate: regression fixtures, randomized invariants, synthesis
// targets, and grid-stability checks. Prints one PASS/FAIL line per criterion.
#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include "ensctrl/multidim.hpp"
#include "ensctrl/synthesis.hpp"
#include "ensctrl/system_io.hpp"

using namespace ensctrl;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& note = "") {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!note.empty()) std::cout << " (" << note << ")";
    std::cout << "\n";
    if (!ok) ++failures;
}

std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

Verdict decide(const EnsembleSystem& sys, const AnalysisConfig& cfg) {
    if (sys.n == 1 && sys.m == 1) {
        const Verdict first =
            single_input_verdict(sys.sample_a(cfg.n_grid).row(0), sys.sample_b(cfg.n_grid).row(0), cfg);
        return first;
    }
    if (sys.n == 1) {
        ScalarEnsemble scalar;
        scalar.drift = [&sys](int g) { return sys.sample_a(g); };
        scalar.inputs = [&sys](int g) { return sys.sample_b(g); };
        return multi_input_verdict(scalar, cfg);
    }
    return ensemble_verdict(sys, cfg);
}

struct TimedVerdict {
    Verdict verdict;
    double seconds;
};

TimedVerdict analyze_fixture(const std::string& name, const AnalysisConfig& overrides = {}) {
    const LoadedSystem loaded = load_system(fixture(name));
    AnalysisConfig cfg = loaded.config;
    if (overrides.n_grid != AnalysisConfig{}.n_grid) cfg.n_grid = overrides.n_grid;
    if (overrides.n_eta != AnalysisConfig{}.n_eta) cfg.n_eta = overrides.n_eta;
    if (overrides.eta_per_channel != AnalysisConfig{}.eta_per_channel)
        cfg.eta_per_channel = overrides.eta_per_channel;
    const auto start = std::chrono::steady_clock::now();
    const Verdict v = decide(loaded.system, cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {v, secs};
}

std::function<double(double)> random_poly(std::mt19937_64& rng, int max_degree) {
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::vector<double> c(deg(rng) + 1);
    for (double& x : c) x = coef(rng);
    return [c](double b) {
        double acc = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * b + c[i];
        return acc;
    };
}

SampledField tabulate(CompactInterval k, int g, int rows, int cols,
                      const std::function<double(double, int, int)>& f) {
    std::vector<Eigen::MatrixXd> values;
    for (int j = 0; j < g; ++j) {
        const double b = k.lo + j * (k.hi - k.lo) / (g - 1);
        Eigen::MatrixXd v(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) v(r, c) = f(b, r, c);
        values.push_back(std::move(v));
    }
    return SampledField(k, g, rows, cols, std::move(values));
}

// ---- criterion 1: fixture regression --------------------------------------

void criterion_regression() {
    const struct {
        const char* file;
        Status expected;
    } cases[] = {
        {"example_2_1.json", Status::NotControllable},
        {"example_2_2.json", Status::Controllable},
        {"example_2_4.json", Status::Controllable},
        {"coupled_example.json", Status::Controllable},
        {"jordan2_full.json", Status::Controllable},
        {"jordan2_deficient.json", Status::NotControllable},
        {"jordan3_full.json", Status::Controllable},
        {"jordan3_deficient.json", Status::NotControllable},
    };
    for (const auto& c : cases) {
        const TimedVerdict tv = analyze_fixture(c.file);
        std::ostringstream note;
        note << to_string(tv.verdict.status) << ", " << tv.seconds << " s";
        report(std::string("criterion 1: verdict for ") + c.file,
               tv.verdict.status == c.expected && tv.seconds < 5.0, note.str());
    }

    // Preimage cardinalities for the cosine-drift ensemble: two parameter
    // values share each interior eta, one at the maximum of the range.
    {
        const LoadedSystem loaded = load_system(fixture("example_2_4.json"));
        const SampledField a = loaded.system.sample_a(loaded.config.n_grid);
        const SampledField b = loaded.system.sample_b(loaded.config.n_grid);
        const EnsembleGramian interior = build_gramian(a, b, 0.3, loaded.config);
        const EnsembleGramian top = build_gramian(a, b, 1.0, loaded.config);
        report("criterion 1: cosine drift kappa(0.3) = 2 with full rank",
               interior.kappa() == 2 && interior.rank == 2);
        report("criterion 1: cosine drift kappa(1) = 1", top.kappa() == 1 && top.rank == 1);
    }

    // The second-channel gramian of the coupled triangular system on a
    // symmetric parameter interval: rows (0, 1, -sqrt(eta)) and
    // (0, 1, sqrt(eta)). Probing at images of grid nodes keeps the
    // interpolation exact, so 1e-8 is an honest target.
    {
        const LoadedSystem loaded = load_system(fixture("coupled_example_sym.json"));
        const SampledField a = loaded.system.sample_a(loaded.config.n_grid);
        const SampledField b = loaded.system.sample_b(loaded.config.n_grid);
        const SpectralProfile prof = classify(a, loaded.config);
        bool ok = prof.tag == StructureTag::Triangular && prof.lambda.size() == 2;
        double worst = 0.0;
        if (ok) {
            for (double root : {0.5, 0.6, 0.7}) {
                const double eta = root * root;
                const EnsembleGramian g2 =
                    build_gramian(prof.lambda[1], b.row(1), eta, loaded.config);
                if (g2.kappa() != 2) {
                    ok = false;
                    break;
                }
                Eigen::MatrixXd want(2, 3);
                want << 0, 1, -root, 0, 1, root;
                worst = std::max(worst, (g2.D - want).cwiseAbs().maxCoeff());
            }
        }
        std::ostringstream note;
        note << "max deviation " << worst;
        report("criterion 1: coupled-system channel-2 gramian matches the closed form",
               ok && worst <= 1e-8, note.str());
    }
}

// ---- criterion 2: randomized invariants -----------------------------------

void criterion_invariants() {
    const AnalysisConfig fast = [] {
        AnalysisConfig c;
        c.n_grid = 101;
        c.n_eta = 48;
        c.eta_per_channel = 12;
        c.n_tuples = 256;
        return c;
    }();

    {  // rank(D) <= min(kappa, m)
        std::mt19937_64 rng(101);
        int checked = 0;
        bool ok = true;
        while (checked < 100) {
            auto drift = random_poly(rng, 4);
            const int m = std::uniform_int_distribution<int>(1, 3)(rng);
            std::vector<std::function<double(double)>> ins;
            for (int c = 0; c < m; ++c) ins.push_back(random_poly(rng, 3));
            const SampledField a = tabulate({-1.0, 1.0}, 151, 1, 1,
                                            [&](double b, int, int) { return drift(b); });
            const BranchDecomposition d = decompose(a, fast.tol_mono);
            if (d.degenerate) continue;
            const SampledField rowb = tabulate({-1.0, 1.0}, 151, 1, m,
                                               [&](double b, int, int c) { return ins[c](b); });
            for (double eta : sample_etas(d, a, 8)) {
                const EnsembleGramian g = build_gramian(d, a, rowb, eta, fast);
                if (g.rank > std::min(g.kappa(), m)) ok = false;
                ++checked;
            }
        }
        report("criterion 2: rank(D) <= min(kappa, m) over 100+ randomized gramians", ok);
    }

    {  // input-mixing invariance
        std::mt19937_64 rng(102);
        int done = 0;
        bool ok = true;
        while (done < 100) {
            auto l0 = random_poly(rng, 2);
            auto l1 = random_poly(rng, 2);
            std::vector<std::function<double(double)>> bs;
            for (int i = 0; i < 4; ++i) bs.push_back(random_poly(rng, 1));
            Eigen::Matrix2d mix = Eigen::Matrix2d::Random();
            if (std::abs(mix.determinant()) < 0.3) continue;
            const SampledField a = tabulate({-1.0, 1.0}, fast.n_grid, 2, 2,
                                            [&](double x, int i, int j) {
                                                return i == j ? (i == 0 ? l0(x) : l1(x)) : 0.0;
                                            });
            const SampledField b = tabulate({-1.0, 1.0}, fast.n_grid, 2, 2,
                                            [&](double x, int i, int j) {
                                                return bs[2 * i + j](x);
                                            });
            const SampledField bm = tabulate({-1.0, 1.0}, fast.n_grid, 2, 2,
                                             [&](double x, int i, int j) {
                                                 Eigen::Matrix2d m;
                                                 m << bs[0](x), bs[1](x), bs[2](x), bs[3](x);
                                                 return (m * mix)(i, j);
                                             });
            const Verdict v1 = ensemble_verdict_once(a, b, fast, 10, 128);
            const Verdict v2 = ensemble_verdict_once(a, bm, fast, 10, 128);
            if (v1.status == Status::Inconclusive || v2.status == Status::Inconclusive) continue;
            if (v1.status != v2.status) ok = false;
            ++done;
        }
        report("criterion 2: verdict invariance under constant input mixing, 100 cases", ok);
    }

    {  // constant-similarity invariance
        std::mt19937_64 rng(103);
        int done = 0;
        bool ok = true;
        while (done < 100) {
            auto l0 = random_poly(rng, 2);
            auto l1 = random_poly(rng, 2);
            std::vector<std::function<double(double)>> bs;
            for (int i = 0; i < 4; ++i) bs.push_back(random_poly(rng, 1));
            Eigen::Matrix2d t = Eigen::Matrix2d::Random();
            if (std::abs(t.determinant()) < 0.3) continue;
            const Eigen::Matrix2d t_inv = t.inverse();
            const SampledField a = tabulate({-1.0, 1.0}, fast.n_grid, 2, 2,
                                            [&](double x, int i, int j) {
                                                return i == j ? (i == 0 ? l0(x) : l1(x)) : 0.0;
                                            });
            const SampledField b = tabulate({-1.0, 1.0}, fast.n_grid, 2, 2,
                                            [&](double x, int i, int j) {
                                                return bs[2 * i + j](x);
                                            });
            const SampledField at = tabulate({-1.0, 1.0}, fast.n_grid, 2, 2,
                                             [&](double x, int i, int j) {
                                                 const Eigen::Matrix2d d =
                                                     Eigen::Vector2d(l0(x), l1(x)).asDiagonal();
                                                 return (t * d * t_inv)(i, j);
                                             });
            const SampledField bt = tabulate({-1.0, 1.0}, fast.n_grid, 2, 2,
                                             [&](double x, int i, int j) {
                                                 Eigen::Matrix2d m;
                                                 m << bs[0](x), bs[1](x), bs[2](x), bs[3](x);
                                                 return (t * m)(i, j);
                                             });
            const Verdict v1 = ensemble_verdict_once(a, b, fast, 10, 128);
            const Verdict v2 = ensemble_verdict_once(at, bt, fast, 10, 128);
            if (v1.status == Status::Inconclusive || v2.status == Status::Inconclusive) continue;
            if (v1.status != v2.status) ok = false;
            ++done;
        }
        report("criterion 2: verdict invariance under constant similarity, 100 cases", ok);
    }

    {  // finite-subensemble necessity for controllable scalar verdicts
        std::mt19937_64 rng(104);
        std::uniform_real_distribution<double> betas(-1.0, 1.0);
        int confirmed = 0;
        bool ok = true;
        while (confirmed < 100) {
            auto drift = random_poly(rng, 3);
            std::vector<std::function<double(double)>> ins{random_poly(rng, 3),
                                                           random_poly(rng, 3)};
            ScalarEnsemble sys;
            sys.drift = [&](int g) {
                return tabulate({-1.0, 1.0}, g, 1, 1, [&](double b, int, int) { return drift(b); });
            };
            sys.inputs = [&](int g) {
                return tabulate({-1.0, 1.0}, g, 1, 2,
                                [&](double b, int, int c) { return ins[c](b); });
            };
            if (multi_input_verdict(sys, fast).status != Status::Controllable) continue;
            const int count = 4;
            std::vector<double> pts(count);
            for (double& p : pts) p = betas(rng);
            bool distinct = true;
            for (int i = 0; i < count; ++i)
                for (int j = i + 1; j < count; ++j)
                    if (std::abs(drift(pts[i]) - drift(pts[j])) < 1e-3) distinct = false;
            if (!distinct) continue;
            Eigen::MatrixXd a = Eigen::MatrixXd::Zero(count, count);
            Eigen::MatrixXd b(count, 2);
            for (int i = 0; i < count; ++i) {
                a(i, i) = drift(pts[i]);
                b(i, 0) = ins[0](pts[i]);
                b(i, 1) = ins[1](pts[i]);
            }
            if (kalman_rank(a, b, 1e-7) != count) ok = false;
            ++confirmed;
        }
        report("criterion 2: controllable verdicts pass stacked rank tests, 100 cases", ok);
    }

    {  // Jordan block vs diagonal counterpart
        std::mt19937_64 rng(105);
        int done = 0;
        bool ok = true;
        while (done < 100) {
            const int m = std::uniform_int_distribution<int>(1, 3)(rng);
            std::uniform_real_distribution<double> coef(-2.0, 2.0);
            Eigen::MatrixXd bmat(2, m);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < m; ++j) bmat(i, j) = coef(rng);
            const SampledField aj = tabulate({0.5, 1.5}, fast.n_grid, 2, 2,
                                             [](double x, int i, int j) {
                                                 if (i == j) return x;
                                                 return j == i + 1 ? 1.0 : 0.0;
                                             });
            const SampledField ad = tabulate({0.5, 1.5}, fast.n_grid, 2, 2,
                                             [](double x, int i, int j) {
                                                 return i == j ? x : 0.0;
                                             });
            const SampledField b = tabulate({0.5, 1.5}, fast.n_grid, 2, m,
                                            [&](double, int i, int j) { return bmat(i, j); });
            const Verdict vj = ensemble_verdict_once(aj, b, fast, 10, 128);
            const Verdict vd = ensemble_verdict_once(ad, b, fast, 10, 128);
            if (vj.status == Status::Inconclusive || vd.status == Status::Inconclusive) continue;
            if (vj.status != vd.status) ok = false;
            ++done;
        }
        report("criterion 2: jordan/diagonal verdict agreement, 100 cases", ok);
    }

    {  // triangular pathway vs diagonal counterpart
        std::mt19937_64 rng(106);
        int done = 0;
        bool ok = true;
        while (done < 100) {
            std::vector<std::function<double(double)>> bs;
            for (int i = 0; i < 4; ++i) bs.push_back(random_poly(rng, 2));
            auto coupling = random_poly(rng, 2);
            const CompactInterval k{0.25, 1.0};  // beta and beta^2 stay separated
            const SampledField tri = tabulate(k, fast.n_grid, 2, 2,
                                              [&](double x, int i, int j) {
                                                  if (i == 0 && j == 0) return x;
                                                  if (i == 1 && j == 1) return x * x;
                                                  if (i == 0 && j == 1) return coupling(x);
                                                  return 0.0;
                                              });
            const SampledField diag = tabulate(k, fast.n_grid, 2, 2,
                                               [](double x, int i, int j) {
                                                   if (i == 0 && j == 0) return x;
                                                   if (i == 1 && j == 1) return x * x;
                                                   return 0.0;
                                               });
            const SampledField b = tabulate(k, fast.n_grid, 2, 2,
                                            [&](double x, int i, int j) {
                                                return bs[2 * i + j](x);
                                            });
            const Verdict vt = ensemble_verdict_once(tri, b, fast, 10, 128);
            const Verdict vd = ensemble_verdict_once(diag, b, fast, 10, 128);
            if (vt.status == Status::Inconclusive || vd.status == Status::Inconclusive) continue;
            if (vt.status != vd.status) ok = false;
            ++done;
        }
        report("criterion 2: triangular pathway agrees with diagonal counterpart, 100 cases", ok);
    }
}

// ---- criterion 3: synthesis -----------------------------------------------

void criterion_synthesis() {
    {  // two-input folded drift: steer 0 -> beta at the frozen (T, P, grid)
        const LoadedSystem loaded = load_system(fixture("example_2_2.json"));
        const int g = loaded.config.n_grid;
        const SampledField a = loaded.system.sample_a(g);
        const SampledField b = loaded.system.sample_b(g);
        const SampledField x0 = loaded.system.sample_x0(g);
        const SampledField xf = loaded.system.sample_xf(g);
        const auto [sched, rep] = synthesize(a, b, x0, xf, 1.0, 32, -1.0, 1e-2, 64);
        std::ostringstream note;
        note << "simulated error " << rep.simulated_error;
        report("criterion 3: two-input steering error <= 1e-2 at T=1, P=32, grid 201",
               rep.simulated_error <= 1e-2 && rep.converged, note.str());

        double prev = std::numeric_limits<double>::infinity();
        bool monotone = true;
        for (int segments : {8, 16, 32, 64}) {
            const auto [s2, r2] = synthesize(a, b, x0, xf, 1.0, segments, 0.0, 1e-2, 32);
            if (r2.predicted_error > prev + 1e-10) monotone = false;
            prev = r2.predicted_error;
        }
        report("criterion 3: dyadic segment refinement never increases the residual", monotone);
    }

    {  // single even input cannot produce the odd target: error pinned at 1
        const LoadedSystem loaded = load_system(fixture("example_2_1.json"));
        const int g = loaded.config.n_grid;
        const auto [sched, rep] =
            synthesize(loaded.system.sample_a(g), loaded.system.sample_b(g),
                       loaded.system.sample_x0(g), loaded.system.sample_xf(g), 1.0, 32, -1.0,
                       1e-2, 64);
        std::ostringstream note;
        note << "simulated error " << rep.simulated_error;
        report("criterion 3: single-input steering error is 1 +- 0.05 for the odd target",
               std::abs(rep.simulated_error - 1.0) <= 0.05, note.str());
    }

    {  // simulator accuracy on a constant-coefficient system
        const CompactInterval k{0.0, 1.0};
        const double a0 = -0.8, b0 = 1.3, u0 = 0.7, x00 = 0.4, horizon = 2.0;
        const SampledField a = tabulate(k, 11, 1, 1, [&](double, int, int) { return a0; });
        const SampledField b = tabulate(k, 11, 1, 1, [&](double, int, int) { return b0; });
        const SampledField x0 = tabulate(k, 11, 1, 1, [&](double, int, int) { return x00; });
        const ControlSchedule sched{horizon, 1, Eigen::MatrixXd::Constant(1, 1, u0)};
        const SampledField xT = simulate(a, b, x0, sched, 200);
        const double want =
            std::exp(a0 * horizon) * x00 + (std::exp(a0 * horizon) - 1.0) / a0 * b0 * u0;
        const double rel = std::abs(xT.scalar(5) - want) / std::abs(want);
        std::ostringstream note;
        note << "relative error " << rel;
        report("criterion 3: simulator matches the closed form within 1e-6", rel <= 1e-6,
               note.str());
    }
}

// ---- criterion 4: grid stability ------------------------------------------

void criterion_stability() {
    const char* files[] = {
        "example_2_1.json",     "example_2_2.json",    "example_2_4.json",
        "coupled_example.json", "jordan2_full.json",   "jordan2_deficient.json",
        "jordan3_full.json",    "jordan3_deficient.json",
    };
    for (const char* f : files) {
        const TimedVerdict base = analyze_fixture(f);
        AnalysisConfig doubled;
        doubled.n_grid = 401;
        doubled.n_eta = 256;
        doubled.eta_per_channel = 64;
        const TimedVerdict refined = analyze_fixture(f, doubled);
        const bool ok = base.verdict.status == refined.verdict.status;
        std::ostringstream note;
        note << to_string(base.verdict.status) << " vs " << to_string(refined.verdict.status);
        report(std::string("criterion 4: verdict stable under doubling for ") + f, ok,
               note.str());
    }
}

}  // namespace

int main() {
    criterion_regression();
    criterion_invariants();
    criterion_synthesis();
    criterion_stability();
    std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << "\n";
    return failures == 0 ? 0 : 1;
}
