// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "emdcast/bench.hpp"
#include "emdcast/emd.hpp"
#include "emdcast/ensemble.hpp"
#include "emdcast/error.hpp"
#include "emdcast/io.hpp"
#include "emdcast/metrics.hpp"
#include "emdcast/predict.hpp"
#include "emdcast/series.hpp"
#include "emdcast/spectral.hpp"
#include "test_common.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace emdcast;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<TimeSeries> random_series(std::size_t count, std::size_t n) {
    std::vector<TimeSeries> out;
    for (std::size_t i = 0; i < count; ++i) {
        const auto preset = i % 2 == 0 ? Preset::Load : Preset::Wind;
        out.push_back(synth_generate(preset_spec(preset, n, 1000 + i)));
    }
    return out;
}

Outcome reconstruction_identity() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (const auto& ts : random_series(50, 1024)) {
        const auto x = ts.values();
        const auto d = emd(x);
        // Sum the parts directly rather than through reconstruct().
        double err = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double s = d.residual[i];
            for (const auto& imf : d.imfs) s += imf[i];
            err = std::max(err, std::abs(s - x[i]));
        }
        worst = std::max(worst, err / testutil::max_abs(std::vector<double>(x.begin(), x.end())));
    }
    const double secs = seconds_since(t0);
    std::ostringstream s;
    s << "worst relative error " << worst << ", " << secs << " s";
    return {worst <= 1e-9 && secs <= 30.0, s.str()};
}

Outcome imf_cap() {
    std::size_t most = 0;
    for (const auto& ts : random_series(50, 1024)) most = std::max(most, emd(ts.values()).imf_count());
    return {most <= 10, "largest IMF count " + std::to_string(most)};
}

Outcome tone_separation() {
    const auto t0 = Clock::now();
    const std::size_t n = 1000;
    const auto fast = testutil::sine(n, 10.0);
    const auto slow = testutil::sine(n, 100.0);
    const auto d = emd(testutil::add(fast, slow));
    if (d.imf_count() < 2) return {false, "fewer than 2 IMFs"};
    const double c1 = testutil::pearson(testutil::interior(d.imfs[0], 0.05), testutil::interior(fast, 0.05));
    const double c2 = testutil::pearson(testutil::interior(d.imfs[1], 0.05), testutil::interior(slow, 0.05));
    const double secs = seconds_since(t0);
    std::ostringstream s;
    s << "corr IMF1 " << c1 << ", IMF2 " << c2 << ", " << secs << " s";
    return {c1 >= 0.95 && c2 >= 0.90 && secs <= 5.0, s.str()};
}

Outcome snr_gap() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::ostringstream s;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto ts = synth_generate(preset_spec(Preset::Wind, 744, seed));
        EnsembleConfig c;
        c.num_ensembles = 200;
        c.noise_std_fraction = 0.2;
        c.master_seed = seed;
        const double e = reconstruction_snr(ts.values(), eemd(ts.values(), c));
        const double ce = reconstruction_snr(ts.values(), ceemd(ts.values(), c));
        ok = ok && ce >= 150.0 && e <= 100.0;
        s << "seed " << seed << ": CEEMD " << ce << " dB, EEMD " << e << " dB; ";
    }
    const double secs = seconds_since(t0);
    s << secs << " s";
    return {ok && secs <= 180.0, s.str()};
}

Outcome zero_noise() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto x = testutil::add(testutil::gaussian(600, 1.0, seed), testutil::sine(600, 37.0, 2.0));
        const auto ref = emd(x);
        EnsembleConfig c;
        c.noise_std_fraction = 0.0;
        c.num_ensembles = 4;
        c.master_seed = seed;
        for (const auto& d : {eemd(x, c), ceemd(x, c)}) {
            if (d.imf_count() != ref.imf_count()) return {false, "IMF count differs from EMD"};
            for (std::size_t k = 0; k < d.imf_count(); ++k) {
                for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(d.imfs[k][i] - ref.imfs[k][i]));
            }
            for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(d.residual[i] - ref.residual[i]));
        }
    }
    std::ostringstream s;
    s << "max deviation " << worst;
    return {worst <= 1e-12, s.str()};
}

Outcome pacf_oracle() {
    const auto t0 = Clock::now();
    const std::size_t n = 5000;
    const auto x = testutil::ar1(n, 0.8, 1.0, 2024);
    const auto p = pacf(x, 20);
    const double band = 1.96 / std::sqrt(static_cast<double>(n));
    int inside = 0;
    for (std::size_t k = 2; k <= 20; ++k) inside += std::abs(p.values[k]) <= band;
    const double secs = seconds_since(t0);
    std::ostringstream s;
    s << "pacf(1) " << p.values[1] << ", " << inside << "/19 inside band, " << secs << " s";
    return {std::abs(p.values[1] - 0.8) <= 0.05 && inside >= 0.8 * 19 && secs <= 5.0, s.str()};
}

Outcome stft_oracle() {
    const std::size_t w = 64;
    const auto x = testutil::sine(1024, 8.0);
    const auto s = stft(x, w, 16);
    std::size_t at_bin8 = 0;
    double worst = 0.0;
    for (std::size_t f = 0; f < s.frames(); ++f) {
        // Argmax and frame-energy bookkeeping done here, not via the library helpers.
        std::size_t best = 0;
        for (std::size_t k = 1; k < s.bins(); ++k) {
            if (s.magnitudes[f][k] > s.magnitudes[f][best]) best = k;
        }
        at_bin8 += best == 8;
        double energy = 0.0, spectral = 0.0;
        for (std::size_t i = 0; i < w; ++i) {
            const double hann = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(w)));
            energy += std::pow(hann * x[s.frame_start(f) + i], 2);
        }
        for (std::size_t k = 0; k < s.bins(); ++k) {
            spectral += (k == 0 || k == w / 2 ? 1.0 : 2.0) * s.magnitudes[f][k] * s.magnitudes[f][k];
        }
        spectral /= static_cast<double>(w);
        worst = std::max(worst, std::abs(spectral - energy) / energy);
    }
    std::ostringstream out;
    out << at_bin8 << "/" << s.frames() << " frames at bin 8, Parseval rel err " << worst;
    return {at_bin8 == s.frames() && worst <= 1e-6, out.str()};
}

Outcome metric_exactness() {
    const std::vector<double> y{100.0}, f{110.0}, z{0.0, 0.0}, g{3.0, 4.0};
    const double m = mape(y, f);
    const double r = rmse(z, g);
    bool threw = false;
    try {
        const std::vector<double> with_zero{5.0, 0.0}, any{5.0, 1.0};
        mape(with_zero, any);
    } catch (const InputError&) {
        threw = true;
    }
    std::ostringstream s;
    s.precision(17);
    s << "mape " << m << ", rmse " << r << ", zero actual rejected " << (threw ? "yes" : "no");
    return {m == 10.0 && std::abs(r - 3.5355339059327378) <= 1e-12 && threw, s.str()};
}

Outcome engine_sanity() {
    const auto t0 = Clock::now();
    FeatureMatrix line;
    line.lag_labels = {1};
    for (int i = 0; i < 200; ++i) {
        const double x = i / 199.0;
        line.rows.push_back({x});
        line.targets.push_back(2.0 * x);
    }
    const auto elm = elm_train(line, 50, 1);
    std::vector<double> pred;
    for (const auto& row : line.rows) pred.push_back(elm_predict(elm, row));
    const double elm_rel = testutil::direct_rmse(line.targets, pred) / testutil::sample_std(line.targets);

    FeatureMatrix wave;
    wave.lag_labels = {1};
    for (int i = 0; i < 300; ++i) {
        const double x = i / 299.0;
        wave.rows.push_back({x});
        wave.targets.push_back(std::sin(2.0 * std::numbers::pi * x));
    }
    const auto svr = svr_train(wave, 10.0, 50.0, 0.01);
    std::vector<double> beta(wave.row_count(), 0.0);
    for (std::size_t i = 0; i < svr.support_indices.size(); ++i) beta[svr.support_indices[i]] = svr.dual_coefficients[i];
    pred.clear();
    double kkt = 0.0;
    for (std::size_t t = 0; t < wave.row_count(); ++t) {
        const double fx = svr_predict(svr, wave.rows[t]);
        pred.push_back(fx);
        const double r = wave.targets[t] - fx, e = svr.epsilon_tube, C = svr.C;
        double v;
        if (beta[t] == 0.0) v = std::max(0.0, std::abs(r) - e);
        else if (std::abs(beta[t]) < C * (1.0 - 1e-9)) v = std::abs(r - (beta[t] > 0 ? e : -e));
        else v = beta[t] > 0 ? std::max(0.0, e - r) : std::max(0.0, r + e);
        kkt = std::max(kkt, v);
    }
    const double svr_rmse = testutil::direct_rmse(wave.targets, pred);
    const double secs = seconds_since(t0);
    std::ostringstream s;
    s << "ELM rmse/std " << elm_rel << ", SVR rmse " << svr_rmse << ", worst KKT residual " << kkt << ", "
      << secs << " s";
    return {elm_rel <= 0.01 && svr_rmse <= 0.05 && kkt <= 1e-3 && secs <= 30.0, s.str()};
}

double mean_over(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s / static_cast<double>(hi - lo);
}

Outcome boundary_effect() {
    const auto t0 = Clock::now();
    int visible = 0;
    std::ostringstream s;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto ts = synth_generate(preset_spec(Preset::Wind, 2000, seed));
        const auto b = boundary_divergence(ts, 48, {}, 48);
        double best_ratio = 0.0;
        for (const auto& d : b.per_imf) {
            const double tail = mean_over(d, d.size() - 5, d.size());
            const double interior = mean_over(d, 10, 31);
            best_ratio = std::max(best_ratio, interior > 0 ? tail / interior : (tail > 0 ? INFINITY : 0.0));
        }
        visible += best_ratio >= 2.0;
        s << "seed " << seed << " best ratio " << best_ratio << "; ";
    }
    const double secs = seconds_since(t0);
    s << secs << " s";
    return {visible >= 4 && secs <= 60.0, std::to_string(visible) + "/5 seeds. " + s.str()};
}

struct SuiteRun {
    std::vector<ScenarioReport> reports;
    std::string json;
    double seconds = 0.0;
};

SuiteRun run_suite() {
    SuiteOptions so;
    so.length = 2000;
    so.threads = 0;
    SuiteRun out;
    const auto t0 = Clock::now();
    out.reports = run_benchmark_suite({Preset::Load, Preset::Wind}, {Engine::ELM, Engine::SVR}, {1, 2, 3, 4, 5}, so);
    out.seconds = seconds_since(t0);
    out.json = reports_json(out.reports).dump();
    return out;
}

Outcome scenario_ordering(const SuiteRun& run) {
    bool ok = run.seconds <= 1200.0;
    std::ostringstream s;
    for (const char* preset : {"load", "wind"}) {
        for (auto engine : {Engine::ELM, Engine::SVR}) {
            const double i = median_rmse(run.reports, preset, engine, Scenario::I);
            const double ii = median_rmse(run.reports, preset, engine, Scenario::II);
            const double iii = median_rmse(run.reports, preset, engine, Scenario::III);
            const bool cell = i < iii && iii < ii;
            ok = ok && cell;
            s << preset << "/" << to_string(engine) << " I=" << i << " III=" << iii << " II=" << ii
              << (cell ? "" : " (order violated)") << "; ";
        }
    }
    for (const auto& r : run.reports) {
        if (r.error) {
            ok = false;
            s << "failed cell: " << *r.error << "; ";
        }
    }
    s << run.seconds << " s";
    return {ok, s.str()};
}

} // namespace

int main() {
    int failures = 0;
    const auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << o.detail
                  << std::endl;
    };

    report(1, "reconstruction identity", reconstruction_identity);
    report(2, "IMF cap", imf_cap);
    report(3, "tone separation", tone_separation);
    report(4, "CEEMD vs EEMD SNR", snr_gap);
    report(5, "zero-noise degeneracy", zero_noise);
    report(6, "PACF oracle", pacf_oracle);
    report(7, "STFT oracle", stft_oracle);
    report(8, "metric exactness", metric_exactness);
    report(9, "engine sanity", engine_sanity);
    report(10, "boundary effect", boundary_effect);

    std::optional<SuiteRun> first;
    report(11, "scenario ordering I < III < II", [&] {
        first = run_suite();
        return scenario_ordering(*first);
    });
    report(12, "suite determinism", [&]() -> Outcome {
        if (!first) return {false, "first suite run did not complete"};
        const auto second = run_suite();
        const bool same = second.json == first->json;
        std::ostringstream s;
        s << "report JSON " << (same ? "identical" : "differs") << " (" << first->json.size() << " bytes), second run "
          << second.seconds << " s";
        return {same, s.str()};
    });

    std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
