#include "co2bench/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "co2bench/errors.hpp"
#include "co2bench/fit_metrics.hpp"
#include "co2bench/params.hpp"

namespace co2bench {

namespace {

// Largest order <= cap for which the lifted regressor keeps full column
// rank on this day's events. Shifted segment indicators collide or vanish
// once the order outgrows the event spacing (short segments, late events),
// and adding columns never restores lost rank, so binary search works.
int max_identifiable_order(const std::vector<int>& events, int n_samples, int cap) {
    const int p = static_cast<int>(events.size());
    int hi = std::max(1, std::min(cap, n_samples / std::max(1, p)));
    int lo = 1, best = 1;
    while (lo <= hi) {
        const int mid = lo + (hi - lo) / 2;
        const Eigen::MatrixXd phi = build_phi(events, n_samples, mid);
        if (phi.colPivHouseholderQr().rank() == phi.cols()) {
            best = mid;
            lo = mid + 1;
        } else {
            hi = mid - 1;
        }
    }
    return best;
}

} // namespace

const char* method_name(Method m) { return m == Method::baseline ? "baseline" : "kernel"; }

Method parse_method(const std::string& name) {
    if (name == "baseline") return Method::baseline;
    if (name == "kernel") return Method::kernel;
    throw ConfigError("unknown method '" + name + "' (valid: baseline, kernel)");
}

std::vector<DayProblem> extract_day_problems(const Dataset& ds, const BenchOptions& opts) {
    if (ds.size() != static_cast<std::size_t>(kWeekSamples) || ds.co2.step_s != kStepSeconds)
        throw ConfigError("extract_day_problems: dataset does not cover a canonical week");
    if (opts.order < 1) throw ConfigError("extract_day_problems: order must be at least 1");

    RoomParams room; // defaults stand in when the sidecar lacks them
    if (ds.params.contains("room")) room = params_from_json(ds.params["room"]);
    const double outdoor = room.co2_outdoor_ppm;
    const double ppm_step = room.gen_rate_per_person * kStepSeconds * 1e6 / room.volume();

    std::vector<DayProblem> out;
    for (int day = 1; day <= 5; ++day) {
        const DayWindow w{day, opts.start_min, opts.end_min};
        const TimeSeries noisy = slice_window(ds.co2_noise, w);
        const TimeSeries clean = slice_window(ds.co2, w);
        const TimeSeries occ = slice_window(ds.occupancy, w);
        const int N = static_cast<int>(noisy.size());

        DayProblem dp;
        dp.day_index = day;
        dp.ppm_per_person_step = ppm_step;
        dp.problem.order = opts.order;
        dp.problem.y.resize(N);
        for (int i = 0; i < N; ++i) dp.problem.y(i) = noisy.values[static_cast<std::size_t>(i)] - outdoor;
        dp.co2_ref.resize(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i)
            dp.co2_ref[static_cast<std::size_t>(i)] = clean.values[static_cast<std::size_t>(i)] - outdoor;
        dp.occ_ref = occ.values;
        // Segment ends: every change point of the headcount, plus the window
        // end. Only the change positions leak into the problem, not the
        // counts themselves.
        for (int i = 1; i < N; ++i)
            if (occ.values[static_cast<std::size_t>(i)] != occ.values[static_cast<std::size_t>(i - 1)])
                dp.problem.events.push_back(i);
        if (dp.problem.events.empty() || dp.problem.events.back() != N)
            dp.problem.events.push_back(N);
        out.push_back(std::move(dp));
    }
    return out;
}

DayEval evaluate_day(const DayProblem& dp, Method method, const BenchOptions& opts) {
    DayEval ev;
    ev.day_index = dp.day_index;
    const int N = static_cast<int>(dp.problem.y.size());
    try {
        BlindIdProblem prob = dp.problem;
        BlindIdResult res;
        if (method == Method::baseline) {
            prob.order = max_identifiable_order(prob.events, N, prob.order);
            res = baseline_identify(prob);
        } else {
            prob.order = std::max(1, std::min(prob.order, N - 1));
            res = kernel_identify(prob, opts.kernel);
        }
        ev.order_used = prob.order;
        ev.converged = res.converged;
        ev.result = res;

        ev.fit_co2 = fit_co2(std::span<const double>(res.y_hat.data(),
                                                     static_cast<std::size_t>(res.y_hat.size())),
                             dp.co2_ref);

        // Integer snap can latch onto a rational multiple of the true scale
        // once segment estimates carry a few percent of error. The response's
        // first tap pins the scale physically — one person raises a sealed
        // room by ppm_per_person_step per sample — so when the estimated
        // response is long enough to resolve that tap, the sweep is confined
        // to a window around the implied scale. The window is asymmetric:
        // peaked estimates overshoot the tap more often than smeared ones
        // undershoot it, and the nearest competing rationals (double / half
        // scale) crowd the edges. Short (clamped) responses smear the
        // one-step gain across few taps and get the default sweep instead.
        std::pair<double, double> c_range{0.0, 0.0};
        const double top_tap = res.q.size() > 0 ? res.q.cwiseAbs().maxCoeff() : 0.0;
        if (prob.order >= 15 && top_tap > 0.0) {
            const double c0 = top_tap / dp.ppm_per_person_step;
            c_range = {c0 / 1.5, c0 * 1.7};
        }
        const auto [qs, xs] = resolve_scale(res.q, res.x, ScaleMode::integer_snap,
                                            segment_lengths(prob.events), c_range);
        const Eigen::MatrixXd H = build_event_matrix(prob.events, N);
        const Eigen::VectorXd o_hat = H * xs;
        ev.occ_hat.assign(o_hat.data(), o_hat.data() + o_hat.size());
        ev.fit_occupancy = fit_occupancy(ev.occ_hat, dp.occ_ref);

        ev.co2_hat.assign(res.y_hat.data(), res.y_hat.data() + res.y_hat.size());
        ev.ok = true;
    } catch (const std::exception& e) {
        ev.ok = false;
        ev.error = e.what();
    }
    return ev;
}

int MethodReport::days_ok() const {
    int k = 0;
    for (const auto& d : days) k += d.ok ? 1 : 0;
    return k;
}

namespace {

double avg_over_ok(const std::vector<DayEval>& days, double DayEval::*field) {
    double acc = 0.0;
    int k = 0;
    for (const auto& d : days) {
        if (d.ok) {
            acc += d.*field;
            ++k;
        }
    }
    return k > 0 ? acc / k : std::numeric_limits<double>::quiet_NaN();
}

} // namespace

double MethodReport::avg_fit_co2() const { return avg_over_ok(days, &DayEval::fit_co2); }
double MethodReport::avg_fit_occupancy() const { return avg_over_ok(days, &DayEval::fit_occupancy); }

std::vector<MethodReport> run_benchmark(const std::vector<Dataset>& datasets,
                                        const std::vector<Method>& methods,
                                        const BenchOptions& opts) {
    std::vector<std::vector<DayProblem>> problems;
    problems.reserve(datasets.size());
    for (const Dataset& ds : datasets) problems.push_back(extract_day_problems(ds, opts));

    std::vector<MethodReport> reports;
    for (Method m : methods) {
        for (std::size_t d = 0; d < datasets.size(); ++d) {
            MethodReport rep;
            rep.dataset = datasets[d].scenario;
            rep.method = m;
            rep.start_min = opts.start_min;
            rep.end_min = opts.end_min;
            for (const DayProblem& dp : problems[d]) rep.days.push_back(evaluate_day(dp, m, opts));
            reports.push_back(std::move(rep));
        }
    }
    return reports;
}

namespace {

std::string fit4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

} // namespace

std::string report_to_csv(const std::vector<MethodReport>& reports) {
    std::ostringstream out;
    out << "dataset,day,method,fit_co2,fit_occupancy,converged\n";
    for (const auto& rep : reports) {
        for (const auto& d : rep.days) {
            out << rep.dataset << ',' << d.day_index << ',' << method_name(rep.method) << ',';
            if (d.ok)
                out << fit4(d.fit_co2) << ',' << fit4(d.fit_occupancy) << ',' << (d.converged ? 1 : 0);
            else
                out << ",," << 0;
            out << '\n';
        }
    }
    return out.str();
}

std::string summary_table(const std::vector<MethodReport>& reports) {
    std::ostringstream out;
    char buf[128];
    Method current{};
    bool first = true;
    for (const auto& rep : reports) {
        if (first || rep.method != current) {
            current = rep.method;
            first = false;
            out << "method: " << method_name(current) << '\n';
            std::snprintf(buf, sizeof buf, "  %-10s %12s %12s %8s\n", "dataset", "fit_co2[%]",
                          "fit_occ[%]", "days");
            out << buf;
        }
        std::snprintf(buf, sizeof buf, "  %-10s %12.2f %12.2f %5d/%d\n", rep.dataset.c_str(),
                      rep.avg_fit_co2() * 100.0, rep.avg_fit_occupancy() * 100.0, rep.days_ok(),
                      static_cast<int>(rep.days.size()));
        out << buf;
    }
    return out.str();
}

} // namespace co2bench
