#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "co2bench/bench.hpp"
#include "co2bench/errors.hpp"
#include "co2bench/fit_metrics.hpp"
#include "co2bench/rng.hpp"
#include "co2bench/room_sim.hpp"
#include "co2bench/scenario.hpp"

using namespace co2bench;
using Eigen::VectorXd;

namespace {

// A structurally valid but physically dead week: empty room, flat sensor.
Dataset make_flat_dataset() {
    Dataset ds;
    for (std::size_t i = 0; i < kChannelNames.size(); ++i) channel(ds, i) = make_week_series();
    for (std::size_t t = 0; t < ds.co2.size(); ++t) {
        ds.co2.values[t] = 500.0;
        ds.co2_noise.values[t] = 500.0;
    }
    ds.scenario = "flat";
    ds.seed = 1;
    ds.params = {{"room", {{"co2_outdoor_ppm", 420.0}}}};
    return ds;
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string line; std::getline(is, line);) out.push_back(line);
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

} // namespace

TEST_CASE("co2 fit measures error against the reference spread") {
    const std::vector<double> y = {1.0, 2.0, 3.0};
    CHECK(fit_co2(y, y) == 1.0);

    const std::vector<double> mean_pred = {2.0, 2.0, 2.0};
    CHECK(fit_co2(mean_pred, y) == doctest::Approx(0.0).epsilon(1e-15));

    const std::vector<double> off = {1.0, 2.0, 4.0};
    CHECK(fit_co2(off, y) == doctest::Approx(1.0 - std::sqrt(0.5)).epsilon(1e-12));

    // Shifting estimate and reference together changes nothing.
    const std::vector<double> ys = {101.0, 102.0, 103.0};
    const std::vector<double> offs = {101.0, 102.0, 104.0};
    CHECK(fit_co2(offs, ys) == doctest::Approx(fit_co2(off, y)).epsilon(1e-12));

    CHECK_THROWS_AS(fit_co2(off, std::vector<double>{1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_co2(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(fit_co2(off, mean_pred), NumericalError); // constant reference
}

TEST_CASE("occupancy fit measures error against the raw signal energy") {
    const std::vector<double> truth = {2.0, 2.0};
    const std::vector<double> est = {1.0, 1.0};
    CHECK(fit_occupancy(est, truth) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK(fit_occupancy(truth, truth) == 1.0);

    // Unlike the co2 fit, a common shift changes the score: the denominator
    // is the raw energy, not the spread.
    const std::vector<double> truth_s = {7.0, 7.0};
    const std::vector<double> est_s = {6.0, 6.0};
    CHECK(fit_occupancy(est_s, truth_s) > fit_occupancy(est, truth));

    // An all-zero guess on mostly-empty truth still pays full price.
    const std::vector<double> sparse = {0.0, 0.0, 0.0, 3.0};
    const std::vector<double> zeros(4, 0.0);
    CHECK(fit_occupancy(zeros, sparse) == doctest::Approx(0.0).epsilon(1e-15));

    CHECK_THROWS_AS(fit_occupancy(zeros, std::vector<double>(4, 0.0)), NumericalError);
    CHECK_THROWS_AS(fit_occupancy(std::vector<double>{1.0}, truth), std::invalid_argument);
}

TEST_CASE("fits never exceed one") {
    Rng rng(64);
    for (int trial = 0; trial < 50; ++trial) {
        const int N = static_cast<int>(rng.uniform_int(2, 40));
        std::vector<double> a(static_cast<std::size_t>(N)), b(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i) {
            a[static_cast<std::size_t>(i)] = rng.normal(0.0, 3.0);
            b[static_cast<std::size_t>(i)] = rng.normal(1.0, 2.0);
        }
        CHECK(fit_co2(a, b) <= 1.0);
        CHECK(fit_occupancy(a, b) <= 1.0);
    }
}

TEST_CASE("weekday extraction keeps the problems blind") {
    const Scenario sc = make_scenario(OccupancyLevel::medium, WindowMode::closed, 7);
    const Dataset ds = simulate_week(sc, RoomParams{}, ControllerConfig{});

    BenchOptions opts;
    const auto problems = extract_day_problems(ds, opts);
    REQUIRE(problems.size() == 5);

    const double outdoor = 420.0;
    for (std::size_t d = 0; d < problems.size(); ++d) {
        const DayProblem& dp = problems[d];
        CHECK(dp.day_index == static_cast<int>(d) + 1); // Monday..Friday
        const int N = static_cast<int>(dp.problem.y.size());
        CHECK(N == 181);
        CHECK(dp.co2_ref.size() == 181);
        CHECK(dp.occ_ref.size() == 181);

        REQUIRE(!dp.problem.events.empty());
        CHECK(dp.problem.events.back() == N);
        for (std::size_t k = 1; k < dp.problem.events.size(); ++k)
            CHECK(dp.problem.events[k] > dp.problem.events[k - 1]);

        // y is the noisy sensor minus outdoor level, aligned to the window.
        const std::size_t base = (d + 1) * kSamplesPerDay + 180;
        for (int i : {0, 50, 180}) {
            CHECK(dp.problem.y(i) ==
                  doctest::Approx(ds.co2_noise.values[base + static_cast<std::size_t>(i)] -
                                  outdoor).epsilon(1e-12));
            CHECK(dp.co2_ref[static_cast<std::size_t>(i)] ==
                  doctest::Approx(ds.co2.values[base + static_cast<std::size_t>(i)] - outdoor)
                      .epsilon(1e-12));
            CHECK(dp.occ_ref[static_cast<std::size_t>(i)] ==
                  ds.occupancy.values[base + static_cast<std::size_t>(i)]);
        }

        // Occupancy is constant between consecutive events; the events list
        // is exactly the change-point set (plus the forced terminator).
        std::size_t next_ev = 0;
        for (int i = 1; i < N; ++i) {
            if (dp.problem.events[next_ev] == i) {
                ++next_ev;
                continue; // a change is allowed (not required for the terminator)
            }
            CHECK(dp.occ_ref[static_cast<std::size_t>(i)] ==
                  dp.occ_ref[static_cast<std::size_t>(i - 1)]);
        }
        // Every interior event really is a change.
        for (std::size_t k = 0; k + 1 < dp.problem.events.size(); ++k) {
            const int t = dp.problem.events[k];
            CHECK(dp.occ_ref[static_cast<std::size_t>(t)] !=
                  dp.occ_ref[static_cast<std::size_t>(t - 1)]);
        }
    }

    // Too-short records are rejected instead of mis-sliced.
    Dataset small = make_flat_dataset();
    for (std::size_t i = 0; i < kChannelNames.size(); ++i)
        channel(small, i).values.resize(100);
    CHECK_THROWS_AS(extract_day_problems(small, opts), ConfigError);
}

TEST_CASE("day evaluation scores both methods on a synthetic day") {
    // One hand-built day: three occupancy levels through a decaying response.
    DayProblem dp;
    dp.day_index = 1;
    dp.problem.events = {60, 120, 181};
    dp.problem.order = 30;
    // First tap matches DayProblem's default one-person step so the snap
    // anchor sees a physically scaled response.
    VectorXd q0(8), x0(3);
    for (int k = 1; k <= 8; ++k) q0(k - 1) = 5.9 * std::pow(0.9, k - 1);
    x0 << 2.0, 5.0, 3.0;
    const VectorXd clean = predict_output(q0, x0, dp.problem.events);
    Rng rng(5150);
    dp.problem.y = clean;
    for (int i = 0; i < 181; ++i) dp.problem.y(i) += 0.3 * rng.normal();
    dp.co2_ref.assign(clean.data(), clean.data() + clean.size());
    const Eigen::MatrixXd H = build_event_matrix(dp.problem.events, 181);
    const VectorXd occ = H * x0;
    dp.occ_ref.assign(occ.data(), occ.data() + occ.size());

    BenchOptions opts;
    const DayEval kb = evaluate_day(dp, Method::kernel, opts);
    REQUIRE(kb.ok);
    CHECK(kb.order_used == 30);
    CHECK(kb.fit_co2 > 0.95);
    CHECK(kb.fit_occupancy > 0.8);
    CHECK(kb.co2_hat.size() == 181);
    CHECK(kb.occ_hat.size() == 181);
    // The reported traces match the scored quantities.
    CHECK(fit_co2(kb.co2_hat, dp.co2_ref) == doctest::Approx(kb.fit_co2).epsilon(1e-12));
    CHECK(fit_occupancy(kb.occ_hat, dp.occ_ref) ==
          doctest::Approx(kb.fit_occupancy).epsilon(1e-12));
    // Snapped headcount is piecewise constant on the event grid.
    CHECK(kb.occ_hat[0] == kb.occ_hat[59]);
    CHECK(kb.occ_hat[60] == kb.occ_hat[119]);

    const DayEval bb = evaluate_day(dp, Method::baseline, opts);
    REQUIRE(bb.ok);
    CHECK(bb.order_used == 30); // floor(181 / 3) = 60 does not bind at 30
    CHECK(bb.fit_co2 > 0.9);    // clean rank-1 structure, mild noise

    // Order clamps: many segments starve the direct method of samples.
    DayProblem crowded = dp;
    crowded.problem.events.clear();
    for (int t = 6; t <= 150; t += 6) crowded.problem.events.push_back(t);
    crowded.problem.events.push_back(181);
    const int p = static_cast<int>(crowded.problem.events.size());
    VectorXd xc(p);
    for (int i = 0; i < p; ++i) xc(i) = 1.0 + (i % 4);
    const VectorXd yc = predict_output(q0, xc, crowded.problem.events);
    crowded.problem.y = yc;
    crowded.co2_ref.assign(yc.data(), yc.data() + yc.size());
    const Eigen::MatrixXd Hc = build_event_matrix(crowded.problem.events, 181);
    const VectorXd oc = Hc * xc;
    crowded.occ_ref.assign(oc.data(), oc.data() + oc.size());

    const DayEval cb = evaluate_day(crowded, Method::baseline, opts);
    CHECK(cb.order_used == 181 / p);
    const DayEval ck = evaluate_day(crowded, Method::kernel, opts);
    CHECK(ck.order_used == 30);

    // A late final event caps the direct method even harder: columns for the
    // last segment would otherwise shift clean off the day.
    DayProblem late = dp;
    late.problem.events = {60, 120, 176, 181};
    VectorXd xl(4);
    xl << 2.0, 5.0, 3.0, 1.0;
    const VectorXd yl = predict_output(q0, xl, late.problem.events);
    late.problem.y = yl;
    late.co2_ref.assign(yl.data(), yl.data() + yl.size());
    const Eigen::MatrixXd Hl = build_event_matrix(late.problem.events, 181);
    const VectorXd ol = Hl * xl;
    late.occ_ref.assign(ol.data(), ol.data() + ol.size());
    const DayEval lb = evaluate_day(late, Method::baseline, opts);
    CHECK(lb.order_used == 181 - 176 - 1);
}

TEST_CASE("failed days are recorded, not thrown") {
    const Dataset ds = make_flat_dataset();
    BenchOptions opts;
    const auto reports = run_benchmark({ds}, {Method::baseline, Method::kernel}, opts);
    REQUIRE(reports.size() == 2);
    for (const auto& rep : reports) {
        CHECK(rep.days.size() == 5);
        CHECK(rep.days_ok() == 0);
        CHECK(std::isnan(rep.avg_fit_co2()));
        CHECK(std::isnan(rep.avg_fit_occupancy()));
        for (const auto& day : rep.days) {
            CHECK(!day.ok);
            CHECK(!day.error.empty());
        }
    }

    // Failed days keep their row with empty fit cells.
    const std::string csv = report_to_csv(reports);
    const auto lines = split_lines(csv);
    REQUIRE(lines.size() == 1 + 2 * 5);
    CHECK(lines[0] == "dataset,day,method,fit_co2,fit_occupancy,converged");
    const auto cells = split_csv(lines[1]);
    REQUIRE(cells.size() == 6);
    CHECK(cells[0] == "flat");
    CHECK(cells[1] == "1");
    CHECK(cells[2] == "baseline");
    CHECK(cells[3] == "");
    CHECK(cells[4] == "");
    CHECK(cells[5] == "0");
}

TEST_CASE("benchmark report layout on a real dataset") {
    const Scenario sc = make_scenario(OccupancyLevel::low, WindowMode::closed, 42);
    const Dataset ds = simulate_week(sc, RoomParams{}, ControllerConfig{});

    BenchOptions opts;
    const auto reports = run_benchmark({ds}, {Method::baseline, Method::kernel}, opts);
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].method == Method::baseline);
    CHECK(reports[1].method == Method::kernel);
    CHECK(reports[0].dataset == "kth_lowc");
    CHECK(reports[0].start_min == 540);
    CHECK(reports[0].end_min == 1080);

    for (const auto& rep : reports) {
        REQUIRE(rep.days.size() == 5);
        // Averages are plain means over the evaluated days.
        double sc2 = 0.0, socc = 0.0;
        int ok = 0;
        for (const auto& day : rep.days) {
            if (!day.ok) continue;
            ++ok;
            sc2 += day.fit_co2;
            socc += day.fit_occupancy;
            CHECK(day.fit_co2 <= 1.0);
            CHECK(day.fit_occupancy <= 1.0);
        }
        REQUIRE(ok == rep.days_ok());
        REQUIRE(ok > 0);
        CHECK(rep.avg_fit_co2() == doctest::Approx(sc2 / ok).epsilon(1e-12));
        CHECK(rep.avg_fit_occupancy() == doctest::Approx(socc / ok).epsilon(1e-12));
    }
    // The kernel should beat the direct method on its home turf.
    CHECK(reports[1].avg_fit_occupancy() > reports[0].avg_fit_occupancy());

    const std::string csv = report_to_csv(reports);
    const auto lines = split_lines(csv);
    REQUIRE(lines.size() == 1 + 2 * 5);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 6);
        CHECK(cells[0] == "kth_lowc");
        const int day = std::stoi(cells[1]);
        CHECK(day >= 1);
        CHECK(day <= 5);
        CHECK((cells[2] == "baseline" || cells[2] == "kernel"));
        CHECK(cells[3].find('.') != std::string::npos);
        CHECK(cells[3].size() - cells[3].find('.') - 1 == 4); // four decimals
        CHECK((cells[5] == "0" || cells[5] == "1"));
    }
    // Baseline rows come first: method is the outer loop.
    CHECK(split_csv(lines[1])[2] == "baseline");
    CHECK(split_csv(lines[6])[2] == "kernel");

    const std::string summary = summary_table(reports);
    CHECK(summary.find("method: baseline") != std::string::npos);
    CHECK(summary.find("method: kernel") != std::string::npos);
    CHECK(summary.find("kth_lowc") != std::string::npos);
    CHECK(summary.find("fit_co2") != std::string::npos);
}

TEST_CASE("method names parse both ways") {
    CHECK(parse_method("baseline") == Method::baseline);
    CHECK(parse_method("kernel") == Method::kernel);
    CHECK(method_name(Method::baseline) == std::string("baseline"));
    CHECK(method_name(Method::kernel) == std::string("kernel"));
    CHECK_THROWS_AS(parse_method("magic"), ConfigError);
}
