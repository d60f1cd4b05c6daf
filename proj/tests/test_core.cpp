#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "co2bench/dataset.hpp"
#include "co2bench/errors.hpp"
#include "co2bench/params.hpp"
#include "co2bench/rng.hpp"
#include "co2bench/time_series.hpp"

using namespace co2bench;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const fs::path p = fs::temp_directory_path() / "co2bench_test_core";
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("canonical grid constants") {
    CHECK(kSamplesPerDay == 480);
    CHECK(kWeekSamples == 3360);
    // The anchor date is a Sunday at midnight.
    using namespace std::chrono;
    const sys_seconds tp{seconds{kCanonicalStart}};
    CHECK(weekday{floor<days>(tp)} == Sunday);
    CHECK(hh_mm_ss<seconds>{tp - floor<days>(tp)}.hours().count() == 0);
}

TEST_CASE("timestamp format and parse round trip") {
    CHECK(format_timestamp(kCanonicalStart) == "2014-07-13T00:00:00Z");
    CHECK(format_timestamp(kCanonicalStart + 183) == "2014-07-13T00:03:03Z");
    CHECK(parse_timestamp("2014-07-13T00:00:00Z") == kCanonicalStart);
    CHECK(parse_timestamp("1970-01-01T00:00:00Z") == 0);
    for (std::int64_t t : {kCanonicalStart, kCanonicalStart + 86399L, std::int64_t{951854402}})
        CHECK(parse_timestamp(format_timestamp(t)) == t);
    CHECK_THROWS_AS(parse_timestamp("2014-07-13 00:00:00"), FormatError);
    CHECK_THROWS_AS(parse_timestamp("2014-13-01T00:00:00Z"), FormatError);
    CHECK_THROWS_AS(parse_timestamp("garbage"), FormatError);
}

TEST_CASE("week series shape and clock helpers") {
    const TimeSeries ts = make_week_series();
    CHECK(ts.size() == 3360);
    CHECK(ts.step_s == 180);
    CHECK(ts.minute_of_day(0) == 0);
    CHECK(ts.minute_of_day(20) == 60);
    CHECK(ts.minute_of_day(479) == 1437);
    CHECK(ts.minute_of_day(480) == 0); // next midnight
    CHECK(ts.time_at(3359) == kCanonicalStart + 3359 * 180);
}

TEST_CASE("slice_window clips one day inclusively") {
    TimeSeries ts = make_week_series();
    for (std::size_t i = 0; i < ts.size(); ++i) ts.values[i] = static_cast<double>(i);

    const TimeSeries nine_to_six = slice_window(ts, DayWindow{1, 9 * 60, 18 * 60});
    CHECK(nine_to_six.size() == 181);
    CHECK(nine_to_six.values.front() == 480 + 180);
    CHECK(nine_to_six.values.back() == 480 + 360);
    CHECK(nine_to_six.start_time == ts.time_at(660));
    CHECK(nine_to_six.step_s == 180);

    const TimeSeries full_day = slice_window(ts, DayWindow{0, 0, 24 * 60});
    CHECK(full_day.size() == 480);
    CHECK(full_day.values.back() == 479);

    const TimeSeries last_day = slice_window(ts, DayWindow{6, 0, 24 * 60});
    CHECK(last_day.values.back() == 3359);

    CHECK_THROWS_AS(slice_window(ts, DayWindow{7, 0, 24 * 60}), std::out_of_range);
    CHECK_THROWS_AS(slice_window(ts, DayWindow{-1, 0, 60}), std::out_of_range);
    CHECK_THROWS_AS(slice_window(ts, DayWindow{0, 600, 600}), std::invalid_argument);
    CHECK_THROWS_AS(slice_window(ts, DayWindow{0, 601, 700}), std::invalid_argument);
    CHECK_THROWS_AS(slice_window(ts, DayWindow{0, 0, 1441}), std::invalid_argument);
}

TEST_CASE("variance and snr") {
    CHECK(variance({1.0, 1.0, 1.0}) == 0.0);
    CHECK(variance({0.0, 2.0}) == 1.0);

    // Alternating +-2 has variance 4; +-0.2 has variance 0.04; the ratio is
    // exactly 100, i.e. 20 dB.
    TimeSeries sig = make_week_series(100);
    TimeSeries noi = make_week_series(100);
    for (std::size_t i = 0; i < 100; ++i) {
        sig.values[i] = i % 2 ? 2.0 : -2.0;
        noi.values[i] = i % 2 ? 0.2 : -0.2;
    }
    CHECK(snr_db(sig, noi) == doctest::Approx(20.0).epsilon(1e-12));

    TimeSeries flat = make_week_series(100);
    CHECK_THROWS_AS(snr_db(sig, flat), NumericalError);
    TimeSeries short_noise = make_week_series(99);
    CHECK_THROWS_AS(snr_db(sig, short_noise), std::invalid_argument);
}

TEST_CASE("rng streams are deterministic and well behaved") {
    Rng a(7), b(7), c(8);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(Rng(7).uniform01() == Rng(7).uniform01());
    CHECK(Rng(7).next_u64() != c.next_u64());
    CHECK(mix_seed(1, 2) != mix_seed(1, 3));
    CHECK(mix_seed(1, 2) != mix_seed(2, 2));

    Rng r(123);
    double acc = 0.0, acc2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double v = r.normal();
        acc += v;
        acc2 += v * v;
    }
    CHECK(std::abs(acc / n) < 0.03);
    CHECK(acc2 / n == doctest::Approx(1.0).epsilon(0.03));

    Rng u(9);
    int counts[6] = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < 6000; ++i) {
        const auto v = u.uniform_int(2, 7);
        REQUIRE(v >= 2);
        REQUIRE(v <= 7);
        counts[v - 2]++;
    }
    for (int k : counts) CHECK(k > 800);
}

TEST_CASE("room params defaults and derived quantities") {
    const RoomParams p;
    CHECK(p.volume() == doctest::Approx(232.0).epsilon(1e-12));
    // 232 m^3 * 1.5 ACH50 / 20 / 3600 s
    CHECK(p.tight_leak_flow() == doctest::Approx(232.0 * 0.075 / 3600.0).epsilon(1e-12));
    CHECK(p.gen_rate_per_person == 7.6e-6);
    CHECK_NOTHROW(validate_params(p));
    CHECK_NOTHROW(validate_controller(ControllerConfig{}));
}

TEST_CASE("params json round trip and overrides") {
    const RoomParams p;
    const RoomParams q = params_from_json(params_to_json(p));
    CHECK(q.gen_rate_per_person == p.gen_rate_per_person);
    CHECK(q.vent_flow_max == p.vent_flow_max);
    CHECK(params_to_json(q) == params_to_json(p));

    const ControllerConfig c;
    CHECK(controller_to_json(controller_from_json(controller_to_json(c))) == controller_to_json(c));

    // Metabolic rate drags the generation rate along unless pinned.
    const RoomParams met = params_from_json(json{{"activity_met", 0.9}});
    CHECK(met.gen_rate_per_person == doctest::Approx(3.8e-6).epsilon(1e-12));
    const RoomParams pinned =
        params_from_json(json{{"activity_met", 0.9}, {"gen_rate_per_person", 1e-6}});
    CHECK(pinned.gen_rate_per_person == 1e-6);

    CHECK_THROWS_AS(params_from_json(json{{"not_a_key", 1}}), ConfigError);
    CHECK_THROWS_AS(params_from_json(json{{"vent_flow_min", 0.5}, {"vent_flow_max", 0.1}}),
                    ConfigError);
    CHECK_THROWS_AS(controller_from_json(json{{"sat_low_ppm", 1200.0}}), ConfigError);
    CHECK_THROWS_AS(controller_from_json(json{{"kp", -1.0}}), ConfigError);
}

TEST_CASE("config file loader") {
    const fs::path dir = temp_dir();
    const fs::path cfg_path = dir / "cfg.json";
    {
        std::ofstream f(cfg_path);
        f << R"({"room": {"floor_area": 40.0}, "controller": {"kp": 1.0}})";
    }
    const SimConfig cfg = load_sim_config(cfg_path.string());
    CHECK(cfg.room.floor_area == 40.0);
    CHECK(cfg.room.room_height == 2.9);
    CHECK(cfg.controller.kp == 1.0);
    CHECK_THROWS_AS(load_sim_config((dir / "missing.json").string()), ConfigError);
    {
        std::ofstream f(cfg_path);
        f << "{not json";
    }
    CHECK_THROWS_AS(load_sim_config(cfg_path.string()), ConfigError);
}

TEST_CASE("format_double survives the round trip") {
    for (double v : {0.1, 1.0 / 3.0, 6.02e23, -7.25, 420.0, 1e-17, 0.0}) {
        CHECK(parse_double(format_double(v), "t") == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK_THROWS_AS(parse_double("12,5", "t"), FormatError);
    CHECK_THROWS_AS(parse_double("", "t"), FormatError);
}

namespace {

Dataset small_dataset() {
    Dataset ds;
    const std::size_t n = 12;
    for (std::size_t c = 0; c < kChannelNames.size(); ++c) {
        channel(ds, c) = make_week_series(n);
        for (std::size_t i = 0; i < n; ++i)
            channel(ds, c).values[i] = 0.1 * static_cast<double>(i) + 1.0 / (static_cast<double>(c) + 3.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
        ds.occupancy.values[i] = static_cast<double>(i % 4);
        ds.window_opening.values[i] = (i % 5) * 0.25;
    }
    ds.scenario = "kth_test";
    ds.seed = 99;
    ds.params = json{{"room", params_to_json(RoomParams{})}};
    return ds;
}

} // namespace

TEST_CASE("dataset csv+json round trip is bit exact") {
    const fs::path dir = temp_dir();
    const Dataset ds = small_dataset();
    const fs::path csv = dir / "roundtrip.csv";
    write_dataset(ds, csv.string());
    CHECK(fs::exists(dir / "roundtrip.json"));

    const Dataset back = read_dataset(csv.string());
    for (std::size_t c = 0; c < kChannelNames.size(); ++c) {
        INFO("channel ", kChannelNames[c]);
        CHECK(channel(back, c) == channel(ds, c));
    }
    CHECK(back.scenario == ds.scenario);
    CHECK(back.seed == ds.seed);
    CHECK(back.params == ds.params);
}

TEST_CASE("dataset read rejects malformed input") {
    const fs::path dir = temp_dir();
    const Dataset ds = small_dataset();
    const fs::path csv = dir / "ok.csv";
    write_dataset(ds, csv.string());

    // Wrong header name in one column.
    {
        std::ifstream in(csv);
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        const auto pos = all.find("co2_noise");
        all.replace(pos, 9, "co2_upper");
        std::ofstream out(dir / "badhdr.csv");
        out << all;
        std::ofstream js(dir / "badhdr.json");
        js << "{}";
    }
    CHECK_THROWS_WITH_AS(read_dataset((dir / "badhdr.csv").string()),
                         doctest::Contains("co2_noise"), FormatError);

    // Row with a missing cell.
    {
        std::ofstream out(dir / "badrow.csv");
        out << "timestamp";
        for (const char* n : kChannelNames) out << ',' << n;
        out << "\n2014-07-13T00:00:00Z,1,2,3\n";
        std::ofstream js(dir / "badrow.json");
        js << "{}";
    }
    CHECK_THROWS_AS(read_dataset((dir / "badrow.csv").string()), FormatError);

    // Sidecar gone.
    {
        fs::copy_file(csv, dir / "nosidecar.csv", fs::copy_options::overwrite_existing);
    }
    CHECK_THROWS_AS(read_dataset((dir / "nosidecar.csv").string()), FormatError);

    CHECK_THROWS_AS(read_dataset((dir / "absent.csv").string()), FormatError);
}

TEST_CASE("validate_dataset rejects out-of-range channels") {
    Dataset ds = small_dataset();
    ds.occupancy.values[3] = 1.5;
    CHECK_THROWS_WITH_AS(validate_dataset(ds), doctest::Contains("occupancy"), FormatError);

    Dataset ds2 = small_dataset();
    ds2.window_opening.values[0] = 1.25;
    CHECK_THROWS_WITH_AS(validate_dataset(ds2), doctest::Contains("window_opening"), FormatError);

    Dataset ds3 = small_dataset();
    ds3.co2.values.pop_back();
    CHECK_THROWS_AS(validate_dataset(ds3), FormatError);
}
