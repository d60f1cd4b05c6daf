// Command line front end: generate simulated weeks, run blind identification
// on a single dataset, or sweep the whole benchmark.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "co2bench/bench.hpp"
#include "co2bench/blind_id.hpp"
#include "co2bench/dataset.hpp"
#include "co2bench/errors.hpp"
#include "co2bench/room_sim.hpp"
#include "co2bench/scenario.hpp"
#include "co2bench/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace co2bench;

namespace {

constexpr const char* kOutEnvVar = "CO2BENCH_OUT";

std::string default_out_dir() {
    const char* env = std::getenv(kOutEnvVar);
    return env && *env ? env : ".";
}

// "HH:MM-HH:MM" -> minutes of day.
std::pair<int, int> parse_window(const std::string& s) {
    int h0, m0, h1, m1;
    char dash;
    if (std::sscanf(s.c_str(), "%d:%d%c%d:%d", &h0, &m0, &dash, &h1, &m1) != 5 || dash != '-')
        throw CLI::ValidationError("--window", "expected HH:MM-HH:MM, got '" + s + "'");
    const int a = h0 * 60 + m0, b = h1 * 60 + m1;
    if (h0 < 0 || m0 < 0 || m0 > 59 || h1 < 0 || m1 < 0 || m1 > 59 || a >= b || b > 24 * 60)
        throw CLI::ValidationError("--window", "window must satisfy 00:00 <= start < end <= 24:00");
    if (a % 3 != 0 || b % 3 != 0)
        throw CLI::ValidationError("--window", "window edges must align to the 3-minute grid");
    return {a, b};
}

struct CommonArgs {
    std::uint64_t seed = 42;
    std::string out = default_out_dir();
    std::string window = "09:00-18:00";
    int order = 30;
    bool plots = false;
    bool serial = false;
    std::string config_path;
    std::string wind_csv;
    bool no_noise = false;
};

SimConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return SimConfig{};
    return load_sim_config(path);
}

std::vector<Dataset> generate_all(const CommonArgs& a, const std::vector<std::string>& only) {
    const SimConfig cfg = load_config_or_default(a.config_path);
    std::optional<TimeSeries> wind_override;
    if (!a.wind_csv.empty()) wind_override = read_wind_csv(a.wind_csv);

    std::vector<Scenario> scenarios;
    if (only.empty()) {
        scenarios = make_all_scenarios(a.seed);
    } else {
        for (const std::string& name : only) {
            const auto [lvl, mode] = parse_scenario_stem(name);
            scenarios.push_back(make_scenario(lvl, mode, a.seed));
        }
    }
    std::vector<Dataset> out;
    for (Scenario& sc : scenarios) {
        if (wind_override) sc.wind_speed = *wind_override;
        out.push_back(simulate_week(sc, cfg.room, cfg.controller,
                                    a.no_noise ? std::nullopt : std::optional<double>(10.0)));
    }
    return out;
}

void plot_day(const fs::path& path, const std::string& title, const DayProblem& dp,
              const DayEval& ev) {
    write_day_plot(path.string(), title,
                   {{"co2 ref", "#1f77b4", dp.co2_ref}, {"co2 fit", "#d62728", ev.co2_hat}},
                   {{"occupancy", "#1f77b4", dp.occ_ref}, {"estimate", "#d62728", ev.occ_hat}});
}

int cmd_generate(const CommonArgs& a, const std::vector<std::string>& only) {
    fs::create_directories(a.out);
    const std::vector<Dataset> sets = generate_all(a, only);
    for (const Dataset& ds : sets) {
        const fs::path csv = fs::path(a.out) / (ds.scenario + ".csv");
        write_dataset(ds, csv.string());
        std::printf("wrote %s (%zu samples)\n", csv.string().c_str(), ds.size());
    }
    return 0;
}

int cmd_identify(const CommonArgs& a, const std::string& dataset_path, const std::string& method_name) {
    const Method method = parse_method(method_name);
    const Dataset ds = read_dataset(dataset_path);

    BenchOptions opts;
    opts.order = a.order;
    std::tie(opts.start_min, opts.end_min) = parse_window(a.window);
    opts.kernel.parallel = !a.serial;

    fs::create_directories(a.out);
    const std::string stem = fs::path(dataset_path).stem().string();
    const std::vector<DayProblem> problems = extract_day_problems(ds, opts);

    std::printf("%-4s %10s %10s %10s %6s\n", "day", "fit_co2", "fit_occ", "converged", "iters");
    bool any_numeric_failure = false;
    for (const DayProblem& dp : problems) {
        const DayEval ev = evaluate_day(dp, method, opts);
        if (!ev.ok) {
            any_numeric_failure = true;
            std::printf("%-4d failed: %s\n", dp.day_index, ev.error.c_str());
            continue;
        }
        std::printf("%-4d %10.4f %10.4f %10s %6d\n", ev.day_index, ev.fit_co2, ev.fit_occupancy,
                    ev.converged ? "yes" : "no", ev.result.iterations);

        BlindIdProblem prob = dp.problem;
        prob.order = ev.order_used;
        nlohmann::ordered_json j = result_to_json(ev.result, prob);
        j["dataset"] = ds.scenario;
        j["day"] = dp.day_index;
        j["method"] = method_name;
        j["fit_co2"] = ev.fit_co2;
        j["fit_occupancy"] = ev.fit_occupancy;
        const fs::path jpath =
            fs::path(a.out) / (stem + "_" + method_name + "_day" + std::to_string(dp.day_index) + ".json");
        std::ofstream jf(jpath);
        if (!jf) throw FormatError("cannot open for writing: " + jpath.string());
        jf << j.dump(2) << '\n';

        if (a.plots) {
            const fs::path ppath =
                fs::path(a.out) /
                (stem + "_" + method_name + "_day" + std::to_string(dp.day_index) + ".svg");
            plot_day(ppath, ds.scenario + " day " + std::to_string(dp.day_index) + " (" + method_name + ")",
                     dp, ev);
        }
    }
    return any_numeric_failure ? 3 : 0;
}

int cmd_benchmark(const CommonArgs& a, const std::string& datasets_dir, bool generate_fresh,
                  const std::string& methods_csv) {
    if (datasets_dir.empty() && !generate_fresh)
        throw ConfigError("benchmark needs --datasets DIR or --generate");
    std::vector<Method> methods;
    std::string tok;
    std::istringstream ms(methods_csv);
    while (std::getline(ms, tok, ',')) {
        if (!tok.empty()) methods.push_back(parse_method(tok));
    }
    if (methods.empty()) throw ConfigError("no methods selected");

    std::vector<Dataset> sets;
    if (!datasets_dir.empty()) {
        for (WindowMode mode : {WindowMode::closed, WindowMode::open}) {
            for (OccupancyLevel lvl :
                 {OccupancyLevel::low, OccupancyLevel::medium, OccupancyLevel::high}) {
                const fs::path csv = fs::path(datasets_dir) / (scenario_stem(lvl, mode) + ".csv");
                sets.push_back(read_dataset(csv.string()));
            }
        }
    } else {
        sets = generate_all(a, {});
    }

    BenchOptions opts;
    opts.order = a.order;
    std::tie(opts.start_min, opts.end_min) = parse_window(a.window);
    opts.kernel.parallel = !a.serial;

    const std::vector<MethodReport> reports = run_benchmark(sets, methods, opts);

    fs::create_directories(a.out);
    const fs::path csv_path = fs::path(a.out) / "benchmark_report.csv";
    {
        std::ofstream f(csv_path);
        if (!f) throw FormatError("cannot open for writing: " + csv_path.string());
        f << report_to_csv(reports);
    }
    const std::string summary = summary_table(reports);
    {
        std::ofstream f(fs::path(a.out) / "benchmark_summary.txt");
        f << summary;
    }
    {
        nlohmann::ordered_json snap;
        snap["seed"] = a.seed;
        snap["order"] = a.order;
        snap["window"] = a.window;
        snap["noise"] = !a.no_noise;
        snap["methods"] = json::array();
        for (Method m : methods) snap["methods"].push_back(method_name(m));
        snap["datasets_dir"] = datasets_dir.empty() ? json(nullptr) : json(datasets_dir);
        snap["wind_csv"] = a.wind_csv.empty() ? json(nullptr) : json(a.wind_csv);
        const SimConfig cfg = load_config_or_default(a.config_path);
        snap["room"] = params_to_json(cfg.room);
        snap["controller"] = controller_to_json(cfg.controller);
        std::ofstream f(fs::path(a.out) / "benchmark_config.json");
        f << snap.dump(2) << '\n';
    }

    if (a.plots) {
        for (const Dataset& ds : sets) {
            const std::vector<DayProblem> problems = extract_day_problems(ds, opts);
            for (const MethodReport& rep : reports) {
                if (rep.dataset != ds.scenario) continue;
                for (std::size_t i = 0; i < rep.days.size(); ++i) {
                    if (!rep.days[i].ok) continue;
                    const fs::path p = fs::path(a.out) /
                                       (ds.scenario + "_" + method_name(rep.method) + "_day" +
                                        std::to_string(rep.days[i].day_index) + ".svg");
                    plot_day(p, ds.scenario + " day " + std::to_string(rep.days[i].day_index) +
                                    " (" + std::string(method_name(rep.method)) + ")",
                             problems[i], rep.days[i]);
                }
            }
        }
    }

    std::fputs(summary.c_str(), stdout);
    std::printf("report: %s\n", csv_path.string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Office CO2 benchmark: simulated weeks and blind occupancy estimation"};
    app.require_subcommand(1);

    CommonArgs a;

    auto* gen = app.add_subcommand("generate", "Simulate weekly datasets and write CSV+JSON");
    bool gen_all = false;
    std::vector<std::string> gen_scenarios;
    gen->add_flag("--all", gen_all, "generate every scenario");
    gen->add_option("--scenario", gen_scenarios, "scenario stem(s), e.g. kth_mowc");
    gen->add_option("--seed", a.seed, "base seed");
    gen->add_option("--out", a.out, "output directory (default $" + std::string(kOutEnvVar) + " or .)");
    gen->add_flag("--no-noise", a.no_noise, "skip the sensor noise channel");
    gen->add_option("--wind-csv", a.wind_csv, "override wind with a timestamp,wind_speed CSV");
    gen->add_option("--config", a.config_path, "room/controller JSON overrides");

    auto* ide = app.add_subcommand("identify", "Blind identification on one dataset");
    std::string dataset_path, method = "kernel";
    ide->add_option("--dataset", dataset_path, "dataset CSV path")->required();
    ide->add_option("--method", method, "baseline or kernel");
    ide->add_option("--order", a.order, "FIR length");
    ide->add_option("--window", a.window, "daily window HH:MM-HH:MM");
    ide->add_option("--out", a.out, "output directory");
    ide->add_flag("--plots", a.plots, "write SVG overlays");
    ide->add_flag("--serial", a.serial, "disable the OpenMP grid scan");

    auto* ben = app.add_subcommand("benchmark", "Full sweep over datasets and methods");
    std::string datasets_dir, methods_csv = "baseline,kernel";
    bool generate_fresh = false;
    ben->add_option("--seed", a.seed, "base seed (used with --generate)");
    ben->add_flag("--generate", generate_fresh, "simulate the six datasets in-process");
    ben->add_option("--datasets", datasets_dir, "read previously generated datasets from DIR");
    ben->add_option("--methods", methods_csv, "comma list: baseline,kernel");
    ben->add_option("--order", a.order, "FIR length");
    ben->add_option("--window", a.window, "daily window HH:MM-HH:MM");
    ben->add_option("--out", a.out, "output directory");
    ben->add_option("--config", a.config_path, "room/controller JSON overrides");
    ben->add_option("--wind-csv", a.wind_csv, "override wind when generating");
    ben->add_flag("--no-noise", a.no_noise, "simulate without sensor noise");
    ben->add_flag("--plots", a.plots, "write SVG overlays");
    ben->add_flag("--serial", a.serial, "disable the OpenMP grid scan");

    try {
        app.parse(argc, argv);
        if (gen->parsed()) {
            if (!gen_all && gen_scenarios.empty())
                throw CLI::ValidationError("generate", "pass --all or at least one --scenario");
            return cmd_generate(a, gen_all ? std::vector<std::string>{} : gen_scenarios);
        }
        if (ide->parsed()) return cmd_identify(a, dataset_path, method);
        return cmd_benchmark(a, datasets_dir, generate_fresh, methods_csv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const IdentifiabilityError& e) {
        std::fprintf(stderr, "identification error: %s\n", e.what());
        return 3;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "format error: %s\n", e.what());
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
