#include "commands.hpp"

#include "output.hpp"

#include "slung/errors.hpp"

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <ostream>

namespace slung::cli {

namespace fs = std::filesystem;

namespace {

void prepare_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError(dir.string() + ": " + ec.message());
}

void print_switches(std::ostream& out, const std::vector<ModeSwitch>& switches) {
    for (const auto& s : switches) {
        out << "  " << std::left << std::setw(6) << mode_name(s.to) << " at t = " << std::fixed << std::setprecision(2)
            << s.t << " s\n";
    }
    out.unsetf(std::ios::floatfield);
    out << std::setprecision(6);
}

/// Maps exceptions to exit codes; body returns the exit code on success paths.
template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvalidInput& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const SimulationError& e) {
        err << "simulation aborted: " << e.what() << '\n';
        return kExitSimulation;
    }
}

} // namespace

RunConfig resolve_config(const std::string& config_path, const Overrides& o) {
    RunConfig c = config_path.empty() ? default_config() : load_config(config_path);
    Scenario& sc = c.scenario;
    if (o.seed) sc.sim.seed = *o.seed;
    if (o.dt) sc.sim.dt = *o.dt;
    if (o.horizon) {
        sc.sim.horizon = *o.horizon;
        sc.mission.horizon = *o.horizon;
    }
    if (o.snr) {
        sc.noise.snr = *o.snr;
        sc.noise.enabled = true;
    }
    if (o.no_noise) sc.noise.enabled = false;
    if (o.runs) c.runs = *o.runs;
    if (o.integrator) {
        if (*o.integrator == "rk4") sc.sim.integrator = Integrator::RK4;
        else if (*o.integrator == "euler") sc.sim.integrator = Integrator::Euler;
        else throw ConfigError("--integrator: expected rk4 or euler");
    }
    if (o.out) {
        c.out_dir = *o.out;
    } else if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
        c.out_dir = env;
    }
    validate(c);
    return c;
}

int cmd_run(const std::string& config_path, const Overrides& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig c = resolve_config(config_path, o);
        const TrajectoryLog log = run(c.scenario);
        const fs::path dir = c.out_dir;
        prepare_dir(dir);
        write_trajectory_csv(dir / "trajectory.csv", log);
        write_errors_csv(dir / "errors.csv", log);
        nlohmann::json manifest = make_manifest(c, "run");
        manifest["result"] = {{"ok", log.ok}, {"records", log.records.size()}};
        if (!log.ok) manifest["result"]["error"] = log.error;
        write_json(dir / "manifest.json", manifest);

        out << "mode switches:\n";
        print_switches(out, log.switches);
        if (log.entered(ModeTag::Track)) {
            out << "max load tracking error in Track: " << log.max_track_error() << " m\n";
        } else {
            out << "Track not reached\n";
        }
        out << "wrote " << log.records.size() << " records to " << dir.string() << '\n';
        if (!log.ok) {
            err << "simulation aborted at t = " << log.failed_at << " s: " << log.error << '\n';
            return static_cast<int>(kExitSimulation);
        }
        return static_cast<int>(kExitOk);
    });
}

int cmd_montecarlo(const std::string& config_path, const Overrides& o, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        RunConfig c = resolve_config(config_path, o);
        if (!o.no_noise) c.scenario.noise.enabled = true;

        const auto start = std::chrono::steady_clock::now();
        const BatchResult batch = monte_carlo(c.scenario, c.runs, c.threads);
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        Scenario nominal = c.scenario;
        nominal.noise.enabled = false;
        std::vector<double> nominal_l2;
        std::vector<Vector3> nominal_err;
        const TrajectoryLog nominal_log = run(nominal);
        tracking_l2(nominal_log, nominal.sim.dt, nominal_l2, nominal_err);

        const fs::path dir = c.out_dir;
        prepare_dir(dir);
        write_batch_csv(dir / "batch.csv", batch, nominal_l2);
        write_runs_csv(dir / "runs.csv", batch);
        // The noise-free run, so the bundle also feeds the state figures.
        write_trajectory_csv(dir / "trajectory.csv", nominal_log);
        write_errors_csv(dir / "errors.csv", nominal_log);
        nlohmann::json manifest = make_manifest(c, "montecarlo");
        manifest["result"] = {{"runs", batch.run_count},
                              {"completed", batch.completed},
                              {"failed", batch.run_count - batch.completed}};
        write_json(dir / "manifest.json", manifest);

        double worst = 0.0;
        for (const auto& r : batch.runs) {
            if (r.ok) worst = std::max(worst, r.max_track_error);
        }
        out << batch.completed << "/" << batch.run_count << " runs completed in " << elapsed << " s\n";
        out << "worst max tracking error in Track: " << worst << " m\n";
        out << "wrote batch statistics to " << dir.string() << '\n';
        return static_cast<int>(batch.completed == batch.run_count ? kExitOk : kExitSimulation);
    });
}

int cmd_plots(const std::string& bundle, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto files = emit_plots(bundle);
        for (const auto& f : files) out << "wrote " << f.string() << '\n';
        out << "render with: python3 " << (fs::path(bundle) / "plots" / "plot_figures.py").string() << '\n';
        return static_cast<int>(kExitOk);
    });
}

int cmd_default_config(const std::string& path, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto j = config_to_json(default_config());
        if (path.empty()) {
            out << j.dump(2) << '\n';
        } else {
            write_json(path, j);
        }
        return static_cast<int>(kExitOk);
    });
}

} // namespace slung::cli
