#pragma once

#include "slung/control.hpp"
#include "slung/dynamics.hpp"
#include "slung/integrator.hpp"
#include "slung/mission.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace slung {

struct SimConfig {
    double dt = 0.01;
    double horizon = 14.0;
    Integrator integrator = Integrator::RK4;
    bool renormalize = true;
    std::uint64_t seed = 0;
    double gravity = 9.81;

    bool operator==(const SimConfig&) const = default;
};

enum NoiseTarget : unsigned {
    kNoiseUavMass = 1u << 0,
    kNoiseLoadMass = 1u << 1,
    kNoiseCableLength = 1u << 2,
    kNoiseInertia = 1u << 3,
    kNoiseForceInput = 1u << 4,
    kNoiseTorqueInput = 1u << 5,
    kNoiseAll = (1u << 6) - 1,
};

/// Which model the perturbed parameters feed.
enum class NoiseScope { Shared, PlantOnly };

struct NoiseConfig {
    bool enabled = false;
    double snr = 35.0;
    /// snr is in dB unless this is set, then it is a linear amplitude ratio.
    bool snr_linear = false;
    unsigned targets = kNoiseAll;
    bool per_run_reseed = true;
    NoiseScope scope = NoiseScope::Shared;

    /// Standard deviation per unit of signal norm.
    double relative_sigma() const;
    bool operator==(const NoiseConfig&) const = default;
};

/// Everything needed to simulate one mission.
struct Scenario {
    CargoParams params;
    SlackGains slack_gains;
    TautGains taut_gains;
    MissionConfig mission;
    GuardConfig guards;
    SimConfig sim;
    NoiseConfig noise;
    /// Smoothing factor of the differenced desired body rate.
    double rate_filter = 0.2;
    Vector3 uav_initial_position{0.15, 0.0, 0.0};
    Quaternion uav_initial_attitude;
    Vector3 load_initial_position = Vector3::Zero();

    /// Nominal parameters.
    static Scenario nominal();
    /// Throws InvalidInput naming the offending field.
    void validate() const;
};

struct SimState {
    Mode mode;
    CargoState cargo;
    ControllerMemory memory;
    double t = 0.0;
};

/// One row of the trajectory log: state at t and the command applied over [t, t + dt].
struct LogRecord {
    double t = 0.0;
    ModeTag mode = ModeTag::Setup;
    Vector3 uav_pos = Vector3::Zero();
    Vector3 uav_vel = Vector3::Zero();
    Quaternion uav_att;
    Vector3 uav_omega = Vector3::Zero();
    Vector3 load_pos = Vector3::Zero();
    Vector3 load_vel = Vector3::Zero();
    Vector3 qc = Vector3::Zero();
    Vector3 qc_dot = Vector3::Zero();
    Vector3 ref_pos = Vector3::Zero();
    Vector3 ref_vel = Vector3::Zero();
    Vector3 err_pos = Vector3::Zero();
    Vector3 err_vel = Vector3::Zero();
    Vector3 qce = Vector3::Zero();
    Vector3 qce_dot = Vector3::Zero();
    double thrust = 0.0;
    Vector3 torque = Vector3::Zero();
};

struct ModeSwitch {
    ModeTag to = ModeTag::Setup;
    double t = 0.0;
};

struct TrajectoryLog {
    std::vector<LogRecord> records;
    std::vector<ModeSwitch> switches;
    bool ok = true;
    std::string error;
    double failed_at = 0.0;

    /// Entry time of a mode, if reached.
    std::optional<double> entered(ModeTag tag) const;
    /// max |T_le| over records in Track.
    double max_track_error() const;
};

/// Random draws for one run: parameter perturbation and per-step input disturbances.
class NoiseSource {
public:
    NoiseSource(const NoiseConfig& config, std::uint64_t seed, std::uint64_t stream);

    CargoParams perturb(const CargoParams& nominal);
    /// Adds disturbances to a body thrust vector and torque in place.
    void disturb(Vector3& thrust_body, Vector3& torque_body);

private:
    NoiseConfig config_;
    std::mt19937_64 rng_;
};

double inject_noise(double value, double snr, std::mt19937_64& rng, bool linear = false);
Vector3 inject_noise(const Vector3& value, double snr, std::mt19937_64& rng, bool linear = false);
Matrix3 inject_noise(const Matrix3& value, double snr, std::mt19937_64& rng, bool linear = false);

/// Plant and controller models for one run.
struct RunModels {
    CargoParams plant;
    CargoParams controller;
};

SimState initial_state(const Scenario& scenario);

struct StepResult {
    SimState next;
    LogRecord record;
};

/// Control, integrate over dt, renormalize, then evaluate guards at the new state.
/// Throws SimulationError with the step time attached.
StepResult step(const Scenario& scenario, const RunModels& models, const SimState& state,
                NoiseSource* noise = nullptr);

/// Full mission. stream selects the random stream when noise is enabled.
TrajectoryLog run(const Scenario& scenario, std::uint64_t stream = 0);

struct RunSummary {
    int index = 0;
    bool ok = true;
    std::string error;
    std::vector<ModeSwitch> switches;
    double max_track_error = 0.0;
    /// Cumulative L2 norm of T_le from Raise entry, one value per record.
    std::vector<double> l2;
    std::vector<Vector3> tracking_error;
};

struct BatchResult {
    int run_count = 0;
    int completed = 0;
    std::vector<RunSummary> runs;
    /// Time since Raise entry for the aggregated series.
    std::vector<double> time;
    /// Root-mean-square over completed runs of the cumulative L2 series.
    std::vector<double> l2;
    std::vector<Vector3> mean_error;
};

/// Cumulative L2 series of a log, aligned at Raise entry. Empty if Raise was never reached.
void tracking_l2(const TrajectoryLog& log, double dt, std::vector<double>& l2, std::vector<Vector3>& error);

/// n_runs seeded runs on up to `threads` workers (0 = hardware concurrency).
BatchResult monte_carlo(const Scenario& scenario, int n_runs, unsigned threads = 0);

} // namespace slung
