#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rotsense/error.hpp"
#include "rotsense/model.hpp"
#include "rotsense/rng.hpp"
#include "rotsense/schedule.hpp"

namespace rotsense {

using cplx = std::complex<double>;

/// One phase-space point: the cavity amplitude and the M site amplitudes of the ring.
/// Site indices are periodic, b_M == b_0.
struct SystemState {
    cplx cavity{};
    std::vector<cplx> sites;

    double photon_number() const { return std::norm(cavity); }

    /// D = sum_j (-1)^j |b_j|^2
    double imbalance() const {
        double d = 0.0;
        for (std::size_t j = 0; j < sites.size(); ++j) d += (j % 2 == 0 ? 1.0 : -1.0) * std::norm(sites[j]);
        return d;
    }

    double total_atoms() const {
        double n = 0.0;
        for (const auto& b : sites) n += std::norm(b);
        return n;
    }

    bool is_finite() const {
        if (!std::isfinite(cavity.real()) || !std::isfinite(cavity.imag())) return false;
        for (const auto& b : sites)
            if (!std::isfinite(b.real()) || !std::isfinite(b.imag())) return false;
        return true;
    }
};

struct IntegratorConfig {
    double dt = 5e-4;       ///< ms
    int record_every = 20;  ///< steps between samples
    double t_end = 10.0;    ///< ms

    std::int64_t n_steps() const { return static_cast<std::int64_t>(std::llround(t_end / dt)); }

    /// Checks the step-size guard dt * max(omega, kappa, g sqrt(N), J) < 0.1.
    void validate(const ModelParams& params, double g_max, double atoms) const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
        if (record_every < 1) throw ConfigError("record_every must be a positive integer");
        if (!(t_end >= dt)) throw ConfigError("t_end must be at least dt");
        if (t_end < dt * record_every)
            throw ConfigError("t_end = " + std::to_string(t_end) + " ms is shorter than one recording interval (" +
                              std::to_string(dt * record_every) + " ms); the series would be empty");
        const double rate = std::max({params.omega, params.kappa, g_max * std::sqrt(atoms), params.hop_j});
        if (!(dt * rate < 0.1))
            throw ConfigError("dt = " + std::to_string(dt) + " ms violates the stability guard dt * max rate < 0.1 (max rate " +
                              std::to_string(rate) + " rad/ms)");
    }
};

/// Deterministic equations of motion of the classical fields:
///   d alpha/dt = -(kappa + i omega) alpha + i g D,
///   d b_j/dt   = i g (alpha + alpha*) (-1)^j b_j + i J (e^{i theta} b_{j+1} + e^{-i theta} b_{j-1}).
inline SystemState drift(const SystemState& s, double g, double theta, const ModelParams& params) {
    using namespace std::complex_literals;
    const std::size_t m = s.sites.size();
    SystemState out;
    out.cavity = -cplx(params.kappa, params.omega) * s.cavity + 1i * g * s.imbalance();
    out.sites.resize(m);
    const double field = g * 2.0 * s.cavity.real();
    const cplx fwd = std::polar(params.hop_j, theta);
    const cplx bwd = std::conj(fwd);
    for (std::size_t j = 0; j < m; ++j) {
        const double sign = j % 2 == 0 ? 1.0 : -1.0;
        const cplx& next = s.sites[(j + 1) % m];
        const cplx& prev = s.sites[(j + m - 1) % m];
        out.sites[j] = 1i * (sign * field * s.sites[j] + fwd * next + bwd * prev);
    }
    return out;
}

/// Draws from the Wigner function of the coherent initial state: vacuum cavity and
/// sqrt(atoms / M) on each site, with variance 1/4 per quadrature.
inline SystemState sample_initial(const ModelParams& params, double atoms_this_traj, std::mt19937_64& engine) {
    std::normal_distribution<double> normal;
    SystemState s;
    const double re = normal(engine), im = normal(engine);
    s.cavity = cplx(re, im) * 0.5;
    const double amp = std::sqrt(atoms_this_traj / params.n_sites);
    s.sites.resize(static_cast<std::size_t>(params.n_sites));
    for (auto& b : s.sites) {
        const double x = normal(engine), y = normal(engine);
        b = cplx(amp + 0.5 * x, 0.5 * y);
    }
    return s;
}

inline SystemState sample_initial(const ModelParams& params, double atoms_this_traj, const NoiseStream& noise) {
    auto engine = noise.engine(StreamPurpose::InitialState);
    return sample_initial(params, atoms_this_traj, engine);
}

/// Noiseless, real and period-2 symmetric start: |b_j|^2 = (N/M)(1 + eps (-1)^j), alpha = 0.
/// The small imbalance eps seeds symmetry breaking in deterministic runs.
inline SystemState symmetric_seed_state(const ModelParams& params, double imbalance_fraction) {
    SystemState s;
    s.sites.resize(static_cast<std::size_t>(params.n_sites));
    const double n = params.n_atoms / params.n_sites;
    for (std::size_t j = 0; j < s.sites.size(); ++j)
        s.sites[j] = std::sqrt(n * (1.0 + (j % 2 == 0 ? imbalance_fraction : -imbalance_fraction)));
    return s;
}

/// Additive cavity noise increment with <dxi* dxi> = kappa dt.
class CavityNoise {
public:
    CavityNoise(const NoiseStream& stream, double kappa, double dt)
        : engine_(stream.engine(StreamPurpose::CavityNoise)), scale_(std::sqrt(kappa * dt / 2.0)) {}

    cplx increment() {
        const double a = normal_(engine_);
        const double b = normal_(engine_);
        return cplx(a, b) * scale_;
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
    double scale_;
};

/// Second-order symmetric splitting of the deterministic flow.
///
/// The cavity plus light-matter part is solved exactly over dt/2 (|b_j| and hence D
/// are constant along it); the hopping part is diagonal in ring momentum and is solved
/// exactly over dt. Both sub-flows conserve sum |b_j|^2 to round-off. Controls are
/// evaluated at the step midpoint.
class SplitStepper {
public:
    SplitStepper(const ModelParams& params, double dt)
        : params_(params), dt_(dt), m_(static_cast<std::size_t>(params.n_sites)), twiddle_(m_), modes_(m_), factors_(m_), residual_(m_) {
        const cplx lambda(params.kappa, params.omega);
        const double h = 0.5 * dt;
        decay_ = std::exp(-lambda * h);
        integral_ = (1.0 - decay_) / lambda;
        half_ = h;
        lambda_ = lambda;
        for (std::size_t k = 0; k < m_; ++k) twiddle_[k] = exact_root(k, m_);
        forward_.resize(m_ * m_);
        inverse_.resize(m_ * m_);
        for (std::size_t q = 0; q < m_; ++q)
            for (std::size_t j = 0; j < m_; ++j) {
                inverse_[q * m_ + j] = twiddle_[(q * j) % m_];
                forward_[q * m_ + j] = std::conj(inverse_[q * m_ + j]);
            }
    }

    double dt() const { return dt_; }

    void advance(SystemState& s, double g, double theta) {
        cavity_half_step(s, g);
        hopping_step(s, theta);
        cavity_half_step(s, g);
    }

private:
    // e^{2 pi i k / m} with multiples of pi/2 snapped to exact values.
    static cplx exact_root(std::size_t k, std::size_t m) {
        if ((4 * k) % m == 0) {
            switch ((4 * k) / m) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
            }
        }
        const double phase = kTwoPi * static_cast<double>(k) / static_cast<double>(m);
        return {std::cos(phase), std::sin(phase)};
    }

    void cavity_half_step(SystemState& s, double g) {
        using namespace std::complex_literals;
        const double d = s.imbalance();
        const cplx steady = 1i * g * d / lambda_;
        const cplx offset = s.cavity - steady;
        const cplx integral = steady * half_ + offset * integral_;
        s.cavity = steady + offset * decay_;
        const double phi = 2.0 * g * integral.real();
        const cplx rot(std::cos(phi), std::sin(phi));
        const cplx rot_odd = std::conj(rot);
        for (std::size_t j = 0; j < m_; j += 2) {
            s.sites[j] *= rot;
            s.sites[j + 1] *= rot_odd;
        }
    }

    void update_factors(double theta) {
        if (have_factors_ && theta == factors_theta_) return;
        // even and odd parts evaluated on |theta| so that runs at +theta and -theta agree bitwise
        const double c = std::cos(std::abs(theta));
        const double s = std::copysign(std::sin(std::abs(theta)), theta);
        for (std::size_t q = 0; q < m_; ++q) {
            const double band = twiddle_[q].real() * c - twiddle_[q].imag() * s;
            const double phase = 2.0 * params_.hop_j * band * dt_;
            factors_[q] = cplx(std::cos(phase), std::sin(phase)) / static_cast<double>(m_);
        }
        const double pair_phase = 2.0 * params_.hop_j * c * dt_;
        pair_ = cplx(std::cos(pair_phase), std::sin(pair_phase));
        factors_theta_ = theta;
        have_factors_ = true;
    }

    // The period-2 part p_j = b_{j mod 2} only couples through cos(theta) and is rotated
    // in closed form; the remainder b - p goes through the DFT. A state that is exactly
    // period-2 therefore never picks up round-off in the sin(theta) modes.
    void hopping_step(SystemState& s, double theta) {
        update_factors(theta);
        const cplx even = s.sites[0], odd = s.sites[1];
        for (std::size_t j = 0; j < m_; ++j) residual_[j] = s.sites[j] - (j % 2 == 0 ? even : odd);
        const cplx* fwd = forward_.data();
        for (std::size_t q = 0; q < m_; ++q, fwd += m_) {
            cplx acc{};
            for (std::size_t j = 0; j < m_; ++j) acc += residual_[j] * fwd[j];
            modes_[q] = acc * factors_[q];
        }
        const cplx i_sin(0.0, pair_.imag());
        const cplx new_even = pair_.real() * even + i_sin * odd;
        const cplx new_odd = pair_.real() * odd + i_sin * even;
        // inverse_ is symmetric in (q, j)
        const cplx* inv = inverse_.data();
        for (std::size_t j = 0; j < m_; ++j, inv += m_) {
            cplx acc{};
            for (std::size_t q = 0; q < m_; ++q) acc += modes_[q] * inv[q];
            s.sites[j] = (j % 2 == 0 ? new_even : new_odd) + acc;
        }
    }

    ModelParams params_;
    double dt_;
    std::size_t m_;
    cplx lambda_{};
    cplx decay_{};
    cplx integral_{};
    double half_ = 0.0;
    std::vector<cplx> twiddle_;
    std::vector<cplx> forward_, inverse_;  // DFT matrices, row-major
    std::vector<cplx> modes_;
    std::vector<cplx> factors_;
    std::vector<cplx> residual_;
    cplx pair_{};
    double factors_theta_ = 0.0;
    bool have_factors_ = false;
};

/// One stochastic step from t to t + dt. Pass noise = nullptr for the noiseless flow.
inline SystemState step(const SystemState& state, double t, double dt, const Schedule& schedule,
                        const ModelParams& params, CavityNoise* noise) {
    SystemState next = state;
    SplitStepper stepper(params, dt);
    const double mid = t + 0.5 * dt;
    stepper.advance(next, schedule.g(mid), schedule.theta(mid));
    if (noise != nullptr) next.cavity += noise->increment();
    if (!next.is_finite())
        throw NumericalError("non-finite state at t = " + std::to_string(t + dt) + " ms", t + dt);
    return next;
}

/// Observables of one trajectory on the recording grid.
struct TrajectorySeries {
    std::vector<double> times;
    std::vector<double> photon;     ///< |alpha|^2
    std::vector<double> imbalance;  ///< D
    std::vector<double> atoms;      ///< sum |b_j|^2
    std::vector<double> g;
    std::vector<double> theta;
    SystemState final_state;
    double max_atom_drift = 0.0;    ///< max_t |N(t) - N(0)| / N(0)

    std::size_t size() const { return times.size(); }
};

namespace detail {

inline TrajectorySeries propagate(SystemState state, const Schedule& schedule, const ModelParams& params,
                                  const IntegratorConfig& config, CavityNoise* noise, std::int64_t trajectory) {
    const std::int64_t n_steps = config.n_steps();
    const auto n_samples = static_cast<std::size_t>(n_steps / config.record_every + 1);
    TrajectorySeries out;
    for (auto* v : {&out.times, &out.photon, &out.imbalance, &out.atoms, &out.g, &out.theta}) v->reserve(n_samples);

    const double atoms0 = state.total_atoms();
    auto record = [&](double t) {
        if (!state.is_finite()) {
            std::string msg = "non-finite state at t = " + std::to_string(t) + " ms";
            if (trajectory >= 0) msg += " in trajectory " + std::to_string(trajectory);
            throw NumericalError(msg, t, trajectory);
        }
        const double atoms = state.total_atoms();
        out.times.push_back(t);
        out.photon.push_back(state.photon_number());
        out.imbalance.push_back(state.imbalance());
        out.atoms.push_back(atoms);
        out.g.push_back(schedule.g(t));
        out.theta.push_back(schedule.theta(t));
        out.max_atom_drift = std::max(out.max_atom_drift, std::abs(atoms - atoms0) / atoms0);
    };

    SplitStepper stepper(params, config.dt);
    record(0.0);
    for (std::int64_t i = 0; i < n_steps; ++i) {
        const double t = static_cast<double>(i) * config.dt;
        const double mid = t + 0.5 * config.dt;
        stepper.advance(state, schedule.g(mid), schedule.theta(mid));
        if (noise != nullptr) state.cavity += noise->increment();
        if ((i + 1) % config.record_every == 0) record(static_cast<double>(i + 1) * config.dt);
    }
    out.final_state = std::move(state);
    return out;
}

} // namespace detail

/// Samples a Wigner initial state and integrates the stochastic equations to t_end.
inline TrajectorySeries integrate_trajectory(const Schedule& schedule, const ModelParams& params,
                                             const IntegratorConfig& config, const NoiseStream& noise,
                                             double atoms_this_traj) {
    params.validate();
    if (!(atoms_this_traj > 0.0)) throw ConfigError("atoms per trajectory must be positive");
    config.validate(params, schedule.g_max(), atoms_this_traj);
    CavityNoise cavity_noise(noise, params.kappa, config.dt);
    return detail::propagate(sample_initial(params, atoms_this_traj, noise), schedule, params, config, &cavity_noise,
                             static_cast<std::int64_t>(noise.trajectory_index));
}

/// Noiseless integration from a given state.
inline TrajectorySeries integrate_deterministic(SystemState initial, const Schedule& schedule,
                                                const ModelParams& params, const IntegratorConfig& config) {
    params.validate();
    if (initial.sites.size() != static_cast<std::size_t>(params.n_sites))
        throw ConfigError("initial state has " + std::to_string(initial.sites.size()) + " sites, expected M = " +
                          std::to_string(params.n_sites));
    config.validate(params, schedule.g_max(), initial.total_atoms());
    return detail::propagate(std::move(initial), schedule, params, config, nullptr, -1);
}

} // namespace rotsense
