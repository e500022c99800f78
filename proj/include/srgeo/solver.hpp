#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <future>
#include <random>
#include <string>
#include <vector>

#include "srgeo/compiled_field.hpp"
#include "srgeo/flows.hpp"
#include "srgeo/frame.hpp"

namespace srgeo {

// Direct-transcription upper bounds on the sub-Riemannian distance:
// piecewise-constant controls on a fixed horizon, energy objective, endpoint
// constraint handled by penalty continuation with multiplier updates.
struct SolveConfig {
    int steps = 48;                // control intervals N
    int restarts = 16;
    std::uint64_t seed = 0;
    double mu0 = 10.0;             // penalty schedule
    double mu_factor = 10.0;
    double mu_max = 1e8;
    int iters = 150;               // descent iterations per penalty stage
    std::string step_rule = "bb";  // "bb" | "momentum"
    double tol = 1e-6;             // endpoint tolerance
    double perturb_amplitude = 0.35;
    std::vector<ControlCurve> inits;  // optional initial guesses (resampled to N)
};

// One penalty stage of the winning restart, for convergence reporting.
struct StageRecord {
    int stage = 0;
    double mu = 0.0;
    double gap = 0.0;  // ∞-norm endpoint defect after the multiplier update
};

struct SolveResult {
    double length = 0.0;
    HorizontalCurve curve;
    double endpoint_error = 0.0;
    double endpoint_error_half = 0.0;
    int restart_index = -1;
    int stages = 0;
    std::vector<StageRecord> history;
};

namespace detail {

inline int thread_budget() {
    if (const char* s = std::getenv("SRGEO_THREADS")) {
        const long v = std::strtol(s, nullptr, 10);
        if (v >= 1) return static_cast<int>(std::min<long>(v, 64));
    }
    return 1;
}

// Resamples piecewise-constant controls onto N uniform cells of [0,1] by
// cell-averaging, which preserves the control integral per new cell.
inline std::vector<double> resample_controls(const ControlCurve& cc, int N, int m) {
    std::vector<double> u(static_cast<std::size_t>(N) * static_cast<std::size_t>(m), 0.0);
    if (cc.times.size() < 2 || cc.controls.empty()) return u;
    const double t0 = cc.times.front(), t1 = cc.times.back();
    const double span = t1 - t0;
    if (!(span > 0.0)) return u;
    for (int k = 0; k < N; ++k) {
        const double a = t0 + span * (static_cast<double>(k) / N);
        const double b = t0 + span * (static_cast<double>(k + 1) / N);
        std::vector<double> acc(static_cast<std::size_t>(m), 0.0);
        for (std::size_t s = 0; s + 1 < cc.times.size(); ++s) {
            const double lo = std::max(a, cc.times[s]);
            const double hi = std::min(b, cc.times[s + 1]);
            if (hi <= lo) continue;
            for (int j = 0; j < m; ++j) acc[static_cast<std::size_t>(j)] += (hi - lo) * cc.controls[s][static_cast<std::size_t>(j)];
        }
        // Controls are rescaled so the resampled curve spans horizon [0,1].
        for (int j = 0; j < m; ++j)
            u[static_cast<std::size_t>(k) * m + static_cast<std::size_t>(j)] =
                acc[static_cast<std::size_t>(j)] / (b - a) * span;
    }
    return u;
}

class TranscriptionProblem {
public:
    TranscriptionProblem(const Frame& frame, std::vector<double> from, std::vector<double> to,
                         int N, int substeps)
        : frame_(frame), compiled_(frame), from_(std::move(from)), to_(std::move(to)),
          n_(frame.dimension()), m_(frame.num_generators()), N_(N), substeps_(substeps),
          dt_(1.0 / static_cast<double>(N)) {
        k1_.resize(static_cast<std::size_t>(n_));
        k2_.resize(static_cast<std::size_t>(n_));
        k3_.resize(static_cast<std::size_t>(n_));
        k4_.resize(static_cast<std::size_t>(n_));
        tmp_.resize(static_cast<std::size_t>(n_));
    }

    int n() const { return n_; }
    int m() const { return m_; }
    int N() const { return N_; }
    double dt() const { return dt_; }
    const std::vector<double>& target() const { return to_; }

    // States at all grid nodes; states.size() == N+1.
    void integrate(const std::vector<double>& u, std::vector<std::vector<double>>& states) const {
        states.assign(static_cast<std::size_t>(N_) + 1, from_);
        std::vector<double> x = from_;
        for (int k = 0; k < N_; ++k) {
            advance(x, &u[static_cast<std::size_t>(k) * m_]);
            states[static_cast<std::size_t>(k) + 1] = x;
        }
    }

    // Endpoint when restarting from states[k0] with modified controls from k0 on.
    std::vector<double> endpoint_from(const std::vector<std::vector<double>>& states, int k0,
                                      const std::vector<double>& u) const {
        std::vector<double> x = states[static_cast<std::size_t>(k0)];
        for (int k = k0; k < N_; ++k) advance(x, &u[static_cast<std::size_t>(k) * m_]);
        return x;
    }

    double energy(const std::vector<double>& u) const {
        double e = 0.0;
        std::vector<double> uk(static_cast<std::size_t>(m_));
        for (int k = 0; k < N_; ++k) {
            for (int j = 0; j < m_; ++j) uk[static_cast<std::size_t>(j)] = u[static_cast<std::size_t>(k) * m_ + j];
            e += 0.5 * frame_.metric().quadratic_form(uk) * dt_;
        }
        return e;
    }

    double merit(const std::vector<double>& u, const std::vector<double>& lambda, double mu,
                 const std::vector<double>& axis_weight, std::vector<double>* gap_out = nullptr) const {
        std::vector<double> x = from_;
        for (int k = 0; k < N_; ++k) advance(x, &u[static_cast<std::size_t>(k) * m_]);
        double pen = 0.0;
        double lin = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double g = x[static_cast<std::size_t>(i)] - to_[static_cast<std::size_t>(i)];
            pen += axis_weight[static_cast<std::size_t>(i)] * g * g;
            lin += lambda[static_cast<std::size_t>(i)] * g;
            if (gap_out) (*gap_out)[static_cast<std::size_t>(i)] = g;
        }
        return energy(u) + lin + mu * pen;
    }

    // Endpoint Jacobian d(endpoint)/d(u) by central differences with prefix
    // reuse: perturbing u_k only requires re-integration of intervals k..N−1.
    void jacobian(const std::vector<double>& u, const std::vector<std::vector<double>>& states,
                  std::vector<std::vector<double>>& J) const {
        const double delta = 1e-6;
        J.assign(static_cast<std::size_t>(N_) * m_, std::vector<double>(static_cast<std::size_t>(n_)));
        std::vector<double> up = u;
        for (int k = 0; k < N_; ++k) {
            for (int j = 0; j < m_; ++j) {
                const std::size_t idx = static_cast<std::size_t>(k) * m_ + static_cast<std::size_t>(j);
                const double saved = up[idx];
                up[idx] = saved + delta;
                const auto xp = endpoint_from(states, k, up);
                up[idx] = saved - delta;
                const auto xm = endpoint_from(states, k, up);
                up[idx] = saved;
                auto& col = J[idx];
                for (int i = 0; i < n_; ++i)
                    col[static_cast<std::size_t>(i)] =
                        (xp[static_cast<std::size_t>(i)] - xm[static_cast<std::size_t>(i)]) / (2.0 * delta);
            }
        }
    }

    // ∇ merit = metric term (analytic) + (λ + 2μ W g)ᵀ · J (FD).
    // On request, fills axis_weight with a fresh conditioning profile:
    // weight_i ∝ 1/‖J column i‖², normalized to 1 on the best-controlled
    // axis, so the penalty Hessian is comparable across endpoint axes even
    // when some axis is reachable only through high-order brackets.
    void gradient(const std::vector<double>& u, const std::vector<double>& lambda, double mu,
                  std::vector<double>& axis_weight, bool refresh_weights,
                  std::vector<double>& grad, std::vector<double>& gap) const {
        std::vector<std::vector<double>> states;
        integrate(u, states);
        gap.resize(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i)
            gap[static_cast<std::size_t>(i)] =
                states.back()[static_cast<std::size_t>(i)] - to_[static_cast<std::size_t>(i)];
        std::vector<std::vector<double>> J;
        jacobian(u, states, J);
        if (refresh_weights) {
            std::vector<double> col2(static_cast<std::size_t>(n_), 0.0);
            for (const auto& col : J)
                for (int i = 0; i < n_; ++i)
                    col2[static_cast<std::size_t>(i)] += col[static_cast<std::size_t>(i)] * col[static_cast<std::size_t>(i)];
            const double top = *std::max_element(col2.begin(), col2.end());
            axis_weight.assign(static_cast<std::size_t>(n_), 1.0);
            if (top > 0.0)
                for (int i = 0; i < n_; ++i)
                    axis_weight[static_cast<std::size_t>(i)] =
                        top / std::max(col2[static_cast<std::size_t>(i)], 1e-10 * top);
        }
        std::vector<double> w(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i)
            w[static_cast<std::size_t>(i)] =
                lambda[static_cast<std::size_t>(i)] +
                2.0 * mu * axis_weight[static_cast<std::size_t>(i)] * gap[static_cast<std::size_t>(i)];
        grad.assign(static_cast<std::size_t>(N_) * m_, 0.0);
        std::vector<double> uk(static_cast<std::size_t>(m_)), gk(static_cast<std::size_t>(m_));
        for (int k = 0; k < N_; ++k) {
            for (int j = 0; j < m_; ++j) uk[static_cast<std::size_t>(j)] = u[static_cast<std::size_t>(k) * m_ + j];
            frame_.metric().apply(uk, gk);  // gk = G·u_k
            for (int j = 0; j < m_; ++j) {
                const std::size_t idx = static_cast<std::size_t>(k) * m_ + static_cast<std::size_t>(j);
                double s = gk[static_cast<std::size_t>(j)] * dt_;
                const auto& col = J[idx];
                for (int i = 0; i < n_; ++i) s += w[static_cast<std::size_t>(i)] * col[static_cast<std::size_t>(i)];
                grad[idx] = s;
            }
        }
    }

private:
    void advance(std::vector<double>& x, const double* uk) const {
        const double h = dt_ / static_cast<double>(substeps_);
        for (int s = 0; s < substeps_; ++s)
            detail::rk4_step_controlled(compiled_, x, uk, h, k1_, k2_, k3_, k4_, tmp_);
    }

    const Frame& frame_;
    CompiledFrame compiled_;
    std::vector<double> from_, to_;
    int n_, m_, N_, substeps_;
    double dt_;
    mutable std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

struct RestartOutcome {
    bool admissible = false;
    double length = 0.0;
    double gap_norm = 0.0;
    std::vector<double> controls;
    int stages = 0;
    std::vector<StageRecord> history;
};

inline RestartOutcome run_restart(const TranscriptionProblem& prob, const Frame& frame,
                                  std::vector<double> u, const SolveConfig& cfg) {
    (void)frame;
    const int dim_u = prob.N() * prob.m();
    std::vector<double> lambda(static_cast<std::size_t>(prob.n()), 0.0);
    std::vector<double> axis_weight(static_cast<std::size_t>(prob.n()), 1.0);
    std::vector<double> grad, gap, grad_prev, u_prev;
    RestartOutcome out;
    double mu = cfg.mu0;
    const bool momentum = (cfg.step_rule == "momentum");
    std::vector<double> velocity(static_cast<std::size_t>(dim_u), 0.0);
    int rounds_at_max = 0;
    for (int stage = 0;; ++stage) {
        double alpha = 1e-2;
        grad_prev.clear();
        for (int it = 0; it < cfg.iters; ++it) {
            // Axis weights refresh on the first iteration of each stage and
            // stay frozen afterwards so merit and gradient agree.
            prob.gradient(u, lambda, mu, axis_weight, it == 0, grad, gap);
            double gnorm2 = 0.0;
            for (double g : grad) gnorm2 += g * g;
            if (gnorm2 <= 1e-28) break;
            if (!momentum) {
                // Barzilai–Borwein step from the previous (Δu, Δgrad) pair.
                if (!grad_prev.empty()) {
                    double sy = 0.0, yy = 0.0;
                    for (int i = 0; i < dim_u; ++i) {
                        const double si = u[static_cast<std::size_t>(i)] - u_prev[static_cast<std::size_t>(i)];
                        const double yi = grad[static_cast<std::size_t>(i)] - grad_prev[static_cast<std::size_t>(i)];
                        sy += si * yi;
                        yy += yi * yi;
                    }
                    if (yy > 0.0 && sy > 0.0) alpha = std::clamp(sy / yy, 1e-7, 10.0);
                }
                u_prev = u;
                grad_prev = grad;
            }
            const double merit0 = prob.merit(u, lambda, mu, axis_weight);
            double step = alpha;
            std::vector<double> trial(static_cast<std::size_t>(dim_u));
            bool improved = false;
            for (int bt = 0; bt < 40; ++bt) {
                if (momentum) {
                    for (int i = 0; i < dim_u; ++i) {
                        velocity[static_cast<std::size_t>(i)] =
                            0.9 * velocity[static_cast<std::size_t>(i)] - step * grad[static_cast<std::size_t>(i)];
                        trial[static_cast<std::size_t>(i)] =
                            u[static_cast<std::size_t>(i)] + velocity[static_cast<std::size_t>(i)];
                    }
                } else {
                    for (int i = 0; i < dim_u; ++i)
                        trial[static_cast<std::size_t>(i)] =
                            u[static_cast<std::size_t>(i)] - step * grad[static_cast<std::size_t>(i)];
                }
                const double merit1 = prob.merit(trial, lambda, mu, axis_weight);
                if (merit1 <= merit0 - 1e-4 * step * gnorm2) {
                    u.swap(trial);
                    improved = true;
                    break;
                }
                step *= 0.5;
                if (momentum) std::fill(velocity.begin(), velocity.end(), 0.0);
            }
            if (!improved) break;
        }
        // Multiplier update (method of multipliers) before tightening μ.
        std::vector<double> gap_now(static_cast<std::size_t>(prob.n()));
        prob.merit(u, lambda, mu, axis_weight, &gap_now);
        for (int i = 0; i < prob.n(); ++i)
            lambda[static_cast<std::size_t>(i)] +=
                2.0 * mu * axis_weight[static_cast<std::size_t>(i)] * gap_now[static_cast<std::size_t>(i)];
        double gap_inf = 0.0;
        for (double g : gap_now) gap_inf = std::max(gap_inf, std::abs(g));
        out.stages = stage + 1;
        out.gap_norm = gap_inf;
        out.history.push_back({stage, mu, gap_inf});
        if (gap_inf <= 0.2 * cfg.tol && stage >= 1) break;
        if (mu >= cfg.mu_max) {
            if (++rounds_at_max >= 8) break;  // a few extra multiplier rounds at μ_max
            continue;
        }
        mu *= cfg.mu_factor;
    }
    out.controls = std::move(u);
    return out;
}

}  // namespace detail

// Constant-speed reparameterization on [0,1]; zero-speed cells are dropped.
inline ControlCurve constant_speed_controls(const Frame& frame, const std::vector<double>& u,
                                            int N, int m) {
    std::vector<double> speeds(static_cast<std::size_t>(N), 0.0);
    std::vector<double> uk(static_cast<std::size_t>(m));
    double total = 0.0;
    const double dt = 1.0 / static_cast<double>(N);
    for (int k = 0; k < N; ++k) {
        for (int j = 0; j < m; ++j) uk[static_cast<std::size_t>(j)] = u[static_cast<std::size_t>(k) * m + j];
        speeds[static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, frame.metric().quadratic_form(uk)));
        total += speeds[static_cast<std::size_t>(k)] * dt;
    }
    ControlCurve cc;
    cc.times.push_back(0.0);
    if (!(total > 0.0)) return cc;  // point curve
    for (int k = 0; k < N; ++k) {
        const double v = speeds[static_cast<std::size_t>(k)];
        if (v <= 1e-13 * total) continue;  // drop zero cells
        const double duration = v * dt / total;
        std::vector<double> ctrl(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j)
            ctrl[static_cast<std::size_t>(j)] = u[static_cast<std::size_t>(k) * m + j] * (total / v);
        cc.controls.push_back(std::move(ctrl));
        cc.times.push_back(cc.times.back() + duration);
    }
    if (!cc.times.empty()) cc.times.back() = 1.0;  // absorb rounding in the last node
    return cc;
}

inline SolveResult upper_bound_distance(const Frame& frame, const std::vector<double>& from,
                                        const std::vector<double>& to, const SolveConfig& cfg) {
    const int n = frame.dimension();
    const int m = frame.num_generators();
    if (static_cast<int>(from.size()) != n || static_cast<int>(to.size()) != n)
        throw domain_error("upper_bound_distance: endpoint dimension mismatch");
    if (cfg.steps < 2) throw domain_error("upper_bound_distance: need at least 2 control intervals");
    if (cfg.restarts < 1) throw domain_error("upper_bound_distance: need at least 1 restart");
    detail::TranscriptionProblem prob(frame, from, to, cfg.steps, 4);
    const int N = cfg.steps;

    // Initial guesses: supplied inits, else the straight shadow chord.
    std::vector<std::vector<double>> bases;
    for (const auto& cc : cfg.inits) bases.push_back(detail::resample_controls(cc, N, m));
    if (bases.empty()) {
        std::vector<double> chord(static_cast<std::size_t>(N) * m, 0.0);
        for (int k = 0; k < N; ++k)
            for (int j = 0; j < m && j < n; ++j)
                chord[static_cast<std::size_t>(k) * m + j] = to[static_cast<std::size_t>(j)] - from[static_cast<std::size_t>(j)];
        bases.push_back(std::move(chord));
    }

    // Deterministic restart seeds: base guess + smooth perturbations whose
    // amplitude decays with the restart index; all draws happen up front in
    // restart-major order so the thread schedule cannot affect results.
    std::mt19937_64 rng(cfg.seed);
    const auto uniform = [&rng]() {
        return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
    };
    const int modes = 4;
    std::vector<std::vector<double>> starts;
    starts.reserve(static_cast<std::size_t>(cfg.restarts));
    for (int r = 0; r < cfg.restarts; ++r) {
        std::vector<double> u = bases[static_cast<std::size_t>(r) % bases.size()];
        std::vector<double> coeff(static_cast<std::size_t>(2 * modes * m));
        for (auto& c : coeff) c = 2.0 * uniform() - 1.0;  // drawn even when unused
        if (r >= static_cast<int>(bases.size())) {
            const double amp = cfg.perturb_amplitude / (1.0 + static_cast<double>(r) / static_cast<double>(bases.size()));
            for (int k = 0; k < N; ++k) {
                const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(N);
                for (int j = 0; j < m; ++j) {
                    double p = 0.0;
                    for (int q = 1; q <= modes; ++q) {
                        const double a = coeff[static_cast<std::size_t>((2 * (q - 1)) * m + j)];
                        const double b = coeff[static_cast<std::size_t>((2 * (q - 1) + 1) * m + j)];
                        p += (a * std::sin(3.14159265358979323846 * q * t) +
                              b * std::cos(3.14159265358979323846 * q * t)) / static_cast<double>(q);
                    }
                    u[static_cast<std::size_t>(k) * m + j] += amp * p;
                }
            }
        }
        starts.push_back(std::move(u));
    }

    std::vector<detail::RestartOutcome> outcomes(static_cast<std::size_t>(cfg.restarts));
    const int threads = detail::thread_budget();
    if (threads <= 1) {
        for (int r = 0; r < cfg.restarts; ++r)
            outcomes[static_cast<std::size_t>(r)] = detail::run_restart(prob, frame, starts[static_cast<std::size_t>(r)], cfg);
    } else {
        std::vector<std::future<detail::RestartOutcome>> futs;
        futs.reserve(static_cast<std::size_t>(cfg.restarts));
        std::vector<detail::TranscriptionProblem> probs;
        probs.reserve(static_cast<std::size_t>(cfg.restarts));
        for (int r = 0; r < cfg.restarts; ++r) probs.emplace_back(frame, from, to, cfg.steps, 4);
        for (int r = 0; r < cfg.restarts; ++r)
            futs.push_back(std::async(std::launch::async, [&, r] {
                return detail::run_restart(probs[static_cast<std::size_t>(r)], frame,
                                           starts[static_cast<std::size_t>(r)], cfg);
            }));
        for (int r = 0; r < cfg.restarts; ++r) outcomes[static_cast<std::size_t>(r)] = futs[static_cast<std::size_t>(r)].get();
    }

    // Certify each candidate by an independent re-integration of its
    // constant-speed controls; merge by (length, restart index).
    SolveResult best;
    bool found = false;
    for (int r = 0; r < cfg.restarts; ++r) {
        auto& oc = outcomes[static_cast<std::size_t>(r)];
        ControlCurve cc = constant_speed_controls(frame, oc.controls, N, m);
        if (cc.controls.empty()) continue;
        HorizontalCurve curve = horizontal_lift(frame, cc, from, kDefaultFlowTol);
        const auto& end = curve.endpoint();
        double err = 0.0;
        for (int i = 0; i < n; ++i) err = std::max(err, std::abs(end[static_cast<std::size_t>(i)] - to[static_cast<std::size_t>(i)]));
        if (err > cfg.tol) continue;
        const double len = curve_length(frame, curve);
        if (!found || len < best.length) {
            const auto half = endpoint_half_step(frame, curve, kDefaultFlowTol);
            double err_half = 0.0;
            for (int i = 0; i < n; ++i)
                err_half = std::max(err_half, std::abs(half[static_cast<std::size_t>(i)] - to[static_cast<std::size_t>(i)]));
            best.length = len;
            best.curve = std::move(curve);
            best.endpoint_error = err;
            best.endpoint_error_half = err_half;
            best.restart_index = r;
            best.stages = oc.stages;
            best.history = std::move(oc.history);
            found = true;
        }
    }
    if (!found) throw domain_error("upper_bound_distance: no restart reached the endpoint tolerance");
    return best;
}

// L(corner) − best admissible length between the corner's endpoints; the
// corner's own controls seed the first restart.
struct CornerGapReport {
    double corner_length = 0.0;
    double margin = 0.0;  // corner_length − result.length
    SolveResult result;
};

inline CornerGapReport corner_gap(const Frame& frame, const HorizontalCurve& corner, const SolveConfig& cfg) {
    HorizontalCurve c = corner;
    if (!c.has_states()) integrate_states(frame, c, kDefaultFlowTol);
    const std::vector<double>& from = c.states.front();
    const std::vector<double>& to = c.states.back();
    SolveConfig cfg2 = cfg;
    cfg2.inits.insert(cfg2.inits.begin(), c.control_curve());
    CornerGapReport rep;
    rep.result = upper_bound_distance(frame, from, to, cfg2);
    rep.corner_length = curve_length(frame, c);
    rep.margin = rep.corner_length - rep.result.length;
    return rep;
}

}  // namespace srgeo
