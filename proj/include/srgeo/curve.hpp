#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "srgeo/rational.hpp"

namespace srgeo {

// Piecewise-constant control signal: controls[k] acts on [times[k], times[k+1]].
struct ControlCurve {
    std::vector<double> times;                  // strictly increasing, size N+1
    std::vector<std::vector<double>> controls;  // size N

    int intervals() const { return static_cast<int>(controls.size()); }

    void validate(int m = -1) const {
        if (times.size() != controls.size() + 1)
            throw domain_error("control curve: times must have one more entry than controls");
        if (times.empty()) throw domain_error("control curve: empty time grid");
        for (std::size_t k = 0; k + 1 < times.size(); ++k)
            if (!(times[k] < times[k + 1]))
                throw domain_error("control curve: times must be strictly increasing");
        for (const auto& u : controls) {
            if (m >= 0 && static_cast<int>(u.size()) != m)
                throw domain_error("control curve: control size does not match generator count");
            for (double c : u)
                if (!std::isfinite(c)) throw domain_error("control curve: non-finite control");
        }
    }
};

// Horizontal curve: base point plus piecewise-constant controls; states are
// cached trajectory samples at the grid times, filled in by integration.
struct HorizontalCurve {
    std::vector<double> base_point;
    std::vector<double> times;                  // strictly increasing, size N+1 (N >= 0)
    std::vector<std::vector<double>> controls;  // size N
    std::vector<std::vector<double>> states;    // empty, or size N+1 with states[0] = base_point

    int intervals() const { return static_cast<int>(controls.size()); }
    double t0() const { return times.front(); }
    double t1() const { return times.back(); }
    bool has_states() const { return !states.empty(); }

    const std::vector<double>& endpoint() const {
        if (!has_states()) throw domain_error("horizontal curve: states not integrated");
        return states.back();
    }

    ControlCurve control_curve() const { return ControlCurve{times, controls}; }

    void validate(int n = -1, int m = -1) const {
        if (times.size() != controls.size() + 1)
            throw domain_error("horizontal curve: times must have one more entry than controls");
        if (times.empty()) throw domain_error("horizontal curve: empty time grid");
        if (n >= 0 && static_cast<int>(base_point.size()) != n)
            throw domain_error("horizontal curve: base point dimension mismatch");
        for (std::size_t k = 0; k + 1 < times.size(); ++k)
            if (!(times[k] < times[k + 1]))
                throw domain_error("horizontal curve: times must be strictly increasing");
        for (const auto& u : controls)
            if (m >= 0 && static_cast<int>(u.size()) != m)
                throw domain_error("horizontal curve: control size does not match generator count");
        if (!states.empty() && states.size() != times.size())
            throw domain_error("horizontal curve: states size does not match time grid");
    }
};

// The unit model corner in R^n: ê₂ → 0 → ê₁ on [−1,1] with unit controls
// (0,−1) then (1,0) for a two-generator frame.
inline HorizontalCurve model_corner(int n) {
    if (n < 2) throw domain_error("model_corner: dimension must be >= 2");
    HorizontalCurve c;
    c.base_point.assign(static_cast<std::size_t>(n), 0.0);
    c.base_point[1] = 1.0;
    c.times = {-1.0, 0.0, 1.0};
    c.controls = {{0.0, -1.0}, {1.0, 0.0}};
    return c;
}

}  // namespace srgeo
