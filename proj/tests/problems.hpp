#pragma once

#include "sizespec/control.hpp"

namespace sizespec::testing {

inline SizeSpectrum spectrum_2025_tv()
{
    return {8.36, 6.83, GrowthCurve::logistic_time_varying(0.199, 0.027, 6.39e-4)};
}

inline ControlParameters benchmark_parameters(double eta = 0.6, double psi = 0.0)
{
    ControlParameters p{};
    p.d = 1e-4;
    p.k = 0.002;
    p.gamma = 2.0;
    p.kappa = 1.0;
    p.eta = eta;
    p.psi = psi;
    p.u_bar = 1.0;
    p.h_bar = 40.0;
    p.x_bar = 4000.0;
    p.t0 = 61.0;
    p.T = 181.0;
    return p;
}

inline ControlProblem benchmark_problem(double eta = 0.6, double psi = 0.0)
{
    return {spectrum_2025_tv(), benchmark_parameters(eta, psi)};
}

// Small horizon and cap for fast structural checks.
inline ControlProblem small_problem(double eta, double psi, double kappa = 1.0)
{
    auto p = benchmark_parameters(eta, psi);
    p.x_bar = 400.0;
    p.t0 = 150.0;
    p.T = 160.0;
    p.kappa = kappa;
    return {spectrum_2025_tv(), p};
}

}  // namespace sizespec::testing
