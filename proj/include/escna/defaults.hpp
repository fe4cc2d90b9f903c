#pragma once

// Central table of tunable defaults. Every value here is documented in the
// README's defaults table; CLI flags override them per run.

namespace escna::defaults {

// Closed-loop integration resolution: RK4 steps per dither period 2*pi/omega.
inline constexpr int kStepsPerPeriod = 50;

// Averaged (slow) systems integrate with dt = T / kAverageSteps.
inline constexpr int kAverageSteps = 5000;

// Sweep classifier thresholds: convergent below kThetaConv, divergent at or
// above kCutoff, terminal values clamped to kCutoff.
inline constexpr double kThetaConv = 0.25;
inline constexpr double kCutoff = 3.0;

// Sweep grid resolution per axis.
inline constexpr int kGridCount = 40;

// Sweep protocol: horizon and scalar initial condition.
inline constexpr double kSweepHorizon = 5.0;
inline constexpr double kSweepX0 = 1.0;

// Limit-verification quadrature: nodes per period of the fastest oscillation
// present in the integrand. Requests below kMinNodesPerPeriod are refused to
// guard against aliasing.
inline constexpr int kNodesPerPeriod = 200;
inline constexpr int kMinNodesPerPeriod = 50;

// Empirical average oracle: dither periods integrated and steps per period.
inline constexpr int kEmpiricalPeriods = 10;
inline constexpr int kEmpiricalStepsPerPeriod = 200;

// Boundary-agreement scoring: cells within this relative distance of the
// analytic boundary are excluded as too close to call.
inline constexpr double kBoundaryMargin = 0.2;

// Sweep worker pool size; any value produces identical output bytes.
inline constexpr int kJobs = 1;

} // namespace escna::defaults
