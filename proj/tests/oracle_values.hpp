#pragma once

// Generated by tests/oracle/oracle.py. Do not edit by hand.

namespace oracle {

// alpha^2 + 2 alpha - 1 = 0 for y = 0.049, p_y = -0.98, h = 0.1
inline constexpr double kPhaseAAlpha = 0.41421356237309515;

// continuous fall time from y = 1
inline constexpr double kBallisticTime = 0.4517539514526256;

// discrete first impact, h = 1e-3
inline constexpr double kDropImpactTime = 0.4522542281529941;

// its alpha
inline constexpr double kDropAlpha = 0.25422815299376195;

// discrete energy before the impact
inline constexpr double kDropEnergy = 9.800011229057317;

// height of v~ after the impact
inline constexpr double kDropVTildeY = 0.003298950467547692;

inline constexpr long kDropStep = 452;

// same drop with v_x(0) = 0.7
inline constexpr double kSlideImpactTime = 0.4522542281529941;

// tangential momentum at the impact
inline constexpr double kSlidePx = 0.6999999999999065;

// height of v~ after the impact
inline constexpr double kSlideVTildeY = 0.0032989504675476895;

// ellipse a=1, b=0.5 at pi/4
inline constexpr double kEllipsePhiQuarter = 0.7905694150420948;

// its slope
inline constexpr double kEllipseSlopeQuarter = 0.47434164902525694;

// ellipse initial energy, I = 0.3125
inline constexpr double kEllipseEnergy0 = 37.706250000000004;

// R - l sin(pi/4)
inline constexpr double kPendulumGap = 0.08578643762690508;

// pendulum v_phi(0)
inline constexpr double kPendulumVPhi0 = 2.8601001819710636;

}  // namespace oracle
