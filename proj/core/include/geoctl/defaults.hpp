#pragma once

namespace geoctl::defaults {

// Degeneracy guard: |det g| must exceed kDegeneracy * scale^n with
// scale = max(1, max |g_ij|).
inline constexpr double kDegeneracy = 1e-12;

// Jacobi conformal factor 2(E - V) is refused below this.
inline constexpr double kJacobiEpsilon = 1e-8;

// Frame rank guard: smallest singular value must exceed
// kFrameRank * largest singular value.
inline constexpr double kFrameRank = 1e-10;

// Metric evaluators must return matrices symmetric to this (absolute).
inline constexpr double kSymmetry = 1e-12;

// Central differences use step kFdRelative * max(1, |q_i|) per axis
// unless an explicit step is given.
inline constexpr double kFdRelative = 1e-5;

// Arc-length reparametrization refuses samples with G(v,v) below this.
inline constexpr double kZeroSpeed = 1e-14;

// Pointwise matching residual threshold for control-law extraction.
inline constexpr double kMatchTol = 1e-8;

// Penalty weight on the squared matching residual in constrained
// optimization.
inline constexpr double kMatchPenalty = 1e6;

// Relative tolerance used to flag states off the declared energy shell.
inline constexpr double kOffShellRel = 1e-9;

}  // namespace geoctl::defaults
