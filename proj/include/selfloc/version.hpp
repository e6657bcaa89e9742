#pragma once

namespace selfloc {

inline constexpr const char* kVersion = "0.1.0";

// Observed fine-structure constant; overridable through every public entry
// point that needs it.
inline constexpr double kAlphaDefault = 1.0 / 137.036;

// 1/m_e expressed in seconds, used only for the lifetime conversion.
inline constexpr double kInverseMassSeconds = 1.288e-21;

}  // namespace selfloc
