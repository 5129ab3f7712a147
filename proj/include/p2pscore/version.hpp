#pragma once

namespace p2p {

// Stamped into every report and the python module for reproducibility.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace p2p
