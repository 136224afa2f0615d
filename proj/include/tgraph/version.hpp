#pragma once

namespace tgraph {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace tgraph
