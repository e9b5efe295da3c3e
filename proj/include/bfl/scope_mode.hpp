#pragma once

namespace bfl {

/// Variables over which MCS/MPS minimality is taken.
///  - Support: the influencing basic events of the operand (default).
///  - Global: every basic event of the tree.
enum class ScopeMode { Support, Global };

inline const char* to_string(ScopeMode m) { return m == ScopeMode::Support ? "support" : "global"; }

}  // namespace bfl
