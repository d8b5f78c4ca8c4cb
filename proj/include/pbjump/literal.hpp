#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

namespace pbjump {

/// Variables are 1-based; index 0 is never a valid variable.
using Var = std::uint32_t;

/// A Boolean variable or its negation.
class Literal {
 public:
  constexpr Literal() = default;
  constexpr Literal(Var var, bool positive) : var_(var), positive_(positive) {}

  static constexpr Literal pos(Var v) { return {v, true}; }
  static constexpr Literal neg(Var v) { return {v, false}; }

  constexpr Var var() const { return var_; }
  constexpr bool positive() const { return positive_; }
  constexpr Literal operator~() const { return {var_, !positive_}; }

  /// Dense index usable for per-literal tables: 2*var for x, 2*var+1 for ~x.
  constexpr std::size_t code() const { return 2 * static_cast<std::size_t>(var_) + (positive_ ? 0 : 1); }

  friend constexpr bool operator==(Literal, Literal) = default;
  friend constexpr auto operator<=>(Literal a, Literal b) {
    if (auto c = a.var_ <=> b.var_; c != 0) return c;
    return a.positive_ <=> b.positive_;
  }

 private:
  Var var_ = 0;
  bool positive_ = true;
};

/// Maps a variable to its display name.
using VarNamer = std::function<std::string(Var)>;

inline std::string default_var_name(Var v) { return "x" + std::to_string(v); }

/// `x3` / `~x3`, matching the OPB negation syntax.
inline std::string to_string(Literal l, const VarNamer& namer = default_var_name) {
  return (l.positive() ? "" : "~") + namer(l.var());
}

}  // namespace pbjump
