#pragma once

// Reader/writer for the linear decision subset of the OPB format:
//
//   * #variable= 3 #constraint= 1
//   +1 x1 -2 ~x2 +1 x3 >= 1 ;
//
// Only `>=` and `=` are accepted as relations. Objectives, soft constraints
// and products of variables are rejected with UnsupportedFeature.

#include <cctype>
#include <cstddef>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pbjump/constraint.hpp"
#include "pbjump/literal.hpp"

namespace pbjump {

class OpbError : public std::runtime_error {
 public:
  OpbError(std::size_t line, std::size_t column, const std::string& reason)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + reason),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct SyntaxError : OpbError {
  using OpbError::OpbError;
};

struct UnsupportedFeature : OpbError {
  using OpbError::OpbError;
};

/// Largest variable index accepted; keeps per-variable tables allocatable.
inline constexpr Var kMaxVar = Var{1} << 24;

struct OpbInstance {
  std::size_t variable_count = 0;
  std::size_t constraint_count = 0;
  std::vector<RawConstraint> constraints;
  std::map<Var, std::string> names;  // token of every variable that occurs
  std::vector<std::string> warnings;

  std::string name_of(Var v) const {
    auto it = names.find(v);
    return it != names.end() ? it->second : default_var_name(v);
  }

  std::vector<Constraint> normalized() const {
    std::vector<Constraint> out;
    for (const RawConstraint& r : constraints)
      for (Constraint& c : normalize_raw(r)) out.push_back(std::move(c));
    return out;
  }
};

namespace detail {

struct Token {
  std::string text;
  std::size_t line;
  std::size_t column;
};

inline bool is_integer(std::string_view s) {
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char ch : s)
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  return true;
}

inline BigInt parse_integer(std::string_view s) {
  bool neg = false;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  // cpp_int would read a leading 0 as octal
  while (s.size() > 1 && s[0] == '0') s.remove_prefix(1);
  BigInt v(std::string{s});
  return neg ? BigInt(-v) : v;
}

// x<k> or ~x<k>; returns 0 as the variable for anything else.
inline Literal parse_literal_token(std::string_view s) {
  bool positive = true;
  if (!s.empty() && s[0] == '~') {
    positive = false;
    s.remove_prefix(1);
  }
  if (s.size() < 2 || s[0] != 'x') return {};
  Var v = 0;
  for (char ch : s.substr(1)) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) return {};
    if (v > kMaxVar) return {kMaxVar + 1, positive};  // saturate; caller rejects
    v = v * 10 + static_cast<Var>(ch - '0');
  }
  return {v, positive};
}

inline bool looks_like_literal(std::string_view s) {
  return !s.empty() && (s[0] == '~' || std::isalpha(static_cast<unsigned char>(s[0])));
}

inline void parse_header(std::string_view line, OpbInstance& inst, bool& seen) {
  auto grab = [&](std::string_view key, std::size_t& out) {
    auto p = line.find(key);
    if (p == std::string_view::npos) return false;
    p += key.size();
    while (p < line.size() && line[p] == ' ') ++p;
    std::size_t v = 0;
    bool any = false;
    while (p < line.size() && std::isdigit(static_cast<unsigned char>(line[p]))) {
      v = v * 10 + static_cast<std::size_t>(line[p++] - '0');
      any = true;
    }
    if (any) out = v;
    return any;
  };
  if (grab("#variable=", inst.variable_count)) seen = true;
  grab("#constraint=", inst.constraint_count);
}

}  // namespace detail

inline OpbInstance parse_opb(std::string_view text) {
  OpbInstance inst;
  bool header = false;
  std::vector<detail::Token> tokens;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (!line.empty() && line[0] == '*') {
      if (!header) detail::parse_header(line, inst, header);
    } else {
      std::size_t i = 0;
      while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
          ++i;
          continue;
        }
        std::size_t start = i;
        if (line[i] == ';') {
          ++i;
        } else {
          while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != ';') ++i;
        }
        tokens.push_back({std::string(line.substr(start, i - start)), line_no, start + 1});
      }
    }
    if (eol == text.size()) break;
    pos = eol + 1;
  }

  std::size_t max_var = 0;
  std::size_t k = 0;
  auto at_end = [&] { return k >= tokens.size(); };
  auto end_error = [&](const char* what) {
    const detail::Token& last = tokens.back();
    return SyntaxError(last.line, last.column + last.text.size(), std::string("unexpected end of input, expected ") + what);
  };

  while (!at_end()) {
    const detail::Token& first = tokens[k];
    if (first.text == "min:" || first.text == "max:" || first.text.rfind("min", 0) == 0)
      throw UnsupportedFeature(first.line, first.column, "objective functions are not supported");
    if (first.text == "soft:" || first.text[0] == '[')
      throw UnsupportedFeature(first.line, first.column, "weighted soft constraints are not supported");

    RawConstraint rc;
    // terms
    for (;;) {
      if (at_end()) throw end_error("a term or relational operator");
      const detail::Token& t = tokens[k];
      if (t.text == ">=" || t.text == "=") {
        rc.relation = t.text == ">=" ? Relation::GreaterEq : Relation::Eq;
        ++k;
        break;
      }
      if (t.text == "<=" || t.text == "<" || t.text == ">")
        throw UnsupportedFeature(t.line, t.column, "relation '" + t.text + "' is not supported, use >= or =");
      if (!detail::is_integer(t.text))
        throw SyntaxError(t.line, t.column, "expected a coefficient, got '" + t.text + "'");
      BigInt coef = detail::parse_integer(t.text);
      ++k;
      if (at_end()) throw end_error("a variable");
      const detail::Token& v = tokens[k];
      Literal lit = detail::parse_literal_token(v.text);
      if (lit.var() == 0) throw SyntaxError(v.line, v.column, "expected a variable like x1 or ~x1, got '" + v.text + "'");
      if (lit.var() > kMaxVar)
        throw UnsupportedFeature(v.line, v.column, "variable index in '" + v.text + "' is too large");
      inst.names.emplace(lit.var(), default_var_name(lit.var()));
      ++k;
      if (!at_end() && detail::looks_like_literal(tokens[k].text))
        throw UnsupportedFeature(tokens[k].line, tokens[k].column, "non-linear terms are not supported");
      max_var = std::max<std::size_t>(max_var, lit.var());
      rc.terms.push_back({std::move(coef), lit});
    }
    if (at_end()) throw end_error("a bound");
    const detail::Token& b = tokens[k];
    if (!detail::is_integer(b.text)) throw SyntaxError(b.line, b.column, "expected an integer bound, got '" + b.text + "'");
    rc.bound = detail::parse_integer(b.text);
    ++k;
    if (at_end()) throw end_error("';'");
    if (tokens[k].text != ";") throw SyntaxError(tokens[k].line, tokens[k].column, "expected ';', got '" + tokens[k].text + "'");
    ++k;
    inst.constraints.push_back(std::move(rc));
  }

  if (!header) {
    inst.variable_count = max_var;
    inst.constraint_count = inst.constraints.size();
  } else {
    if (max_var > inst.variable_count) {
      inst.warnings.push_back("header declares " + std::to_string(inst.variable_count) + " variables but x" +
                              std::to_string(max_var) + " is used");
      inst.variable_count = max_var;
    }
    if (inst.constraint_count != inst.constraints.size())
      inst.warnings.push_back("header declares " + std::to_string(inst.constraint_count) + " constraints, found " +
                              std::to_string(inst.constraints.size()));
  }
  return inst;
}

namespace detail {

inline void write_terms(std::ostream& os, const std::vector<RawTerm>& terms, bool negate) {
  for (const RawTerm& t : terms) {
    BigInt c = negate ? BigInt(-t.coef) : t.coef;
    os << (c < 0 ? "" : "+") << c << ' ' << to_string(t.lit) << ' ';
  }
}

}  // namespace detail

/// One OPB line for a normalized constraint.
inline std::string to_opb_line(const Constraint& c) {
  std::ostringstream os;
  for (const Term& t : c.terms()) os << '+' << t.coef << ' ' << to_string(t.lit) << ' ';
  os << ">= " << c.degree() << " ;";
  return os.str();
}

/// Writes the header comment and one line per constraint. Relations outside
/// the accepted dialect are rewritten into `>=` form.
inline std::string write_opb(const OpbInstance& inst) {
  std::ostringstream os;
  os << "* #variable= " << inst.variable_count << " #constraint= " << inst.constraints.size() << '\n';
  for (const RawConstraint& rc : inst.constraints) {
    switch (rc.relation) {
      case Relation::GreaterEq:
      case Relation::Eq:
        detail::write_terms(os, rc.terms, false);
        os << (rc.relation == Relation::Eq ? "= " : ">= ") << rc.bound;
        break;
      case Relation::Greater:
        detail::write_terms(os, rc.terms, false);
        os << ">= " << BigInt(rc.bound + 1);
        break;
      case Relation::LessEq:
        detail::write_terms(os, rc.terms, true);
        os << ">= " << BigInt(-rc.bound);
        break;
      case Relation::Less:
        detail::write_terms(os, rc.terms, true);
        os << ">= " << BigInt(1 - rc.bound);
        break;
    }
    os << " ;\n";
  }
  return os.str();
}

/// Wraps normalized constraints as an instance (e.g. for writing).
inline OpbInstance make_instance(std::size_t num_vars, const std::vector<Constraint>& constraints) {
  OpbInstance inst;
  inst.variable_count = num_vars;
  for (const Constraint& c : constraints) {
    RawConstraint rc;
    for (const Term& t : c.terms()) rc.terms.push_back({t.coef, t.lit});
    rc.relation = Relation::GreaterEq;
    rc.bound = c.degree();
    inst.constraints.push_back(std::move(rc));
  }
  inst.constraint_count = inst.constraints.size();
  for (const Constraint& c : constraints)
    for (const Term& t : c.terms()) inst.names.emplace(t.lit.var(), default_var_name(t.lit.var()));
  return inst;
}

}  // namespace pbjump
