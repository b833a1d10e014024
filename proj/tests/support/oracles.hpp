#pragma once

// Independent reference implementations used to check the production code.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace oracle {

inline bool ident(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '$';
}

// Character walk over every split point. `*` eats identifier characters only,
// except when it is the pattern's final character and `tail_eats_dots` is set.
inline bool walk(std::string_view p, std::string_view s, bool tail_eats_dots) {
  if (p.empty()) return s.empty();
  if (p[0] == '*') {
    bool last = p.size() == 1;
    for (std::size_t take = 0; take <= s.size(); ++take) {
      if (take > 0) {
        char c = s[take - 1];
        if (!(ident(c) || (last && tail_eats_dots && c == '.'))) break;
      }
      if (walk(p.substr(1), s.substr(take), tail_eats_dots)) return true;
    }
    return false;
  }
  return !s.empty() && p[0] == s[0] && walk(p.substr(1), s.substr(1), tail_eats_dots);
}

inline bool valid_path(std::string_view s) {
  if (s.empty() || s.front() == '.' || s.back() == '.') return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '.') {
      if (s[i + 1] == '.') return false;
    } else if (!ident(s[i])) {
      return false;
    }
  }
  return true;
}

inline bool name_glob(std::string_view p, std::string_view s) {
  for (char c : s) {
    if (!ident(c)) return false;
  }
  return walk(p, s, false);
}

inline bool type_glob(std::string_view p, std::string_view s) { return valid_path(s) && walk(p, s, true); }

struct Pointcut {
  std::string ret;
  std::string type;
  std::string method;
  bool any_args = true;
  std::vector<std::string> args;

  std::string text() const {
    std::string out = "execution(" + ret + " " + type + "->" + method + "(";
    if (any_args) {
      out += "..";
    } else {
      for (std::size_t i = 0; i < args.size(); ++i) out += (i ? "," : "") + args[i];
    }
    return out + "))";
  }
};

struct JoinPoint {
  std::string type;
  std::string method;
  std::size_t arity = 0;
  std::vector<std::string> arg_types;
  std::string ret;
};

inline bool matches(const Pointcut& pc, const JoinPoint& jp) {
  bool ret_ok = pc.ret == "*" || (!jp.ret.empty() && type_glob(pc.ret, jp.ret));
  bool args_ok = pc.any_args;
  if (!pc.any_args && pc.args.size() == jp.arity) {
    args_ok = true;
    for (std::size_t i = 0; i < jp.arity; ++i) {
      if (pc.args[i] == "*") continue;
      if (jp.arg_types.size() != jp.arity || !type_glob(pc.args[i], jp.arg_types[i])) args_ok = false;
    }
  }
  return ret_ok && args_ok && type_glob(pc.type, jp.type) && name_glob(pc.method, jp.method);
}

// 1-based (line, column) → byte offset by scanning characters.
inline std::size_t offset_at(std::string_view text, int line, int column) {
  int l = 1;
  std::size_t i = 0;
  while (l < line && i < text.size()) {
    if (text[i++] == '\n') ++l;
  }
  return i + static_cast<std::size_t>(column - 1);
}

inline std::string base64url(std::string_view bytes) {
  static const char* alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";
  std::string bits;
  for (unsigned char c : bytes) {
    for (int b = 7; b >= 0; --b) bits += ((c >> b) & 1) ? '1' : '0';
  }
  while (bits.size() % 6) bits += '0';
  std::string out;
  for (std::size_t i = 0; i < bits.size(); i += 6) out += alphabet[std::stoi(bits.substr(i, 6), nullptr, 2)];
  return out;
}

}  // namespace oracle
