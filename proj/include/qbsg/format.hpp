#pragma once

#include <cstdio>
#include <string>

namespace qbsg {

/// Canonical numeric formatting for all emitted files: 6 significant digits,
/// shortest form ("%.6g").  Using one code path everywhere is what makes
/// repeated runs byte-identical.
inline std::string format_g6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string format_bool(bool b) { return b ? "true" : "false"; }

}  // namespace qbsg
