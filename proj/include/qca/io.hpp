#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <json.hpp>

#include "qca/lattice.hpp"

namespace qca {

using json = nlohmann::json;

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Amplitudes serialize as decimal strings with 17 significant digits.
inline json amp_json(cplx z) {
    return json{{"re", fmt17(z.real())}, {"im", fmt17(z.imag())}};
}

// Write-then-rename so partially written outputs are never observed.
inline void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out.flush()) throw ConfigError("write failed on " + tmp.string());
    }
    fs::rename(tmp, target);
}

}  // namespace qca
