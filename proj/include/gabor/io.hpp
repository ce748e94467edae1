#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include <unistd.h>

#include "json.hpp"

#include "gabor/error.hpp"
#include "gabor/frameset.hpp"
#include "gabor/lattice.hpp"
#include "gabor/special.hpp"

namespace gabor {

/// Shortest decimal that round-trips to the same double (at most 17
/// significant digits); "nan", "inf", "-inf" otherwise.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// Writes via a sibling temporary file and rename, so readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    std::filesystem::create_directories(dir);
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::Validation, "cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw Error(Errc::Validation, "write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error(Errc::Validation, "cannot rename onto '" + path.string() + "': " + ec.message());
    }
}

inline std::string region_csv(const RegionGrid& g) {
    std::ostringstream os;
    os << "alpha,beta,delta_primal,delta_dual,verdict,note\n";
    for (const auto& c : g.cells)
        os << format_double(c.alpha) << ',' << format_double(c.beta) << ',' << format_double(c.delta_primal) << ','
           << format_double(c.delta_dual) << ',' << verdict_name(c.verdict) << ',' << c.note << '\n';
    return os.str();
}

inline std::string profile_csv(const PeriodizationProfile& p) {
    std::ostringstream os;
    os << "w,phi,weighted,b\n";
    for (std::size_t j = 0; j < p.grid.size(); ++j)
        os << format_double(p.grid[j]) << ',' << format_double(p.phi_vals[j]) << ','
           << format_double(p.weighted_vals[j]) << ',' << format_double(p.b_vals[j]) << '\n';
    return os.str();
}

/// Ratio profiles in the lattice schema: phi <- F, weighted <- H, b <- G (F, H unscaled).
inline std::string profile_csv(const RatioProfile& p) {
    std::ostringstream os;
    os << "w,phi,weighted,b\n";
    for (std::size_t j = 0; j < p.grid.size(); ++j) {
        const double s = std::exp(p.log_scale[j]);
        os << format_double(p.grid[j]) << ',' << format_double(p.F[j] * s) << ',' << format_double(p.H[j] * s)
           << ',' << format_double(p.G[j]) << '\n';
    }
    return os.str();
}

} // namespace gabor
