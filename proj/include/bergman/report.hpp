#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergman/criteria.hpp"

namespace bergman {

/// Writes via a temp file + rename so concurrent readers never see a partial
/// file and reruns replace outputs atomically.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

inline std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

/// Deterministic CSV table: header + rows, numbers via format_number.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<double>& row) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i)
            line += (i ? "," : "") + format_number(row[i]);
        rows_.push_back(std::move(line));
    }

    void add_row_raw(const std::vector<std::string>& row) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) line += (i ? "," : "") + row[i];
        rows_.push_back(std::move(line));
    }

    std::string str() const {
        std::string out;
        for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
        out += "\n";
        for (const auto& r : rows_) out += r + "\n";
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::string> rows_;
};

/// JSON view of a double that survives infinities (nlohmann serializes them
/// as null otherwise).
inline nlohmann::json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

inline nlohmann::json to_json(const IntegralOutcome& o) {
    nlohmann::json j;
    j["value"] = json_number(o.value);
    j["error_estimate"] = json_number(o.error_estimate);
    j["verdict"] = o.verdict == IntegralVerdict::converged   ? "converged"
                   : o.verdict == IntegralVerdict::divergent ? "divergent"
                                                             : "undecided";
    j["evaluations"] = o.evaluations;
    return j;
}

inline nlohmann::json to_json(const CriterionResult& r) {
    nlohmann::json j;
    j["kind"] = to_string(r.kind);
    j["value"] = json_number(r.value);
    j["verdict"] = to_string(r.verdict);
    if (std::isfinite(r.delta_used)) j["delta"] = r.delta_used;
    j["quad"] = {{"converged", r.quad_converged},
                 {"divergent", r.quad_divergent},
                 {"undecided", r.quad_undecided}};
    if (r.skipped_points) j["skipped_points"] = r.skipped_points;
    if (!r.tail_radii.empty()) {
        j["tail_radii"] = r.tail_radii;
        nlohmann::json tv = nlohmann::json::array();
        for (double v : r.tail_values) tv.push_back(json_number(v));
        j["tail_values"] = tv;
    }
    if (std::isfinite(r.decay_exponent)) j["decay_exponent"] = r.decay_exponent;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

/// Column documentation for every CSV this tool emits.
inline std::string csv_schema_text() {
    return
        "bergman CSV schemas\n"
        "\n"
        "<name>_weight.csv\n"
        "  r              grid radius\n"
        "  omega_hat      tail integral of the weight from r to 1\n"
        "  omega_tilde    omega_hat(r) / (1-r)\n"
        "  box_mass       w(S(r)): Carleson-square mass anchored at radius r\n"
        "  doubling_ratio omega_hat(r) / omega_hat((1+r)/2)\n"
        "\n"
        "<name>_<criterion>.csv (order_bounded has no per-point table)\n"
        "  param_re,param_im  grid point (a or z)\n"
        "  value              local criterion value at the point\n"
        "\n"
        "<name>_essnorm.csv\n"
        "  r_j           tail radius 1 - 2^{-j}\n"
        "  E_j           sup over the angle grid of B(a), |a| = r_j\n"
        "  probe_norm    ||D f_a||: weakly-null probe image norm on the ray arg a = 0\n"
        "  testfn_norm   ||f_a||: uniform-boundedness certificate for the family\n"
        "\n"
        "<name>_oracle.csv\n"
        "  check         name of the cross-check\n"
        "  lhs,rhs       the two routes' values\n"
        "  residual      |lhs-rhs| (relative where rhs != 0)\n"
        "  tolerance     pass threshold\n"
        "  pass          1/0\n";
}

}  // namespace bergman
