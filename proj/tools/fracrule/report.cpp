#include "report.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fracrule::cli {

std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

nlohmann::json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json grid_json(const Grid& g) {
    return {{"a", g.a()}, {"h", g.h()}, {"n", g.size()}};
}

std::vector<double> grid_points(const Grid& g) {
    std::vector<double> x(g.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = g.point(i);
    return x;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

nlohmann::json to_json(const RuleReport& r) {
    nlohmann::json j;
    j["rule_name"] = r.rule_name;
    j["alpha"] = r.op.alpha();
    j["operator"] = std::string(to_string(r.op.kind));
    j["base"] = r.op.base;
    j["h"] = r.h;
    j["burn_in"] = r.burn_in;
    j["sup_norm"] = r.sup_norm;
    j["l2_norm"] = r.l2_norm;
    j["reference_scale"] = r.reference_scale;
    j["grid"] = grid_json(r.residual.grid);
    j["residual"] = r.residual.values;
    if (r.x0) j["x0"] = *r.x0;
    if (r.value_at_x0) j["value_at_x0"] = *r.value_at_x0;
    return j;
}

nlohmann::json to_json(const ConvergenceReport& c) {
    nlohmann::json j;
    if (c.finest) {
        j["rule_name"] = c.finest->rule_name;
        j["alpha"] = c.finest->op.alpha();
        j["operator"] = std::string(to_string(c.finest->op.kind));
    }
    j["h_values"] = c.h_values;
    j["norms"] = c.norms;
    j["observed_order"] = finite_or_null(c.observed_order);
    j["exact"] = c.exact;
    j["verdict"] = std::string(to_string(c.verdict));
    j["reference_scale"] = c.reference_scale;
    return j;
}

nlohmann::json to_json(const HolderEstimate& e) {
    return {{"exponent_hat", e.exponent_hat},
            {"coefficient_hat", e.coefficient_hat},
            {"r_squared", e.r_squared},
            {"scales_used", e.scales_used},
            {"oscillations", e.oscillations}};
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
    if (header.size() != columns.size()) throw std::logic_error("csv: header/column mismatch");
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out += ',';
        out += header[c];
    }
    out += '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out += ',';
            out += format_real(columns[c][r]);
        }
        out += '\n';
    }
    return out;
}

std::string to_csv(const RuleReport& r) {
    return csv_table({"x", "residual"}, {grid_points(r.residual.grid), r.residual.values});
}

std::string to_csv(const ConvergenceReport& c) {
    return csv_table({"h", "sup_norm"}, {c.h_values, c.norms});
}

std::string to_csv(const HolderEstimate& e) {
    return csv_table({"h", "oscillation"}, {e.scales_used, e.oscillations});
}

Chart chart_for(const RuleReport& r) {
    return {r.rule_name + " residual", "x", "residual", grid_points(r.residual.grid),
            r.residual.values, false, false};
}

Chart chart_for(const ConvergenceReport& c) {
    std::string name = c.finest ? c.finest->rule_name : "rule";
    return {name + " convergence", "h", "sup_norm", c.h_values, c.norms, true, true};
}

Chart chart_for(const HolderEstimate& e) {
    return {"oscillation scaling", "h", "oscillation", e.scales_used, e.oscillations, true, true};
}

std::string to_svg(const Chart& chart) {
    constexpr double width = 640, height = 420, left = 70, right = 20, top = 40, bottom = 50;
    const double pw = width - left - right;
    const double ph = height - top - bottom;

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < std::min(chart.x.size(), chart.y.size()); ++i) {
        double x = chart.x[i], y = chart.y[i];
        if (chart.log_x) {
            if (!(x > 0.0)) continue;
            x = std::log10(x);
        }
        if (chart.log_y) {
            if (!(y > 0.0)) continue;
            y = std::log10(y);
        }
        if (!std::isfinite(x) || !std::isfinite(y)) continue;
        xs.push_back(x);
        ys.push_back(y);
    }

    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (!xs.empty()) {
        auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
        auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
        x0 = *xmin;
        x1 = *xmax;
        y0 = *ymin;
        y1 = *ymax;
    }
    if (x1 == x0) { x0 -= 0.5; x1 += 0.5; }
    if (y1 == y0) { y0 -= 0.5; y1 += 0.5; }

    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };
    auto axis_value = [](double v, bool lg) { return format_real(lg ? std::pow(10.0, v) : v); };

    std::ostringstream s;
    s << std::setprecision(6);
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << xml_escape(chart.title) << "</text>\n"
      << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fx = x0 + (x1 - x0) * t / 4.0;
        const double fy = y0 + (y1 - y0) * t / 4.0;
        s << "<text x=\"" << px(fx) << "\" y=\"" << top + ph + 18
          << "\" text-anchor=\"middle\" font-size=\"11\">" << axis_value(fx, chart.log_x)
          << "</text>\n";
        s << "<text x=\"" << left - 6 << "\" y=\"" << py(fy) + 4
          << "\" text-anchor=\"end\" font-size=\"11\">" << axis_value(fy, chart.log_y)
          << "</text>\n";
    }
    s << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(chart.x_label)
      << (chart.log_x ? " (log)" : "") << "</text>\n";
    s << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
      << "transform=\"rotate(-90 16 " << top + ph / 2 << ")\">" << xml_escape(chart.y_label)
      << (chart.log_y ? " (log)" : "") << "</text>\n";
    s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s << ' ';
        s << px(xs[i]) << ',' << py(ys[i]);
    }
    s << "\"/>\n</svg>\n";
    return s.str();
}

std::string content_digest(const nlohmann::json& content) {
    const std::string text = content.dump();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 digest failed");
    }
    std::ostringstream hex;
    hex << "sha256:";
    for (unsigned int i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return hex.str();
}

nlohmann::json seal(nlohmann::json content) {
    const std::string digest = content_digest(content);
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream ts;
    ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");

    content["content_digest"] = digest;
    content["metadata"] = {{"generated_at", ts.str()}, {"threads", thread_count()}};
    return content;
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        out << text;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("I/O error while writing '" + path.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot move output into place at '" + path.string() + "'");
    }
}

}  // namespace fracrule::cli
