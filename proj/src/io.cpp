#include "irep/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "json.hpp"

namespace irep {

namespace fs = std::filesystem;

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
    }
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string means_csv(const MeanSequence& means, const VarianceSequence& variances) {
    std::ostringstream out;
    out << "norm,j,mean,variance_per_observer\n";
    const std::string name = means.norm.str();
    for (int j = -means.jmax(); j <= means.jmax(); ++j) {
        if (j == 0) continue;
        out << name << ',' << j << ',' << format_real(means.at(j)) << ',' << format_real(variances.per_observer(j))
            << '\n';
    }
    return out.str();
}

std::string mixture_csv(const TruncatedMasses& wild, const TruncatedMasses& mutant, const MeanSequence& wild_means,
                        const MeanSequence& mutant_means) {
    std::ostringstream out;
    out << "role,j,mass_normalized,mean_in_W_eyes,mean_in_M_eyes\n";
    for (const TruncatedMasses* masses : {&wild, &mutant}) {
        const LabeledSeries q = masses->normalized();
        for (int j = -masses->jmax(); j <= masses->jmax(); ++j) {
            if (j == 0) continue;
            out << to_string(masses->role) << ',' << j << ',' << format_real(q.at(j)) << ','
                << format_real(wild_means.at(j)) << ',' << format_real(mutant_means.at(j)) << '\n';
        }
    }
    return out.str();
}

std::string matrix_csv(const InvasibilityMatrix& m) {
    std::ostringstream out;
    out << "W\\M";
    for (SocialNorm n : all_norms()) out << ',' << n.label();
    out << '\n';
    for (SocialNorm w : all_norms()) {
        out << w.label();
        for (SocialNorm n : all_norms()) out << ',' << to_char(m.at(w, n));
        out << '\n';
    }
    return out.str();
}

std::string region_csv(const EssRegion& r) {
    std::ostringstream out;
    out << "e2,b_over_c,ess_flag\n";
    for (std::size_t i = 0; i < r.e2_grid.size(); ++i) {
        for (std::size_t k = 0; k < r.b_over_c_grid.size(); ++k) {
            out << format_real(r.e2_grid[i]) << ',' << format_real(r.b_over_c_grid[k]) << ','
                << (r.flags[i][k] ? 1 : 0) << '\n';
        }
    }
    return out.str();
}

namespace {

std::string label_or_dash(const std::optional<SocialNorm>& n) { return n ? n->label() : "-"; }

}  // namespace

std::string boundary_csv(const EssRegion& r) {
    std::ostringstream out;
    out << "e2,lower_bc,upper_bc,binding_mutant_lower,binding_mutant_upper\n";
    for (const EssBounds& b : r.bounds) {
        out << format_real(b.e2) << ',';
        if (b.empty) {
            out << "nan,nan," << label_or_dash(b.binding_lower ? b.binding_lower : b.blocking) << ','
                << label_or_dash(b.binding_upper ? b.binding_upper : b.blocking) << '\n';
        } else {
            out << format_real(b.lower) << ',' << format_real(b.upper) << ',' << label_or_dash(b.binding_lower)
                << ',' << label_or_dash(b.binding_upper) << '\n';
        }
    }
    return out.str();
}

std::string region_svg(const EssRegion& r) {
    const double left = 70.0;
    const double top = 30.0;
    const double plot_w = 520.0;
    const double plot_h = 360.0;
    const auto nx = static_cast<double>(r.e2_grid.size());
    const auto ny = static_cast<double>(r.b_over_c_grid.size());
    const double cw = plot_w / nx;
    const double ch = plot_h / ny;

    // Vertical position of a b/c value, linear in grid index between points.
    const auto y_of = [&](double v) {
        const auto& g = r.b_over_c_grid;
        double idx;
        if (v <= g.front()) {
            idx = 0.0;
        } else if (v >= g.back()) {
            idx = ny - 1.0;
        } else {
            const auto it = std::upper_bound(g.begin(), g.end(), v);
            const auto k = static_cast<std::size_t>(it - g.begin());
            idx = static_cast<double>(k - 1) + (v - g[k - 1]) / (g[k] - g[k - 1]);
        }
        return top + plot_h - (idx + 0.5) * ch;
    };

    std::ostringstream out;
    char buf[256];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"450\" font-family=\"sans-serif\" "
           "font-size=\"11\">\n";
    out << "<title>ESS region of " << r.norm.label() << " (" << r.norm.str() << ")</title>\n";
    for (std::size_t i = 0; i < r.e2_grid.size(); ++i) {
        for (std::size_t k = 0; k < r.b_over_c_grid.size(); ++k) {
            std::snprintf(buf, sizeof buf,
                          "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"%s\"/>\n",
                          left + static_cast<double>(i) * cw, top + plot_h - static_cast<double>(k + 1) * ch, cw,
                          ch, r.flags[i][k] ? "#3060d0" : "#d04040");
            out << buf;
        }
    }
    for (int side = 0; side < 2; ++side) {
        std::string points;
        for (std::size_t i = 0; i < r.bounds.size(); ++i) {
            const EssBounds& b = r.bounds[i];
            const double v = side == 0 ? b.lower : b.upper;
            if (b.empty || !std::isfinite(v)) continue;
            std::snprintf(buf, sizeof buf, "%.3f,%.3f ", left + (static_cast<double>(i) + 0.5) * cw, y_of(v));
            points += buf;
        }
        if (!points.empty()) {
            out << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << (side == 0 ? "#ff80c0" : "#40e0e0")
                << "\" points=\"" << points << "\"/>\n";
        }
    }
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"none\" stroke=\"black\"/>\n",
                  left, top, plot_w, plot_h);
    out << buf;
    for (std::size_t i = 0; i < r.e2_grid.size(); i += std::max<std::size_t>(1, r.e2_grid.size() / 8)) {
        std::snprintf(buf, sizeof buf, "<text x=\"%.3f\" y=\"%.3f\" text-anchor=\"middle\">%g</text>\n",
                      left + (static_cast<double>(i) + 0.5) * cw, top + plot_h + 16.0, r.e2_grid[i]);
        out << buf;
    }
    for (std::size_t k = 0; k < r.b_over_c_grid.size(); k += std::max<std::size_t>(1, r.b_over_c_grid.size() / 10)) {
        std::snprintf(buf, sizeof buf, "<text x=\"%.3f\" y=\"%.3f\" text-anchor=\"end\">%g</text>\n", left - 6.0,
                      top + plot_h - (static_cast<double>(k) + 0.5) * ch + 4.0, r.b_over_c_grid[k]);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.3f\" y=\"%.3f\" text-anchor=\"middle\">e2</text>\n",
                  left + plot_w / 2.0, top + plot_h + 36.0);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"16\" y=\"%.3f\" text-anchor=\"middle\" transform=\"rotate(-90 16 %.3f)\">b/c</text>\n",
                  top + plot_h / 2.0, top + plot_h / 2.0);
    out << buf;
    out << "</svg>\n";
    return out.str();
}

std::string public_csv(double e1, double e2) {
    std::ostringstream out;
    out << "norm,e1,e2,pWW,pMW,relation_sign\n";
    for (SocialNorm n : all_norms()) {
        const double ww = public_wild_goodness(n, e1, e2);
        const double mw = public_allb_mutant_goodness(n, e1, e2);
        out << n.label() << ',' << format_real(e1) << ',' << format_real(e2) << ',' << format_real(ww) << ','
            << format_real(mw) << ',' << public_relation(ww, mw) << '\n';
    }
    return out.str();
}

std::string samples_csv_header() { return "t,individual_id,role,goodness_from_W,goodness_from_M\n"; }

std::string samples_csv_rows(const GoodnessBatch& b, int stride) {
    std::ostringstream out;
    const int n = static_cast<int>(b.from_wild.size());
    for (int i = 0; i < n; i += std::max(stride, 1)) {
        const auto k = static_cast<std::size_t>(i);
        out << b.t << ',' << i << ',' << (i < b.mutant_count ? "M" : "W") << ',' << format_real(b.from_wild[k]) << ','
            << format_real(b.from_mutant[k]) << '\n';
    }
    return out.str();
}

std::string histogram_csv(const Histogram2D& h) {
    std::ostringstream out;
    out << "bin_x,bin_y,mass\n";
    for (int x = 0; x < h.bins; ++x) {
        for (int y = 0; y < h.bins; ++y) {
            if (h.at(x, y) <= 0.0) continue;
            out << format_real(h.center(x)) << ',' << format_real(h.center(y)) << ',' << format_real(h.at(x, y))
                << '\n';
        }
    }
    return out.str();
}

namespace {

std::string hex_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_hex_real(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

nlohmann::json bounded_to_json(const BoundedValue& v) {
    return {hex_real(v.estimate), hex_real(v.lower), hex_real(v.upper)};
}

BoundedValue bounded_from_json(const nlohmann::json& j) {
    return {parse_hex_real(j.at(0).get<std::string>()), parse_hex_real(j.at(1).get<std::string>()),
            parse_hex_real(j.at(2).get<std::string>())};
}

}  // namespace

QuadrupleCache::QuadrupleCache(fs::path dir) : dir_(std::move(dir)) {}

std::string QuadrupleCache::key(SocialNorm w, SocialNorm m, double e2, double e1, int jmax) {
    const std::string tuple =
        w.str() + '|' + m.str() + '|' + hex_real(e2) + '|' + hex_real(e1) + '|' + std::to_string(jmax);
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(tuple)));
    return buf;
}

std::optional<GoodnessQuadruple> QuadrupleCache::load(const std::string& key) const {
    std::ifstream in(dir_ / (key + ".json"));
    if (!in) return std::nullopt;
    try {
        const nlohmann::json j = nlohmann::json::parse(in);
        return GoodnessQuadruple{bounded_from_json(j.at("ww")), bounded_from_json(j.at("wm")),
                                 bounded_from_json(j.at("mw")), bounded_from_json(j.at("mm"))};
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

void QuadrupleCache::store(const std::string& key, const GoodnessQuadruple& q) const {
    nlohmann::json j;
    j["ww"] = bounded_to_json(q.ww);
    j["wm"] = bounded_to_json(q.wm);
    j["mw"] = bounded_to_json(q.mw);
    j["mm"] = bounded_to_json(q.mm);
    write_file_atomic(dir_ / (key + ".json"), j.dump(1) + "\n");
}

GoodnessQuadruple QuadrupleCache::get(SocialNorm w, SocialNorm m, double e2, double e1, int jmax) const {
    const std::string k = key(w, m, e2, e1, jmax);
    if (auto hit = load(k)) return *hit;
    const GoodnessQuadruple q = pair_goodness(w, m, e2, e1, jmax);
    store(k, q);
    return q;
}

}  // namespace irep
