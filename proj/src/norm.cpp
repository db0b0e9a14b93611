#include "irep/norm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

namespace irep {

namespace {

struct Alias {
    int id;
    std::string_view name;
};

constexpr std::array<Alias, 6> kAliases{{
    {1, "ALLG"}, {3, "SS"}, {4, "SC"}, {7, "SJ"}, {8, "SH"}, {16, "ALLB"},
}};

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    return out;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isdigit(ch); });
}

}  // namespace

SocialNorm::SocialNorm(int id) : id_(id) {
    if (id < 1 || id > kNormCount) {
        throw InputError("norm id must be in 1..16, got " + std::to_string(id));
    }
}

SocialNorm SocialNorm::from_string(std::string_view pivots) {
    if (pivots.size() != 4) {
        throw InputError("norm string must have 4 letters over {G,B}: '" + std::string(pivots) + "'");
    }
    // G is the 0 bit in lexicographic order, so the id is 1 + the B-bits read
    // as a binary number with GC as the most significant position.
    int code = 0;
    for (char ch : pivots) {
        const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (u != 'G' && u != 'B') {
            throw InputError("norm string must have 4 letters over {G,B}: '" + std::string(pivots) + "'");
        }
        code = code * 2 + (u == 'B' ? 1 : 0);
    }
    return SocialNorm(code + 1);
}

bool SocialNorm::assigns_good(Pivot p) const noexcept {
    const int code = id_ - 1;
    const int shift = 3 - static_cast<int>(p);
    return ((code >> shift) & 1) == 0;
}

std::array<bool, 4> SocialNorm::pivots() const noexcept {
    return {assigns_good(Pivot::GC), assigns_good(Pivot::BC), assigns_good(Pivot::GD),
            assigns_good(Pivot::BD)};
}

std::string SocialNorm::str() const {
    std::string s;
    for (bool g : pivots()) s.push_back(g ? 'G' : 'B');
    return s;
}

std::string SocialNorm::label() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "S%02d", id_);
    return buf;
}

std::string_view SocialNorm::alias() const noexcept {
    for (const auto& a : kAliases) {
        if (a.id == id_) return a.name;
    }
    return {};
}

SocialNorm norm_from_spec(int id) { return SocialNorm(id); }

SocialNorm norm_from_spec(std::string_view spec) {
    const std::string u = upper(spec);
    if (u.empty()) throw InputError("empty norm specification");
    if (all_digits(u)) {
        if (u.size() > 2) throw InputError("norm id must be in 1..16: '" + std::string(spec) + "'");
        return SocialNorm(std::stoi(u));
    }
    if (u.size() >= 2 && u[0] == 'S' && all_digits(std::string_view(u).substr(1))) {
        if (u.size() > 3) throw InputError("norm id must be in 1..16: '" + std::string(spec) + "'");
        return SocialNorm(std::stoi(u.substr(1)));
    }
    for (const auto& a : kAliases) {
        if (u == a.name) return SocialNorm(a.id);
    }
    return SocialNorm::from_string(u);
}

std::array<SocialNorm, kNormCount> all_norms() {
    return {SocialNorm(1),  SocialNorm(2),  SocialNorm(3),  SocialNorm(4),
            SocialNorm(5),  SocialNorm(6),  SocialNorm(7),  SocialNorm(8),
            SocialNorm(9),  SocialNorm(10), SocialNorm(11), SocialNorm(12),
            SocialNorm(13), SocialNorm(14), SocialNorm(15), SocialNorm(16)};
}

void check_assessment_error(double e2) {
    if (!(e2 > 0.0 && e2 < 0.5)) {
        throw InputError("assessment error e2 must lie in (0, 0.5), got " + std::to_string(e2));
    }
}

void check_action_error(double e1) {
    if (!(e1 >= 0.0 && e1 < 0.5)) {
        throw InputError("action error e1 must lie in [0, 0.5), got " + std::to_string(e1));
    }
}

void ErrorRates::validate() const {
    check_action_error(e1);
    check_assessment_error(e2);
}

void ErrorRates::validate_allow_zero_assessment_error() const {
    check_action_error(e1);
    if (!(e2 >= 0.0 && e2 < 0.5)) {
        throw InputError("assessment error e2 must lie in [0, 0.5), got " + std::to_string(e2));
    }
}

double action_prob(double p, double e1) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InputError("goodness must lie in [0, 1], got " + std::to_string(p));
    }
    return action_prob_unchecked(p, e1);
}

double AssessmentVector::operator[](Pivot p) const noexcept {
    switch (p) {
        case Pivot::GC: return gc;
        case Pivot::BC: return bc;
        case Pivot::GD: return gd;
        case Pivot::BD: return bd;
    }
    return 0.0;
}

AssessmentVector assessment_vector(SocialNorm norm, double e2) {
    const auto prob = [&](Pivot p) { return norm.assigns_good(p) ? 1.0 - e2 : e2; };
    return {prob(Pivot::GC), prob(Pivot::BC), prob(Pivot::GD), prob(Pivot::BD)};
}

AffineMapPair reputation_maps(SocialNorm norm, double e2) {
    const AssessmentVector a = assessment_vector(norm, e2);
    return {AffineMap{a.gc - a.bc, a.bc}, AffineMap{a.gd - a.bd, a.bd}};
}

std::string_view to_string(MapClass c) noexcept {
    switch (c) {
        case MapClass::BothConstant: return "both-constant";
        case MapClass::OnlyCConstant: return "only-c-constant";
        case MapClass::OnlyDConstant: return "only-d-constant";
        case MapClass::NeitherConstant: return "neither-constant";
    }
    return "?";
}

MapClass classify_maps(const AffineMapPair& maps) noexcept {
    const bool c0 = maps.c.is_constant();
    const bool d0 = maps.d.is_constant();
    if (c0 && d0) return MapClass::BothConstant;
    if (c0) return MapClass::OnlyCConstant;
    if (d0) return MapClass::OnlyDConstant;
    return MapClass::NeitherConstant;
}

MapClass classify_maps(SocialNorm norm) {
    // Any admissible e2 gives the same zero pattern.
    return classify_maps(reputation_maps(norm, 0.25));
}

}  // namespace irep
