#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

#include "irep/io.hpp"

using namespace irep;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* name) {
    const fs::path p = fs::temp_directory_path() / ("irep_io_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("real formatting") {
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(1.0) == "1");
    CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_real(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_real(std::nan("")) == "nan");
    CHECK(std::stod(format_real(0.123456789012345678)) == 0.123456789012345678);
}

TEST_CASE("atomic writes") {
    const fs::path dir = scratch_dir("atomic");
    const fs::path f = dir / "sub" / "x.csv";
    write_file_atomic(f, "a,b\n");
    CHECK(slurp(f) == "a,b\n");
    write_file_atomic(f, "c\n");
    CHECK(slurp(f) == "c\n");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "sub")) ++entries;
    CHECK(entries == 1);
}

TEST_CASE("fnv1a64") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("quadruple cache replays exactly") {
    const fs::path dir = scratch_dir("cache");
    const QuadrupleCache cache(dir);
    const GoodnessQuadruple fresh = cache.get(norms::SS, norms::SH, 0.1, 0.0, 500);
    const std::string key = QuadrupleCache::key(norms::SS, norms::SH, 0.1, 0.0, 500);
    CHECK(key != QuadrupleCache::key(norms::SS, norms::SH, 0.1, 0.0, 501));
    const auto loaded = cache.load(key);
    REQUIRE(loaded.has_value());
    CHECK(loaded->mw.estimate == fresh.mw.estimate);
    CHECK(loaded->mw.lower == fresh.mw.lower);
    CHECK(loaded->wm.upper == fresh.wm.upper);
    const GoodnessQuadruple direct = pair_goodness(norms::SS, norms::SH, 0.1, 0.0, 500);
    CHECK(direct.ww.estimate == fresh.ww.estimate);
    CHECK_FALSE(cache.load("0000000000000000").has_value());
}

TEST_CASE("tables") {
    const InvasibilityMatrix m = invasibility_matrix(0.1, 3.0, 0.0, 2000);
    const std::string csv = matrix_csv(m);
    CHECK(csv.rfind("W\\M,S01,S02", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);

    const std::string pub = public_csv(0.0, 0.1);
    CHECK(pub.rfind("norm,e1,e2,pWW,pMW,relation_sign\n", 0) == 0);
    CHECK(pub.find("S03,") != std::string::npos);

    const EssRegion r = ess_region(norms::SS, {0.1}, {2.0, 3.0}, 0.0, 2000, 1);
    CHECK(region_csv(r).find("e2,b_over_c,ess_flag") == 0);
    CHECK(boundary_csv(r).find("S04") != std::string::npos);
    const std::string svg = region_svg(r);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
}
