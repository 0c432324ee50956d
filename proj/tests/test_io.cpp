#include "tilepath/io.hpp"

#include "tilepath/rng.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

using namespace tilepath;

namespace {

struct TempDir {
    std::filesystem::path dir;
    TempDir() {
        dir = std::filesystem::temp_directory_path() /
              ("tilepath_io_" + std::to_string(::getpid()));
        std::filesystem::create_directories(dir);
    }
    ~TempDir() { std::filesystem::remove_all(dir); }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("matrix round trips exactly through csv and binary") {
    TempDir tmp;
    Rng rng(701);
    for (int rep = 0; rep < 3; ++rep) {
        int m = 1 + rng.below(6), n = 1 + rng.below(6);
        Matrix M(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) M(i, j) = rng.normal() * std::pow(10.0, rng.below(7) - 3);

        std::string csv = tmp / "m.csv";
        save_matrix_csv(csv, M);
        Matrix back = load_matrix(csv);
        REQUIRE(back.rows() == m);
        REQUIRE(back.cols() == n);
        CHECK((back - M).cwiseAbs().maxCoeff() == 0.0);  // shortest round-trip formatting

        std::string bin = tmp / "m.tpth";
        save_matrix_binary(bin, M);
        Matrix back2 = load_matrix(bin);
        CHECK((back2 - M).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("binary format: magic header and truncation errors") {
    TempDir tmp;
    std::string path = tmp / "bad.bin";
    {
        std::ofstream out(path, std::ios::binary);
        out << "TPTH";
        std::uint32_t rows = 2, cols = 2;
        out.write(reinterpret_cast<const char*>(&rows), 4);
        out.write(reinterpret_cast<const char*>(&cols), 4);
        double v = 1.0;
        out.write(reinterpret_cast<const char*>(&v), 8);  // 3 values missing
    }
    CHECK_THROWS_AS(load_matrix(path), io_error);
    CHECK_THROWS_AS(load_matrix(tmp / "missing.csv"), io_error);
}

TEST_CASE("csv parsing: bad field names the line, ragged rows rejected") {
    TempDir tmp;
    std::string path = tmp / "bad.csv";
    write_text_file(path, "1,2\n3,oops\n");
    CHECK_THROWS_WITH_AS(load_matrix(path), doctest::Contains(":2"), io_error);
    write_text_file(path, "1,2\n3\n");
    CHECK_THROWS_AS(load_matrix(path), io_error);
}

TEST_CASE("vectors accept single-row or single-column files") {
    TempDir tmp;
    std::string col = tmp / "col.csv";
    write_text_file(col, "1\n2\n3\n");
    CHECK(load_vector(col).size() == 3);
    std::string row = tmp / "row.csv";
    write_text_file(row, "1,2,3\n");
    CHECK(load_vector(row).size() == 3);
    std::string mat = tmp / "mat.csv";
    write_text_file(mat, "1,2\n3,4\n");
    CHECK_THROWS_AS(load_vector(mat), io_error);
}
