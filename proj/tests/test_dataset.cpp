#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "denoise/dataset.hpp"
#include "denoise/rng.hpp"

using namespace denoise;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream(path, std::ios::trunc) << text;
}

}  // namespace

TEST_CASE("parse_csv reads an 8-column file") {
    const fs::path dir = temp_dir("denoise_csv_test");
    write_file(dir / "a.csv",
               "1,2,3,4,5,6,7,8\n"
               "1.5,2.5,3.5,4.5,5.5,6.5,7.5,8.5\n"
               "-1,-2,-3,-4,-5,-6,-7,-8\n");
    const MafauldaRecord rec = parse_csv((dir / "a.csv").string());
    REQUIRE(rec.num_samples == 3);
    REQUIRE(rec.at(0, 0) == 1.0);
    REQUIRE(rec.at(1, 4) == 5.5);
    REQUIRE(rec.at(2, 7) == -8.0);
    REQUIRE_FALSE(rec.standard_length);
}

TEST_CASE("parse_csv handles CRLF and scientific notation") {
    const fs::path dir = temp_dir("denoise_csv_crlf");
    write_file(dir / "a.csv", "1e-3,2,3,4,5,6,7,8.25e1\r\n0,0,0,0,0,0,0,1\r\n");
    const MafauldaRecord rec = parse_csv((dir / "a.csv").string());
    REQUIRE(rec.num_samples == 2);
    REQUIRE(rec.at(0, 0) == 1e-3);
    REQUIRE(rec.at(0, 7) == 82.5);
}

TEST_CASE("parse_csv reports malformed rows with their line number") {
    const fs::path dir = temp_dir("denoise_csv_bad");
    SECTION("non-numeric token") {
        write_file(dir / "a.csv", "1,2,three,4,5,6,7,8\n");
        try {
            parse_csv((dir / "a.csv").string());
            FAIL("expected MalformedRow");
        } catch (const MalformedRow& e) {
            REQUIRE(e.line == 1);
        }
    }
    SECTION("wrong field count, with the line number of the offender") {
        write_file(dir / "b.csv", "1,2,3,4,5,6,7,8\n1,2,3\n");
        try {
            parse_csv((dir / "b.csv").string());
            FAIL("expected MalformedRow");
        } catch (const MalformedRow& e) {
            REQUIRE(e.line == 2);
        }
    }
    SECTION("empty file") {
        write_file(dir / "c.csv", "");
        REQUIRE_THROWS_AS(parse_csv((dir / "c.csv").string()), EmptyFile);
    }
    SECTION("non-finite values are malformed") {
        write_file(dir / "d.csv", "1,2,inf,4,5,6,7,8\n");
        REQUIRE_THROWS_AS(parse_csv((dir / "d.csv").string()), MalformedRow);
        write_file(dir / "e.csv", "1,2,nan,4,5,6,7,8\n");
        REQUIRE_THROWS_AS(parse_csv((dir / "e.csv").string()), MalformedRow);
    }
}

TEST_CASE("category is inferred from the directory layout") {
    const fs::path dir = temp_dir("denoise_csv_cat");
    const std::string row = "1,2,3,4,5,6,7,8\n";
    write_file(dir / "normal" / "1.csv", row);
    write_file(dir / "horizontal-misalignment" / "0.5mm" / "1.csv", row);
    write_file(dir / "horizontal-misalignment" / "2.0mm" / "9.csv", row);
    write_file(dir / "imbalance" / "1.csv", row);

    REQUIRE(parse_csv((dir / "normal" / "1.csv").string()).category == Category::normal);
    REQUIRE(parse_csv((dir / "horizontal-misalignment" / "0.5mm" / "1.csv").string()).category ==
            Category::horizontal_misalignment_0_5mm);
    REQUIRE(parse_csv((dir / "horizontal-misalignment" / "2.0mm" / "9.csv").string()).category ==
            Category::horizontal_misalignment_2_0mm);
    REQUIRE(parse_csv((dir / "imbalance" / "1.csv").string()).category == Category::other);
}

TEST_CASE("extract_microphone projects one column") {
    const fs::path dir = temp_dir("denoise_csv_col");
    write_file(dir / "a.csv",
               "1,2,3,4,5,6,7,80\n"
               "1,2,3,4,5,6,7,81\n"
               "1,2,3,4,5,6,7,82\n");
    const MafauldaRecord rec = parse_csv((dir / "a.csv").string());
    const Waveform mic = extract_microphone(rec, 7);
    REQUIRE(mic.samples == std::vector<double>{80.0, 81.0, 82.0});
    REQUIRE(mic.sample_rate_hz == 50000);

    REQUIRE_THROWS_AS(extract_microphone(rec, 9), ColumnOutOfRange);
    REQUIRE(kDefaultMicrophoneColumn == 7);
}

TEST_CASE("csv_to_wav round trips the column through float32") {
    const fs::path dir = temp_dir("denoise_csv_wav");
    std::string text;
    CounterRng rng(8);
    std::vector<double> column;  // the exact doubles the CSV text denotes
    for (int i = 0; i < 200; ++i) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%.17g", rng.next_uniform() * 2.0 - 1.0);
        column.push_back(std::strtod(buf, nullptr));
        text += "0,0,0,0,0,0,0,";
        text += buf;
        text += '\n';
    }
    write_file(dir / "a.csv", text);
    csv_to_wav((dir / "a.csv").string(), (dir / "a.wav").string(), 7);

    const WavData wav = read_wav((dir / "a.wav").string());
    REQUIRE(wav.sample_rate_hz == 50000);
    REQUIRE(wav.frames() == column.size());
    for (std::size_t i = 0; i < column.size(); ++i)
        REQUIRE(wav.samples[i] == static_cast<float>(column[i]));

    REQUIRE_THROWS_AS(csv_to_wav("/nonexistent/x.csv", (dir / "b.wav").string(), 7), IoFailure);
}

TEST_CASE("a 250000-row recording lasts five seconds") {
    const fs::path dir = temp_dir("denoise_csv_full");
    std::string text;
    text.reserve(250000 * 16);
    for (int i = 0; i < 250000; ++i) text += "0,0,0,0,0,0,0,1\n";
    write_file(dir / "big.csv", text);
    const MafauldaRecord rec = parse_csv((dir / "big.csv").string());
    REQUIRE(rec.num_samples == 250000);
    REQUIRE(rec.standard_length);
    const Waveform mic = extract_microphone(rec);
    REQUIRE(mic.duration_s() == 5.0);
}

TEST_CASE("split counts match the 30/14/56 rule") {
    std::vector<std::string> ids;
    for (int i = 0; i < 49; ++i) ids.push_back("s" + std::to_string(i));
    DatasetSplit s = split_dataset(ids, 1);
    REQUIRE(s.test.size() == 15);
    REQUIRE(s.val.size() == 7);
    REQUIRE(s.train.size() == 27);

    ids.clear();
    for (int i = 0; i < 197; ++i) ids.push_back("s" + std::to_string(i));
    s = split_dataset(ids, 1);
    REQUIRE(s.test.size() == 60);
    REQUIRE(s.val.size() == 27);
    REQUIRE(s.train.size() == 110);

    s = split_dataset({"only"}, 1);
    REQUIRE(s.test.size() == 1);
    REQUIRE(s.val.empty());
    REQUIRE(s.train.empty());

    REQUIRE_THROWS_AS(split_dataset({}, 1), EmptyCorpus);
}

TEST_CASE("split is a partition for arbitrary corpus sizes") {
    CounterRng rng(6021);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + rng.next_below(500);
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) ids.push_back("f" + std::to_string(i));

        const DatasetSplit s = split_dataset(ids, trial);
        REQUIRE(s.train.size() + s.val.size() + s.test.size() == n);
        REQUIRE(s.test.size() == (3 * n + 9) / 10);
        std::set<std::string> all;
        for (const auto& part : {s.train, s.val, s.test})
            for (const auto& id : part) REQUIRE(all.insert(id).second);
        REQUIRE(all.size() == n);
    }
}

TEST_CASE("split is deterministic and seed-sensitive") {
    std::vector<std::string> ids;
    for (int i = 0; i < 10; ++i) ids.push_back("x" + std::to_string(i));

    const DatasetSplit a = split_dataset(ids, 123);
    const DatasetSplit b = split_dataset(ids, 123);
    REQUIRE(a.train == b.train);
    REQUIRE(a.val == b.val);
    REQUIRE(a.test == b.test);

    bool any_difference = false;
    for (std::uint64_t seed = 0; seed < 100 && !any_difference; ++seed) {
        const DatasetSplit other = split_dataset(ids, 1000 + seed);
        any_difference = other.test != a.test || other.val != a.val;
    }
    REQUIRE(any_difference);
}

TEST_CASE("split manifest JSON round trip") {
    const DatasetSplit s = split_dataset({"a", "b", "c", "d", "e"}, 9);
    const DatasetSplit back = DatasetSplit::from_json(s.to_json());
    REQUIRE(back.seed == 9);
    REQUIRE(back.train == s.train);
    REQUIRE(back.val == s.val);
    REQUIRE(back.test == s.test);
}
