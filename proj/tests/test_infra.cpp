#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "potts/model.hpp"
#include "potts/random.hpp"
#include "potts/report.hpp"
#include "potts/tree.hpp"

using namespace potts;

TEST_CASE("doubles print in shortest round-trip form") {
  Rng rng(derive_seed(80, 0));
  for (int t = 0; t < 1000; ++t) {
    const double v = rng.uniform(-1e6, 1e6) * std::pow(10.0, rng.uniform_int(-30, 30));
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("csv quoting and width checks") {
  CsvTable t({"a", "b"});
  t.row().add("x,y").add(1);
  t.row().add("say \"hi\"").add(2.5);
  CHECK(t.str() == "a,b\r\n\"x,y\",1\r\n\"say \"\"hi\"\"\",2.5\r\n");
  t.row().add("short");
  CHECK_THROWS_AS(t.str(), InputError);
}

TEST_CASE("atomic writes leave the full content and no temporary") {
  const auto dir = std::filesystem::temp_directory_path() / "potts_infra_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "out.csv").string();
  write_file_atomic(path, "a,b\n1,2\n");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "a,b\n1,2\n");
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files += e.is_regular_file();
  CHECK(files == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("seed splitting is deterministic and separates streams") {
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  const auto a = run_chunks(10000, 1, [](std::size_t k, std::size_t b, std::size_t e) { return k * 1000000 + e - b; }, 128);
  const auto b = run_chunks(10000, 8, [](std::size_t k, std::size_t b, std::size_t e) { return k * 1000000 + e - b; }, 128);
  CHECK(a == b);
  CHECK_THROWS(run_chunks(10, 4, [](std::size_t k, std::size_t, std::size_t) -> int {
    if (k == 3) throw InputError("boom");
    return 0;
  }, 1));
}

TEST_CASE("regular trees have the expected shape") {
  const auto t = TreeSpec::regular(3, 2);
  CHECK(t.vertex_count() == 13);
  CHECK(t.leaves().size() == 9);
  CHECK(t.regular_degree() == 3);
  CHECK(t.regular_depth() == 2);
  for (int leaf : t.leaves()) CHECK(t.depth(leaf) == 2);
  CHECK_THROWS(TreeSpec::from_parents({-1, 2, 0}));
  CHECK_THROWS(TreeSpec::from_parents({0, 0}));
}

TEST_CASE("boundary files round trip and report the bad line") {
  const std::string text = "# sample\n3 2 2\n\n0 1\n1 3\n2 2\n3 2\n";
  std::istringstream in(text);
  const auto f = read_boundary_file(in);
  CHECK(f.q == 3);
  CHECK(f.d == 2);
  CHECK(f.depth == 2);
  CHECK(f.tau.leaf_colors(f.tree) == std::vector<int>{0, 2, 1, 1});
  std::ostringstream out;
  write_boundary_file(out, f);
  std::istringstream back(out.str());
  CHECK(read_boundary_file(back).tau == f.tau);

  std::istringstream bad("3 2 2\n0 1\n1 4\n");
  CHECK_THROWS_WITH(read_boundary_file(bad), Catch::Matchers::ContainsSubstring("line 3"));
  std::istringstream twice("3 2 1\n0 1\n0 2\n");
  CHECK_THROWS_WITH(read_boundary_file(twice), Catch::Matchers::ContainsSubstring("line 3"));
  std::istringstream none("# only a comment\n");
  CHECK_THROWS_AS(read_boundary_file(none), InputError);
}

TEST_CASE("leaf counts compress boundaries by parent") {
  const auto t = TreeSpec::regular(2, 2);
  const std::vector<int> colors{0, 0, 1, 2};
  const auto counts = leaf_parent_counts(t, BoundaryCondition::on_leaves(t, 3, colors));
  REQUIRE(counts.size() == 2);
  for (const auto& c : counts) CHECK(c.total() == 2);
}
