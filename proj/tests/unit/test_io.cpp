#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "mdlab/config.hpp"
#include "mdlab/errors.hpp"
#include "mdlab/io.hpp"

using namespace mdlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("mdlab_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Io, MatrixCsvEntryForms) {
  auto m = parse_matrix_csv("# comment\n1, 2+3i, -1-0.5i\ni, -2i, 0.25\n");
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 3);
  EXPECT_EQ(m(0, 0), cd(1, 0));
  EXPECT_EQ(m(0, 1), cd(2, 3));
  EXPECT_EQ(m(0, 2), cd(-1, -0.5));
  EXPECT_EQ(m(1, 0), cd(0, 1));
  EXPECT_EQ(m(1, 1), cd(0, -2));
  EXPECT_EQ(m(1, 2), cd(0.25, 0));
  EXPECT_EQ(parse_matrix_csv("1e-3+2e2i\n")(0, 0), cd(1e-3, 2e2));
}

TEST(Io, MatrixCsvRejectsMalformed) {
  EXPECT_THROW(parse_matrix_csv("1,2\n3\n"), ValidationError);
  EXPECT_THROW(parse_matrix_csv(""), ValidationError);
  EXPECT_THROW(parse_matrix_csv("1,x\n"), ValidationError);
  EXPECT_THROW(parse_matrix_csv("1,,2\n"), ValidationError);
}

TEST(Io, MatrixRoundTrips) {
  Eigen::MatrixXcd m(2, 3);
  m << cd(1, -2), 0.1, cd(0, 1e-17), cd(-3, 0.3), 7, cd(2.5, -1);
  EXPECT_EQ(parse_matrix_binary(matrix_binary(m)), m);
  EXPECT_EQ(parse_matrix_csv(matrix_csv(m)), m);
  const std::string bin = matrix_binary(m);
  EXPECT_EQ(bin.substr(0, 5), "SCHR1");
  EXPECT_THROW(parse_matrix_binary(bin.substr(0, bin.size() - 1)), ValidationError);
  EXPECT_THROW(parse_matrix_binary("SCHR2" + bin.substr(5)), ValidationError);

  const fs::path dir = scratch_dir("matrix");
  atomic_write((dir / "m.bin").string(), bin);
  atomic_write((dir / "m.csv").string(), matrix_csv(m));
  EXPECT_EQ(read_matrix((dir / "m.bin").string()), m);
  EXPECT_EQ(read_matrix((dir / "m.csv").string()), m);
  EXPECT_THROW(read_matrix((dir / "missing.csv").string()), ValidationError);
  fs::remove_all(dir);
}

TEST(Io, AtomicWriteReplacesWithoutLeftovers) {
  const fs::path dir = scratch_dir("atomic");
  const std::string path = (dir / "sub" / "out.txt").string();
  atomic_write(path, "first");
  atomic_write(path, "second");
  EXPECT_EQ(read_file(path), "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "sub")) ++files;
  EXPECT_EQ(files, 1u);
  fs::remove_all(dir);
}

TEST(Io, Formatting) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(kInfinity), "inf");
  EXPECT_EQ(format_complex(cd(1, -2)), "1-2i");
  EXPECT_EQ(format_complex(cd(0.5, 0.25)), "0.5+0.25i");
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"x\", y"), "\"say \"\"x\"\", y\"");
}

TEST(Io, GroupJsonRoundTrips) {
  for (const char* text : {R"({"kind":"free","rank":3})", R"({"kind":"zn","n":2})", R"({"kind":"finite","n":5})",
                           R"({"kind":"finite","table":[[0,1],[1,0]]})", R"({"kind":"sl2z"})",
                           R"({"kind":"sl2z_semidirect"})"}) {
    const GroupPtr g = group_from_json(json::parse(text));
    const GroupPtr h = group_from_json(group_to_json(*g));
    EXPECT_EQ(group_to_json(*g), group_to_json(*h)) << text;
    if (!g->order()) EXPECT_EQ(g->ball(2).elements, h->ball(2).elements) << text;
  }
  EXPECT_THROW(group_from_json(json::parse(R"({"kind":"torus"})")), ValidationError);
  EXPECT_THROW(group_from_json(json::parse(R"({"kind":"free","rank":0})")), ValidationError);
  EXPECT_THROW(group_from_json(json::parse(R"({"kind":"finite","table":[[0,1],[1,1]]})")), ValidationError);
  EXPECT_THROW(group_from_json(json::parse(R"({"rank":2})")), ValidationError);
}

TEST(Io, ElementsFromJson) {
  auto f2 = make_free_group(2);
  EXPECT_EQ(element_from_json("aB", *f2), f2->parse("aB"));
  auto z2 = make_zn(2);
  EXPECT_EQ(element_from_json(json::parse("[3,-1]"), *z2), zn_element({3, -1}));
  EXPECT_THROW(element_from_json(json::parse("[1.5, 2]"), *z2), ValidationError);
  EXPECT_THROW(element_from_json(json::parse("[1]"), *z2), ValidationError);
  EXPECT_THROW(element_from_json(json::parse("{}"), *z2), ValidationError);
}

TEST(Io, MultiplierJson) {
  auto z = make_zn(1);
  auto phi = multiplier_from_json(json::parse(R"({"support":[[[0],1,0],[[2],0,-1]],"id":"two"})"), z);
  EXPECT_EQ(phi.id(), "two");
  EXPECT_EQ(phi(zn_element({2})), cd(0, -1));
  EXPECT_EQ(phi(zn_element({1})), cd(0));
  auto back = multiplier_from_json(multiplier_to_json(phi), z);
  EXPECT_EQ(back(zn_element({2})), cd(0, -1));

  auto rad = multiplier_from_json(json::parse(R"({"radial":{"coeffs_by_length":[1,[0,0.5],0.25]}})"), z);
  EXPECT_EQ(rad(zn_element({-1})), cd(0, 0.5));
  EXPECT_EQ(rad(zn_element({3})), cd(0));
  EXPECT_EQ(multiplier_from_json(json::parse(R"({"constant":[2,1]})"), z)(zn_element({9})), cd(2, 1));
  auto fe = multiplier_from_json(json::parse(R"({"fejer":{"N":4,"r":0.9}})"), z);
  EXPECT_NEAR(fe(zn_element({2})).real(), 0.486, 1e-15);
  auto fo = multiplier_from_json(json::parse(R"({"folner":{"k":3}})"), make_zn(2));
  EXPECT_EQ(fo(zn_element({1, 2})), cd(0.75 * 0.5));

  EXPECT_THROW(multiplier_from_json(json::parse(R"({"support":[[[0],1]]})"), z), ValidationError);
  EXPECT_THROW(multiplier_from_json(json::parse(R"({"support":[[[0],1,0],[[0],2,0]]})"), z), ValidationError);
  EXPECT_THROW(multiplier_from_json(json::parse(R"({"fejer":{"N":4,"r":1.5}})"), z), ValidationError);
  EXPECT_THROW(multiplier_from_json(json::parse(R"({"other":1})"), z), ValidationError);
  EXPECT_THROW(multiplier_from_json(json::parse("[]"), z), ValidationError);
}

TEST(Io, CsvWriters) {
  auto z = make_zn(1);
  EXPECT_EQ(ball_csv(z->ball(1)), "index,element,length\n0,(0),0\n1,(-1),1\n2,(1),1\n");
  NormBracket b;
  b.phi_id = "x,y";
  b.lower = 1.0;
  b.upper = 2.0;
  b.flags = {"CERTIFIED_UPPER"};
  const std::string csv = bracket_csv({b});
  EXPECT_NE(csv.find("\"x,y\""), std::string::npos);
  EXPECT_NE(csv.find("CERTIFIED_UPPER"), std::string::npos);
  b.empirical_upper = 1.5;
  EXPECT_NE(bracket_csv({b}).find("empirical_upper=1.5"), std::string::npos);

  ConvergenceReport rep;
  ConvergenceRow row;
  row.n = 1;
  row.N = 4;
  row.r = 0.5;
  row.residual = 0.6;
  row.bracket = b;
  rep.rows = {row};
  rep.C = kInfinity;
  const std::string cc = convergence_csv(rep);
  EXPECT_EQ(cc.substr(0, cc.find('\n')), "n,N,r,pointwise_residual,lower,upper,empirical_upper,flags");
  EXPECT_NE(convergence_header(rep).find("# C = inf"), std::string::npos);
}

TEST(Io, ConfigPrecedence) {
  Config c;
  c.apply_json(json::parse(R"({"tol":1e-4,"radius":3,"seed":7})"));
  EXPECT_EQ(c.tol, 1e-4);
  EXPECT_EQ(c.radius, 3u);
  ::setenv("MDLAB_RADIUS", "5", 1);
  c.apply_env();
  ::unsetenv("MDLAB_RADIUS");
  EXPECT_EQ(c.radius, 5u);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_THROW(c.set("nonsense", "1"), ValidationError);
  EXPECT_THROW(c.set("tol", "-1"), ValidationError);
  EXPECT_THROW(c.set("radius", "x"), ValidationError);
  EXPECT_THROW(c.apply_json(json::parse(R"({"radius":[3]})")), ValidationError);
  EXPECT_THROW(c.apply_json(json::parse("[1]")), ValidationError);
  EXPECT_NE(c.header().find("# radius = 5\n"), std::string::npos);
  EXPECT_EQ(c.bracket_options().radius, 5u);
  EXPECT_EQ(c.limits().length_horizon, 14u);
}
