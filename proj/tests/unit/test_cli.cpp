#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const std::string cmd = std::string(MDLAB_BINARY) + " " + args + " > " + out.string() + " 2>" +
                          (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("mdlab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    write(dir / "z1.json", R"({"kind":"zn","n":1})");
    write(dir / "f2.json", R"({"kind":"free","rank":2})");
    write(dir / "ind.json", R"({"support":[[[0],1,0],[[1],1,0]]})");
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const char* name) const { return (dir / name).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, BallListsElements) {
  auto r = run("ball --group " + path("f2.json") + " -R 2", dir);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("index,element,length"), std::string::npos);
  std::size_t rows = 0;
  std::istringstream in(r.out);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') ++rows;
  }
  EXPECT_EQ(rows, 18u);
}

TEST_F(Cli, SchurPrintsValue) {
  write(dir / "h.csv", "1,1\n1,-1\n");
  auto r = run("schur --matrix " + path("h.csv"), dir);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "1.414214\n");
  auto w = run("schur --matrix " + path("h.csv") + " --out " + path("o"), dir);
  EXPECT_EQ(w.code, 0);
  EXPECT_TRUE(fs::exists(dir / "o" / "schur.csv"));
  EXPECT_TRUE(fs::exists(dir / "o" / "witness_x.csv"));
}

TEST_F(Cli, InvalidInputExitsTwo) {
  write(dir / "bad.csv", "1,2\n3\n");
  EXPECT_EQ(run("schur --matrix " + path("bad.csv"), dir).code, 2);
  EXPECT_EQ(run("schur --matrix " + path("missing.csv"), dir).code, 2);
  EXPECT_EQ(run("ball -R 2", dir).code, 2);
  EXPECT_EQ(run("nosuchcommand", dir).code, 2);
  write(dir / "broken.json", "{");
  EXPECT_EQ(run("ball --group " + path("broken.json") + " -R 1", dir).code, 2);
  EXPECT_EQ(run("fejer --group " + path("z1.json") + " --N 4 --r 1.2", dir).code, 2);
  EXPECT_EQ(run("extension --group " + path("z1.json") + " --k 2", dir).code, 2);
}

TEST_F(Cli, ResourceCapExitsThree) {
  write(dir / "cfg.json", R"({"max_ball_size":10})");
  EXPECT_EQ(run("ball --group " + path("f2.json") + " -R 3 --config " + path("cfg.json"), dir).code, 3);
}

TEST_F(Cli, BracketAndDeterminism) {
  const std::string args = "bracket --group " + path("z1.json") + " --multiplier " + path("ind.json") +
                           " -d 1,2 -R 4 --seed 3";
  auto a = run(args, dir);
  auto b = run(args, dir);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("CERTIFIED_UPPER"), std::string::npos);

  const std::string fe = "fejer --group " + path("f2.json") + " --N 2,4 --r 0.5 -R 1 --seed 9";
  auto f1 = run(fe, dir);
  auto f2 = run(fe, dir);
  EXPECT_EQ(f1.code, 0);
  EXPECT_EQ(f1.out, f2.out);
  EXPECT_NE(f1.out.find("n,N,r,pointwise_residual"), std::string::npos);
}

TEST_F(Cli, ReportWritesFamilyJson) {
  auto r = run("report --z 0.5,0.3:0.3 --out " + path("rep"), dir);
  EXPECT_EQ(r.code, 0);
  std::ifstream in(dir / "rep" / "family.json");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_NE(ss.str().find("\"bound_kind\": \"empirical\""), std::string::npos);
  EXPECT_NE(ss.str().find("\"cr_element\""), std::string::npos);
}
