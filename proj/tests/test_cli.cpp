#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string temp_path(const std::string& name) {
  return std::string("/tmp/idealkit_test_") + name;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

RunResult run_cli(const std::string& args) {
  std::string out_path = temp_path("out");
  std::string cmd = std::string(IDEALKIT_BIN) + " " + args + " > " + out_path + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WEXITSTATUS(status);
  std::ifstream in(out_path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  res.out = buf.str();
  return res;
}

}  // namespace

TEST_CASE("eval prints the exact value") {
  write_file(temp_path("ex.sm"), "(measure ((0 1/2) (3 1/4)))\n");
  RunResult res = run_cli("eval " + temp_path("ex.sm") + " --set \"(set 0 3)\"");
  CHECK(res.exit_code == 0);
  CHECK(res.out == "3/4\n");
}

TEST_CASE("parse errors exit with the usage code") {
  write_file(temp_path("bad.sm"), "(qmix 1 ((1/2 (measure ((0 1)))) (1/3 (measure ((1 1))))))\n");
  RunResult res = run_cli("eval " + temp_path("bad.sm") + " --set \"(set 0)\"");
  CHECK(res.exit_code == 2);
  RunResult missing = run_cli("eval /nonexistent.sm --set \"(set 0)\"");
  CHECK(missing.exit_code == 2);
}

TEST_CASE("window violations exit with the resource code") {
  write_file(temp_path("w.sm"), "(measure ((100 1)))\n");
  RunResult res = run_cli("eval " + temp_path("w.sm") + " --window 8 --set \"(set 0)\"");
  CHECK(res.exit_code == 3);
}

TEST_CASE("obstruction check emits a certificate and exits 1") {
  // counting measure on a 4-point block: three singleton members below 3/4
  // union to 3 >= 1
  write_file(temp_path("nu.sm"), "(measure ((0 1/2) (1 1/2) (2 1/2)))\n");
  write_file(temp_path("fam.json"), "[[0],[1],[2]]\n");
  RunResult res = run_cli("check-obstruction " + temp_path("nu.sm") + " --family " +
                          temp_path("fam.json") +
                          " --epsilon 1 --delta 3/4 --t 3 --json");
  CHECK(res.exit_code == 1);
  CHECK(res.out.find("\"kind\": \"check-obstruction\"") != std::string::npos);
  CHECK(res.out.find("\"outcome\": \"obstruction\"") != std::string::npos);
  CHECK(res.out.find("\"minUnionValue\"") != std::string::npos);

  // a failing family exits 0 with a witness
  write_file(temp_path("fam2.json"), "{\"family\": [[0]]}\n");
  RunResult res2 = run_cli("check-obstruction " + temp_path("nu.sm") + " --family " +
                           temp_path("fam2.json") + " --epsilon 1 --delta 3/4 --t 1");
  CHECK(res2.exit_code == 0);
}

TEST_CASE("build subcommands emit parsable text") {
  RunResult eu = run_cli("build erdos-ulam --length 6");
  CHECK(eu.exit_code == 0);
  CHECK(eu.out.find("(erdos-ulam (1 1 1 1 1 1))") == 0);
  RunResult dl = run_cli("build interval-dl --iota 0,1,3,6 --window 16");
  CHECK(dl.exit_code == 0);
  CHECK(dl.out.find("(sup (qmix 1 ((1 (rowlift") == 0);
  RunResult mz = run_cli("build mz-partition --depth 4 --window 64");
  CHECK(mz.exit_code == 0);
  CHECK(mz.out.find("m[3] = 48") != std::string::npos);
  RunResult ad = run_cli("build ad-family --seeds 0101,0100 --depth 6 --window 512");
  CHECK(ad.exit_code == 0);
  RunResult unknown = run_cli("build nothing-of-the-sort");
  CHECK(unknown.exit_code == 2);
}

TEST_CASE("norm-profile lists the tail values") {
  write_file(temp_path("c.sm"), "(capped 1/2 1 (block 0 4))\n");
  RunResult res = run_cli("norm-profile " + temp_path("c.sm") +
                          " --set \"(set 0 1 2)\" --depth 3");
  CHECK(res.exit_code == 0);
  CHECK(res.out == "0\t1/2\n1\t1/2\n2\t1/2\n3\t0\n");
}

TEST_CASE("pathology subcommand reports the gap") {
  write_file(temp_path("p.sm"), "(ceilcount 1 2 (set 0 1 2))\n");
  RunResult res = run_cli("pathology " + temp_path("p.sm") + " --set \"(set 0 1 2)\"");
  CHECK(res.exit_code == 1);  // gap 1/2 exceeds the tolerance: pathological
  CHECK(res.out.find("gap 1/2") != std::string::npos);
  write_file(temp_path("m.sm"), "(measure ((0 1/2) (1 1/2)))\n");
  RunResult ok = run_cli("pathology " + temp_path("m.sm") + " --set \"(set 0 1)\" --json");
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("\"kind\": \"pathology\"") != std::string::npos);
}

TEST_CASE("blockize and normalize-supports round trip through files") {
  write_file(temp_path("nu2.sm"), "(measure ((0 1) (2 1) (3 1)))\n");
  RunResult res = run_cli("blockize " + temp_path("nu2.sm") + " --cuts 1,3");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("(restrict (measure ((0 1) (2 1) (3 1))) (block 0 2))") !=
        std::string::npos);

  write_file(temp_path("mus.sm"),
             "(measure ((0 1) (1 1)))\n(measure ((4 1) (5 1)))\n(measure ((2 1) (6 1)))\n");
  RunResult norm = run_cli("normalize-supports " + temp_path("mus.sm") + " --window 7");
  CHECK(norm.exit_code == 0);
  CHECK(norm.out.find("[0,2) [2,6) [6,7)") != std::string::npos);
}

TEST_CASE("check-sdl and check-ksf polarity") {
  write_file(temp_path("phi.sm"),
             "(sup (measure ((0 1/4) (1 1/4))) (measure ((2 1/4) (3 1/4))))\n");
  write_file(temp_path("sfam.json"), "[[0],[2]]\n");
  RunResult pass = run_cli("check-sdl " + temp_path("phi.sm") + " --family " +
                           temp_path("sfam.json") + " --c 1/2 --epsilon 1");
  CHECK(pass.exit_code == 0);

  write_file(temp_path("count.sm"), "(measure ((0 1) (2 1) (4 1) (6 1)))\n");
  write_file(temp_path("kfam.json"), "[[0],[2],[4],[6]]\n");
  RunResult viol = run_cli("check-ksf " + temp_path("count.sm") + " --family " +
                           temp_path("kfam.json") +
                           " --cuts 1,3,5 --epsilon 2 --maxlen 3");
  CHECK(viol.exit_code == 1);
  RunResult clean = run_cli("check-ksf " + temp_path("count.sm") + " --family " +
                            temp_path("kfam.json") +
                            " --cuts 1,3,5 --epsilon 100 --maxlen 3");
  CHECK(clean.exit_code == 0);
}

TEST_CASE("refine-dstrong defaults are flagged") {
  write_file(temp_path("gd.sm"),
             "(sup (measure ((0 1/8) (1 1/8))) (measure ((2 1/8) (3 1/8))))\n");
  RunResult res = run_cli("refine-dstrong " + temp_path("gd.sm") + " --levels 3");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("toolkit convention") != std::string::npos);
  CHECK(res.out.find("(sup ") != std::string::npos);
}

TEST_CASE("json output is byte-identical across runs") {
  write_file(temp_path("d.sm"), "(sup (capped 1/2 1 (block 0 4)) (measure ((5 1/3))))\n");
  RunResult a = run_cli("eval " + temp_path("d.sm") + " --set \"(set 0 5)\" --json");
  RunResult b = run_cli("eval " + temp_path("d.sm") + " --set \"(set 0 5)\" --json");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
}
