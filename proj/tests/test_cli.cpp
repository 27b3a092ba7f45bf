#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "minioo/ast_print.hpp"
#include "minioo/driver.hpp"

using namespace minioo;

namespace {

std::string corpus(const std::string& name) {
    return std::string(MINIOO_CORPUS_DIR) + "/" + name;
}

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cmd(const std::string& path) {
    std::ostringstream out, err;
    int code = cmd_run(path, out, err);
    return {code, out.str(), err.str()};
}

CliResult check_cmd(const std::string& path, const std::string& binding = "") {
    std::ostringstream out, err;
    int code = cmd_check(path, binding, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(CmdRun, ShapesGolden) {
    CliResult r = run_cmd(corpus("shapes.moo"));
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out,
              "Drawing a Rectangle at:(10,20), width 5, height 6\n"
              "Drawing a Rectangle at:(110,120), width 5, height 6\n"
              "Drawing a Circle at:(15,25), radius 8\n"
              "Drawing a Circle at:(115,125), radius 8\n");
}

TEST(CmdRun, AbstractFixExitsOneNamingGetX) {
    CliResult r = run_cmd(corpus("abstract_fix.moo"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("getX"), std::string::npos);
    EXPECT_NE(r.err.find("[MissingField]"), std::string::npos);
}

TEST(CmdRun, SelfPrintFixExitsTwo) {
    CliResult r = run_cmd(corpus("self_print_fix.moo"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("[PrematureSelfAccess]"), std::string::npos);
    EXPECT_NE(r.err.find("runtime fault"), std::string::npos);
}

TEST(CmdRun, MissingMainIsAnError) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "minioo_nomain";
    fs::create_directories(dir);
    std::ofstream(dir / "case.moo") << "let xv = 1\n";
    CliResult r = run_cmd((dir / "case.moo").string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("main"), std::string::npos);
    fs::remove_all(dir);
}

TEST(CmdCheck, ColoredPointBinding) {
    CliResult r = check_cmd(corpus("colored_oop.moo"), "colored_point");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out,
              "colored_point :: (Num a, HasField GetX r (IO a1), Show a1) => a -> String -> r "
              "-> IO Record ( GetColor :=: IO String :*: GetX :=: IO a :*: MoveX :=: (a -> IO "
              "()) :*: Print :=: IO () :*: VarX :=: Ref a :*: HNil )\n");
}

TEST(CmdCheck, DuplicateLabelDiagnostic) {
    CliResult r = check_cmd(corpus("dup_label.moo"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("[DuplicateLabel]"), std::string::npos);
}

TEST(CmdCheck, InfiniteTypeDiagnostic) {
    CliResult r = check_cmd(corpus("infinite_type.moo"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("[InfiniteType]"), std::string::npos);
    EXPECT_NE(r.err.find("cannot construct the infinite type"), std::string::npos);
}

TEST(CmdTest, FullCorpusPasses) {
    std::ostringstream out;
    int code = cmd_test(MINIOO_CORPUS_DIR, out);
    EXPECT_EQ(code, 0) << out.str();
    EXPECT_NE(out.str().find("PASS shapes.moo"), std::string::npos);
}

TEST(CmdTest, IsIdempotent) {
    std::ostringstream a, b;
    int ca = cmd_test(MINIOO_CORPUS_DIR, a);
    int cb = cmd_test(MINIOO_CORPUS_DIR, b);
    EXPECT_EQ(ca, cb);
    EXPECT_EQ(a.str(), b.str());
}

TEST(CmdTest, OneByteDifferenceFailsWithDiff) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "minioo_tampered";
    fs::create_directories(dir);
    std::ofstream(dir / "case.moo") << "let main = print 1\n";
    std::ofstream(dir / "case.out") << "2\n";
    std::ostringstream out;
    int code = cmd_test(dir.string(), out);
    EXPECT_EQ(code, 1);
    EXPECT_NE(out.str().find("FAIL case.moo"), std::string::npos);
    EXPECT_NE(out.str().find("- 2"), std::string::npos);
    EXPECT_NE(out.str().find("+ 1"), std::string::npos);
    fs::remove_all(dir);
}

TEST(CmdTest, EmptyDirectoryIsAVacuousPass) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "minioo_empty";
    fs::create_directories(dir);
    std::ostringstream out;
    int code = cmd_test(dir.string(), out);
    EXPECT_EQ(code, 0);
    EXPECT_NE(out.str().find("0 cases"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Repl, TypeQueryIsSugared) {
    std::ostringstream out, err;
    ReplSession s(out, err);
    s.feed("label getX");
    s.feed(":t \\o -> o # getX");
    EXPECT_EQ(out.str(), "HasField GetX r a => r -> a\n");
    EXPECT_TRUE(err.str().empty()) << err.str();
}

TEST(Repl, PointSession) {
    std::ostringstream out, err;
    ReplSession s(out, err);
    s.feed("label varX");
    s.feed("label getX");
    s.feed("label moveX");
    s.feed(
        "let point = do { x <- newRef 0; return ((varX = x) .*. (getX = readRef x) .*. (moveX "
        "= \\d -> modifyRef x (\\v -> v + d)) .*. emptyRecord) }");
    s.feed("p <- point");
    s.feed("p # getX");
    s.feed("(p # moveX) 3");
    s.feed("p # getX");
    EXPECT_EQ(out.str(), "0\n3\n");
    EXPECT_TRUE(err.str().empty()) << err.str();
}

TEST(Repl, QuitEndsTheSession) {
    std::ostringstream out, err;
    ReplSession s(out, err);
    EXPECT_TRUE(s.feed("1 + 1"));
    EXPECT_FALSE(s.feed(":quit"));
    EXPECT_EQ(out.str(), "2\n");
}

TEST(Repl, ErrorsDoNotEndTheSession) {
    std::ostringstream out, err;
    ReplSession s(out, err);
    EXPECT_TRUE(s.feed("undefined_name"));
    EXPECT_NE(err.str().find("[UnboundName]"), std::string::npos);
    EXPECT_TRUE(s.feed("print 1"));
    EXPECT_EQ(out.str(), "1\n");
}

// Feeding a corpus file's declarations line-by-line to the REPL and then
// invoking main matches batch evaluation.
TEST(Repl, MatchesBatchSemantics) {
    for (std::string name : {"first_oop.moo", "selfish_oop.moo", "diamond_oop.moo"}) {
        CliResult batch = run_cmd(corpus(name));
        ASSERT_EQ(batch.code, 0) << name;

        NameTable names;
        Program pre = parse_program(read_file(corpus("prelude.moo")), "prelude", names);
        Program prog = parse_program(read_file(corpus(name)), name, names);

        std::ostringstream out, err, live;
        ReplSession session(out, err, false, &live);
        for (auto& d : pre.decls) ASSERT_TRUE(session.feed(decl_to_source(d)));
        for (auto& d : prog.decls) ASSERT_TRUE(session.feed(decl_to_source(d)));
        session.feed("main");
        EXPECT_EQ(live.str(), batch.out) << name;
        EXPECT_TRUE(err.str().empty()) << name << ": " << err.str();
    }
}

// Exit-code contract, including usage errors from the installed binary.
TEST(ExitCodes, Contract) {
    EXPECT_EQ(run_cmd(corpus("shapes.moo")).code, 0);
    EXPECT_EQ(run_cmd(corpus("abstract_fix.moo")).code, 1);
    EXPECT_EQ(run_cmd(corpus("self_print_fix.moo")).code, 2);
#ifdef MINIOO_BIN
    int rc = std::system((std::string(MINIOO_BIN) + " bogus-subcommand >/dev/null 2>&1").c_str());
    EXPECT_EQ(WEXITSTATUS(rc), 3);
#endif
}
