#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>

#include "minioo/driver.hpp"

namespace {

bool want_color(bool no_color_flag, bool to_tty) {
    if (no_color_flag) return false;
    const char* env = std::getenv("MINIOO_COLOR");
    if (env && std::string(env) == "0") return false;
    return to_tty;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MiniOO: interpreter and structural type checker"};
    app.require_subcommand(1);

    bool no_color = false;
    int max_errors = 20;
    app.add_flag("--no-color", no_color, "disable ANSI colors");
    app.add_option("--max-errors", max_errors, "stop after N diagnostics")->default_val(20);

    std::string run_file, check_file, check_binding, test_dir;

    CLI::App* run = app.add_subcommand("run", "run a program's main action");
    run->add_option("file", run_file, "program file")->required();

    CLI::App* check = app.add_subcommand("check", "print inferred binding types");
    check->add_option("file", check_file, "program file")->required();
    check->add_option("--binding", check_binding, "show a single binding");

    CLI::App* test = app.add_subcommand("test", "run a golden-case directory");
    test->add_option("dir", test_dir, "directory of .moo cases")->required();

    CLI::App* repl = app.add_subcommand("repl", "interactive session");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 3;  // usage errors exit 3
    }

    minioo::DriverOptions opts;
    opts.max_errors = max_errors;
    opts.color = want_color(no_color, isatty(fileno(stderr)));

    try {
        if (run->parsed()) return minioo::cmd_run(run_file, std::cout, std::cerr, opts);
        if (check->parsed())
            return minioo::cmd_check(check_file, check_binding, std::cout, std::cerr, opts);
        if (test->parsed()) {
            minioo::DriverOptions topts = opts;
            topts.color = want_color(no_color, isatty(fileno(stdout)));
            return minioo::cmd_test(test_dir, std::cout, topts);
        }
        if (repl->parsed())
            return minioo::repl_loop(std::cin, std::cout, std::cerr, isatty(fileno(stdin)),
                                     opts.color);
    } catch (const std::exception& e) {
        std::cerr << "minioo: " << e.what() << "\n";
        return 3;
    }
    return 3;
}
