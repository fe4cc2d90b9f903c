#include <string>
#include <vector>

#include "escna/cli_app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return escna::cli::run_cli(std::move(args));
}
