#include <string>
#include <vector>

#include "inner_cli/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return inner::cli::run(args);
}
