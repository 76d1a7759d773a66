#include <vector>

#include "vrb/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return vrb::cli::run_command(args);
}
