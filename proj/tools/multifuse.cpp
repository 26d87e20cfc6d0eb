#include <vector>
#include <string>

#include "multifuse/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return multifuse::cli::run(args);
}
