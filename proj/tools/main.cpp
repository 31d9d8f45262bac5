#include <string>
#include <vector>

#include "actirehab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return actirehab::cli::run(args);
}
