#include <string>
#include <vector>

#include <trait_tuner/cli.hpp>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return trait_tuner::cli::dispatch(std::move(args));
}
