#include <higgsstrat/cli.hpp>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return higgsstrat::cli::run(args, std::cout, std::cerr);
}
