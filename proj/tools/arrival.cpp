#include <iostream>
#include <vector>

#include "arrival/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return arrival::dispatch(args, std::cout, std::cerr);
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 70;
    }
}
