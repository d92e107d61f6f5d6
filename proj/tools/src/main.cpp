#include <exception>
#include <iostream>

#include "stc/cli/app.hpp"

int main(int argc, char** argv) {
  try {
    return stc::cli::run_app(argc, argv, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
