#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "hgd/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return hgd::execute(hgd::parse_invocation(args));
  } catch (const hgd::CliUsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << hgd::usage_text();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
