#include "overdx/cli.hpp"

int main(int argc, char** argv) {
  return overdx::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
