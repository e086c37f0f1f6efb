#include "srrt/cli/cli.hpp"

int main(int argc, char** argv) { return srrt::cli::main(argc, argv); }
