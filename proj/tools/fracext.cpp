#include "fracext/cli.hpp"

int main(int argc, char** argv) { return fracext::cli::main_entry(argc, argv); }
