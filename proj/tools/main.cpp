#include "cli.hpp"

int main(int argc, char** argv) { return roughflow::cli::main_entry(argc, argv); }
