#include "sdflow_cli/cli.hpp"

int main(int argc, char** argv) { return sdflow::cli::main_entry(argc, argv); }
