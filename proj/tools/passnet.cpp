#include "passnet/cli/commands.hpp"

int main(int argc, char** argv) { return passnet::cli::run_cli(argc, argv); }
