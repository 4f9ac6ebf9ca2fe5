#include "friable/cli.hpp"

int main(int argc, char** argv) { return friable::cli::run_command(argc, argv); }
