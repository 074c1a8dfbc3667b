#include "cournot_cli/cli.hpp"

int main(int argc, char** argv) { return cournot::cli::run(argc, argv); }
