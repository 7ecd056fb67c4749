#include "epicost/cli.hpp"

int main(int argc, char** argv) { return epicost::run_cli(argc, argv); }
