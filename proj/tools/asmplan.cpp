#include "asmplan/cli.hpp"

int main(int argc, char** argv) { return asmplan::run_cli(argc, argv); }
