#include "contagion/cli.hpp"

int main(int argc, char** argv) { return contagion::run_cli(argc, argv); }
